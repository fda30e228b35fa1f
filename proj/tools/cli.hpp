#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace stochtaylor::cli {

// Runs one command line (argv[0] excluded) and returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1/64", "0.25" or "3" as a double; rejects zero denominators and junk.
double parse_fraction(const std::string& text);
// Comma-separated fractions.
std::vector<double> parse_fraction_list(const std::string& text);
// "0..8", "0,1,2,6" or a mix such as "0..2,6".
std::vector<int> parse_int_set(const std::string& text);
// "key=value" pairs with numeric values.
std::map<std::string, double> parse_params(const std::vector<std::string>& items);

// First 16 hex digits of the SHA-256 of "command;key=value;..." with keys sorted.
std::string config_hash(const std::string& command, const std::map<std::string, std::string>& config);

}  // namespace stochtaylor::cli
