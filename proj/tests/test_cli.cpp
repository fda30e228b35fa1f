#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"
#include "stochtaylor/errors.hpp"

using stochtaylor::cli::run_cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& l : lines(text))
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("stochtaylor_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void check_header(const std::string& text, const std::string& command) {
  const auto ls = lines(text);
  REQUIRE(ls.size() >= 3);
  CHECK(ls[0].rfind("# stochtaylor version=", 0) == 0);
  CHECK(ls[1].rfind("# command=" + command + " seed=", 0) == 0);
  CHECK(ls[1].find(" config_hash=") != std::string::npos);
  CHECK(ls[2].rfind("# config ", 0) == 0);
}

}  // namespace

TEST_CASE("argument parsing helpers") {
  using namespace stochtaylor::cli;
  CHECK(parse_fraction("1/64") == 1.0 / 64.0);
  CHECK(parse_fraction("0.25") == 0.25);
  CHECK(parse_fraction("3") == 3.0);
  CHECK_THROWS_AS(parse_fraction("1/0"), stochtaylor::ArgumentError);
  CHECK_THROWS_AS(parse_fraction("abc"), stochtaylor::ArgumentError);
  CHECK_THROWS_AS(parse_fraction("1/2x"), stochtaylor::ArgumentError);
  CHECK(parse_fraction_list("1/8,1/16") == std::vector<double>{0.125, 0.0625});
  CHECK(parse_int_set("0..3") == std::vector<int>{0, 1, 2, 3});
  CHECK(parse_int_set("0..2,6") == std::vector<int>{0, 1, 2, 6});
  CHECK_THROWS_AS(parse_int_set("3..1"), stochtaylor::ArgumentError);
  CHECK(parse_params({"sigma=0.5", "x1=2"}) == std::map<std::string, double>{{"sigma", 0.5}, {"x1", 2.0}});
  CHECK_THROWS_AS(parse_params({"sigma"}), stochtaylor::ArgumentError);
  const std::map<std::string, std::string> a{{"b", "2"}, {"a", "1"}};
  CHECK(config_hash("x", a).size() == 16);
  CHECK(config_hash("x", a) == config_hash("x", {{"a", "1"}, {"b", "2"}}));
  CHECK(config_hash("x", a) != config_hash("y", a));
}

TEST_CASE("coeffs command") {
  const auto dir = scratch("coeffs");
  const auto file = dir / "t.fltable";
  auto r = run({"coeffs", "--family", "000", "--qmax", "6", "--out", file.string()});
  REQUIRE(r.code == 0);
  check_header(r.out, "coeffs");
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == "q,residual");
  const double last = std::stod(split(rows.back())[1]);
  CHECK(std::abs(last - 0.019553857606871314) < 1e-15);
  CHECK(slurp(file).rfind("FLTABLE v1 family=000 qmax=6\n", 0) == 0);

  r = run({"coeffs", "--family", "0", "--qmax", "0", "--out", (dir / "one").string()});
  CHECK(r.code == 0);
  const auto body = lines(slurp(dir / "one"));
  REQUIRE(body.size() == 4);
  CHECK(body[1] == "0 2/1");

  CHECK(run({"coeffs", "--family", "000000", "--qmax", "9", "--out", (dir / "x").string()}).code == 2);
  CHECK(run({"coeffs", "--family", "3", "--qmax", "1"}).code == 2);
  CHECK(run({"coeffs", "--family", "00", "--qmax", "1", "--out", (dir / "missing" / "x").string()}).code == 5);

  // Without --out the table lands in the table directory.
  ::setenv("STOCHTAYLOR_TABLE_DIR", dir.c_str(), 1);
  CHECK(run({"coeffs", "--family", "01", "--qmax", "3"}).code == 0);
  ::unsetenv("STOCHTAYLOR_TABLE_DIR");
  CHECK(fs::exists(dir / "fl_01_q3.fltable"));
  fs::remove_all(dir);
}

TEST_CASE("plan command") {
  auto r = run({"plan", "--gamma", "3", "--delta", "1/4", "--cstar", "1"});
  REQUIRE(r.code == 0);
  check_header(r.out, "plan");
  std::map<std::string, int> q3, q2;
  for (const auto& row : data_rows(r.out)) {
    const auto f = split(row);
    if (f[0] != "family") q3[f[0]] = std::stoi(f[2]);
  }
  CHECK(q3.at("00") == 128);
  CHECK(q3.size() == 20);
  r = run({"plan", "--gamma", "2", "--delta", "1/4"});
  REQUIRE(r.code == 0);
  for (const auto& row : data_rows(r.out)) {
    const auto f = split(row);
    if (f[0] != "family") q2[f[0]] = std::stoi(f[2]);
  }
  for (const auto& [f, q] : q2) {
    if (q3.at(f) > 0) CHECK(q < q3.at(f));
  }
  CHECK(run({"plan", "--gamma", "3", "--delta", "0"}).code == 2);
  CHECK(run({"plan", "--gamma", "1", "--delta", "1/4"}).code == 2);
  r = run({"plan", "--gamma", "3", "--delta", "1/64"});
  CHECK(r.code == 3);
  CHECK(r.err.find("family") != std::string::npos);
}

TEST_CASE("simulate command") {
  const auto dir = scratch("simulate");
  const std::vector<std::string> base{"simulate", "--model", "gbm", "--gamma", "2.5", "--delta", "1/64", "--seed", "1"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", (dir / "a.jsonl").string()});
  b.insert(b.end(), {"--out", (dir / "b.jsonl").string()});
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  const auto text = slurp(dir / "a.jsonl");
  CHECK(text == slurp(dir / "b.jsonl"));
  const auto ls = lines(text);
  REQUIRE(ls.size() == 66);
  CHECK(ls[0].find("\"header\"") != std::string::npos);
  CHECK(ls[0].find("\"seed\":1") != std::string::npos);
  CHECK(ls[0].find("\"config_hash\"") != std::string::npos);
  CHECK(ls[0].find("\"stochtaylor\"") != std::string::npos);
  CHECK(ls[1].rfind("{\"step\":0", 0) == 0);

  auto strat = run({"simulate", "--model", "linear2d", "--kind", "strat", "--delta", "1/4", "--seed", "2"});
  CHECK(strat.code == 0);
  CHECK(lines(strat.out).size() == 6);
  auto fixed = run({"simulate", "--model", "linear2d", "--gamma", "3", "--delta", "1/8", "--q", "00=16", "--q", "000=4"});
  CHECK(fixed.code == 0);

  CHECK(run({"simulate", "--model", "nope", "--delta", "1/4"}).code == 2);
  CHECK(run({"simulate", "--model", "gbm", "--delta", "1/4", "--param", "bogus=1"}).code == 2);
  CHECK(run({"simulate", "--model", "gbm", "--delta", "1/4", "--kind", "weird"}).code == 2);
  CHECK(run({"simulate", "--model", "gbm", "--delta", "1/4", "--out", (dir / "no" / "x").string()}).code == 5);
  auto blow = run({"simulate", "--model", "scalar", "--param", "lambda=1e80", "--param", "b=0", "--delta", "1/2", "--T",
                   "5"});
  CHECK(blow.code == 4);
  CHECK(blow.err.find("step") != std::string::npos);
  CHECK(run({"simulate", "--model", "linear2d", "--gamma", "3", "--delta", "1/64"}).code == 3);
  fs::remove_all(dir);
}

TEST_CASE("error-table command") {
  auto r = run({"error-table", "--family", "00", "--pattern", "distinct", "--qs", "0..8", "--delta", "1"});
  REQUIRE(r.code == 0);
  check_header(r.out, "error-table");
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "family,pattern,q,exact,bound,delta_power");
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i]);
    const int q = std::stoi(f[2]);
    CHECK(std::abs(std::stod(f[3]) - 1.0 / (4.0 * (2.0 * q + 1.0))) < 1e-15);
    CHECK(f[5] == "2");
  }
  r = run({"error-table", "--family", "0000", "--pattern", "aabc", "--qs", "1"});
  REQUIRE(r.code == 0);
  CHECK(split(data_rows(r.out)[1])[3].empty());
  CHECK(run({"error-table", "--family", "00", "--pattern", "abc"}).code == 2);
}

TEST_CASE("validate command") {
  auto r = run({"validate", "--family", "00", "--qs", "0,1", "--samples", "2000", "--nfine", "512", "--seed", "4",
                "--threads", "1"});
  REQUIRE(r.code == 0);
  check_header(r.out, "validate");
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "family,pattern,q,exact,mc_estimate,stderr,N_fine,mc_half,bias_ok");
  const auto f = split(rows[2]);
  CHECK(std::abs(std::stod(f[4]) - 1.0 / 12.0) < 4.0 * std::stod(f[5]) + 1e-3);
  CHECK(f[6] == "512");
  CHECK(run({"validate", "--family", "00", "--samples", "1"}).code == 2);
}

TEST_CASE("integrals command") {
  auto r = run({"integrals", "--family", "000000", "--components", "1,1,1,1,1,1", "--q", "1", "--kind", "strat"});
  REQUIRE(r.code == 0);
  check_header(r.out, "integrals");
  const auto f = split(data_rows(r.out)[1]);
  CHECK(f.back() == "yes");
  auto a = run({"integrals", "--family", "00", "--components", "1,2", "--seed", "5"});
  auto b = run({"integrals", "--family", "00", "--components", "1,2", "--seed", "5"});
  CHECK(a.out == b.out);
  CHECK(run({"integrals", "--family", "00", "--components", "1"}).code == 2);
}

TEST_CASE("converge command") {
  auto r = run({"converge", "--model", "linear2d", "--kind", "em", "--deltas", "1/4,1/8,1/16", "--paths", "50", "--seed",
                "7", "--threads", "1", "--ref-ratio", "4"});
  REQUIRE(r.code == 0);
  check_header(r.out, "converge");
  CHECK(r.out.find("# slope=") != std::string::npos);
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "delta,steps,mean_error,std_error,log2_ratio,max_q,j_max");
  // Results do not depend on the thread count.
  auto r2 = run({"converge", "--model", "linear2d", "--kind", "em", "--deltas", "1/4,1/8,1/16", "--paths", "50",
                 "--seed", "7", "--threads", "2", "--ref-ratio", "4"});
  CHECK(data_rows(r2.out) == rows);
  CHECK(run({"converge", "--deltas", "1/4"}).code == 2);

  auto taylor = run({"converge", "--model", "linear2d", "--gamma", "2", "--deltas", "1/4,1/8", "--paths", "10",
                     "--seed", "1", "--threads", "1", "--ref-ratio", "4"});
  REQUIRE(taylor.code == 0);
  CHECK(taylor.out.find("# c_star=") != std::string::npos);
  CHECK(taylor.out.find(" relaxed=") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"plan", "--gamma", "3"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
