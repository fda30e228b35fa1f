#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/convergence.hpp"
#include "stochtaylor/errors.hpp"
#include "stochtaylor/iterints.hpp"
#include "stochtaylor/model.hpp"
#include "stochtaylor/mserr.hpp"
#include "stochtaylor/noise.hpp"
#include "stochtaylor/oracle.hpp"
#include "stochtaylor/schemes.hpp"

namespace stochtaylor::cli {

namespace {

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t");
  const auto b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ArgumentError("'" + text + "' is not a number");
  return v;
}

long parse_long(const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ArgumentError("'" + text + "' is not an integer");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

IntegralKind parse_kind(const std::string& text) {
  if (text == "ito") return IntegralKind::Ito;
  if (text == "strat" || text == "stratonovich") return IntegralKind::Stratonovich;
  throw ArgumentError("kind must be 'ito' or 'strat', got '" + text + "'");
}

void check_gamma(double g) {
  if (g != 2.0 && g != 2.5 && g != 3.0) throw ArgumentError("gamma must be 2, 2.5 or 3");
}

struct Output {
  std::ostream* stream = nullptr;
  std::unique_ptr<std::ofstream> file;
};

Output open_output(const std::string& path, std::ostream& fallback) {
  Output o;
  if (path.empty() || path == "-") {
    o.stream = &fallback;
    return o;
  }
  o.file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*o.file) throw IoError("cannot open '" + path + "' for writing");
  o.stream = o.file.get();
  return o;
}

void finish_output(Output& o, const std::string& path) {
  o.stream->flush();
  if (!*o.stream) throw IoError("write to '" + (path.empty() ? std::string("stdout") : path) + "' failed");
}

std::string seed_text(const std::optional<std::uint64_t>& seed) { return seed ? std::to_string(*seed) : "none"; }

void csv_header(std::ostream& os, const std::string& command, const std::optional<std::uint64_t>& seed,
                const std::map<std::string, std::string>& config) {
  os << "# stochtaylor version=" << STOCHTAYLOR_VERSION_STRING << "\n";
  os << "# command=" << command << " seed=" << seed_text(seed) << " config_hash=" << config_hash(command, config)
     << "\n";
  os << "# config";
  for (const auto& [k, v] : config) os << ' ' << k << '=' << v;
  os << "\n";
}

nlohmann::json json_header(const std::string& command, const std::optional<std::uint64_t>& seed,
                           const std::map<std::string, std::string>& config) {
  nlohmann::json h;
  h["stochtaylor"] = STOCHTAYLOR_VERSION_STRING;
  h["command"] = command;
  h["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  h["config_hash"] = config_hash(command, config);
  h["config"] = config;
  return nlohmann::json{{"header", h}};
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

SdeModel load_model(const std::string& name, const std::vector<std::string>& params) {
  return builtin_model(name, parse_params(params));
}

// Options shared by several subcommands, kept as raw strings so that parsing errors map to exit code 2.
struct Options {
  std::string family, pattern = "distinct", qs = "0..8", delta, deltas, kind = "ito", model = "linear2d", out,
              components, cstar;
  std::vector<std::string> params, q_overrides;
  int qmax = 0, q = 8, threads = 0, ref_ratio = 32;
  double gamma = 2.0, T = 1.0;
  long paths = 1000, samples = 10000, n_fine = 1L << 14, steps = 0;
  std::uint64_t seed = 0, stream = 0;
};

int cmd_coeffs(const Options& o, std::ostream& out) {
  const WeightFamily family = WeightFamily::parse(o.family);
  require_supported(family);
  const int cap = table_q_cap(family);
  if (o.qmax < 0 || o.qmax > cap)
    throw ArgumentError("qmax " + std::to_string(o.qmax) + " exceeds the cap " + std::to_string(cap) +
                        " for family " + family.str());
  std::string path = o.out;
  if (path.empty()) {
    const char* dir = std::getenv("STOCHTAYLOR_TABLE_DIR");
    const std::filesystem::path base = dir && *dir ? std::filesystem::path(dir) : std::filesystem::path(".");
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    path = (base / table_file_name(family, o.qmax)).string();
  }
  const CoefficientTable table = build_table(family, o.qmax);
  save_table(table, path);
  const std::map<std::string, std::string> config{{"family", family.str()}, {"qmax", std::to_string(o.qmax)}};
  csv_header(out, "coeffs", std::nullopt, config);
  out << "# table=" << path << "\n";
  out << "q,residual\n";
  for (int q = 0; q <= o.qmax; ++q) out << q << ',' << fmt(table.residual_unit(q).get_d()) << "\n";
  return 0;
}

int cmd_plan(const Options& o, std::ostream& out) {
  check_gamma(o.gamma);
  const double delta = parse_fraction(o.delta);
  const double cstar = o.cstar.empty() ? 1.0 : parse_fraction(o.cstar);
  const StepPlan plan = plan_truncation(o.gamma, delta, cstar);
  const std::map<std::string, std::string> config{
      {"gamma", fmt(o.gamma)}, {"delta", o.delta}, {"cstar", fmt(cstar)}};
  csv_header(out, "plan", std::nullopt, config);
  out << "# closed_q=" << plan.closed_q << " j_max=" << plan.j_max << "\n";
  const double target = cstar * std::pow(delta, 2.0 * o.gamma + 1.0);
  out << "family,k,q,worst_error,target\n";
  for (const auto& f : order_families(o.gamma)) {
    const int q = plan.q(f);
    out << f.str() << ',' << f.k() << ',' << q << ',' << fmt(f.k() == 1 ? 0.0 : worst_pattern_error(f, q, delta))
        << ',' << fmt(target) << "\n";
  }
  return 0;
}

StepPlan build_plan(const Options& o, double delta, int m) {
  if (o.q_overrides.empty())
    return plan_truncation(o.gamma, delta, o.cstar.empty() ? 1.0 : parse_fraction(o.cstar), m);
  std::map<WeightFamily, int> levels;
  for (const auto& item : o.q_overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ArgumentError("q override '" + item + "' must look like family=q");
    levels[WeightFamily::parse(item.substr(0, eq))] = static_cast<int>(parse_long(item.substr(eq + 1)));
  }
  return make_plan(o.gamma, delta, levels);
}

int cmd_simulate(const Options& o, std::ostream& out) {
  check_gamma(o.gamma);
  const double delta = parse_fraction(o.delta);
  if (!(o.T > 0.0)) throw ArgumentError("T must be positive");
  const double n = o.T / delta;
  if (std::abs(n - std::round(n)) > 1e-9 * n) throw ArgumentError("delta must divide T");
  const long N = std::lround(n);
  const SdeModel model = load_model(o.model, o.params);
  const SchemeSpec spec{parse_kind(o.kind), o.gamma, build_plan(o, delta, model.m)};
  const Trajectory traj = simulate(model, spec, o.T, N, o.seed, o.stream);

  std::map<std::string, std::string> config{{"model", o.model},   {"params", join(o.params)},
                                            {"gamma", fmt(o.gamma)}, {"kind", o.kind},
                                            {"delta", o.delta},     {"T", fmt(o.T)},
                                            {"stream", std::to_string(o.stream)},
                                            {"cstar", o.cstar.empty() ? "1" : o.cstar},
                                            {"q", join(o.q_overrides)}};
  Output dst = open_output(o.out, out);
  *dst.stream << json_header("simulate", o.seed, config).dump() << "\n";
  for (size_t p = 0; p < traj.states.size(); ++p) {
    nlohmann::json line;
    line["step"] = p;
    line["t"] = traj.times[p];
    line["x"] = std::vector<double>(traj.states[p].data(), traj.states[p].data() + traj.states[p].size());
    *dst.stream << line.dump() << "\n";
  }
  finish_output(dst, o.out);
  return 0;
}

int cmd_converge(const Options& o, std::ostream& out) {
  ConvergenceConfig cfg;
  if (o.kind == "em") {
    cfg.scheme = SchemeKind::EulerMaruyama;
  } else {
    cfg.kind = parse_kind(o.kind);
    check_gamma(o.gamma);
  }
  cfg.gamma = o.gamma;
  cfg.deltas = parse_fraction_list(o.deltas);
  cfg.T = o.T;
  cfg.paths = o.paths;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.ref_ratio = o.ref_ratio;
  if (!o.cstar.empty()) cfg.c_star = parse_fraction(o.cstar);
  const SdeModel model = load_model(o.model, o.params);
  const ConvergenceReport rep = run_convergence(model, cfg);

  const std::map<std::string, std::string> config{
      {"model", o.model}, {"params", join(o.params)}, {"kind", o.kind},   {"gamma", fmt(o.gamma)},
      {"deltas", o.deltas}, {"T", fmt(o.T)},         {"paths", std::to_string(o.paths)},
      {"cstar", o.cstar.empty() ? "auto" : o.cstar}, {"ref_ratio", std::to_string(o.ref_ratio)}};
  Output dst = open_output(o.out, out);
  std::ostream& os = *dst.stream;
  csv_header(os, "converge", o.seed, config);
  if (cfg.scheme == SchemeKind::Taylor)
    os << "# c_star=" << fmt(rep.c_star) << " relaxed=" << (rep.c_star_relaxed ? "yes" : "no") << "\n";
  os << "# slope=" << fmt(rep.slope) << "\n";
  os << "delta,steps,mean_error,std_error,log2_ratio,max_q,j_max\n";
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    os << fmt(r.delta) << ',' << r.steps << ',' << fmt(r.mean_error) << ',' << fmt(r.std_error) << ','
       << (i < rep.log2_ratios.size() ? fmt(rep.log2_ratios[i]) : std::string()) << ',' << r.max_q << ','
       << r.j_max << "\n";
  }
  finish_output(dst, o.out);
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const WeightFamily family = WeightFamily::parse(o.family);
  require_supported(family);
  const ComponentPattern pattern = ComponentPattern::parse(o.pattern, family.k());
  const double delta = o.delta.empty() ? 1.0 : parse_fraction(o.delta);
  std::vector<int> comps;
  for (int label : pattern.labels) comps.push_back(label + 1);
  std::vector<CoupledCase> cases;
  for (int q : parse_int_set(o.qs)) cases.push_back({family, comps, q});
  const auto est = coupled_ms_error(cases, o.samples, o.n_fine, delta, o.seed, o.threads);

  const std::map<std::string, std::string> config{
      {"family", family.str()}, {"pattern", pattern.str()}, {"qs", o.qs}, {"delta", o.delta.empty() ? "1" : o.delta},
      {"samples", std::to_string(o.samples)}, {"n_fine", std::to_string(o.n_fine)}};
  Output dst = open_output(o.out, out);
  std::ostream& os = *dst.stream;
  csv_header(os, "validate", o.seed, config);
  os << "family,pattern,q,exact,mc_estimate,stderr,N_fine,mc_half,bias_ok\n";
  for (const auto& e : est) {
    os << family.str() << ',' << pattern.str() << ',' << e.which.q << ','
       << fmt(exact_error(family, pattern, e.which.q, delta)) << ',' << fmt(e.mean) << ',' << fmt(e.std_error)
       << ',' << e.n_fine << ',' << fmt(e.mean_half) << ',' << (e.bias_ok() ? "yes" : "no") << "\n";
  }
  finish_output(dst, o.out);
  return 0;
}

int cmd_error_table(const Options& o, std::ostream& out) {
  const WeightFamily family = WeightFamily::parse(o.family);
  require_supported(family);
  const ComponentPattern pattern = ComponentPattern::parse(o.pattern, family.k());
  const double delta = parse_fraction(o.delta.empty() ? std::string("1") : o.delta);
  const auto qs = parse_int_set(o.qs);
  const std::map<std::string, std::string> config{{"family", family.str()},
                                                  {"pattern", pattern.str()},
                                                  {"qs", o.qs},
                                                  {"delta", o.delta.empty() ? "1" : o.delta}};
  Output dst = open_output(o.out, out);
  std::ostream& os = *dst.stream;
  csv_header(os, "error-table", std::nullopt, config);
  os << "family,pattern,q,exact,bound,delta_power\n";
  for (int q : qs) {
    const ErrorReport r = error_report(family, pattern, q, delta);
    os << family.str() << ',' << pattern.str() << ',' << q << ',' << (r.exact ? fmt(*r.exact) : std::string())
       << ',' << fmt(r.bound) << ',' << r.delta_power << "\n";
  }
  finish_output(dst, o.out);
  return 0;
}

int cmd_integrals(const Options& o, std::ostream& out) {
  const WeightFamily family = WeightFamily::parse(o.family);
  require_supported(family);
  std::vector<int> comps;
  for (const auto& c : split(o.components, ',')) comps.push_back(static_cast<int>(parse_long(c)));
  if (static_cast<int>(comps.size()) != family.k())
    throw ArgumentError("family " + family.str() + " needs " + std::to_string(family.k()) + " components");
  int m = 1;
  for (int c : comps) {
    if (c < 0) throw ArgumentError("components must be nonnegative");
    m = std::max(m, c);
  }
  const double delta = parse_fraction(o.delta.empty() ? std::string("1") : o.delta);
  const IntegralKind kind = parse_kind(o.kind);
  if (o.q < 0 || o.q > family_q_cap(family)) throw ArgumentError("q is outside the family cap");
  RngStream rng(o.seed, o.stream);
  const NoiseBasis basis = sample_basis(m, basis_reach(family, o.q) + 3, delta, rng);
  const IntegralValue v = kind == IntegralKind::Ito ? ito_family(family, basis, comps, o.q)
                                                    : strat_family(family, basis, comps, o.q);
  const std::map<std::string, std::string> config{{"family", family.str()}, {"components", o.components},
                                                  {"q", std::to_string(o.q)}, {"delta", o.delta.empty() ? "1" : o.delta},
                                                  {"kind", o.kind},         {"stream", std::to_string(o.stream)}};
  Output dst = open_output(o.out, out);
  std::ostream& os = *dst.stream;
  csv_header(os, "integrals", o.seed, config);
  os << "family,components,kind,q,value,conjectural\n";
  os << family.str() << ',' << '"' << o.components << '"' << ',' << o.kind << ',' << o.q << ',' << fmt(v.value) << ','
     << (v.conjectural ? "yes" : "no") << "\n";
  finish_output(dst, o.out);
  return 0;
}

}  // namespace

double parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  double v;
  if (slash == std::string::npos) {
    v = parse_number(text);
  } else {
    const double num = parse_number(text.substr(0, slash));
    const double den = parse_number(text.substr(slash + 1));
    if (den == 0.0) throw ArgumentError("zero denominator in '" + text + "'");
    v = num / den;
  }
  return v;
}

std::vector<double> parse_fraction_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_fraction(item));
  if (out.empty()) throw ArgumentError("empty list");
  return out;
}

std::vector<int> parse_int_set(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<int>(parse_long(item)));
      continue;
    }
    const long a = parse_long(item.substr(0, dots)), b = parse_long(item.substr(dots + 2));
    if (b < a) throw ArgumentError("empty range '" + item + "'");
    if (b - a > 100000) throw ArgumentError("range '" + item + "' is too long");
    for (long v = a; v <= b; ++v) out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ArgumentError("empty list");
  return out;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ArgumentError("parameter '" + item + "' must look like key=value");
    out[item.substr(0, eq)] = parse_fraction(item.substr(eq + 1));
  }
  return out;
}

std::string config_hash(const std::string& command, const std::map<std::string, std::string>& config) {
  std::string canon = command;
  for (const auto& [k, v] : config) canon += ";" + k + "=" + v;
  return sha256_hex(canon).substr(0, 16);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strong Taylor schemes with Legendre-expanded iterated stochastic integrals", "stochtaylor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(STOCHTAYLOR_VERSION_STRING));
  Options o;

  auto* coeffs = app.add_subcommand("coeffs", "Build and store an exact coefficient table");
  coeffs->add_option("--family", o.family, "Weight family, e.g. 000")->required();
  coeffs->add_option("--qmax", o.qmax, "Largest index per dimension")->required();
  coeffs->add_option("--out", o.out, "Table file (default: table directory)");

  auto* plan = app.add_subcommand("plan", "Truncation levels for one step size");
  plan->add_option("--gamma", o.gamma, "Scheme order: 2, 2.5 or 3")->required();
  plan->add_option("--delta", o.delta, "Step size, e.g. 1/64")->required();
  plan->add_option("--cstar", o.cstar, "Accuracy constant (default 1)");

  auto* sim = app.add_subcommand("simulate", "Simulate one path as line-JSON");
  sim->add_option("--model", o.model, "Built-in model")->default_val("linear2d");
  sim->add_option("--param", o.params, "Model parameter key=value (repeatable)");
  sim->add_option("--gamma", o.gamma, "Scheme order")->default_val(2.0);
  sim->add_option("--kind", o.kind, "ito or strat")->default_val("ito");
  sim->add_option("--delta", o.delta, "Step size")->required();
  sim->add_option("--T", o.T, "Time horizon")->default_val(1.0);
  sim->add_option("--seed", o.seed, "RNG seed")->default_val(0);
  sim->add_option("--stream", o.stream, "RNG stream (path id)")->default_val(0);
  sim->add_option("--cstar", o.cstar, "Accuracy constant for the planner");
  sim->add_option("--q", o.q_overrides, "Fixed level family=q (repeatable; disables the planner)");
  sim->add_option("--out", o.out, "Output file (default stdout)");

  auto* conv = app.add_subcommand("converge", "Strong error against a refined coupled reference");
  conv->add_option("--model", o.model, "Built-in model")->default_val("linear2d");
  conv->add_option("--param", o.params, "Model parameter key=value (repeatable)");
  conv->add_option("--kind", o.kind, "ito, strat or em")->default_val("ito");
  conv->add_option("--gamma", o.gamma, "Scheme order")->default_val(2.0);
  conv->add_option("--deltas", o.deltas, "Comma-separated step sizes")->required();
  conv->add_option("--T", o.T, "Time horizon")->default_val(1.0);
  conv->add_option("--paths", o.paths, "Number of paths")->default_val(1000);
  conv->add_option("--seed", o.seed, "RNG seed")->default_val(0);
  conv->add_option("--threads", o.threads, "Worker threads (0: all cores)")->default_val(0);
  conv->add_option("--cstar", o.cstar, "Accuracy constant (default: smallest feasible power of two)");
  conv->add_option("--ref-ratio", o.ref_ratio, "Reference refinement factor")->default_val(32);
  conv->add_option("--out", o.out, "Output file (default stdout)");

  auto* val = app.add_subcommand("validate", "Monte Carlo check of exact truncation errors");
  val->add_option("--family", o.family, "Weight family")->required();
  val->add_option("--pattern", o.pattern, "distinct, equal or a symbol string such as aab")->default_val("distinct");
  val->add_option("--qs", o.qs, "Truncation levels, e.g. 0..2,6")->default_val("0,1,2");
  val->add_option("--samples", o.samples, "Monte Carlo samples")->default_val(10000);
  val->add_option("--nfine", o.n_fine, "Fine partition size")->default_val(1L << 14);
  val->add_option("--delta", o.delta, "Step size (default 1)");
  val->add_option("--seed", o.seed, "RNG seed")->default_val(0);
  val->add_option("--threads", o.threads, "Worker threads (0: all cores)")->default_val(0);
  val->add_option("--out", o.out, "Output file (default stdout)");

  auto* et = app.add_subcommand("error-table", "Exact mean-square truncation errors");
  et->add_option("--family", o.family, "Weight family")->required();
  et->add_option("--pattern", o.pattern, "distinct, equal or a symbol string")->default_val("distinct");
  et->add_option("--qs", o.qs, "Truncation levels")->default_val("0..8");
  et->add_option("--delta", o.delta, "Step size (default 1)");
  et->add_option("--out", o.out, "Output file (default stdout)");

  auto* ints = app.add_subcommand("integrals", "Sample one iterated integral");
  ints->add_option("--family", o.family, "Weight family")->required();
  ints->add_option("--components", o.components, "Comma-separated components, e.g. 1,2")->required();
  ints->add_option("--q", o.q, "Truncation level")->default_val(8);
  ints->add_option("--delta", o.delta, "Step size (default 1)");
  ints->add_option("--kind", o.kind, "ito or strat")->default_val("ito");
  ints->add_option("--seed", o.seed, "RNG seed")->default_val(0);
  ints->add_option("--stream", o.stream, "RNG stream")->default_val(0);
  ints->add_option("--out", o.out, "Output file (default stdout)");

  for (auto* sub : {coeffs, plan, sim, et, ints})
    sub->add_option("--threads", o.threads, "Worker threads (single-threaded command)")->default_val(0);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << STOCHTAYLOR_VERSION_STRING << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Argument);
  }

  try {
    if (coeffs->parsed()) return cmd_coeffs(o, out);
    if (plan->parsed()) return cmd_plan(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (conv->parsed()) return cmd_converge(o, out);
    if (val->parsed()) return cmd_validate(o, out);
    if (et->parsed()) return cmd_error_table(o, out);
    if (ints->parsed()) return cmd_integrals(o, out);
  } catch (const PlanningError& e) {
    err << "planning failed for family " << e.family() << ": " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const BlowUpError& e) {
    err << "blow-up at step " << e.step() << ": " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  }
  return static_cast<int>(ErrorKind::Argument);
}

}  // namespace stochtaylor::cli
