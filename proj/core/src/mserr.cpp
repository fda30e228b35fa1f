#include "stochtaylor/mserr.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/errors.hpp"
#include "stochtaylor/legendre.hpp"

namespace stochtaylor {

bool ComponentPattern::is_distinct() const {
  for (int r = 0; r < k(); ++r)
    if (labels[r] != r) return false;
  return true;
}

bool ComponentPattern::is_all_equal() const {
  return std::all_of(labels.begin(), labels.end(), [](int v) { return v == 0; });
}

std::string ComponentPattern::str() const {
  if (is_distinct()) return "distinct";
  if (is_all_equal()) return "equal";
  std::string s;
  for (int v : labels) s.push_back(static_cast<char>('a' + v));
  return s;
}

ComponentPattern ComponentPattern::distinct(int k) {
  ComponentPattern p;
  p.labels.resize(k);
  std::iota(p.labels.begin(), p.labels.end(), 0);
  return p;
}

ComponentPattern ComponentPattern::all_equal(int k) {
  ComponentPattern p;
  p.labels.assign(k, 0);
  return p;
}

ComponentPattern ComponentPattern::from_components(std::span<const int> components) {
  ComponentPattern p;
  std::vector<int> seen;
  for (int c : components) {
    auto it = std::find(seen.begin(), seen.end(), c);
    if (it == seen.end()) {
      p.labels.push_back(static_cast<int>(seen.size()));
      seen.push_back(c);
    } else {
      p.labels.push_back(static_cast<int>(it - seen.begin()));
    }
  }
  return p;
}

ComponentPattern ComponentPattern::parse(std::string_view text, int k) {
  if (k < 1 || k > 6) throw ArgumentError("pattern length must be 1..6");
  if (text == "distinct") return distinct(k);
  if (text == "equal") return all_equal(k);
  if (static_cast<int>(text.size()) != k)
    throw ArgumentError("pattern '" + std::string(text) + "' does not have " + std::to_string(k) + " symbols");
  std::vector<int> symbols(text.begin(), text.end());
  return from_components(symbols);
}

bool pattern_supported(const ComponentPattern& pattern) {
  return pattern.k() <= 3 || pattern.is_distinct() || pattern.is_all_equal();
}

std::vector<ComponentPattern> supported_patterns(int k) {
  std::vector<ComponentPattern> out;
  if (k <= 3) {
    // Enumerate restricted growth strings.
    std::vector<int> labels(k, 0);
    std::function<void(int, int)> rec = [&](int r, int next) {
      if (r == k) {
        out.push_back(ComponentPattern{labels});
        return;
      }
      for (int v = 0; v <= next; ++v) {
        labels[r] = v;
        rec(r + 1, std::max(next, v + 1));
      }
    };
    rec(0, 0);
  } else {
    out.push_back(ComponentPattern::distinct(k));
    out.push_back(ComponentPattern::all_equal(k));
  }
  return out;
}

namespace {

void check_family_pattern(const WeightFamily& family, const ComponentPattern& pattern) {
  require_supported(family);
  if (pattern.k() != family.k())
    throw ArgumentError("pattern length " + std::to_string(pattern.k()) + " does not match family " + family.str());
  if (!pattern_supported(pattern))
    throw ArgumentError("pattern '" + pattern.str() + "' is not supported for " + std::to_string(family.k()) +
                        "-fold integrals");
}

// Exact shell sums of the banded two-level coefficients.
struct PairShells {
  std::map<std::pair<int, int>, mpq_class> cbar;
  std::vector<mpq_class> cum_sq;     // sum of C^2 over max(j1, j2) <= q
  std::vector<mpq_class> cum_cross;  // sum of C_{j2 j1} C_{j1 j2} over the same box
};

// C_a C_b at delta = 1 where b is a or its transpose, so the root factor is rational.
mpq_class unit_product(const WeightFamily& f, int j1, int j2, const mpq_class& ca, const mpq_class& cb) {
  mpz_class den = 1;
  den <<= 2 * (f.k() + f.sum_l());
  mpq_class out = mpq_class(mpz_class((2 * j1 + 1) * (2 * j2 + 1)), den) * ca * cb;
  out.canonicalize();
  return out;
}

std::mutex& pair_mutex() {
  static std::mutex mu;
  return mu;
}

const mpq_class& pair_cbar(PairShells& s, const WeightFamily& f, int j1, int j2) {
  auto key = std::make_pair(j1, j2);
  auto it = s.cbar.find(key);
  if (it != s.cbar.end()) return it->second;
  return s.cbar.emplace(key, barred_coefficient_pair(f, j1, j2)).first->second;
}

PairShells& pair_shells(const WeightFamily& f, int q) {
  static std::map<WeightFamily, PairShells> all;
  PairShells& s = all[f];
  const int band = f.l[0] + f.l[1] + 1;
  while (static_cast<int>(s.cum_sq.size()) <= q) {
    const int shell = static_cast<int>(s.cum_sq.size());
    mpq_class sq = s.cum_sq.empty() ? mpq_class(0) : s.cum_sq.back();
    mpq_class cross = s.cum_cross.empty() ? mpq_class(0) : s.cum_cross.back();
    for (int other = std::max(0, shell - band); other <= shell; ++other) {
      for (int swap = 0; swap < (other == shell ? 1 : 2); ++swap) {
        const int j1 = swap ? shell : other;
        const int j2 = swap ? other : shell;
        const mpq_class& c = pair_cbar(s, f, j1, j2);
        if (sgn(c) == 0) continue;
        sq += unit_product(f, j1, j2, c, c);
        const mpq_class& ct = pair_cbar(s, f, j2, j1);
        if (sgn(ct) != 0) cross += unit_product(f, j1, j2, c, ct);
      }
    }
    s.cum_sq.push_back(sq);
    s.cum_cross.push_back(cross);
  }
  return s;
}

// Exact sum over the box of C_j times the sum of C over the permutations that fix the pattern.
// Grouping indices by their class-wise sorted form turns the inner permutation sum into
// (product of multiplicity factorials) * (sum over the group's orbit), squared per orbit.
struct PatternShells {
  int table_q = -1;
  std::vector<mpq_class> cum;
};

const PatternShells& pattern_shells(const WeightFamily& f, const ComponentPattern& p, int q) {
  static std::mutex mu;
  static std::map<std::pair<WeightFamily, std::vector<int>>, PatternShells> all;
  std::lock_guard<std::mutex> lock(mu);
  PatternShells& s = all[{f, p.labels}];
  if (s.table_q >= q) return s;
  const auto table = get_table(f, q);
  const int k = f.k();
  const int Q = table->q_max() + 1;
  int classes = 0;
  for (int v : p.labels) classes = std::max(classes, v + 1);
  std::map<std::vector<int>, mpq_class> orbit_sum;
  std::vector<int> j(k, 0), key(k);
  for (size_t off = 0; off < table->size(); ++off) {
    const mpq_class& c = table->barred_at(off);
    if (sgn(c) != 0) {
      for (int cl = 0; cl < classes; ++cl) {
        std::vector<int> vals;
        for (int r = 0; r < k; ++r)
          if (p.labels[r] == cl) vals.push_back(j[r]);
        std::sort(vals.begin(), vals.end());
        size_t t = 0;
        for (int r = 0; r < k; ++r)
          if (p.labels[r] == cl) key[r] = vals[t++];
      }
      orbit_sum[key] += c;
    }
    for (int r = 0; r < k; ++r) {
      if (++j[r] < Q) break;
      j[r] = 0;
    }
  }
  mpz_class base = 1;
  base <<= 2 * (k + f.sum_l());
  std::vector<mpq_class> shell(Q, mpq_class(0));
  for (auto& [kv, sum] : orbit_sum) {
    if (sgn(sum) == 0) continue;
    mpz_class weight = 1;
    for (int v : kv) weight *= (2 * v + 1);
    for (int cl = 0; cl < classes; ++cl) {
      std::map<int, int> mult;
      for (int r = 0; r < k; ++r)
        if (p.labels[r] == cl) ++mult[kv[r]];
      for (auto [v, n] : mult) {
        mpz_class fct;
        mpz_fac_ui(fct.get_mpz_t(), n);
        weight *= fct;
      }
    }
    sum.canonicalize();
    shell[*std::max_element(kv.begin(), kv.end())] += mpq_class(weight, base) * sum * sum;
  }
  s.cum.assign(Q, mpq_class(0));
  mpq_class run = 0;
  for (int t = 0; t < Q; ++t) {
    run += shell[t];
    run.canonicalize();
    s.cum[t] = run;
  }
  s.table_q = Q - 1;
  return s;
}

double delta_factor(const WeightFamily& f, double delta) { return std::pow(delta, f.delta_power()); }

void check_level(const WeightFamily& f, int q) {
  if (q < 0) throw ArgumentError("truncation level must be nonnegative");
  const int cap = f.k() == 2 ? family_q_cap(f) : table_q_cap(f);
  if (q > cap)
    throw ArgumentError("truncation level " + std::to_string(q) + " exceeds the cap " + std::to_string(cap) +
                        " for family " + f.str());
}

mpq_class box_residual_exact(const WeightFamily& f, int q) {
  if (f.k() == 2) {
    std::lock_guard<std::mutex> lock(pair_mutex());
    mpq_class r = norm_squared(f) - pair_shells(f, q).cum_sq[q];
    r.canonicalize();
    return r;
  }
  return get_table(f, q)->residual_unit(q);
}

}  // namespace

double exact_error_unit(const WeightFamily& family, const ComponentPattern& pattern, int q) {
  check_family_pattern(family, pattern);
  check_level(family, q);
  if (pattern.is_distinct()) return box_residual_exact(family, q).get_d();
  if (family.k() == 2) {
    std::lock_guard<std::mutex> lock(pair_mutex());
    const PairShells& s = pair_shells(family, q);
    mpq_class e = norm_squared(family) - s.cum_sq[q] - s.cum_cross[q];
    e.canonicalize();
    return e.get_d();
  }
  const PatternShells& s = pattern_shells(family, pattern, q);
  mpq_class e = norm_squared(family) - s.cum[q];
  e.canonicalize();
  return e.get_d();
}

double exact_error(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta) {
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  return exact_error_unit(family, pattern, q) * delta_factor(family, delta);
}

double error_bound(const WeightFamily& family, int q, double delta, bool has_zero_component) {
  require_supported(family);
  check_level(family, q);
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  if (has_zero_component && delta >= 1.0)
    throw ArgumentError("the factorial bound with a zero component requires delta < 1");
  double fact = 1.0;
  for (int r = 2; r <= family.k(); ++r) fact *= r;
  return fact * box_residual_exact(family, q).get_d() * delta_factor(family, delta);
}

ErrorReport error_report(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta) {
  ErrorReport rep;
  rep.family = family;
  rep.pattern = pattern;
  rep.q = q;
  rep.delta_power = family.delta_power();
  rep.bound = error_bound(family, q, delta);
  if (pattern_supported(pattern)) rep.exact = exact_error(family, pattern, q, delta);
  return rep;
}

double closed_form_error(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta) {
  require_supported(family);
  if (pattern.k() != family.k()) throw ArgumentError("pattern length does not match family");
  if (q < 0) throw ArgumentError("truncation level must be nonnegative");
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  const std::string name = family.str();
  const bool equal = pattern.is_all_equal();
  if (name == "00") {
    if (equal) return 0.0;
    mpq_class s(1, 2);
    for (int i = 1; i <= q; ++i) s -= mpq_class(1, 4 * i * i - 1);
    return mpq_class(s / 2).get_d() * delta * delta;
  }
  if (name == "01" || name == "10") {
    mpq_class s;
    if (!equal) {
      s = mpq_class(5, 9);
      for (int i = 2; i <= q; ++i) s -= mpq_class(2, 4 * i * i - 1);
      for (int i = 1; i <= q; ++i) s -= mpq_class(1, (2 * i - 1) * (2 * i - 1) * (2 * i + 3) * (2 * i + 3));
      for (int i = 0; i <= q; ++i) {
        mpq_class t((i + 2) * (i + 2) + (i + 1) * (i + 1), (2 * i + 1) * (2 * i + 5) * (2 * i + 3) * (2 * i + 3));
        t.canonicalize();
        s -= t;
      }
    } else {
      s = mpq_class(1, 9);
      for (int i = 0; i <= q; ++i) s -= mpq_class(1, (2 * i + 1) * (2 * i + 5) * (2 * i + 3) * (2 * i + 3));
      for (int i = 1; i <= q; ++i) s -= mpq_class(2, (2 * i - 1) * (2 * i - 1) * (2 * i + 3) * (2 * i + 3));
    }
    s.canonicalize();
    return mpq_class(s / 16).get_d() * std::pow(delta, 4);
  }
  throw ArgumentError("no closed-form error formula for family " + name);
}

double display_set_error(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta) {
  require_supported(family);
  if (family.k() != 2) throw ArgumentError("display sets exist only for two-level families");
  if (pattern.k() != 2) throw ArgumentError("pattern length does not match family");
  check_level(family, q);
  const std::string name = family.str();
  std::set<std::pair<int, int>> S;
  auto add00 = [&] {
    S.insert({0, 0});
    for (int i = 1; i <= q; ++i) {
      S.insert({i - 1, i});
      S.insert({i, i - 1});
    }
  };
  auto add_band2 = [&] {
    for (int i = 0; i <= q; ++i) {
      S.insert({i, i + 2});
      S.insert({i + 2, i});
      S.insert({i, i});
    }
  };
  auto add_band3 = [&] {
    for (int i = 0; i <= q; ++i) {
      S.insert({i, i + 3});
      S.insert({i + 3, i});
      S.insert({i, i + 1});
      S.insert({i + 1, i});
    }
  };
  add00();
  if (name != "00") add_band2();
  if (name == "01" || name == "02" || name == "11") S.insert({0, 1});
  if (name == "10" || name == "20" || name == "11") S.insert({1, 0});
  if (family.sum_l() == 2) {
    if (name == "02") S.insert({0, 2});
    if (name == "20") S.insert({2, 0});
    if (name == "11") S.insert({1, 1});
    add_band3();
  }
  auto unit_c2 = [&](int j1, int j2, int b1, int b2) {
    return unit_product(family, j1, j2, barred_coefficient_pair(family, j1, j2), barred_coefficient_pair(family, b1, b2));
  };
  mpq_class e = norm_squared(family);
  for (auto [j1, j2] : S) e -= unit_c2(j1, j2, j1, j2);
  if (pattern.is_all_equal()) {
    for (auto [j1, j2] : S) {
      const mpq_class x = unit_c2(j1, j2, j2, j1);
      e -= 2 * x;
      if (S.count({j2, j1})) e += x;
    }
  }
  e.canonicalize();
  return e.get_d() * delta_factor(family, delta);
}

int StepPlan::q(const WeightFamily& family) const {
  auto it = q_map.find(family);
  if (it == q_map.end()) throw ArgumentError("family " + family.str() + " is not in the plan");
  return it->second;
}

int StepPlan::max_q() const {
  int m = 0;
  for (const auto& [f, v] : q_map) m = std::max(m, v);
  return m;
}

int closed_q_cap(double gamma) {
  int cap = kMaxPolyDegree;
  for (const auto& f : order_families(gamma))
    if (f.k() == 2) cap = std::min(cap, family_q_cap(f));
  return cap;
}

double worst_pattern_error(const WeightFamily& family, int q, double delta, int m) {
  double worst = 0.0;
  for (const auto& p : supported_patterns(family.k())) {
    const int labels = 1 + *std::max_element(p.labels.begin(), p.labels.end());
    if (m > 0 && labels > m) continue;
    worst = std::max(worst, exact_error(family, p, q, delta));
  }
  return worst;
}

double min_c_star(double gamma, const std::vector<double>& deltas, int q_limit, int m) {
  double need = 0.0;
  for (const auto& f : order_families(gamma)) {
    if (f.k() == 1) continue;
    const int cap = std::min(q_limit, f.k() == 2 ? closed_q_cap(gamma) : table_q_cap(f));
    const double unit = worst_pattern_error(f, cap, 1.0, m);
    for (double d : deltas) need = std::max(need, unit * std::pow(d, f.delta_power() - (2.0 * gamma + 1.0)));
  }
  return need;
}

int plan_family_q(const WeightFamily& family, double gamma, double delta, double c_star, int m) {
  require_supported(family);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("delta must be positive and finite");
  if (!(c_star > 0.0) || !std::isfinite(c_star)) throw ArgumentError("accuracy constant must be positive");
  if (gamma != 2.0 && gamma != 2.5 && gamma != 3.0) throw ArgumentError("scheme order must be 2, 2.5 or 3");
  if (family.k() == 1) return 0;
  const double target = c_star * std::pow(delta, 2.0 * gamma + 1.0);
  // Two-level families share one level, so they share the tightest of their caps.
  const int cap = family.k() == 2 ? closed_q_cap(gamma) : table_q_cap(family);
  for (int q = 0; q <= cap; ++q)
    if (worst_pattern_error(family, q, delta, m) <= target) return q;
  std::ostringstream msg;
  msg << "family " << family.str() << " cannot reach the error target " << std::setprecision(6) << target
      << " within its cap q=" << cap;
  throw PlanningError(family.str(), msg.str());
}

namespace {

void finish_plan(StepPlan& plan) {
  plan.closed_q = 0;
  for (const auto& [f, q] : plan.q_map)
    if (f.k() == 2) plan.closed_q = std::max(plan.closed_q, q);
  for (auto& [f, q] : plan.q_map)
    if (f.k() == 2) q = plan.closed_q;
  plan.j_max = plan.max_q() + 3;
}

}  // namespace

StepPlan plan_truncation(double gamma, double delta, double c_star, int m) {
  StepPlan plan;
  plan.gamma = gamma;
  plan.delta = delta;
  plan.c_star = c_star;
  for (const auto& f : order_families(gamma)) plan.q_map[f] = plan_family_q(f, gamma, delta, c_star, m);
  finish_plan(plan);
  return plan;
}

StepPlan make_plan(double gamma, double delta, const std::map<WeightFamily, int>& overrides) {
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  StepPlan plan;
  plan.gamma = gamma;
  plan.delta = delta;
  plan.c_star = 0.0;
  for (const auto& f : order_families(gamma)) {
    auto it = overrides.find(f);
    const int q = it == overrides.end() ? 0 : it->second;
    check_level(f, q);
    plan.q_map[f] = f.k() == 1 ? 0 : q;
  }
  finish_plan(plan);
  if (plan.closed_q > closed_q_cap(gamma))
    throw ArgumentError("shared two-level truncation " + std::to_string(plan.closed_q) + " exceeds the cap " +
                        std::to_string(closed_q_cap(gamma)));
  return plan;
}

}  // namespace stochtaylor
