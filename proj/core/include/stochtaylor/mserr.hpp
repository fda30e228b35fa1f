#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochtaylor/family.hpp"

namespace stochtaylor {

// Equality partition of the noise components (i_1..i_k), stored as canonical labels:
// slot r carries the index of the class it belongs to, classes numbered by first appearance.
struct ComponentPattern {
  std::vector<int> labels;

  int k() const { return static_cast<int>(labels.size()); }
  bool is_distinct() const;
  bool is_all_equal() const;
  // "distinct", "equal", or the label string such as "aab".
  std::string str() const;

  static ComponentPattern distinct(int k);
  static ComponentPattern all_equal(int k);
  static ComponentPattern from_components(std::span<const int> components);
  // Accepts "distinct", "equal" or a label word over letters/digits ("aab", "112").
  static ComponentPattern parse(std::string_view text, int k);

  bool operator==(const ComponentPattern&) const = default;
};

// Patterns for which exact_error has a formula: pairwise distinct and all equal for any k,
// every pattern for k <= 3.
bool pattern_supported(const ComponentPattern& pattern);
// All canonical patterns of length k that exact_error supports.
std::vector<ComponentPattern> supported_patterns(int k);

struct ErrorReport {
  WeightFamily family;
  ComponentPattern pattern;
  int q = 0;
  std::optional<double> exact;
  double bound = 0.0;
  int delta_power = 0;
};

// Mean-square error of the q-truncated expansion over the box max_r j_r <= q,
// with all components nonzero.
double exact_error(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta);
// Same quantity at delta = 1; multiply by delta^{delta_power} to rescale.
double exact_error_unit(const WeightFamily& family, const ComponentPattern& pattern, int q);

// k! * (I_k - sum of C^2 over the box). With a zero component the bound needs delta < 1.
double error_bound(const WeightFamily& family, int q, double delta, bool has_zero_component = false);

ErrorReport error_report(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta);

// Published finite-sum error formulas for (00), (01) and (10).
double closed_form_error(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta);

// Error of the two-level display expansion (the index set ito_family actually sums),
// computed from exact coefficients. Only for two-level families.
double display_set_error(const WeightFamily& family, const ComponentPattern& pattern, int q, double delta);

struct StepPlan {
  double gamma = 3.0;
  double delta = 0.0;
  double c_star = 1.0;
  std::map<WeightFamily, int> q_map;
  // Common level of the two-level closed-form families.
  int closed_q = 0;
  int j_max = 0;

  int q(const WeightFamily& family) const;
  int max_q() const;
};

// Cap of the level shared by the two-level families of the order-gamma scheme.
int closed_q_cap(double gamma);
// Largest exact error over the supported component patterns of a family.
// m > 0 restricts to patterns with at most m distinct components.
double worst_pattern_error(const WeightFamily& family, int q, double delta, int m = 0);
// Smallest accuracy constant for which every family of the order-gamma scheme can be planned
// at every step in deltas without exceeding min(q_limit, cap).
double min_c_star(double gamma, const std::vector<double>& deltas, int q_limit, int m = 0);

// Smallest q whose worst supported-pattern error is at most c_star * delta^{2 gamma + 1}.
int plan_family_q(const WeightFamily& family, double gamma, double delta, double c_star, int m = 0);
// m is the noise dimension of the model (0: any).
StepPlan plan_truncation(double gamma, double delta, double c_star, int m = 0);
// Plan with explicit levels; families missing from overrides get q = 0.
StepPlan make_plan(double gamma, double delta, const std::map<WeightFamily, int>& overrides);

}  // namespace stochtaylor
