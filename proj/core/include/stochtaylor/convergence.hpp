#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochtaylor/iterints.hpp"
#include "stochtaylor/model.hpp"

namespace stochtaylor {

enum class SchemeKind { Taylor, EulerMaruyama };

struct ConvergenceConfig {
  SchemeKind scheme = SchemeKind::Taylor;
  IntegralKind kind = IntegralKind::Ito;
  double gamma = 2.0;
  std::vector<double> deltas;
  double T = 1.0;
  long paths = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  // Unset: the smallest power of two that lets every step in the ladder be planned.
  std::optional<double> c_star;
  int ref_ratio = 32;
  int q_limit = 10000;
};

struct ConvergenceRow {
  double delta = 0.0;
  long steps = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  int max_q = 0;
  int j_max = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<double> log2_ratios;  // log2(err(delta_i) / err(delta_{i+1}))
  double slope = 0.0;               // least-squares slope of log2 err against log2 delta
  double c_star = 0.0;
  bool c_star_relaxed = false;
};

// Mean over paths of |y_T - y_T^ref|, the reference being the same scheme at delta / ref_ratio
// on the same Brownian path. The reference keeps the coarse truncation levels.
ConvergenceReport run_convergence(const SdeModel& model, const ConvergenceConfig& config);

// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stochtaylor
