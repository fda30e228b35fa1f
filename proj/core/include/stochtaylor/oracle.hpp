#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

#include "stochtaylor/family.hpp"
#include "stochtaylor/iterints.hpp"
#include "stochtaylor/legendre.hpp"
#include "stochtaylor/noise.hpp"

namespace stochtaylor {

// Brownian increments on a uniform partition of [0, delta] for components 1..m.
struct FinePath {
  int m = 0;
  long n_fine = 0;
  double delta = 0.0;
  std::vector<double> dw;  // component-major: dw[(i-1) * n_fine + l]

  double tau(long l) const { return delta * static_cast<double>(l) / static_cast<double>(n_fine); }
  std::span<const double> increments(int i) const {
    return {dw.data() + static_cast<size_t>(i - 1) * static_cast<size_t>(n_fine), static_cast<size_t>(n_fine)};
  }
};

// Independent N(0, delta / n_fine) increments.
FinePath synthesize_path(int m, long n_fine, double delta, RngStream& rng);
// Merges neighbouring cells pairwise; n_fine must be even.
FinePath coarsen(const FinePath& path);

// Left-point iterated sum over strictly increasing cells with weights (tau_start - tau)^{l_r}.
// Component 0 uses the deterministic increments delta / n_fine.
double integral_sum(const MultiIndex& multi, const FinePath& path);

// zeta_j^{(i)} estimates sum_l phi_j(tau_l) dw_l for j = 0..j_max.
NoiseBasis project_zeta(const FinePath& path, int j_max, const ShiftedBasisSpec& spec);
NoiseBasis project_zeta(const FinePath& path, int j_max);

struct CoupledCase {
  WeightFamily family;
  std::vector<int> components;  // 1-based, drawn from the path's components
  int q = 0;
};

struct CoupledEstimate {
  CoupledCase which;
  double mean = 0.0;  // mean squared difference between the sum and the expansion
  double std_error = 0.0;
  double mean_half = 0.0;  // same estimate on the path with n_fine / 2 cells
  double shift_std_error = 0.0;  // standard error of the paired difference mean - mean_half
  double second_moment = 0.0;  // mean of integral_sum^2
  double second_moment_std_error = 0.0;
  long samples = 0;
  long n_fine = 0;

  // The estimate moves by no more than 3 standard errors when the partition is halved.
  bool bias_ok() const;
};

// Mean-square difference between left-point sums and the truncated box expansion driven by
// projected zetas, all cases sharing the same paths. Results do not depend on thread count.
std::vector<CoupledEstimate> coupled_ms_error(const std::vector<CoupledCase>& cases, long samples, long n_fine,
                                              double delta, std::uint64_t seed, int threads = 0);
CoupledEstimate coupled_ms_error(const WeightFamily& family, std::span<const int> components, int q, long samples,
                                 long n_fine, double delta, std::uint64_t seed, int threads = 0);

// C-bar via monomial expansion of the shifted Legendre polynomials and exact simplex moments.
mpq_class symbolic_coeff(const WeightFamily& family, std::span<const int> j);

// Exact transfer of shifted-Legendre coordinates from `ratio` equal sub-steps to the whole step.
class BasisTransfer {
 public:
  BasisTransfer(int j_max, int ratio, double tol = 1e-18);

  int j_max() const { return j_max_; }
  int ratio() const { return ratio_; }
  // Largest sub-step index needed from the fine bases.
  int fine_j_needed() const { return fine_needed_; }
  // fine[s] covers the s-th sub-step; all share m and a step of delta / ratio.
  NoiseBasis coarse(std::span<const NoiseBasis> fine) const;
  // Coefficient of fine zeta_k on sub-step s in coarse zeta_j (zero outside the stored band).
  double weight(int j, int s, int k) const;

 private:
  int j_max_;
  int ratio_;
  int fine_needed_ = 0;
  std::vector<std::vector<std::vector<double>>> rows_;  // rows_[s][j][k]
};

}  // namespace stochtaylor
