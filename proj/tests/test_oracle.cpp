#include "doctest.h"

#include <cmath>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/mserr.hpp"
#include "stochtaylor/oracle.hpp"

using namespace stochtaylor;

namespace {

WeightFamily fam(const char* s) { return WeightFamily::parse(s); }

}  // namespace

TEST_CASE("integral sums on simple paths") {
  RngStream rng(1, 0);
  const auto path = synthesize_path(2, 1024, 0.5, rng);
  double total = 0.0;
  for (double v : path.increments(1)) total += v;
  CHECK(integral_sum({fam("0"), {1}}, path) == doctest::Approx(total).epsilon(1e-13));
  CHECK(project_zeta(path, 0).zeta(1, 0) * std::sqrt(0.5) == doctest::Approx(total).epsilon(1e-12));

  FinePath det;
  det.m = 2;
  det.n_fine = 1000;
  det.delta = 0.8;
  det.dw.assign(2000, 0.8 / 1000.0);
  const double pairs = 0.8 * 0.8 * 999.0 / 2000.0;
  CHECK(integral_sum({fam("00"), {1, 2}}, det) == doctest::Approx(pairs).epsilon(1e-12));
  // Component 0 is time itself.
  CHECK(integral_sum({fam("00"), {0, 1}}, det) == doctest::Approx(pairs).epsilon(1e-12));

  FinePath zero = det;
  std::fill(zero.dw.begin(), zero.dw.end(), 0.0);
  CHECK(integral_sum({fam("000"), {1, 2, 1}}, zero) == 0.0);
  const auto z = project_zeta(zero, 5);
  for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("weighted left-point sum against a direct double loop") {
  RngStream rng(2, 0);
  const auto path = synthesize_path(2, 64, 1.0, rng);
  const auto w1 = path.increments(1);
  const auto w2 = path.increments(2);
  double expect = 0.0;
  for (long b = 0; b < 64; ++b)
    for (long a = 0; a < b; ++a) expect += (0.0 - path.tau(a)) * w1[a] * (0.0 - path.tau(b)) * w2[b];
  CHECK(integral_sum({fam("11"), {1, 2}}, path) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("coarsening keeps the path") {
  RngStream rng(3, 0);
  const auto path = synthesize_path(1, 256, 1.0, rng);
  const auto half = coarsen(path);
  CHECK(half.n_fine == 128);
  CHECK(integral_sum({fam("0"), {1}}, half) == doctest::Approx(integral_sum({fam("0"), {1}}, path)).epsilon(1e-13));
}

TEST_CASE("projected zetas are approximately standard normal") {
  const long n = 100000;
  const int j_max = 3;
  RngStream rng(4, 0);
  double cov[4][4] = {};
  double cov2[4][4] = {};
  for (long s = 0; s < n; ++s) {
    const auto path = synthesize_path(1, 1 << 14, 0.5, rng);
    const auto z = project_zeta(path, j_max);
    for (int a = 0; a <= j_max; ++a)
      for (int b = 0; b <= j_max; ++b) {
        const double v = z.zeta(1, a) * z.zeta(1, b);
        cov[a][b] += v;
        cov2[a][b] += v * v;
      }
  }
  for (int a = 0; a <= j_max; ++a)
    for (int b = 0; b <= j_max; ++b) {
      const double mean = cov[a][b] / n;
      const double se = std::sqrt((cov2[a][b] / n - mean * mean) / n);
      CHECK(std::abs(mean - (a == b ? 1.0 : 0.0)) <= 3.0 * se);
    }
}

TEST_CASE("coupled mean-square error at moderate sample sizes") {
  const int distinct[] = {1, 2};
  const auto est = coupled_ms_error(fam("00"), distinct, 1, 20000, 1 << 12, 1.0, 5);
  CHECK(std::abs(est.mean - 1.0 / 12.0) <= 3.0 * est.std_error + 1.0 / (2.0 * (1 << 12)));
  CHECK(est.samples == 20000);
  CHECK(est.n_fine == 4096);
  CHECK(est.second_moment == doctest::Approx(0.5).epsilon(0.05));

  const int equal[] = {1, 1};
  const auto eq = coupled_ms_error(fam("00"), equal, 1, 20000, 1 << 12, 1.0, 5);
  // Pure discretization bias: the left-point sum of the squared increment is off by delta^2 / (2 n) on average.
  CHECK(eq.mean < 1e-3);
  CHECK(eq.mean_half > eq.mean);

  const auto many = coupled_ms_error({{fam("00"), {1, 2}, 1}, {fam("000"), {1, 2, 3}, 2}}, 4000, 1 << 10, 1.0, 6, 1);
  const auto again = coupled_ms_error({{fam("00"), {1, 2}, 1}, {fam("000"), {1, 2, 3}, 2}}, 4000, 1 << 10, 1.0, 6, 3);
  REQUIRE(many.size() == 2);
  CHECK(many[0].mean == again[0].mean);
  CHECK(many[1].mean == again[1].mean);
  CHECK(std::abs(many[1].mean - exact_error(fam("000"), ComponentPattern::distinct(3), 2, 1.0)) <=
        4.0 * many[1].std_error + 1e-3);
}

TEST_CASE("symbolic coefficients") {
  const int j000[] = {0, 0, 0};
  CHECK(symbolic_coeff(fam("000"), j000) == mpq_class(4, 3));
  const int j01[] = {0, 1};
  CHECK(symbolic_coeff(fam("00"), j01) == mpq_class(2, 3));
  // Odd integrand about the midpoint.
  const int odd[] = {1, 0, 0};
  CHECK(symbolic_coeff(fam("000"), odd) == barred_coefficient(fam("000"), odd));
  const int j2[] = {2, 0};
  CHECK(symbolic_coeff(fam("0"), std::span<const int>(j2, 1)) == 0);
  for (const auto& f : scheme_families()) {
    if (f.k() > 3) continue;
    std::vector<int> j(static_cast<size_t>(f.k()), 0);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b) {
        j[0] = a;
        if (f.k() > 1) j[1] = b;
        if (f.k() > 2) j[2] = (a + b) % 4;
        CHECK(symbolic_coeff(f, j) == barred_coefficient(f, j));
      }
  }
}

TEST_CASE("basis transfer is exact and orthogonal") {
  const int ratio = 4;
  const int j_max = 10;
  const BasisTransfer tr(j_max, ratio);
  CHECK(tr.fine_j_needed() <= j_max);
  // Orthogonality of the rows.
  double worst = 0.0;
  for (int a = 0; a <= j_max; ++a)
    for (int b = 0; b <= j_max; ++b) {
      double s = 0.0;
      for (int sub = 0; sub < ratio; ++sub)
        for (int k = 0; k <= tr.fine_j_needed(); ++k) s += tr.weight(a, sub, k) * tr.weight(b, sub, k);
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-13);

  // Projection of a fine path directly and through the transfer coincide.
  RngStream rng(7, 0);
  const long n = 1 << 12;
  const auto path = synthesize_path(2, n, 1.0, rng);
  std::vector<NoiseBasis> fine;
  for (int sub = 0; sub < ratio; ++sub) {
    FinePath piece;
    piece.m = 2;
    piece.n_fine = n / ratio;
    piece.delta = 1.0 / ratio;
    for (int i = 1; i <= 2; ++i) {
      const auto inc = path.increments(i);
      piece.dw.insert(piece.dw.end(), inc.begin() + sub * piece.n_fine, inc.begin() + (sub + 1) * piece.n_fine);
    }
    fine.push_back(project_zeta(piece, tr.fine_j_needed()));
  }
  // phi_j restricted to a sub-step is a polynomial of degree j, so the two routes agree to rounding.
  const auto coarse = tr.coarse(fine);
  const auto direct = project_zeta(path, j_max);
  for (int i = 1; i <= 2; ++i)
    for (int j = 0; j <= j_max; ++j) CHECK(std::abs(coarse.zeta(i, j) - direct.zeta(i, j)) < 1e-11);
}
