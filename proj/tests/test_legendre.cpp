#include "doctest.h"

#include <cmath>

#include "stochtaylor/errors.hpp"
#include "stochtaylor/legendre.hpp"

using namespace stochtaylor;

TEST_CASE("low-degree Legendre polynomials") {
  const auto& p0 = legendre_poly(0);
  REQUIRE(p0.degree() == 0);
  CHECK(p0.coeffs[0] == 1);

  const auto& p1 = legendre_poly(1);
  REQUIRE(p1.degree() == 1);
  CHECK(p1.coeffs[0] == 0);
  CHECK(p1.coeffs[1] == 1);

  const auto& p2 = legendre_poly(2);
  REQUIRE(p2.degree() == 2);
  CHECK(p2.coeffs[0] == mpq_class(-1, 2));
  CHECK(p2.coeffs[1] == 0);
  CHECK(p2.coeffs[2] == mpq_class(3, 2));
  CHECK(p2.eval(mpq_class(1)) == 1);
  CHECK(p2.eval(mpq_class(0)) == mpq_class(-1, 2));
}

TEST_CASE("endpoint values are exact up to degree 30") {
  for (int n = 0; n <= 30; ++n) {
    const auto& p = legendre_poly(n);
    CHECK(p.eval(mpq_class(1)) == 1);
    CHECK(p.eval(mpq_class(-1)) == (n % 2 == 0 ? 1 : -1));
  }
}

TEST_CASE("rational and floating evaluation agree") {
  for (int n = 0; n <= 20; ++n) {
    for (int num = -16; num <= 16; ++num) {
      const mpq_class x(num, 16);
      const double exact = legendre_poly(n).eval(x).get_d();
      const double horner = legendre_poly(n).eval(x.get_d());
      const double rec = legendre_values(x.get_d(), n)[static_cast<size_t>(n)];
      CHECK(std::abs(horner - exact) <= 1e-13 * std::abs(exact));
      // The recurrence is accurate in the sup norm (|P_n| <= 1 on [-1, 1]).
      CHECK(std::abs(rec - exact) <= 1e-14);
    }
  }
}

TEST_CASE("shifted basis values") {
  const ShiftedBasisSpec spec{0.75, 0.5};
  CHECK(eval_shifted(0, 0.8, spec) == doctest::Approx(1.0 / std::sqrt(0.5)).epsilon(1e-15));
  CHECK(std::abs(eval_shifted(1, 1.0, spec)) < 1e-15);
  CHECK(eval_shifted(2, 1.25, spec) == doctest::Approx(std::sqrt(5.0 / 0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(eval_shifted(1, 1.3, spec), DomainError);
  CHECK_THROWS_AS(eval_shifted(1, 0.7, spec), DomainError);
}

TEST_CASE("Gauss-Legendre nodes") {
  auto g1 = gauss_nodes(1);
  REQUIRE(g1.size() == 1);
  CHECK(std::abs(g1[0].first) < 1e-15);
  CHECK(g1[0].second == doctest::Approx(2.0));

  auto g2 = gauss_nodes(2);
  REQUIRE(g2.size() == 2);
  CHECK(std::abs(std::abs(g2[0].first) - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(g2[0].second == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2[1].second == doctest::Approx(1.0).epsilon(1e-15));

  double x4 = 0.0;
  for (auto [x, w] : gauss_nodes(3)) x4 += w * x * x * x * x;
  CHECK(std::abs(x4 - 0.4) < 1e-14);

  for (int n = 1; n <= 64; ++n) {
    double total = 0.0;
    for (auto [x, w] : gauss_nodes(n)) {
      CHECK(w > 0.0);
      total += w;
      // Distance to the true root, estimated by one Newton correction.
      const auto p = legendre_values(x, n);
      const double dp = n * (p[static_cast<size_t>(n - 1)] - x * p[static_cast<size_t>(n)]) / (1.0 - x * x);
      CHECK(std::abs(p[static_cast<size_t>(n)] / dp) <= 1e-14);
    }
    CHECK(std::abs(total - 2.0) < 1e-13);
  }
  CHECK_THROWS_AS(gauss_nodes(0), ArgumentError);
  CHECK_THROWS_AS(gauss_nodes(65), ArgumentError);
}

TEST_CASE("shifted basis is orthonormal") {
  const ShiftedBasisSpec spec{1.5, 0.125};
  const auto nodes = gauss_nodes(20);
  double worst = 0.0;
  for (int i = 0; i <= 12; ++i) {
    for (int j = 0; j <= 12; ++j) {
      double s = 0.0;
      for (auto [u, w] : nodes) {
        const double x = spec.t_left + 0.5 * spec.delta * (u + 1.0);
        s += 0.5 * spec.delta * w * eval_shifted(i, x, spec) * eval_shifted(j, x, spec);
      }
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("exact polynomial arithmetic") {
  const auto& p3 = legendre_poly(3);
  const auto& p2 = legendre_poly(2);
  CHECK((p3 * p2).integrate(-1, 1) == 0);
  CHECK((p3 * p3).integrate(-1, 1) == mpq_class(2, 7));
  CHECK(p2.antiderivative_from(-1).eval(mpq_class(1)) == 0);
  CHECK(legendre_poly(kMaxPolyDegree).degree() == kMaxPolyDegree);
}
