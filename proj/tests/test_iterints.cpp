#include "doctest.h"

#include <cmath>
#include <vector>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/errors.hpp"
#include "stochtaylor/iterints.hpp"
#include "stochtaylor/mserr.hpp"
#include "stochtaylor/noise.hpp"

using namespace stochtaylor;

namespace {

WeightFamily fam(const char* s) { return WeightFamily::parse(s); }

double ito(const char* f, const NoiseBasis& b, std::vector<int> c, int q) {
  return ito_family(fam(f), b, c, q).value;
}
double strat(const char* f, const NoiseBasis& b, std::vector<int> c, int q) {
  return strat_family(fam(f), b, c, q).value;
}

}  // namespace

TEST_CASE("one-level closed forms") {
  RngStream r(11, 0);
  const double d = 0.3;
  auto b = sample_basis(2, 6, d, r);
  for (int q : {0, 3, 6}) CHECK(ito("0", b, {2}, q) == doctest::Approx(std::sqrt(d) * b.zeta(2, 0)).epsilon(1e-15));
  CHECK(ito("1", b, {1}, 4) ==
        doctest::Approx(-std::pow(d, 1.5) / 2.0 * (b.zeta(1, 0) + b.zeta(1, 1) / std::sqrt(3.0))).epsilon(1e-14));
  CHECK(ito("2", b, {1}, 4) == doctest::Approx(std::pow(d, 2.5) / 3.0 *
                                               (b.zeta(1, 0) + std::sqrt(3.0) / 2.0 * b.zeta(1, 1) +
                                                b.zeta(1, 2) / (2.0 * std::sqrt(5.0))))
                                   .epsilon(1e-14));
}

TEST_CASE("two-level expansion by hand") {
  NoiseBasis b(2, 1, 1.0, {1.0, 2.0, 0.5, -1.0});
  const double expect = 0.5 * (1.0 * 0.5 + (1.0 / std::sqrt(3.0)) * (1.0 * (-1.0) - 2.0 * 0.5));
  const auto table = build_table(fam("00"), 1);
  const int c[] = {1, 2};
  CHECK(ito_generic(table, b, c, 1).value == doctest::Approx(expect).epsilon(1e-15));
  CHECK(ito("00", b, {1, 2}, 1) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("equal components collapse to the squared increment") {
  RngStream r(12, 0);
  const double d = 0.7;
  auto b = sample_basis(1, 20, d, r);
  const auto table = build_table(fam("00"), 20);
  const int c[] = {1, 1};
  const double expect = d * (b.zeta(1, 0) * b.zeta(1, 0) - 1.0) / 2.0;
  for (int q : {0, 1, 5, 20}) {
    CHECK(ito_generic(table, b, c, q).value == doctest::Approx(expect).epsilon(1e-13));
    CHECK(ito("00", b, {1, 1}, q) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("antisymmetric parts telescope") {
  RngStream r(13, 0);
  const double d = 0.4;
  auto b = sample_basis(2, 12, d, r);
  for (int q : {0, 4, 12}) {
    for (int i1 = 1; i1 <= 2; ++i1) {
      for (int i2 = 1; i2 <= 2; ++i2) {
        const double s = ito("00", b, {i1, i2}, q) + ito("00", b, {i2, i1}, q);
        const double expect = d * b.zeta(i1, 0) * b.zeta(i2, 0) - (i1 == i2 ? d : 0.0);
        CHECK(s == doctest::Approx(expect).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("Stratonovich minus Itô corrections") {
  RngStream r(14, 0);
  const double d = 0.5;
  auto b = sample_basis(2, 40, d, r);
  for (int q : {0, 2, 7}) {
    CHECK(strat("00", b, {1, 1}, q) - ito("00", b, {1, 1}, q) == doctest::Approx(d / 2.0).epsilon(1e-13));
    CHECK(strat("00", b, {1, 2}, q) == ito("00", b, {1, 2}, q));
    // Half the integral of the product of the two weights, (t - tau)^2, over the step.
    CHECK(strat("11", b, {2, 2}, q) - ito("11", b, {2, 2}, q) == doctest::Approx(d * d * d / 6.0).epsilon(1e-12));
    // Same for (t - tau)^0 (t - tau)^1 in either order.
    CHECK(strat("01", b, {1, 1}, q) - ito("01", b, {1, 1}, q) == doctest::Approx(-d * d / 4.0).epsilon(1e-12));
    CHECK(strat("10", b, {1, 1}, q) - ito("10", b, {1, 1}, q) == doctest::Approx(-d * d / 4.0).epsilon(1e-12));
  }
  NoiseBasis zero(1, 40, 1.0);
  CHECK(ito("11", zero, {1, 1}, 5) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(strat("11", zero, {1, 1}, 5) == 0.0);
}

TEST_CASE("zero noise collapse") {
  const double d = 0.6;
  NoiseBasis zero(3, 12, d);
  for (const auto& f : scheme_families()) {
    const int q = std::min(2, family_q_cap(f));
    std::vector<int> distinct;
    for (int r = 0; r < f.k(); ++r) distinct.push_back(1 + r % 3);
    CHECK(strat_family(f, zero, distinct, q).value == 0.0);
    if (f.k() <= 3) CHECK(ito_family(f, zero, distinct, q).value == 0.0);
  }
  const auto t = build_table(fam("000"), 2);
  const int c[] = {1, 1, 1};
  CHECK(strat_generic(t, zero, c, 2).value == 0.0);
}

TEST_CASE("generic Itô and Stratonovich agree for distinct components") {
  RngStream r(15, 0);
  auto b = sample_basis(6, 4, 0.25, r);
  for (const auto& f : scheme_families()) {
    if (f.k() < 3) continue;
    const auto t = build_table(f, 2);
    std::vector<int> c;
    for (int k = 0; k < f.k(); ++k) c.push_back(k + 1);
    CHECK(ito_generic(t, b, c, 2).value == strat_generic(t, b, c, 2).value);
  }
}

TEST_CASE("pairing generator sizes") {
  // Number of partial matchings of k points: 1, 1, 2, 4, 10, 26, 76.
  const int expect[] = {1, 1, 2, 4, 10, 26, 76};
  for (int k = 0; k <= 6; ++k) CHECK(partial_pairings(k).size() == static_cast<size_t>(expect[k]));
}

TEST_CASE("generic corrections against explicit transcriptions") {
  RngStream r(16, 0);
  auto b = sample_basis(2, 3, 1.0, r);
  const int q = 3;
  SUBCASE("three levels with i1 = i2") {
    const auto t = build_table(fam("000"), q);
    const int c[] = {1, 1, 2};
    double s = 0.0;
    for (int j3 = 0; j3 <= q; ++j3)
      for (int j2 = 0; j2 <= q; ++j2)
        for (int j1 = 0; j1 <= q; ++j1) {
          const int j[] = {j1, j2, j3};
          const double cc = t.scaled(j, 1.0);
          s += cc * (b.zeta(1, j1) * b.zeta(1, j2) * b.zeta(2, j3) - (j1 == j2 ? b.zeta(2, j3) : 0.0));
        }
    CHECK(ito_generic(t, b, c, q).value == doctest::Approx(s).epsilon(1e-13));
  }
  SUBCASE("four levels all equal") {
    const auto t = build_table(fam("0000"), q);
    const int c[] = {1, 1, 1, 1};
    double s = 0.0;
    for (int j4 = 0; j4 <= q; ++j4)
      for (int j3 = 0; j3 <= q; ++j3)
        for (int j2 = 0; j2 <= q; ++j2)
          for (int j1 = 0; j1 <= q; ++j1) {
            const int j[] = {j1, j2, j3, j4};
            auto z = [&](int x) { return b.zeta(1, x); };
            auto e = [](int x, int y) { return x == y ? 1.0 : 0.0; };
            double v = z(j1) * z(j2) * z(j3) * z(j4);
            v -= e(j1, j2) * z(j3) * z(j4) + e(j1, j3) * z(j2) * z(j4) + e(j1, j4) * z(j2) * z(j3) +
                 e(j2, j3) * z(j1) * z(j4) + e(j2, j4) * z(j1) * z(j3) + e(j3, j4) * z(j1) * z(j2);
            v += e(j1, j2) * e(j3, j4) + e(j1, j3) * e(j2, j4) + e(j1, j4) * e(j2, j3);
            s += t.scaled(j, 1.0) * v;
          }
    CHECK(ito_generic(t, b, c, q).value == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("batch inventories") {
  RngStream r(17, 0);
  const double d = 0.25;
  for (double g : {2.0, 2.5, 3.0}) {
    const auto plan = plan_truncation(g, d, 1.0);
    auto b = sample_basis(2, plan.j_max, d, r);
    const auto batch = batch_evaluate(plan, b);
    CHECK(batch.size() == order_families(g).size());
    for (const auto& f : order_families(g)) CHECK(batch.contains(f));
    CHECK(batch.as_map().size() == [&] {
      size_t n = 0;
      for (const auto& f : order_families(g)) n += static_cast<size_t>(std::pow(2, f.k()));
      return n;
    }());
    // Batch values equal the single-family entry points.
    for (const auto& f : order_families(g)) {
      std::vector<int> c(static_cast<size_t>(f.k()), 1);
      if (f.k() >= 2) c[1] = 2;
      CHECK(batch.value(f, c) == doctest::Approx(ito_family(f, b, c, plan.q(f)).value).epsilon(1e-12));
    }
  }
  CHECK(batch_evaluate(plan_truncation(2.0, d, 1.0), sample_basis(2, plan_truncation(2.0, d, 1.0).j_max, d, r))
            .families()
            .size() == 7);
  CHECK(batch_evaluate(StepPlan{}, NoiseBasis(1, 0, 1.0)).size() == 0);
}

TEST_CASE("argument checks") {
  NoiseBasis b(1, 2, 1.0);
  const auto t = build_table(fam("000"), 2);
  const int two[] = {1, 1};
  const int three[] = {1, 1, 1};
  CHECK_THROWS_AS(ito_generic(t, b, two, 1), ArgumentError);
  CHECK_THROWS_AS(ito_generic(t, b, three, 3), ArgumentError);
  const int bad[] = {1, 1, 2};
  CHECK_THROWS_AS(ito_generic(t, b, bad, 1), ArgumentError);
}

TEST_CASE("six-level Stratonovich values are flagged") {
  RngStream r(18, 0);
  auto b = sample_basis(1, 2, 1.0, r);
  std::vector<int> c(6, 1);
  CHECK(strat_family(fam("000000"), b, c, 1).conjectural);
  CHECK_FALSE(ito_family(fam("000000"), b, c, 1).conjectural);
  CHECK_FALSE(strat_family(fam("00000"), b, std::vector<int>(5, 1), 1).conjectural);
}

TEST_CASE("Monte Carlo second moments") {
  const long n = 1000000;
  const double d = 0.5;
  RngStream r(19, 0);
  const auto t3 = build_table(fam("000"), 2);
  const int c3[] = {1, 2, 3};
  double i1 = 0, i1sq = 0, i2 = 0, i2sq = 0, j3 = 0, j3sq = 0, z0 = 0, z0sq = 0, zc = 0, zcsq = 0;
  for (long s = 0; s < n; ++s) {
    auto b = sample_basis(3, 2, d, r);
    const double a = ito("1", b, {1}, 1);
    const double c = ito("2", b, {2}, 2);
    const double e = ito_generic(t3, b, c3, 2).value;
    // Outer level driven by time: compares with d I_0 + I_1 on the same basis.
    const double zero_outer = ito("00", b, {1, 0}, 1);
    const double combo = d * ito("0", b, {1}, 0) + a;
    i1 += a * a;
    i1sq += a * a * a * a;
    i2 += c * c;
    i2sq += c * c * c * c;
    j3 += e * e;
    j3sq += e * e * e * e;
    z0 += zero_outer * zero_outer;
    z0sq += std::pow(zero_outer, 4);
    zc += std::abs(zero_outer - combo);
    zcsq += 0.0;
  }
  auto within = [&](double sum, double sumsq, double expect) {
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    return std::abs(mean - expect) <= 3.0 * se;
  };
  CHECK(within(i1, i1sq, std::pow(d, 3) / 3.0));
  CHECK(within(i2, i2sq, std::pow(d, 5) / 5.0));
  double parseval = 0.0;
  for (size_t o = 0; o < t3.size(); ++o) parseval += std::pow(t3.unit_scaled()[o], 2) * std::pow(d, 3);
  CHECK(within(j3, j3sq, parseval));
  CHECK(parseval < std::pow(d, 3) / 6.0);
  CHECK(within(z0, z0sq, std::pow(d, 3) / 3.0));
  CHECK(zc / n < 1e-12);
}
