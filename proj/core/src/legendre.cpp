#include "stochtaylor/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "stochtaylor/errors.hpp"

namespace stochtaylor {

int RationalPolynomial::degree() const {
  for (int d = static_cast<int>(coeffs.size()) - 1; d >= 0; --d)
    if (sgn(coeffs[d]) != 0) return d;
  return -1;
}

bool RationalPolynomial::is_zero() const { return degree() < 0; }

void RationalPolynomial::trim() {
  while (!coeffs.empty() && sgn(coeffs.back()) == 0) coeffs.pop_back();
}

mpq_class RationalPolynomial::eval(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Compensated Horner: the rounding errors of each product and sum are carried in a second
// accumulator, so the result is as accurate as Horner in twice the working precision.
double RationalPolynomial::eval(double x) const {
  double acc = 0.0;
  double err = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    const double prod = acc * x;
    const double prod_err = std::fma(acc, x, -prod);
    const double c = it->get_d();
    const double sum = prod + c;
    const double v = sum - prod;
    const double sum_err = (prod - (sum - v)) + (c - v);
    acc = sum;
    err = err * x + (prod_err + sum_err);
  }
  return acc + err;
}

RationalPolynomial RationalPolynomial::operator*(const RationalPolynomial& other) const {
  RationalPolynomial out;
  if (coeffs.empty() || other.coeffs.empty()) return out;
  out.coeffs.assign(coeffs.size() + other.coeffs.size() - 1, mpq_class(0));
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (sgn(coeffs[i]) == 0) continue;
    for (size_t j = 0; j < other.coeffs.size(); ++j) out.coeffs[i + j] += coeffs[i] * other.coeffs[j];
  }
  out.trim();
  return out;
}

RationalPolynomial RationalPolynomial::operator+(const RationalPolynomial& other) const {
  RationalPolynomial out;
  out.coeffs.assign(std::max(coeffs.size(), other.coeffs.size()), mpq_class(0));
  for (size_t i = 0; i < coeffs.size(); ++i) out.coeffs[i] += coeffs[i];
  for (size_t i = 0; i < other.coeffs.size(); ++i) out.coeffs[i] += other.coeffs[i];
  out.trim();
  return out;
}

RationalPolynomial RationalPolynomial::antiderivative_from(const mpq_class& a) const {
  RationalPolynomial out;
  out.coeffs.assign(coeffs.size() + 1, mpq_class(0));
  for (size_t d = 0; d < coeffs.size(); ++d) out.coeffs[d + 1] = coeffs[d] / mpq_class(static_cast<long>(d + 1));
  out.coeffs[0] = -out.eval(a);
  out.trim();
  return out;
}

mpq_class RationalPolynomial::integrate(const mpq_class& a, const mpq_class& b) const {
  return antiderivative_from(a).eval(b);
}

const RationalPolynomial& legendre_poly(int n) {
  if (n < 0 || n > kMaxPolyDegree)
    throw ArgumentError("legendre degree out of range: " + std::to_string(n));
  static std::mutex mu;
  static std::vector<RationalPolynomial> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (cache.empty()) {
    cache.reserve(kMaxPolyDegree + 1);
    cache.push_back(RationalPolynomial{{mpq_class(1)}});
    cache.push_back(RationalPolynomial{{mpq_class(0), mpq_class(1)}});
  }
  while (static_cast<int>(cache.size()) <= n) {
    const int k = static_cast<int>(cache.size()) - 1;
    const auto& pk = cache[k];
    const auto& pkm1 = cache[k - 1];
    RationalPolynomial next;
    next.coeffs.assign(k + 2, mpq_class(0));
    const mpq_class a(2 * k + 1, k + 1);
    const mpq_class b(k, k + 1);
    for (size_t d = 0; d < pk.coeffs.size(); ++d) next.coeffs[d + 1] += a * pk.coeffs[d];
    for (size_t d = 0; d < pkm1.coeffs.size(); ++d) next.coeffs[d] -= b * pkm1.coeffs[d];
    for (auto& c : next.coeffs) c.canonicalize();
    cache.push_back(std::move(next));
  }
  return cache[n];
}

void legendre_values(double x, int jmax, double* out) {
  out[0] = 1.0;
  if (jmax == 0) return;
  out[1] = x;
  for (int k = 1; k < jmax; ++k)
    out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1);
}

std::vector<double> legendre_values(double x, int jmax) {
  std::vector<double> out(jmax + 1);
  legendre_values(x, jmax, out.data());
  return out;
}

double eval_shifted(int j, double x, const ShiftedBasisSpec& spec) {
  if (!(spec.delta > 0.0)) throw ArgumentError("shifted basis needs delta > 0");
  if (j < 0 || j > kMaxPolyDegree) throw ArgumentError("basis index out of range");
  const double right = spec.t_left + spec.delta;
  const double slack = 1e-12 * std::max(1.0, std::abs(right));
  if (x < spec.t_left - slack || x > right + slack)
    throw DomainError("point " + std::to_string(x) + " outside [" + std::to_string(spec.t_left) + ", " +
                      std::to_string(right) + "]");
  double y = (x - spec.t_left - 0.5 * spec.delta) * 2.0 / spec.delta;
  y = std::clamp(y, -1.0, 1.0);
  std::vector<double> p(j + 1);
  legendre_values(y, j, p.data());
  return std::sqrt((2.0 * j + 1.0) / spec.delta) * p[j];
}

std::vector<std::pair<double, double>> gauss_nodes(int n) {
  if (n < 1 || n > 64) throw ArgumentError("gauss_nodes: n must be in [1, 64]");
  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[i] = {-x, w};
    rule[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) rule[n / 2].first = 0.0;
  return rule;
}

}  // namespace stochtaylor
