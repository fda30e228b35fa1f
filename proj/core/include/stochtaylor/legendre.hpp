#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

namespace stochtaylor {

// Highest polynomial degree the library will construct.
inline constexpr int kMaxPolyDegree = 512;

// Exact polynomial in the monomial basis; coeffs[d] multiplies x^d.
struct RationalPolynomial {
  std::vector<mpq_class> coeffs;

  int degree() const;
  bool is_zero() const;
  mpq_class eval(const mpq_class& x) const;
  // Horner on the coefficients rounded to double.
  double eval(double x) const;

  RationalPolynomial operator*(const RationalPolynomial& other) const;
  RationalPolynomial operator+(const RationalPolynomial& other) const;
  RationalPolynomial antiderivative_from(const mpq_class& a) const;
  mpq_class integrate(const mpq_class& a, const mpq_class& b) const;
  void trim();
};

// P_n in exact monomial form, built from the three-term recurrence and cached.
const RationalPolynomial& legendre_poly(int n);

struct ShiftedBasisSpec {
  double t_left;
  double delta;
};

// phi_j(x) = sqrt((2j+1)/delta) * P_j((x - t_left - delta/2) * 2/delta).
double eval_shifted(int j, double x, const ShiftedBasisSpec& spec);

// P_0(x)..P_jmax(x) in double precision via the recurrence. Stable on [-1, 1].
void legendre_values(double x, int jmax, double* out);
std::vector<double> legendre_values(double x, int jmax);

// Gauss-Legendre rule on [-1, 1] with n nodes, 1 <= n <= 64.
std::vector<std::pair<double, double>> gauss_nodes(int n);

}  // namespace stochtaylor
