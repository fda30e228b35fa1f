#pragma once

#include <gmpxx.h>

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stochtaylor/family.hpp"

namespace stochtaylor {

// Multi-indices below are ordered (j_1, ..., j_k): j_1 pairs with l_1, the innermost level.

// Exact C-bar: iterated integral over [-1,1] of prod P_{j_r}(x_r) (-(x_r+1))^{l_r},
// innermost level first.
mpq_class barred_coefficient(const WeightFamily& family, std::span<const int> j);

// C = sqrt(prod(2 j_r + 1)) / 2^{k + sum l} * delta^{(k + 2 sum l)/2} * C-bar.
double scale_coefficient(const WeightFamily& family, std::span<const int> j, double delta);
// C^2 at delta = 1 as an exact rational.
mpq_class scaled_square_unit(const WeightFamily& family, std::span<const int> j, const mpq_class& cbar);

// Integral of the squared kernel divided by delta^{k + 2 sum l}.
mpq_class norm_squared(const WeightFamily& family);

// Largest q_max build_table accepts: 64 for k <= 3, 24 for k = 4, 12 for k = 5, 8 for k = 6.
int table_q_cap(const WeightFamily& family);
inline constexpr int kMaxTableQ = 64;

class CoefficientTable {
 public:
  CoefficientTable(WeightFamily family, int q_max, std::vector<mpq_class> entries, mpq_class norm_sq_unit);

  const WeightFamily& family() const { return family_; }
  int q_max() const { return q_max_; }
  int k() const { return family_.k(); }
  size_t size() const { return entries_.size(); }
  const mpq_class& norm_sq_unit() const { return norm_sq_unit_; }

  // Flat position of (j_1..j_k): j_k is the slowest index and j_1 the fastest.
  size_t offset(std::span<const int> j) const;
  std::vector<int> index_of(size_t offset) const;

  const mpq_class& barred(std::span<const int> j) const { return entries_[offset(j)]; }
  const mpq_class& barred_at(size_t offset) const { return entries_[offset]; }
  const std::vector<mpq_class>& entries() const { return entries_; }

  // C at delta = 1 in double precision (the single conversion point).
  const std::vector<double>& unit_scaled() const { return unit_scaled_; }
  double scaled(std::span<const int> j, double delta) const;

  // Exact sum of C^2 (delta = 1) over the box max_r j_r <= q, for q = 0..q_max.
  const std::vector<mpq_class>& parseval_partial_sums() const;
  // norm_sq_unit minus the box partial sum at level q.
  mpq_class residual_unit(int q) const;

  bool operator==(const CoefficientTable& other) const;

 private:
  WeightFamily family_;
  int q_max_;
  std::vector<mpq_class> entries_;
  mpq_class norm_sq_unit_;
  std::vector<double> unit_scaled_;
  mutable std::vector<mpq_class> partial_sums_;
};

CoefficientTable build_table(const WeightFamily& family, int q_max);

// Text format "FLTABLE v1", see README.
void save_table(const CoefficientTable& table, const std::string& path);
CoefficientTable load_table(const std::string& path);
// Lowercase hex SHA-256 digest, as used in table files.
std::string sha256_hex(const std::string& data);

// File name used inside the table directory, e.g. "fl_000_q6.fltable".
std::string table_file_name(const WeightFamily& family, int q_max);

// Process-wide table cache. Consults STOCHTAYLOR_TABLE_DIR when it is set, building
// and persisting missing tables there. A table that is too small is replaced by one at least
// twice its size, so repeated growing requests stay cheap.
std::shared_ptr<const CoefficientTable> get_table(const WeightFamily& family, int q_min);
void clear_table_cache();

// Exact C-bar of a two-level family through banded Legendre-basis arithmetic.
// Valid for any indices up to the polynomial degree cap; zero when |j_1 - j_2| > l_1 + l_2 + 1.
mpq_class barred_coefficient_pair(const WeightFamily& family, int j1, int j2);

}  // namespace stochtaylor
