#include "stochtaylor/coeffs.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>

#include "stochtaylor/errors.hpp"
#include "stochtaylor/legendre.hpp"

namespace stochtaylor {

namespace {

void check_index(const WeightFamily& family, std::span<const int> j) {
  if (static_cast<int>(j.size()) != family.k())
    throw ArgumentError("multi-index length " + std::to_string(j.size()) + " does not match family " + family.str());
  for (int v : j)
    if (v < 0 || v > kMaxPolyDegree) throw ArgumentError("multi-index entry out of range");
}

// (-(x+1))^l in exact monomial form.
RationalPolynomial weight_poly(int l) {
  RationalPolynomial w{{mpq_class(1)}};
  const RationalPolynomial step{{mpq_class(-1), mpq_class(-1)}};
  for (int i = 0; i < l; ++i) w = w * step;
  return w;
}

// Integer-coefficient polynomial over a shared denominator.
struct ZPoly {
  std::vector<mpz_class> c;
  mpz_class den = 1;
};

struct IntegerTables {
  // 2^j P_j with integer coefficients.
  std::vector<std::vector<mpz_class>> scaled_legendre;
  // lcm(1..n).
  std::vector<mpz_class> lcm_upto;
};

const IntegerTables& integer_tables(int max_j, int max_deg) {
  static std::mutex mu;
  static IntegerTables t;
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(t.scaled_legendre.size()) <= max_j) {
    const int j = static_cast<int>(t.scaled_legendre.size());
    const auto& p = legendre_poly(j);
    mpz_class scale = 1;
    scale <<= j;
    std::vector<mpz_class> row(p.coeffs.size());
    for (size_t d = 0; d < p.coeffs.size(); ++d) {
      mpq_class v = p.coeffs[d] * scale;
      v.canonicalize();
      if (v.get_den() != 1) throw std::logic_error("unexpected Legendre denominator");
      row[d] = v.get_num();
    }
    t.scaled_legendre.push_back(std::move(row));
  }
  if (t.lcm_upto.empty()) t.lcm_upto.push_back(1);
  while (static_cast<int>(t.lcm_upto.size()) <= max_deg + 1) {
    const long n = static_cast<long>(t.lcm_upto.size());
    mpz_class l;
    mpz_lcm_ui(l.get_mpz_t(), t.lcm_upto.back().get_mpz_t(), n);
    t.lcm_upto.push_back(l);
  }
  return t;
}

std::vector<mpz_class> weight_integer(int l) {
  std::vector<mpz_class> w{1};
  for (int i = 0; i < l; ++i) {
    std::vector<mpz_class> nw(w.size() + 1, 0);
    for (size_t d = 0; d < w.size(); ++d) {
      nw[d] -= w[d];
      nw[d + 1] -= w[d];
    }
    w = std::move(nw);
  }
  return w;
}

std::vector<mpz_class> multiply(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  std::vector<mpz_class> out(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0) continue;
    for (size_t k = 0; k < b.size(); ++k)
      if (sgn(b[k]) != 0) mpz_addmul(out[i + k].get_mpz_t(), a[i].get_mpz_t(), b[k].get_mpz_t());
  }
  return out;
}

void reduce(ZPoly& p) {
  mpz_class g = p.den;
  for (const auto& v : p.c) {
    if (g == 1) break;
    if (sgn(v) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g != 1) {
    for (auto& v : p.c) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(p.den.get_mpz_t(), p.den.get_mpz_t(), g.get_mpz_t());
  }
}

// F_new(x) = integral from -1 to x of pw(y) F(y) dy, where pw = 2^j P_j w_l (so divide by 2^j).
ZPoly level_step(const ZPoly& f, const std::vector<mpz_class>& pw, int j, const IntegerTables& t) {
  std::vector<mpz_class> g = multiply(pw, f.c);
  const size_t n = g.size();
  const mpz_class& L = t.lcm_upto[n];
  ZPoly out;
  out.c.assign(n + 1, 0);
  mpz_class q;
  mpz_class alt = 0;
  for (size_t d = 0; d < n; ++d) {
    mpz_divexact_ui(q.get_mpz_t(), L.get_mpz_t(), static_cast<unsigned long>(d + 1));
    out.c[d + 1] = g[d] * q;
    if (d % 2 == 0)
      alt += out.c[d + 1];
    else
      alt -= out.c[d + 1];
  }
  // Value at -1 of sum c_{d+1} x^{d+1} is sum c_{d+1} (-1)^{d+1}; subtract it.
  out.c[0] = alt;
  out.den = f.den * L;
  out.den <<= j;
  reduce(out);
  return out;
}

// Row j of the moment matrix int_{-1}^{1} P_j(x) x^d dx = A[d] / B, d = 0..max_deg.
struct MomentRow {
  std::vector<mpz_class> a;
  mpz_class b = 1;
};

MomentRow moment_row(int j, int max_deg) {
  std::vector<mpq_class> m(max_deg + 1, mpq_class(0));
  mpz_class two_pow = 1;
  two_pow <<= (j + 1);
  for (int d = j; d <= max_deg; d += 2) {
    mpz_class fd, fh, fl, fs;
    mpz_fac_ui(fd.get_mpz_t(), d);
    mpz_fac_ui(fh.get_mpz_t(), (d + j) / 2);
    mpz_fac_ui(fl.get_mpz_t(), (d - j) / 2);
    mpz_fac_ui(fs.get_mpz_t(), d + j + 1);
    m[d] = mpq_class(two_pow * fd * fh, fl * fs);
    m[d].canonicalize();
  }
  MomentRow row;
  for (const auto& v : m)
    if (sgn(v) != 0) mpz_lcm(row.b.get_mpz_t(), row.b.get_mpz_t(), v.get_den_mpz_t());
  row.a.resize(max_deg + 1);
  for (int d = 0; d <= max_deg; ++d) {
    if (sgn(m[d]) == 0) {
      row.a[d] = 0;
      continue;
    }
    mpz_class f;
    mpz_divexact(f.get_mpz_t(), row.b.get_mpz_t(), m[d].get_den_mpz_t());
    row.a[d] = m[d].get_num() * f;
  }
  return row;
}

}  // namespace

mpq_class barred_coefficient(const WeightFamily& family, std::span<const int> j) {
  require_supported(family);
  check_index(family, j);
  RationalPolynomial f{{mpq_class(1)}};
  const mpq_class minus_one(-1);
  for (int r = 0; r < family.k(); ++r) f = (f * legendre_poly(j[r]) * weight_poly(family.l[r])).antiderivative_from(minus_one);
  return f.eval(mpq_class(1));
}

mpq_class scaled_square_unit(const WeightFamily& family, std::span<const int> j, const mpq_class& cbar) {
  mpz_class prod = 1;
  for (int v : j) prod *= (2 * v + 1);
  mpz_class den = 1;
  den <<= 2 * (family.k() + family.sum_l());
  mpq_class out = mpq_class(prod, den) * cbar * cbar;
  out.canonicalize();
  return out;
}

double scale_coefficient(const WeightFamily& family, std::span<const int> j, double delta) {
  if (!(delta > 0.0)) throw ArgumentError("scale_coefficient needs delta > 0");
  const mpq_class cbar = barred_coefficient(family, j);
  double prod = 1.0;
  for (int v : j) prod *= (2.0 * v + 1.0);
  const double factor = std::sqrt(prod) / std::ldexp(1.0, family.k() + family.sum_l());
  return factor * std::pow(delta, 0.5 * family.delta_power()) * cbar.get_d();
}

mpq_class norm_squared(const WeightFamily& family) {
  require_supported(family);
  mpq_class out = 1;
  long partial = 0;
  for (int l : family.l) {
    partial += 2 * l + 1;
    out /= partial;
  }
  out.canonicalize();
  return out;
}

int table_q_cap(const WeightFamily& family) {
  switch (family.k()) {
    case 1:
    case 2:
    case 3:
      return 64;
    case 4:
      return 24;
    case 5:
      return 12;
    default:
      return 8;
  }
}

CoefficientTable::CoefficientTable(WeightFamily family, int q_max, std::vector<mpq_class> entries,
                                   mpq_class norm_sq_unit)
    : family_(std::move(family)), q_max_(q_max), entries_(std::move(entries)), norm_sq_unit_(std::move(norm_sq_unit)) {
  size_t expected = 1;
  for (int r = 0; r < family_.k(); ++r) expected *= static_cast<size_t>(q_max_ + 1);
  if (entries_.size() != expected) throw ArgumentError("coefficient tensor has the wrong number of entries");
  unit_scaled_.resize(entries_.size());
  const double pow2 = std::ldexp(1.0, family_.k() + family_.sum_l());
  std::vector<int> j(family_.k(), 0);
  for (size_t off = 0; off < entries_.size(); ++off) {
    double prod = 1.0;
    for (int v : j) prod *= (2.0 * v + 1.0);
    unit_scaled_[off] = std::sqrt(prod) / pow2 * entries_[off].get_d();
    for (int r = 0; r < family_.k(); ++r) {
      if (++j[r] <= q_max_) break;
      j[r] = 0;
    }
  }
}

size_t CoefficientTable::offset(std::span<const int> j) const {
  if (static_cast<int>(j.size()) != k()) throw ArgumentError("multi-index length does not match table");
  size_t off = 0;
  for (int r = k() - 1; r >= 0; --r) {
    if (j[r] < 0 || j[r] > q_max_) throw ArgumentError("multi-index exceeds table q_max");
    off = off * static_cast<size_t>(q_max_ + 1) + static_cast<size_t>(j[r]);
  }
  return off;
}

std::vector<int> CoefficientTable::index_of(size_t off) const {
  std::vector<int> j(k());
  for (int r = 0; r < k(); ++r) {
    j[r] = static_cast<int>(off % static_cast<size_t>(q_max_ + 1));
    off /= static_cast<size_t>(q_max_ + 1);
  }
  return j;
}

double CoefficientTable::scaled(std::span<const int> j, double delta) const {
  return unit_scaled_[offset(j)] * std::pow(delta, 0.5 * family_.delta_power());
}

const std::vector<mpq_class>& CoefficientTable::parseval_partial_sums() const {
  if (!partial_sums_.empty()) return partial_sums_;
  // Accumulate each shell over a common denominator to avoid a gcd per addition.
  std::vector<mpz_class> shell_num(q_max_ + 1, 0);
  std::vector<mpz_class> shell_den(q_max_ + 1, 1);
  mpz_class base_den = 1;
  base_den <<= 2 * (family_.k() + family_.sum_l());
  std::vector<int> j(k(), 0);
  for (size_t off = 0; off < entries_.size(); ++off) {
    const mpq_class& c = entries_[off];
    if (sgn(c) != 0) {
      long prod = 1;
      int shell = 0;
      for (int v : j) {
        prod *= (2 * v + 1);
        shell = std::max(shell, v);
      }
      // term = prod * num^2 / (den^2): add into shell_num / shell_den.
      mpz_class num = c.get_num() * c.get_num() * prod;
      mpz_class den = c.get_den() * c.get_den();
      mpz_class& sd = shell_den[shell];
      if (mpz_divisible_p(sd.get_mpz_t(), den.get_mpz_t())) {
        mpz_class f;
        mpz_divexact(f.get_mpz_t(), sd.get_mpz_t(), den.get_mpz_t());
        shell_num[shell] += num * f;
      } else {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), sd.get_mpz_t(), den.get_mpz_t());
        mpz_class fs, fd;
        mpz_divexact(fs.get_mpz_t(), l.get_mpz_t(), sd.get_mpz_t());
        mpz_divexact(fd.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
        shell_num[shell] = shell_num[shell] * fs + num * fd;
        sd = l;
      }
    }
    for (int r = 0; r < k(); ++r) {
      if (++j[r] <= q_max_) break;
      j[r] = 0;
    }
  }
  partial_sums_.resize(q_max_ + 1);
  mpq_class acc = 0;
  for (int q = 0; q <= q_max_; ++q) {
    mpq_class s(shell_num[q], shell_den[q] * base_den);
    s.canonicalize();
    acc += s;
    partial_sums_[q] = acc;
  }
  return partial_sums_;
}

mpq_class CoefficientTable::residual_unit(int q) const {
  if (q < 0 || q > q_max_) throw ArgumentError("residual level outside table");
  mpq_class r = norm_sq_unit_ - parseval_partial_sums()[q];
  r.canonicalize();
  return r;
}

bool CoefficientTable::operator==(const CoefficientTable& other) const {
  return family_ == other.family_ && q_max_ == other.q_max_ && norm_sq_unit_ == other.norm_sq_unit_ &&
         entries_ == other.entries_;
}

CoefficientTable build_table(const WeightFamily& family, int q_max) {
  require_supported(family);
  const int cap = table_q_cap(family);
  if (q_max < 0 || q_max > cap)
    throw ArgumentError("q_max " + std::to_string(q_max) + " exceeds the cap " + std::to_string(cap) + " for family " +
                        family.str());
  const int k = family.k();
  const size_t Q = static_cast<size_t>(q_max + 1);
  size_t total = 1;
  for (int r = 0; r < k; ++r) total *= Q;

  int max_deg = 0;
  for (int r = 0; r < k; ++r) max_deg += q_max + family.l[r] + 1;
  const IntegerTables& t = integer_tables(q_max, max_deg + 2);

  // pw[r][j] = 2^j P_j (-(x+1))^{l_r}.
  std::vector<std::vector<std::vector<mpz_class>>> pw(k);
  for (int r = 0; r < k; ++r) {
    const auto w = weight_integer(family.l[r]);
    for (int j = 0; j <= q_max; ++j) pw[r].push_back(multiply(t.scaled_legendre[j], w));
  }
  const auto w_last = weight_integer(family.l[k - 1]);
  std::vector<MomentRow> moments;
  moments.reserve(Q);
  for (int j = 0; j <= q_max; ++j) moments.push_back(moment_row(j, max_deg + 2));

  std::vector<mpq_class> entries(total);
  std::vector<size_t> stride(k, 1);
  for (int r = 1; r < k; ++r) stride[r] = stride[r - 1] * Q;

  // Depth-first over (j_1, ..., j_{k-1}) holding one polynomial per level.
  std::vector<ZPoly> level(k);
  level[0].c = {1};
  level[0].den = 1;
  std::vector<int> j(k, 0);
  auto finish = [&](const ZPoly& f, size_t base) {
    std::vector<mpz_class> g = multiply(w_last, f.c);
    mpz_class dot;
    for (int jk = 0; jk <= q_max; ++jk) {
      const MomentRow& row = moments[jk];
      dot = 0;
      for (size_t d = static_cast<size_t>(jk); d < g.size(); d += 2)
        if (sgn(g[d]) != 0) mpz_addmul(dot.get_mpz_t(), g[d].get_mpz_t(), row.a[d].get_mpz_t());
      mpq_class v(dot, f.den * row.b);
      v.canonicalize();
      entries[base + static_cast<size_t>(jk) * stride[k - 1]] = std::move(v);
    }
  };
  std::function<void(int, size_t)> descend = [&](int r, size_t base) {
    if (r == k - 1) {
      finish(level[r], base);
      return;
    }
    for (int jr = 0; jr <= q_max; ++jr) {
      level[r + 1] = level_step(level[r], pw[r][jr], jr, t);
      descend(r + 1, base + static_cast<size_t>(jr) * stride[r]);
    }
  };
  descend(0, 0);
  return CoefficientTable(family, q_max, std::move(entries), norm_squared(family));
}

namespace {

struct CacheState {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<const CoefficientTable>> tables;
};

CacheState& cache_state() {
  static CacheState s;
  return s;
}

}  // namespace

std::string table_file_name(const WeightFamily& family, int q_max) {
  return "fl_" + family.str() + "_q" + std::to_string(q_max) + ".fltable";
}

std::shared_ptr<const CoefficientTable> get_table(const WeightFamily& family, int q_min) {
  require_supported(family);
  const int cap = table_q_cap(family);
  if (q_min > cap)
    throw ArgumentError("q " + std::to_string(q_min) + " exceeds the table cap " + std::to_string(cap) + " for family " +
                        family.str());
  q_min = std::max(q_min, 0);
  auto& st = cache_state();
  std::lock_guard<std::mutex> lock(st.mu);
  auto it = st.tables.find(family.str());
  if (it != st.tables.end()) {
    if (it->second->q_max() >= q_min) return it->second;
    q_min = std::min(cap, std::max(q_min, 2 * it->second->q_max()));
  }

  std::shared_ptr<const CoefficientTable> table;
  const char* dir = std::getenv("STOCHTAYLOR_TABLE_DIR");
  if (dir != nullptr && *dir != '\0') {
    namespace fs = std::filesystem;
    for (int q = q_min; q <= cap && !table; ++q) {
      const fs::path p = fs::path(dir) / table_file_name(family, q);
      if (fs::exists(p)) table = std::make_shared<const CoefficientTable>(load_table(p.string()));
    }
    if (!table) {
      table = std::make_shared<const CoefficientTable>(build_table(family, q_min));
      std::error_code ec;
      fs::create_directories(dir, ec);
      save_table(*table, (fs::path(dir) / table_file_name(family, q_min)).string());
    }
  } else {
    table = std::make_shared<const CoefficientTable>(build_table(family, q_min));
  }
  st.tables[family.str()] = table;
  return table;
}

void clear_table_cache() {
  auto& st = cache_state();
  std::lock_guard<std::mutex> lock(st.mu);
  st.tables.clear();
}

namespace {

using LegendreSeries = std::map<int, mpq_class>;

void add_term(LegendreSeries& s, int n, const mpq_class& v) {
  if (n < 0 || sgn(v) == 0) return;
  auto& slot = s[n];
  slot += v;
}

// Multiply a Legendre series by -(x+1).
LegendreSeries apply_weight_step(const LegendreSeries& s) {
  LegendreSeries out;
  for (const auto& [n, v] : s) {
    add_term(out, n, -v);
    add_term(out, n + 1, -v * mpq_class(n + 1, 2 * n + 1));
    if (n > 0) add_term(out, n - 1, -v * mpq_class(n, 2 * n + 1));
  }
  return out;
}

// Antiderivative vanishing at -1.
LegendreSeries antiderivative_series(const LegendreSeries& s) {
  LegendreSeries out;
  for (const auto& [n, v] : s) {
    if (n == 0) {
      add_term(out, 1, v);
      add_term(out, 0, v);
    } else {
      const mpq_class f = v / mpq_class(2 * n + 1);
      add_term(out, n + 1, f);
      add_term(out, n - 1, -f);
    }
  }
  return out;
}

}  // namespace

mpq_class barred_coefficient_pair(const WeightFamily& family, int j1, int j2) {
  if (family.k() != 2) throw ArgumentError("barred_coefficient_pair needs a two-level family");
  if (j1 < 0 || j2 < 0 || j1 > kMaxPolyDegree || j2 > kMaxPolyDegree) throw ArgumentError("index out of range");
  if (std::abs(j1 - j2) > family.l[0] + family.l[1] + 1) return 0;
  LegendreSeries s{{j1, mpq_class(1)}};
  for (int i = 0; i < family.l[0]; ++i) s = apply_weight_step(s);
  s = antiderivative_series(s);
  for (int i = 0; i < family.l[1]; ++i) s = apply_weight_step(s);
  auto it = s.find(j2);
  if (it == s.end()) return 0;
  mpq_class out = it->second * mpq_class(2, 2 * j2 + 1);
  out.canonicalize();
  return out;
}

}  // namespace stochtaylor
