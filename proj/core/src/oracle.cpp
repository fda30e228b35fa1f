#include "stochtaylor/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include <Eigen/Dense>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/errors.hpp"
#include "stochtaylor/schemes.hpp"

namespace stochtaylor {

FinePath synthesize_path(int m, long n_fine, double delta, RngStream& rng) {
  if (m < 1) throw ArgumentError("fine path needs at least one component");
  if (n_fine < 2) throw ArgumentError("fine path needs at least two cells");
  if (!(delta > 0.0)) throw ArgumentError("fine path needs delta > 0");
  FinePath path{m, n_fine, delta, std::vector<double>(static_cast<size_t>(m) * static_cast<size_t>(n_fine))};
  const double s = std::sqrt(delta / static_cast<double>(n_fine));
  rng.fill_normal(path.dw, s);
  return path;
}

FinePath coarsen(const FinePath& path) {
  if (path.n_fine % 2 != 0) throw ArgumentError("cannot halve an odd partition");
  FinePath out{path.m, path.n_fine / 2, path.delta, std::vector<double>(path.dw.size() / 2)};
  for (size_t l = 0; l < out.dw.size(); ++l) out.dw[l] = path.dw[2 * l] + path.dw[2 * l + 1];
  return out;
}

namespace {

void check_multi(const MultiIndex& multi, int m) {
  require_supported(multi.family);
  if (static_cast<int>(multi.components.size()) != multi.family.k())
    throw ArgumentError("component count does not match family " + multi.family.str());
  for (int i : multi.components)
    if (i < 0 || i > m) throw ArgumentError("component " + std::to_string(i) + " is not on the path");
}

// Level weights (tau_start - tau_l)^l at the left points.
std::vector<double> level_weights(int l, long n, double delta) {
  std::vector<double> w(static_cast<size_t>(n));
  for (long c = 0; c < n; ++c) w[c] = std::pow(-delta * static_cast<double>(c) / static_cast<double>(n), l);
  return w;
}

// Exclusive prefix sums of v written back into v, in four interleaved chains.
void exclusive_scan(double* v, long n) {
  const long q = n / 4;
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (long c = 0; c < q; ++c) {
    for (int a = 0; a < 4; ++a) {
      const double x = v[a * q + c];
      v[a * q + c] = acc[a];
      acc[a] += x;
    }
  }
  double tail = acc[0] + acc[1] + acc[2] + acc[3];
  for (long c = 4 * q; c < n; ++c) {
    const double x = v[c];
    v[c] = tail;
    tail += x;
  }
  double offset = acc[0];
  for (int a = 1; a < 4; ++a) {
    double* blk = v + a * q;
    for (long c = 0; c < q; ++c) blk[c] += offset;
    offset += acc[a];
  }
}

// A null weight pointer stands for the constant weight 1.
double iterated_sum(const std::vector<const double*>& weights, const std::vector<const double*>& dws, double det,
                    long n, std::vector<double>& scratch) {
  using Arr = Eigen::Array<double, Eigen::Dynamic, 1>;
  using CMap = Eigen::Map<const Arr>;
  const size_t k = weights.size();
  scratch.resize(static_cast<size_t>(n));
  Eigen::Map<Arr> s(scratch.data(), n);
  std::vector<double> ones;
  for (size_t r = 0; r < k; ++r) {
    const bool first = r == 0;
    const bool last = r + 1 == k;
    if (!dws[r] || !weights[r]) {
      // Rare paths: deterministic component or unit weight with a deterministic increment.
      if (ones.empty()) ones.assign(static_cast<size_t>(n), 1.0);
    }
    const CMap w(weights[r] ? weights[r] : ones.data(), n);
    const bool unit = weights[r] == nullptr;
    if (dws[r]) {
      const CMap d(dws[r], n);
      if (last) {
        if (first) return unit ? d.sum() : (w * d).sum();
        return unit ? (d * s).sum() : (w * d * s).sum();
      }
      if (first && unit)
        s = d;
      else if (first)
        s = w * d;
      else if (unit)
        s *= d;
      else
        s *= w * d;
    } else {
      if (last) return det * (first ? w.sum() : (w * s).sum());
      if (first)
        s = det * w;
      else
        s = det * w * s;
    }
    exclusive_scan(scratch.data(), n);
  }
  return 0.0;
}

}  // namespace

double integral_sum(const MultiIndex& multi, const FinePath& path) {
  check_multi(multi, path.m);
  const int k = multi.family.k();
  std::vector<std::vector<double>> w(k);
  std::vector<const double*> wp(k), dp(k);
  for (int r = 0; r < k; ++r) {
    w[r] = level_weights(multi.family.l[r], path.n_fine, path.delta);
    wp[r] = multi.family.l[r] == 0 ? nullptr : w[r].data();
    const int i = multi.components[r];
    dp[r] = i == 0 ? nullptr : path.increments(i).data();
  }
  std::vector<double> scratch;
  return iterated_sum(wp, dp, path.delta / static_cast<double>(path.n_fine), path.n_fine, scratch);
}

namespace {

std::vector<double> phi_table(long n, int j_max, const ShiftedBasisSpec& spec) {
  std::vector<double> table(static_cast<size_t>(j_max + 1) * static_cast<size_t>(n));
  std::vector<double> p(static_cast<size_t>(j_max + 1));
  for (long c = 0; c < n; ++c) {
    const double tau = spec.t_left + spec.delta * static_cast<double>(c) / static_cast<double>(n);
    legendre_values((tau - spec.t_left - 0.5 * spec.delta) * 2.0 / spec.delta, j_max, p.data());
    for (int j = 0; j <= j_max; ++j)
      table[static_cast<size_t>(j) * n + c] = std::sqrt((2.0 * j + 1.0) / spec.delta) * p[j];
  }
  return table;
}

void project_into(const FinePath& path, int j_max, const std::vector<double>& phi, NoiseBasis& out) {
  using CVec = Eigen::Map<const Eigen::VectorXd>;
  const long n = path.n_fine;
  for (int i = 1; i <= path.m; ++i) {
    const CVec w(path.dw.data() + static_cast<size_t>(i - 1) * n, n);
    for (int j = 0; j <= j_max; ++j) out.at(i, j) = w.dot(CVec(phi.data() + static_cast<size_t>(j) * n, n));
  }
}

}  // namespace

NoiseBasis project_zeta(const FinePath& path, int j_max, const ShiftedBasisSpec& spec) {
  if (j_max < 0) throw ArgumentError("j_max must be nonnegative");
  if (std::abs(spec.delta - path.delta) > 1e-12 * path.delta)
    throw ArgumentError("basis interval does not match the path");
  NoiseBasis out(path.m, j_max, path.delta);
  project_into(path, j_max, phi_table(path.n_fine, j_max, spec), out);
  return out;
}

NoiseBasis project_zeta(const FinePath& path, int j_max) { return project_zeta(path, j_max, {0.0, path.delta}); }

bool CoupledEstimate::bias_ok() const { return std::abs(mean - mean_half) <= 3.0 * std_error; }

namespace {

struct Moments {
  double s1 = 0, s2 = 0;
  void add(double v) {
    s1 += v;
    s2 += v * v;
  }
  void merge(const Moments& o) {
    s1 += o.s1;
    s2 += o.s2;
  }
  double mean(long n) const { return s1 / static_cast<double>(n); }
  double std_error(long n) const {
    if (n < 2) return 0.0;
    const double mu = mean(n);
    const double var = std::max(0.0, (s2 - static_cast<double>(n) * mu * mu) / static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

struct CaseMoments {
  Moments err, err_half, shift, second;
  void merge(const CaseMoments& o) {
    err.merge(o.err);
    err_half.merge(o.err_half);
    shift.merge(o.shift);
    second.merge(o.second);
  }
};

struct Grid {
  long n = 0;
  std::vector<double> phi;
  std::vector<std::vector<std::vector<double>>> weights;  // [case][level]
};

}  // namespace

std::vector<CoupledEstimate> coupled_ms_error(const std::vector<CoupledCase>& cases, long samples, long n_fine,
                                              double delta, std::uint64_t seed, int threads) {
  if (cases.empty()) return {};
  if (samples < 2) throw ArgumentError("coupled estimates need at least two samples");
  if (n_fine < 4 || n_fine % 2 != 0) throw ArgumentError("n_fine must be even and at least 4");
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  int m = 1, j_max = 0;
  std::vector<std::shared_ptr<const CoefficientTable>> tables;
  for (const auto& c : cases) {
    check_multi(MultiIndex{c.family, c.components}, 64);
    for (int i : c.components)
      if (i < 1) throw ArgumentError("coupled estimates use components 1..m");
    m = std::max(m, *std::max_element(c.components.begin(), c.components.end()));
    if (c.q < 0) throw ArgumentError("q must be nonnegative");
    j_max = std::max(j_max, c.q);
    tables.push_back(get_table(c.family, c.q));
  }
  // Cases sharing family and components share one iterated sum.
  std::vector<size_t> sum_slot(cases.size());
  std::vector<size_t> slot_case;
  for (size_t ci = 0; ci < cases.size(); ++ci) {
    size_t found = slot_case.size();
    for (size_t t = 0; t < slot_case.size(); ++t) {
      const auto& o = cases[slot_case[t]];
      if (o.family == cases[ci].family && o.components == cases[ci].components) found = t;
    }
    if (found == slot_case.size()) slot_case.push_back(ci);
    sum_slot[ci] = found;
  }
  Grid grids[2];
  for (int g = 0; g < 2; ++g) {
    Grid& grid = grids[g];
    grid.n = g == 0 ? n_fine : n_fine / 2;
    grid.phi = phi_table(grid.n, j_max, {0.0, delta});
    for (const auto& c : cases) {
      std::vector<std::vector<double>> w;
      for (int l : c.family.l) w.push_back(l == 0 ? std::vector<double>() : level_weights(l, grid.n, delta));
      grid.weights.push_back(std::move(w));
    }
  }

  const long n_blocks = std::min<long>(samples, 512);
  std::vector<std::vector<CaseMoments>> blocks(static_cast<size_t>(n_blocks),
                                               std::vector<CaseMoments>(cases.size()));
  std::atomic<long> next{0};
  auto worker = [&]() {
    std::vector<double> scratch;
    std::vector<const double*> wp, dp;
    std::vector<double> sums[2] = {std::vector<double>(slot_case.size()), std::vector<double>(slot_case.size())};
    NoiseBasis basis[2] = {NoiseBasis(m, j_max, delta), NoiseBasis(m, j_max, delta)};
    FinePath paths[2];
    for (int g = 0; g < 2; ++g)
      paths[g] = FinePath{m, grids[g].n, delta, std::vector<double>(static_cast<size_t>(m) * grids[g].n)};
    const double step_sd = std::sqrt(delta / static_cast<double>(n_fine));
    for (long b = next++; b < n_blocks; b = next++) {
      const long lo = b * samples / n_blocks, hi = (b + 1) * samples / n_blocks;
      auto& acc = blocks[static_cast<size_t>(b)];
      for (long s = lo; s < hi; ++s) {
        RngStream rng(seed, static_cast<std::uint64_t>(s));
        rng.fill_normal(paths[0].dw, step_sd);
        for (size_t l = 0; l < paths[1].dw.size(); ++l) paths[1].dw[l] = paths[0].dw[2 * l] + paths[0].dw[2 * l + 1];
        for (int g = 0; g < 2; ++g) {
          project_into(paths[g], j_max, grids[g].phi, basis[g]);
          for (size_t t = 0; t < slot_case.size(); ++t) {
            const auto& c = cases[slot_case[t]];
            const int k = c.family.k();
            wp.assign(k, nullptr);
            dp.assign(k, nullptr);
            for (int r = 0; r < k; ++r) {
              wp[r] = c.family.l[r] == 0 ? nullptr : grids[g].weights[slot_case[t]][r].data();
              dp[r] = paths[g].increments(c.components[r]).data();
            }
            sums[g][t] = iterated_sum(wp, dp, 0.0, grids[g].n, scratch);
          }
        }
        for (size_t ci = 0; ci < cases.size(); ++ci) {
          const auto& c = cases[ci];
          double sq[2], sum0 = 0.0;
          for (int g = 0; g < 2; ++g) {
            const double sum = sums[g][sum_slot[ci]];
            const double expansion = ito_generic(*tables[ci], basis[g], c.components, c.q).value;
            sq[g] = (sum - expansion) * (sum - expansion);
            if (g == 0) sum0 = sum;
          }
          acc[ci].err.add(sq[0]);
          acc[ci].err_half.add(sq[1]);
          acc[ci].shift.add(sq[0] - sq[1]);
          acc[ci].second.add(sum0 * sum0);
        }
      }
    }
  };
  const int nt = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(n_blocks)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<CoupledEstimate> out;
  for (size_t ci = 0; ci < cases.size(); ++ci) {
    CaseMoments total;
    for (const auto& b : blocks) total.merge(b[ci]);
    CoupledEstimate e;
    e.which = cases[ci];
    e.samples = samples;
    e.n_fine = n_fine;
    e.mean = total.err.mean(samples);
    e.std_error = total.err.std_error(samples);
    e.mean_half = total.err_half.mean(samples);
    e.shift_std_error = total.shift.std_error(samples);
    e.second_moment = total.second.mean(samples);
    e.second_moment_std_error = total.second.std_error(samples);
    out.push_back(e);
  }
  return out;
}

CoupledEstimate coupled_ms_error(const WeightFamily& family, std::span<const int> components, int q, long samples,
                                 long n_fine, double delta, std::uint64_t seed, int threads) {
  CoupledCase c{family, std::vector<int>(components.begin(), components.end()), q};
  return coupled_ms_error(std::vector<CoupledCase>{c}, samples, n_fine, delta, seed, threads).front();
}

namespace {

mpz_class binomial(long n, long k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

// (-1)^l y^l P_j(y - 1) in powers of y, from the explicit sum for P_j.
std::vector<mpq_class> shifted_level(int j, int l) {
  std::vector<mpq_class> x_coeffs(static_cast<size_t>(j + 1));
  mpz_class two_j = 1;
  two_j <<= j;
  for (int k = 0; 2 * k <= j; ++k) {
    mpq_class c(binomial(j, k) * binomial(2 * j - 2 * k, j), two_j);
    if (k % 2) c = -c;
    x_coeffs[j - 2 * k] = c;
  }
  std::vector<mpq_class> y(static_cast<size_t>(j + l + 1));
  for (int d = 0; d <= j; ++d) {
    if (x_coeffs[d] == 0) continue;
    for (int e = 0; e <= d; ++e) {
      mpq_class term = x_coeffs[d] * mpq_class(binomial(d, e));
      if ((d - e) % 2) term = -term;
      y[e + l] += l % 2 ? mpq_class(-term) : term;
    }
  }
  return y;
}

}  // namespace

mpq_class symbolic_coeff(const WeightFamily& family, std::span<const int> j) {
  require_supported(family);
  if (static_cast<int>(j.size()) != family.k()) throw ArgumentError("index count does not match family");
  for (int v : j)
    if (v < 0) throw ArgumentError("indices must be nonnegative");
  // state: running exponent sum E_r, value: accumulated coefficient / prod E_s
  std::map<long, mpq_class> states{{0, mpq_class(1)}};
  for (int r = 0; r < family.k(); ++r) {
    const auto level = shifted_level(j[r], family.l[r]);
    std::map<long, mpq_class> next;
    for (const auto& [E, v] : states) {
      for (size_t e = 0; e < level.size(); ++e) {
        if (level[e] == 0) continue;
        const long E2 = E + static_cast<long>(e) + 1;
        next[E2] += v * level[e] / mpq_class(E2);
      }
    }
    states = std::move(next);
  }
  mpq_class out = 0;
  for (const auto& [E, v] : states) {
    mpz_class p = 1;
    p <<= E;
    out += v * mpq_class(p);
  }
  out.canonicalize();
  return out;
}

BasisTransfer::BasisTransfer(int j_max, int ratio, double tol) : j_max_(j_max), ratio_(ratio) {
  if (j_max < 0) throw ArgumentError("j_max must be nonnegative");
  if (ratio < 1) throw ArgumentError("transfer ratio must be positive");
  const double h = 1.0 / ratio;
  rows_.resize(static_cast<size_t>(ratio));
  for (int s = 0; s < ratio; ++s) {
    const double c = -1.0 + (2.0 * s + 1.0) * h;
    // Legendre coordinates in the local variable u of P_j(c + h u), by the three-term recurrence.
    std::vector<double> prev, cur{1.0};
    auto& rows = rows_[static_cast<size_t>(s)];
    for (int j = 0; j <= j_max; ++j) {
      std::vector<double> row(cur.size());
      for (size_t k = 0; k < cur.size(); ++k)
        row[k] = cur[k] * std::sqrt((2.0 * j + 1.0) / (2.0 * k + 1.0)) / std::sqrt(static_cast<double>(ratio));
      size_t keep = row.size();
      while (keep > 1 && std::abs(row[keep - 1]) < tol) --keep;
      row.resize(keep);
      fine_needed_ = std::max(fine_needed_, static_cast<int>(keep) - 1);
      rows.push_back(std::move(row));
      if (j == j_max) break;
      std::vector<double> next(cur.size() + 1, 0.0);
      for (size_t k = 0; k < cur.size(); ++k) {
        const double a = cur[k];
        next[k] += (2.0 * j + 1.0) * c * a;
        // u P_k = ((k+1) P_{k+1} + k P_{k-1}) / (2k+1)
        next[k + 1] += (2.0 * j + 1.0) * h * a * (k + 1.0) / (2.0 * k + 1.0);
        if (k > 0) next[k - 1] += (2.0 * j + 1.0) * h * a * static_cast<double>(k) / (2.0 * k + 1.0);
      }
      for (size_t k = 0; k < prev.size(); ++k) next[k] -= static_cast<double>(j) * prev[k];
      for (double& v : next) v /= (j + 1.0);
      prev = std::move(cur);
      cur = std::move(next);
    }
  }
}

double BasisTransfer::weight(int j, int s, int k) const {
  const auto& row = rows_.at(static_cast<size_t>(s)).at(static_cast<size_t>(j));
  return k >= 0 && static_cast<size_t>(k) < row.size() ? row[k] : 0.0;
}

NoiseBasis BasisTransfer::coarse(std::span<const NoiseBasis> fine) const {
  if (static_cast<int>(fine.size()) != ratio_) throw ArgumentError("transfer needs one basis per sub-step");
  const int m = fine.front().m();
  for (const auto& b : fine)
    if (b.m() != m || b.j_max() < fine_needed_) throw ArgumentError("fine bases are too small for the transfer");
  NoiseBasis out(m, j_max_, fine.front().delta() * ratio_);
  for (int i = 1; i <= m; ++i) {
    for (int j = 0; j <= j_max_; ++j) {
      double v = 0.0;
      for (int s = 0; s < ratio_; ++s) {
        const auto& row = rows_[static_cast<size_t>(s)][static_cast<size_t>(j)];
        const auto z = fine[static_cast<size_t>(s)].row(i);
        for (size_t k = 0; k < row.size(); ++k) v += row[k] * z[k];
      }
      out.at(i, j) = v;
    }
  }
  return out;
}

}  // namespace stochtaylor
