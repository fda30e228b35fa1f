#include "stochtaylor/iterints.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>

#include "stochtaylor/errors.hpp"

namespace stochtaylor {

std::vector<std::vector<std::pair<int, int>>> partial_pairings(int k) {
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> current;
  std::vector<char> used(k, 0);
  std::function<void(int)> rec = [&](int start) {
    out.push_back(current);
    for (int a = start; a < k; ++a) {
      if (used[a]) continue;
      used[a] = 1;
      for (int b = a + 1; b < k; ++b) {
        if (used[b]) continue;
        used[b] = 1;
        current.emplace_back(a, b);
        rec(a + 1);
        current.pop_back();
        used[b] = 0;
      }
      used[a] = 0;
    }
  };
  rec(0);
  return out;
}

namespace {

struct Pairing {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> free_slots;
  std::vector<double> traced;  // over free slots, first free slot fastest
};

// Unit-scale coefficient box of one family at one level plus its partial traces.
struct TensorData {
  WeightFamily family;
  int q = 0;
  std::vector<double> box;
  std::vector<Pairing> pairings;
};

std::vector<Pairing> make_pairings(const std::vector<double>& box, int k, int Q) {
  std::vector<Pairing> result;
  size_t total = 1;
  for (int r = 0; r < k; ++r) total *= static_cast<size_t>(Q);
  for (auto& pairs : partial_pairings(k)) {
    Pairing p;
    p.pairs = pairs;
    std::vector<char> paired(k, 0);
    for (auto [a, b] : pairs) paired[a] = paired[b] = 1;
    for (int r = 0; r < k; ++r)
      if (!paired[r]) p.free_slots.push_back(r);
    size_t fsize = 1;
    for (size_t s = 0; s < p.free_slots.size(); ++s) fsize *= static_cast<size_t>(Q);
    if (pairs.empty()) {
      p.traced = box;
    } else {
      p.traced.assign(fsize, 0.0);
      std::vector<int> j(k, 0);
      for (size_t off = 0; off < total; ++off) {
        bool diag = true;
        for (auto [a, b] : pairs)
          if (j[a] != j[b]) {
            diag = false;
            break;
          }
        if (diag) {
          size_t foff = 0;
          for (int s = static_cast<int>(p.free_slots.size()) - 1; s >= 0; --s)
            foff = foff * static_cast<size_t>(Q) + static_cast<size_t>(j[p.free_slots[s]]);
          p.traced[foff] += box[off];
        }
        for (int r = 0; r < k; ++r) {
          if (++j[r] < Q) break;
          j[r] = 0;
        }
      }
    }
    result.push_back(std::move(p));
  }
  return result;
}

std::shared_ptr<const TensorData> tensor_data(const CoefficientTable& table, int q) {
  static std::mutex mu;
  static std::map<std::pair<WeightFamily, int>, std::shared_ptr<const TensorData>> cache;
  const auto key = std::make_pair(table.family(), q);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto data = std::make_shared<TensorData>();
  data->family = table.family();
  data->q = q;
  const int k = table.k();
  const int Q = q + 1;
  size_t total = 1;
  for (int r = 0; r < k; ++r) total *= static_cast<size_t>(Q);
  data->box.resize(total);
  std::vector<int> j(k, 0);
  for (size_t off = 0; off < total; ++off) {
    data->box[off] = table.unit_scaled()[table.offset(j)];
    for (int r = 0; r < k; ++r) {
      if (++j[r] < Q) break;
      j[r] = 0;
    }
  }
  data->pairings = make_pairings(data->box, k, Q);
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(data));
  return it->second;
}

// Contract a tensor over n slots of extent Q (slot 0 fastest) with a list of vectors per slot.
// Result has one entry per choice of vector in each slot, slot 0 fastest.
std::vector<double> contract(const std::vector<double>& tensor, int Q,
                             const std::vector<std::vector<const double*>>& vecs) {
  std::vector<double> cur = tensor;
  const int n = static_cast<int>(vecs.size());
  size_t inner = 1;
  size_t outer = cur.size();
  for (int s = 0; s < n; ++s) {
    outer /= static_cast<size_t>(Q);
    const size_t c = vecs[s].size();
    std::vector<double> next(outer * c * inner, 0.0);
    for (size_t o = 0; o < outer; ++o) {
      for (size_t ci = 0; ci < c; ++ci) {
        const double* v = vecs[s][ci];
        double* dst = next.data() + (o * c + ci) * inner;
        for (int jj = 0; jj < Q; ++jj) {
          const double w = v[jj];
          if (w == 0.0) continue;
          const double* src = cur.data() + (o * static_cast<size_t>(Q) + static_cast<size_t>(jj)) * inner;
          for (size_t in = 0; in < inner; ++in) dst[in] += w * src[in];
        }
      }
    }
    cur.swap(next);
    inner *= c;
  }
  return cur;
}

void check_components(int k, const NoiseBasis& basis, std::span<const int> components) {
  if (static_cast<int>(components.size()) != k)
    throw ArgumentError("expected " + std::to_string(k) + " noise components, got " +
                        std::to_string(components.size()));
  for (int i : components)
    if (i < 0 || i > basis.m()) throw ArgumentError("noise component " + std::to_string(i) + " out of range");
}

double generic_value(const CoefficientTable& table, const NoiseBasis& basis, std::span<const int> components, int q,
                     bool ito) {
  const int k = table.k();
  check_components(k, basis, components);
  if (q < 0 || q > table.q_max())
    throw ArgumentError("truncation level " + std::to_string(q) + " exceeds table q_max " +
                        std::to_string(table.q_max()));
  if (basis.j_max() < q) throw ArgumentError("noise basis j_max is below the truncation level");
  const auto data = tensor_data(table, q);
  const int Q = q + 1;
  std::vector<double> virtual_zero(Q, 0.0);
  virtual_zero[0] = std::sqrt(basis.delta());
  auto slot_vector = [&](int i) -> const double* { return i == 0 ? virtual_zero.data() : basis.row(i).data(); };
  double total = 0.0;
  for (const auto& p : data->pairings) {
    if (!ito && !p.pairs.empty()) continue;
    bool active = true;
    for (auto [a, b] : p.pairs)
      if (components[a] != components[b] || components[a] == 0) {
        active = false;
        break;
      }
    if (!active) continue;
    std::vector<std::vector<const double*>> vecs;
    for (int s : p.free_slots) vecs.push_back({slot_vector(components[s])});
    const double v = contract(p.traced, Q, vecs)[0];
    total += (p.pairs.size() % 2 == 0) ? v : -v;
  }
  return total * std::pow(basis.delta(), 0.5 * table.family().delta_power());
}

// All-tuple evaluation over components 1..m, i_1 fastest.
std::vector<double> generic_dense(const CoefficientTable& table, const NoiseBasis& basis, int q, bool ito) {
  const int k = table.k();
  const int m = basis.m();
  if (basis.j_max() < q) throw ArgumentError("noise basis j_max is below the truncation level");
  const auto data = tensor_data(table, q);
  const int Q = q + 1;
  size_t count = 1;
  for (int r = 0; r < k; ++r) count *= static_cast<size_t>(m);
  std::vector<double> out(count, 0.0);
  std::vector<const double*> rows;
  for (int i = 1; i <= m; ++i) rows.push_back(basis.row(i).data());
  std::vector<int> tuple(k);
  for (const auto& p : data->pairings) {
    if (!ito && !p.pairs.empty()) continue;
    std::vector<std::vector<const double*>> vecs(p.free_slots.size(), rows);
    const std::vector<double> c = contract(p.traced, Q, vecs);
    const double sign = (p.pairs.size() % 2 == 0) ? 1.0 : -1.0;
    std::fill(tuple.begin(), tuple.end(), 0);
    for (size_t off = 0; off < count; ++off) {
      bool active = true;
      for (auto [a, b] : p.pairs)
        if (tuple[a] != tuple[b]) {
          active = false;
          break;
        }
      if (active) {
        size_t foff = 0;
        for (int s = static_cast<int>(p.free_slots.size()) - 1; s >= 0; --s)
          foff = foff * static_cast<size_t>(m) + static_cast<size_t>(tuple[p.free_slots[s]]);
        out[off] += sign * c[foff];
      }
      for (int r = 0; r < k; ++r) {
        if (++tuple[r] < m) break;
        tuple[r] = 0;
      }
    }
  }
  const double scale = std::pow(basis.delta(), 0.5 * table.family().delta_power());
  for (double& v : out) v *= scale;
  return out;
}

struct PairIntegrals {
  double i00, i01, i10, i02, i20, i11;
};

// The two-level displays. z1 and z2 are the basis rows of components i_1 and i_2.
PairIntegrals closed_pair(const double* z1, const double* z2, bool same, int q, double d, bool need_second) {
  PairIntegrals r{};
  const double ind = same ? 1.0 : 0.0;
  double s00 = z1[0] * z2[0];
  for (int i = 1; i <= q; ++i) s00 += (z1[i - 1] * z2[i] - z1[i] * z2[i - 1]) / std::sqrt(4.0 * i * i - 1.0);
  r.i00 = 0.5 * d * (s00 - ind);

  double s01 = z1[0] * z2[1] / std::sqrt(3.0);
  double s10 = z2[0] * z1[1] / std::sqrt(3.0);
  for (int i = 0; i <= q; ++i) {
    const double den = std::sqrt((2.0 * i + 1.0) * (2.0 * i + 5.0)) * (2.0 * i + 3.0);
    const double diag = z1[i] * z2[i] / ((2.0 * i - 1.0) * (2.0 * i + 3.0));
    s01 += ((i + 2.0) * z1[i] * z2[i + 2] - (i + 1.0) * z1[i + 2] * z2[i]) / den - diag;
    s10 += ((i + 1.0) * z2[i + 2] * z1[i] - (i + 2.0) * z2[i] * z1[i + 2]) / den + diag;
  }
  const double d2 = d * d;
  r.i01 = -0.5 * d * r.i00 - 0.25 * d2 * s01;
  r.i10 = -0.5 * d * r.i00 - 0.25 * d2 * s10;
  if (!need_second) return r;

  double s02 = 2.0 / (3.0 * std::sqrt(5.0)) * z2[2] * z1[0] + z1[0] * z2[0] / 3.0;
  double s20 = 2.0 / (3.0 * std::sqrt(5.0)) * z2[0] * z1[2] + z1[0] * z2[0] / 3.0;
  double s11 = z1[1] * z2[1] / 3.0;
  for (int i = 0; i <= q; ++i) {
    const double x = i;
    const double den3 = std::sqrt((2 * x + 1) * (2 * x + 7)) * (2 * x + 3) * (2 * x + 5);
    const double den1 = std::sqrt((2 * x + 1) * (2 * x + 3)) * (2 * x - 1) * (2 * x + 5);
    const double a3 = z2[i + 3] * z1[i];
    const double b3 = z2[i] * z1[i + 3];
    const double a1 = z2[i + 1] * z1[i];
    const double b1 = z2[i] * z1[i + 1];
    s02 += ((x + 2) * (x + 3) * a3 - (x + 1) * (x + 2) * b3) / den3 +
           ((x * x + x - 3) * a1 - (x * x + 3 * x - 1) * b1) / den1;
    s20 += ((x + 1) * (x + 2) * a3 - (x + 2) * (x + 3) * b3) / den3 +
           ((x * x + 3 * x - 1) * a1 - (x * x + x - 3) * b1) / den1;
    s11 += (x + 1) * (x + 3) * (a3 - b3) / den3 + (x + 1) * (x + 1) * (a1 - b1) / den1;
  }
  const double d3 = d2 * d;
  const double corr = ind * d3 / 24.0;
  r.i02 = -0.25 * d2 * r.i00 - d * r.i01 + d3 / 8.0 * s02 - corr;
  r.i20 = -0.25 * d2 * r.i00 - d * r.i10 + d3 / 8.0 * s20 - corr;
  r.i11 = -0.25 * d2 * r.i00 - 0.5 * d * (r.i10 + r.i01) + d3 / 8.0 * s11 - corr;
  return r;
}

double pick(const PairIntegrals& p, const WeightFamily& f) {
  const int a = f.l[0], b = f.l[1];
  if (a == 0 && b == 0) return p.i00;
  if (a == 0 && b == 1) return p.i01;
  if (a == 1 && b == 0) return p.i10;
  if (a == 0 && b == 2) return p.i02;
  if (a == 2 && b == 0) return p.i20;
  return p.i11;
}

double single_closed(const WeightFamily& f, const double* z, double d) {
  switch (f.l[0]) {
    case 0:
      return std::sqrt(d) * z[0];
    case 1:
      return -0.5 * std::pow(d, 1.5) * (z[0] + z[1] / std::sqrt(3.0));
    default:
      return std::pow(d, 2.5) / 3.0 * (z[0] + std::sqrt(3.0) / 2.0 * z[1] + z[2] / (2.0 * std::sqrt(5.0)));
  }
}

// Row of component i padded to `len` entries; component 0 is the virtual channel.
std::vector<double> padded_row(const NoiseBasis& basis, int i, int len) {
  std::vector<double> v(len, 0.0);
  if (i == 0) {
    v[0] = std::sqrt(basis.delta());
  } else {
    const auto row = basis.row(i);
    for (int j = 0; j < len && j < static_cast<int>(row.size()); ++j) v[j] = row[j];
  }
  return v;
}

IntegralValue family_value(const WeightFamily& family, const NoiseBasis& basis, std::span<const int> components, int q,
                           bool ito) {
  require_supported(family);
  check_components(family.k(), basis, components);
  if (q < 0) throw ArgumentError("truncation level must be nonnegative");
  IntegralValue out;
  out.kind = ito ? IntegralKind::Ito : IntegralKind::Stratonovich;
  out.q = q;
  out.conjectural = !ito && family.k() == 6;
  if (family.k() <= 2) {
    const int reach = basis_reach(family, q);
    if (family.k() == 2 && q > family_q_cap(family))
      throw ArgumentError("truncation level exceeds the cap for family " + family.str());
    if (basis.j_max() < reach)
      throw ArgumentError("noise basis j_max " + std::to_string(basis.j_max()) + " is below the reach " +
                          std::to_string(reach) + " of family " + family.str());
    const int len = q + 4;
    if (family.k() == 1) {
      out.value = single_closed(family, padded_row(basis, components[0], len).data(), basis.delta());
      return out;
    }
    const auto z1 = padded_row(basis, components[0], len);
    const auto z2 = padded_row(basis, components[1], len);
    const bool same = ito && components[0] == components[1] && components[0] != 0;
    const auto p = closed_pair(z1.data(), z2.data(), same, q, basis.delta(), family.sum_l() == 2);
    out.value = pick(p, family);
    return out;
  }
  const auto table = get_table(family, q);
  out.value = generic_value(*table, basis, components, q, ito);
  return out;
}

}  // namespace

IntegralValue ito_generic(const CoefficientTable& table, const NoiseBasis& basis, std::span<const int> components,
                          int q) {
  return {generic_value(table, basis, components, q, true), IntegralKind::Ito, q, false};
}

IntegralValue strat_generic(const CoefficientTable& table, const NoiseBasis& basis, std::span<const int> components,
                            int q) {
  return {generic_value(table, basis, components, q, false), IntegralKind::Stratonovich, q, table.k() == 6};
}

IntegralValue ito_family(const WeightFamily& family, const NoiseBasis& basis, std::span<const int> components, int q) {
  return family_value(family, basis, components, q, true);
}

IntegralValue strat_family(const WeightFamily& family, const NoiseBasis& basis, std::span<const int> components,
                           int q) {
  return family_value(family, basis, components, q, false);
}

std::vector<WeightFamily> IntegralBatch::families() const {
  std::vector<WeightFamily> out;
  for (const auto& [f, v] : values_) out.push_back(f);
  return out;
}

double IntegralBatch::value(const WeightFamily& family, std::span<const int> components) const {
  const auto& v = dense(family);
  if (static_cast<int>(components.size()) != family.k()) throw ArgumentError("component count mismatch");
  size_t off = 0;
  for (int r = family.k() - 1; r >= 0; --r) {
    const int i = components[r];
    if (i < 1 || i > m_) throw ArgumentError("batch components must lie in 1..m");
    off = off * static_cast<size_t>(m_) + static_cast<size_t>(i - 1);
  }
  return v[off];
}

const std::vector<double>& IntegralBatch::dense(const WeightFamily& family) const {
  auto it = values_.find(family);
  if (it == values_.end()) throw ArgumentError("family " + family.str() + " is not in the batch");
  return it->second;
}

void IntegralBatch::set_dense(const WeightFamily& family, std::vector<double> values, int q) {
  values_[family] = std::move(values);
  q_[family] = q;
}

std::map<MultiIndex, IntegralValue> IntegralBatch::as_map() const {
  std::map<MultiIndex, IntegralValue> out;
  for (const auto& [family, vals] : values_) {
    const int k = family.k();
    std::vector<int> tuple(k, 1);
    for (size_t off = 0; off < vals.size(); ++off) {
      IntegralValue v;
      v.value = vals[off];
      v.kind = kind_;
      v.q = q_.at(family);
      v.conjectural = kind_ == IntegralKind::Stratonovich && k == 6;
      out.emplace(MultiIndex{family, tuple}, v);
      for (int r = 0; r < k; ++r) {
        if (++tuple[r] <= m_) break;
        tuple[r] = 1;
      }
    }
  }
  return out;
}

IntegralBatch batch_evaluate(const StepPlan& plan, const NoiseBasis& basis, IntegralKind kind) {
  const bool ito = kind == IntegralKind::Ito;
  const int m = basis.m();
  IntegralBatch batch(kind, m);
  if (plan.q_map.empty()) return batch;
  if (basis.j_max() < plan.j_max) throw ArgumentError("noise basis is smaller than the plan requires");

  bool any_pair = false;
  bool any_second = false;
  for (const auto& [f, q] : plan.q_map) {
    if (f.k() == 2) {
      any_pair = true;
      if (f.sum_l() == 2) any_second = true;
    }
  }
  std::vector<PairIntegrals> pairs;
  if (any_pair) {
    pairs.resize(static_cast<size_t>(m) * m);
    for (int i2 = 1; i2 <= m; ++i2)
      for (int i1 = 1; i1 <= m; ++i1)
        pairs[(i2 - 1) * m + (i1 - 1)] = closed_pair(basis.row(i1).data(), basis.row(i2).data(), ito && i1 == i2,
                                                     plan.closed_q, basis.delta(), any_second);
  }
  for (const auto& [family, q] : plan.q_map) {
    std::vector<double> vals;
    if (family.k() == 1) {
      for (int i = 1; i <= m; ++i) vals.push_back(single_closed(family, basis.row(i).data(), basis.delta()));
      batch.set_dense(family, std::move(vals), q);
    } else if (family.k() == 2) {
      for (const auto& p : pairs) vals.push_back(pick(p, family));
      batch.set_dense(family, std::move(vals), plan.closed_q);
    } else {
      const auto table = get_table(family, q);
      batch.set_dense(family, generic_dense(*table, basis, q, ito), q);
    }
  }
  return batch;
}

}  // namespace stochtaylor
