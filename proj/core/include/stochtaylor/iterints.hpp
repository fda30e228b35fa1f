#pragma once

#include <map>
#include <span>
#include <vector>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/family.hpp"
#include "stochtaylor/mserr.hpp"
#include "stochtaylor/noise.hpp"

namespace stochtaylor {

enum class IntegralKind { Ito, Stratonovich };

struct MultiIndex {
  WeightFamily family;
  std::vector<int> components;  // i_1..i_k, each in 0..m

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;
};

struct IntegralValue {
  double value = 0.0;
  IntegralKind kind = IntegralKind::Ito;
  int q = 0;
  // Set for six-fold Stratonovich integrals, whose expansion is not proven to converge.
  bool conjectural = false;
};

// Truncated expansion summed over the full box 0 <= j_r <= q using the coefficient table.
// Itô sums subtract every partial pairing of equal nonzero components with equal j.
IntegralValue ito_generic(const CoefficientTable& table, const NoiseBasis& basis, std::span<const int> components,
                          int q);
IntegralValue strat_generic(const CoefficientTable& table, const NoiseBasis& basis, std::span<const int> components,
                            int q);

// Evaluate a family with the expansion the schemes use: closed-form displays for one- and
// two-level families, box sums from cached tables otherwise.
IntegralValue ito_family(const WeightFamily& family, const NoiseBasis& basis, std::span<const int> components, int q);
IntegralValue strat_family(const WeightFamily& family, const NoiseBasis& basis, std::span<const int> components,
                           int q);

// Values of one step for every family of a plan and every component tuple in {1..m}^k.
class IntegralBatch {
 public:
  IntegralBatch() = default;
  IntegralBatch(IntegralKind kind, int m) : kind_(kind), m_(m) {}

  IntegralKind kind() const { return kind_; }
  int m() const { return m_; }
  bool contains(const WeightFamily& family) const { return values_.count(family) != 0; }
  std::vector<WeightFamily> families() const;
  size_t size() const { return values_.size(); }

  // components are 1-based noise indices i_1..i_k.
  double value(const WeightFamily& family, std::span<const int> components) const;
  double value(const WeightFamily& family, std::initializer_list<int> components) const {
    return value(family, std::span<const int>(components.begin(), components.size()));
  }
  // Dense values with i_1 fastest.
  const std::vector<double>& dense(const WeightFamily& family) const;
  void set_dense(const WeightFamily& family, std::vector<double> values, int q);

  std::map<MultiIndex, IntegralValue> as_map() const;

 private:
  IntegralKind kind_ = IntegralKind::Ito;
  int m_ = 0;
  std::map<WeightFamily, std::vector<double>> values_;
  std::map<WeightFamily, int> q_;
};

IntegralBatch batch_evaluate(const StepPlan& plan, const NoiseBasis& basis, IntegralKind kind = IntegralKind::Ito);

// Pairings of {0..k-1} into disjoint pairs, including the empty pairing.
std::vector<std::vector<std::pair<int, int>>> partial_pairings(int k);

}  // namespace stochtaylor
