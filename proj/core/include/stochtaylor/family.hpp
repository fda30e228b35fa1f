#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stochtaylor {

// Weight exponents (l_1..l_k) of an iterated integral; l_1 belongs to the innermost level.
struct WeightFamily {
  std::vector<int> l;

  int k() const { return static_cast<int>(l.size()); }
  int sum_l() const;
  // Power of delta in the squared norm: k + 2*sum(l).
  int delta_power() const { return k() + 2 * sum_l(); }
  // "l_1 l_2 ... l_k" written without separators, e.g. "010".
  std::string str() const;
  static WeightFamily parse(std::string_view text);

  bool operator==(const WeightFamily&) const = default;
  auto operator<=>(const WeightFamily&) const = default;
};

// The twenty families used by the order-3.0 schemes, in scheme order.
const std::vector<WeightFamily>& scheme_families();
bool is_supported(const WeightFamily& family);
// Families whose integrals appear in the scheme of order gamma (2.0, 2.5 or 3.0).
std::vector<WeightFamily> order_families(double gamma);
void require_supported(const WeightFamily& family);

// Families evaluated from closed-form expansions instead of coefficient tensors.
bool is_closed_form(const WeightFamily& family);
// Largest q accepted for a family: tensor caps for generic families, the polynomial
// degree cap minus the basis reach for closed-form families.
int family_q_cap(const WeightFamily& family);
// Largest basis index a closed-form expansion at level q touches (q for generic ones).
int basis_reach(const WeightFamily& family, int q);

}  // namespace stochtaylor
