#include "stochtaylor/family.hpp"

#include <algorithm>
#include <numeric>

#include "stochtaylor/errors.hpp"
#include "stochtaylor/legendre.hpp"

namespace stochtaylor {

int WeightFamily::sum_l() const { return std::accumulate(l.begin(), l.end(), 0); }

std::string WeightFamily::str() const {
  std::string s;
  for (int v : l) s.push_back(static_cast<char>('0' + v));
  return s;
}

WeightFamily WeightFamily::parse(std::string_view text) {
  if (text.empty() || text.size() > 6) throw ArgumentError("family must have 1 to 6 digits: '" + std::string(text) + "'");
  WeightFamily f;
  for (char c : text) {
    if (c < '0' || c > '2') throw ArgumentError("family digits must be 0, 1 or 2: '" + std::string(text) + "'");
    f.l.push_back(c - '0');
  }
  return f;
}

const std::vector<WeightFamily>& scheme_families() {
  static const std::vector<WeightFamily> fams = [] {
    std::vector<WeightFamily> v;
    for (const char* s : {"0", "1", "2", "00", "01", "10", "02", "20", "11", "000", "001", "010", "100", "0000",
                          "0001", "0010", "0100", "1000", "00000", "000000"})
      v.push_back(WeightFamily::parse(s));
    return v;
  }();
  return fams;
}

std::vector<WeightFamily> order_families(double gamma) {
  std::vector<const char*> names;
  if (gamma == 2.0) {
    names = {"0", "1", "00", "01", "10", "000", "0000"};
  } else if (gamma == 2.5) {
    names = {"0", "1", "2", "00", "01", "10", "000", "001", "010", "100", "0000", "00000"};
  } else if (gamma == 3.0) {
    return scheme_families();
  } else {
    throw ArgumentError("scheme order must be 2, 2.5 or 3");
  }
  std::vector<WeightFamily> out;
  for (const char* n : names) out.push_back(WeightFamily::parse(n));
  return out;
}

bool is_supported(const WeightFamily& family) {
  const auto& all = scheme_families();
  return std::find(all.begin(), all.end(), family) != all.end();
}

void require_supported(const WeightFamily& family) {
  if (!is_supported(family)) throw ArgumentError("unsupported weight family '" + family.str() + "'");
}

bool is_closed_form(const WeightFamily& family) { return family.k() <= 2; }

int basis_reach(const WeightFamily& family, int q) {
  if (family.k() == 1) return family.l[0];
  if (family.k() == 2) {
    const int s = family.sum_l();
    return q + (s == 0 ? 0 : (s == 1 ? 2 : 3));
  }
  return q;
}

int family_q_cap(const WeightFamily& family) {
  switch (family.k()) {
    case 1:
      return 0;
    case 2:
      return kMaxPolyDegree - basis_reach(family, 0);
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

}  // namespace stochtaylor
