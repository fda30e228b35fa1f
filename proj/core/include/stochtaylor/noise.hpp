#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stochtaylor {

struct ZigguratTables;

// Counter-based generator: draw k of stream (seed, id) is a pure function of (seed, id, k).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  // Standard normal via the 128-layer ziggurat of Doornik (2005).
  double normal();
  // Fills out with scale * N(0, 1) draws; the same sequence as repeated normal() calls.
  void fill_normal(std::span<double> out, double scale = 1.0);

 private:
  double slow_normal(const ZigguratTables& t, std::uint64_t bits);

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// zeta_j^{(i)} for i = 1..m and j = 0..j_max. Component 0 is virtual: sqrt(delta) at j = 0, else 0.
class NoiseBasis {
 public:
  NoiseBasis() = default;
  NoiseBasis(int m, int j_max, double delta);
  NoiseBasis(int m, int j_max, double delta, std::vector<double> values);

  int m() const { return m_; }
  int j_max() const { return j_max_; }
  double delta() const { return delta_; }

  double zeta(int i, int j) const {
    if (i == 0) return j == 0 ? sqrt_delta_ : 0.0;
    return values_[static_cast<size_t>(i - 1) * static_cast<size_t>(j_max_ + 1) + static_cast<size_t>(j)];
  }
  double& at(int i, int j) {
    return values_[static_cast<size_t>(i - 1) * static_cast<size_t>(j_max_ + 1) + static_cast<size_t>(j)];
  }
  // Row of component i (i >= 1), j = 0..j_max.
  std::span<const double> row(int i) const {
    return {values_.data() + static_cast<size_t>(i - 1) * static_cast<size_t>(j_max_ + 1),
            static_cast<size_t>(j_max_ + 1)};
  }
  const std::vector<double>& values() const { return values_; }

 private:
  int m_ = 0;
  int j_max_ = 0;
  double delta_ = 0.0;
  double sqrt_delta_ = 0.0;
  std::vector<double> values_;
};

NoiseBasis sample_basis(int m, int j_max, double delta, RngStream& rng);

// sqrt(delta) * zeta_0^{(i)} for i = 1..m.
std::vector<double> wiener_increment(const NoiseBasis& basis);

}  // namespace stochtaylor
