#include "stochtaylor/noise.hpp"

#include <array>
#include <cmath>

#include "stochtaylor/errors.hpp"

namespace stochtaylor {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr int kZigLayers = 128;
constexpr double kZigR = 3.442619855899;
constexpr double kZigV = 9.91256303526217e-3;

}  // namespace

struct ZigguratTables {
  std::array<double, kZigLayers + 1> x{};
  std::array<double, kZigLayers> ratio{};
  ZigguratTables() {
    double f = std::exp(-0.5 * kZigR * kZigR);
    x[0] = kZigV / f;
    x[1] = kZigR;
    x[kZigLayers] = 0.0;
    for (int i = 2; i < kZigLayers; ++i) {
      x[i] = std::sqrt(-2.0 * std::log(kZigV / x[i - 1] + f));
      f = std::exp(-0.5 * x[i] * x[i]);
    }
    for (int i = 0; i < kZigLayers; ++i) ratio[i] = x[i + 1] / x[i];
  }
};

namespace {

const ZigguratTables& zig() {
  static const ZigguratTables t;
  return t;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(mix64(mix64(seed) ^ (stream * kGolden + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t RngStream::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double RngStream::uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double RngStream::normal() { return slow_normal(zig(), next_u64()); }

void RngStream::fill_normal(std::span<double> out, double scale) {
  const ZigguratTables& t = zig();
  for (double& v : out) {
    const std::uint64_t bits = next_u64();
    const int i = static_cast<int>(bits & 0x7F);
    const double u = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
    v = scale * (std::fabs(u) < t.ratio[i] ? u * t.x[i] : slow_normal(t, bits));
  }
}

// Full ziggurat acceptance test starting from an already drawn word.
double RngStream::slow_normal(const ZigguratTables& t, std::uint64_t bits) {
  for (bool fresh = false;; fresh = true) {
    if (fresh) bits = next_u64();
    const int i = static_cast<int>(bits & 0x7F);
    const double u = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
    if (std::fabs(u) < t.ratio[i]) return u * t.x[i];
    if (i == 0) {
      double xt, yt;
      do {
        xt = std::log(uniform()) / kZigR;
        yt = std::log(uniform());
      } while (-2.0 * yt < xt * xt);
      return u < 0 ? xt - kZigR : kZigR - xt;
    }
    const double xv = u * t.x[i];
    const double f0 = std::exp(-0.5 * (t.x[i] * t.x[i] - xv * xv));
    const double f1 = std::exp(-0.5 * (t.x[i + 1] * t.x[i + 1] - xv * xv));
    if (f1 + uniform() * (f0 - f1) < 1.0) return xv;
  }
}

NoiseBasis::NoiseBasis(int m, int j_max, double delta)
    : NoiseBasis(m, j_max, delta, std::vector<double>(static_cast<size_t>(std::max(m, 0)) * (std::max(j_max, 0) + 1))) {}

NoiseBasis::NoiseBasis(int m, int j_max, double delta, std::vector<double> values)
    : m_(m), j_max_(j_max), delta_(delta), sqrt_delta_(std::sqrt(delta)), values_(std::move(values)) {
  if (m < 1) throw ArgumentError("noise dimension must be at least 1");
  if (j_max < 0) throw ArgumentError("j_max must be nonnegative");
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  if (values_.size() != static_cast<size_t>(m) * static_cast<size_t>(j_max + 1))
    throw ArgumentError("noise basis value count does not match m*(j_max+1)");
}

NoiseBasis sample_basis(int m, int j_max, double delta, RngStream& rng) {
  NoiseBasis basis(m, j_max, delta);
  for (int i = 1; i <= m; ++i)
    rng.fill_normal({&basis.at(i, 0), static_cast<size_t>(j_max + 1)});
  return basis;
}

std::vector<double> wiener_increment(const NoiseBasis& basis) {
  std::vector<double> dw(basis.m());
  const double s = std::sqrt(basis.delta());
  for (int i = 1; i <= basis.m(); ++i) dw[i - 1] = s * basis.zeta(i, 0);
  return dw;
}

}  // namespace stochtaylor
