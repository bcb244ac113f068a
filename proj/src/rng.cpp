#include "fsq/rng.hpp"

#include <cmath>
#include <numbers>

namespace fsq {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;

inline void round_once(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  const std::uint64_t pa = static_cast<std::uint64_t>(kMulA) * ctr[0];
  const std::uint64_t pb = static_cast<std::uint64_t>(kMulB) * ctr[2];
  const auto lo0 = static_cast<std::uint32_t>(pa);
  const auto hi0 = static_cast<std::uint32_t>(pa >> 32);
  const auto lo1 = static_cast<std::uint32_t>(pb);
  const auto hi1 = static_cast<std::uint32_t>(pb >> 32);
  const std::uint32_t out[4] = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  ctr[0] = out[0];
  ctr[1] = out[1];
  ctr[2] = out[2];
  ctr[3] = out[3];
}

// Map 53 random bits to (0, 1]; never returns 0, so log() below is safe.
inline double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Map 53 random bits to [0, 1).
inline double to_unit_half_open(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32(const std::uint32_t counter[4], const std::uint32_t key[2]) {
  PhiloxBlock b{{counter[0], counter[1], counter[2], counter[3]}};
  std::uint32_t k[2] = {key[0], key[1]};
  for (int r = 0; r < 10; ++r) {
    round_once(b.x, k);
    if (r != 9) {
      k[0] += kWeylA;
      k[1] += kWeylB;
    }
  }
  return b;
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint32_t trajectory, StreamPurpose purpose,
                         std::uint32_t step) {
  key_[0] = static_cast<std::uint32_t>(seed);
  key_[1] = static_cast<std::uint32_t>(seed >> 32);
  ctr_[0] = 0;  // block counter, bumped per draw
  ctr_[1] = step;
  ctr_[2] = static_cast<std::uint32_t>(purpose);
  ctr_[3] = trajectory;
}

void NoiseStream::next_pair(double& g0, double& g1) {
  const PhiloxBlock b = philox4x32(ctr_, key_);
  ++ctr_[0];
  const std::uint64_t u = (static_cast<std::uint64_t>(b.x[1]) << 32) | b.x[0];
  const std::uint64_t v = (static_cast<std::uint64_t>(b.x[3]) << 32) | b.x[2];
  const double radius = std::sqrt(-2.0 * std::log(to_unit_open(u)));
  const double angle = 2.0 * std::numbers::pi * to_unit_half_open(v);
  g0 = radius * std::cos(angle);
  g1 = radius * std::sin(angle);
}

double NoiseStream::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double g0 = 0.0, g1 = 0.0;
  next_pair(g0, g1);
  cached_ = g1;
  has_cached_ = true;
  return g0;
}

void NoiseStream::fill_gaussian(std::span<double> out) {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) next_pair(out[i], out[i + 1]);
  if (i < out.size()) out[i] = gaussian();
}

}  // namespace fsq
