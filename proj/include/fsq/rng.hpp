#pragma once

#include <cstdint>
#include <span>

namespace fsq {

// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).  A draw
// is a pure function of (key, counter), so every (trajectory, purpose, step)
// tuple owns an independent stream and ensembles come out bit-identical for
// a given master seed no matter how trajectories are scheduled over workers.
struct PhiloxBlock {
  std::uint32_t x[4];
};

PhiloxBlock philox4x32(const std::uint32_t counter[4], const std::uint32_t key[2]);

enum class StreamPurpose : std::uint32_t {
  vacuum_x = 0,
  vacuum_y = 1,
  raman_x = 2,
  raman_y = 3,
};

class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint32_t trajectory, StreamPurpose purpose,
              std::uint32_t step = 0);

  // Standard normal deviates via Box-Muller; two per Philox block.
  double gaussian();
  void fill_gaussian(std::span<double> out);

 private:
  void next_pair(double& g0, double& g1);

  std::uint32_t key_[2];
  std::uint32_t ctr_[4];  // {block, step, purpose, trajectory}
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fsq
