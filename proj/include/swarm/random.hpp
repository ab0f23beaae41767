#pragma once

#include "swarm/types.hpp"

#include <cstdint>

namespace swarm {

/// SplitMix64 (Steele, Lea, Flood 2014). Platform-independent output for a
/// given seed; `split()` derives an independent stream.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  SplitMix64 split() { return SplitMix64(next() ^ 0x6a09e667f3bcc909ULL); }

private:
  std::uint64_t state_;
};

struct RandomInit {
  int N = 10;
  Vec2 box_lo{-1.0, -1.0};
  Vec2 box_hi{1.0, 1.0};
  double speed_disk = 0.0;  // velocities uniform in the disk of this radius
  std::uint64_t seed = 1;
};

/// Positions uniform in the box, velocities uniform in the disk. Positions use
/// one stream and velocities another, so changing speed_disk keeps positions.
SwarmState random_state(const RandomInit& spec);

}  // namespace swarm
