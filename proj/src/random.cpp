#include "swarm/random.hpp"

#include <cmath>
#include <numbers>

namespace swarm {

std::uint64_t SplitMix64::next()
{
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SwarmState random_state(const RandomInit& spec)
{
  if (spec.N < 1) throw ConfigError("random init: N must be positive");
  SplitMix64 root(spec.seed);
  SplitMix64 pos = root.split();
  SplitMix64 vel = root.split();
  SwarmState s(spec.N);
  for (int i = 0; i < spec.N; ++i) {
    s.x(0, i) = pos.uniform(spec.box_lo(0), spec.box_hi(0));
    s.x(1, i) = pos.uniform(spec.box_lo(1), spec.box_hi(1));
    const double rho = spec.speed_disk * std::sqrt(vel.uniform());
    const double phi = 2.0 * std::numbers::pi * vel.uniform();
    s.v(0, i) = rho * std::cos(phi);
    s.v(1, i) = rho * std::sin(phi);
  }
  return s;
}

}  // namespace swarm
