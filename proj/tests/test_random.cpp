#include "swarm/random.hpp"

#include <doctest.h>

using namespace swarm;

TEST_CASE("SplitMix64 reference outputs")
{
  // First outputs for seed 0 as published with the generator.
  SplitMix64 g(0);
  CHECK(g.next() == 0xe220a8397b1dcdafULL);
  CHECK(g.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(g.next() == 0x06c45d188009454fULL);
}

TEST_CASE("uniform draws stay in range and streams are reproducible")
{
  SplitMix64 a(42), b(42);
  for (int k = 0; k < 10000; ++k) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
  }
}

TEST_CASE("random_state respects the box and the speed disk")
{
  RandomInit spec;
  spec.N = 300;
  spec.box_lo = Vec2(-2, 1);
  spec.box_hi = Vec2(3, 4);
  spec.speed_disk = 0.7;
  spec.seed = 17;
  const SwarmState s = random_state(spec);
  REQUIRE(s.size() == 300);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    CHECK(s.x(0, i) >= -2.0);
    CHECK(s.x(0, i) < 3.0);
    CHECK(s.x(1, i) >= 1.0);
    CHECK(s.x(1, i) < 4.0);
    CHECK(s.v.col(i).norm() <= 0.7);
  }
  spec.speed_disk = 0.0;
  const SwarmState still = random_state(spec);
  CHECK(still.x == s.x);
  CHECK(still.v.norm() == 0.0);
}
