#include "swarm/config.hpp"

#include <doctest.h>

#include <cmath>

using namespace swarm;

TEST_CASE("potential and parameter records round-trip")
{
  for (const char* text : {R"({"family": "power_law", "a": 4, "b": 1})",
                           R"({"family": "morse", "C_A": 1, "ell_A": 2, "C_R": 1.5, "ell_R": 0.5})",
                           R"({"family": "quasi_morse", "C": 0.6, "l": 0.5, "p": 1.5})", R"({"family": "none"})"}) {
    const Json j = Json::parse(text);
    CHECK(to_json(parse_potential(j)) == j);
  }
  const Json p = Json::parse(R"({"alpha": 2, "beta": 1.5, "M": 2, "N": 200})");
  const ModelParams mp = parse_params(p);
  CHECK(mp.N == 200);
  CHECK(parse_params(to_json(mp)).beta == 1.5);
}

TEST_CASE("unknown keys and invalid values are rejected")
{
  CHECK_THROWS_AS(parse_potential(Json::parse(R"({"family": "power_law", "a": 4, "b": 1, "c": 0})")), ConfigError);
  CHECK_THROWS_AS(parse_potential(Json::parse(R"({"family": "lennard_jones"})")), ConfigError);
  CHECK_THROWS_AS(parse_potential(Json::parse(R"({"family": "power_law", "a": 1, "b": 2})")), ConfigError);
  CHECK_THROWS_AS(parse_params(Json::parse(R"({"alpha": 2, "beta": 0, "M": 2, "N": 5})")), ConfigError);
  CHECK_THROWS_AS(parse_params(Json::parse(R"({"alpha": 2, "beta": 1, "M": 2, "N": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_params(Json::parse(R"({"alpha": 2, "beta": 1, "M": 2, "N": 5, "gamma": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_params(Json::parse(R"({"alpha": "two", "beta": 1, "M": 2, "N": 5})")), ConfigError);
  CHECK_THROWS_AS(parse_sim(Json::parse(R"({"dt": 0.01, "tend": 5})")), ConfigError);
  CHECK_THROWS_AS(parse_sim(Json::parse(R"({"dt": -0.01})")), ConfigError);
}

TEST_CASE("strict records report what is left over")
{
  const Json j = Json::parse(R"({"x": 1, "y": [1, 2], "extra": true})");
  Record r(j, "thing");
  CHECK(r.number("x") == 1.0);
  CHECK(r.vec2("y") == Vec2(1, 2));
  CHECK(r.number("z", 7.0) == 7.0);
  CHECK_THROWS_WITH_AS(r.finish(), doctest::Contains("extra"), ConfigError);
}

TEST_CASE("radius records")
{
  const RadialPotential pot = PowerLaw{4, 1};
  const ModelParams p{10, 3, 10, 2};
  CHECK(parse_radius(Json(1.25), pot, p, RingKind::Mill) == 1.25);
  const double R = parse_radius(Json("solve"), pot, p, RingKind::Mill);
  CHECK(std::abs(24 * std::pow(R, 4) - 3 * R - 20) < 1e-9);
  CHECK(parse_radius(Json::parse(R"({"solve": "flock", "bracket": [0.1, 2]})"), pot, p, RingKind::Mill) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_radius(Json(-1.0), pot, p, RingKind::Mill), ConfigError);
}

TEST_CASE("initial conditions")
{
  const RadialPotential pot = PowerLaw{4, 1};
  const ModelParams p{10, 3, 10, 3};
  const SwarmState e =
      make_initial(Json::parse(R"({"kind": "explicit", "x": [[0, 0], [1, 0], [0, 1]], "v": [[0, 0], [0, 0], [1, 1]]})"),
                   pot, p, 1);
  CHECK(e.x(0, 1) == 1.0);
  CHECK(e.v(1, 2) == 1.0);
  CHECK_THROWS_AS(make_initial(Json::parse(R"({"kind": "explicit", "x": [[0, 0]], "v": [[0, 0]]})"), pot, p, 1),
                  ConfigError);
  const Json rnd = Json::parse(R"({"kind": "random", "box_lo": [-1, -1], "box_hi": [1, 1]})");
  CHECK(make_initial(rnd, pot, p, 4).x == make_initial(rnd, pot, p, 4).x);
  CHECK(make_initial(rnd, pot, p, 4).x != make_initial(rnd, pot, p, 5).x);
  const SwarmState ring = make_initial(Json::parse(R"({"kind": "ring", "ring": "mill", "R": 2})"), pot, p, 1);
  CHECK(ring.x.col(0).norm() == doctest::Approx(2.0));
  CHECK(ring.v.col(0).norm() == doctest::Approx(p.cruise_speed()));
}

TEST_CASE("laws, stop conditions and plans parse")
{
  const RadialPotential pot = PowerLaw{4, 1};
  const ModelParams p{2, 1.5, 2, 3};
  SimConfig sim;
  SwarmState s(3);
  s.x << 0, 1, 0, 0, 0, 1;
  for (const char* text : {R"({"law": "none"})", R"({"law": "jq", "gamma": 1.5})", R"({"law": "flock_hold"})",
                           R"({"law": "velocity_kill", "eta": 0.1})", R"({"law": "pd_hold"})",
                           R"({"law": "mill_centripetal", "R": 1})"}) {
    CAPTURE(text);
    CHECK_NOTHROW(parse_law(Json::parse(text), pot, p, sim, s));
  }
  CHECK_THROWS_AS(parse_law(Json::parse(R"({"law": "jq", "gamma": 0.5})"), pot, p, sim, s), ThresholdError);
  CHECK_THROWS_AS(parse_law(Json::parse(R"({"law": "jq", "gain": 2})"), pot, p, sim, s), ConfigError);
  CHECK_THROWS_AS(parse_law(Json::parse(R"({"law": "teleport"})"), pot, p, sim, s), ConfigError);

  std::string desc;
  const StopCondition stop = parse_stop(Json::parse(R"({"max_speed_below": 0.5})"), p, &desc);
  CHECK_FALSE(desc.empty());
  CHECK(stop(s, Points::Zero(2, 3)));
  CHECK_THROWS_AS(parse_stop(Json::parse(R"({"speed_below": 0.5})"), p), ConfigError);

  const PhasePlan plan = parse_plan(
      Json::parse(R"([{"name": "a", "law": {"law": "none"}, "max_duration": 1},
                      {"name": "b", "law": {"law": "flock_hold"}, "stop": {"max_speed_below": 1}, "max_duration": 2}])"),
      pot, p, sim);
  REQUIRE(plan.phases.size() == 2);
  CHECK(plan.phases[1].max_duration == 2.0);
  CHECK(static_cast<bool>(plan.phases[1].stop));
}

TEST_CASE("dotted-path overrides")
{
  Json j = Json::parse(R"({"run": {"thetaT": 1, "steps": [{"L": 5}]}})");
  set_by_path(j, "run.thetaT", 2.5);
  set_by_path(j, "run.steps.0.L", 7);
  CHECK(j["run"]["thetaT"] == 2.5);
  CHECK(j["run"]["steps"][0]["L"] == 7);
  CHECK_THROWS_AS(set_by_path(j, "run.theta", 1), ConfigError);
  CHECK_THROWS_AS(set_by_path(j, "run.steps.3.L", 1), ConfigError);
}
