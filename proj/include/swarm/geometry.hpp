#pragma once

#include "swarm/types.hpp"

#include <vector>

namespace swarm {

/// Convex hull by Andrew's monotone chain. Returns column indices in
/// counter-clockwise order starting from the lexicographically smallest point;
/// collinear boundary points are dropped.
std::vector<Eigen::Index> convex_hull(const Points& x);

struct OuterVertex {
  Eigen::Index index = 0;
  Vec2 bisector = Vec2::Zero();  // unit, pointing away from the hull
  double internal_angle = 0.0;
};

/// Hull vertex with the smallest internal angle (ties to the lowest index).
/// For collinear input the segment endpoints have internal angle 0 and the
/// bisector is the outward axis direction. Throws GeometryError for
/// coincident points or fewer than two agents.
OuterVertex outer_vertex(const Points& x, double guard = kGuardRadius);

struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Smallest circle containing every column (Welzl, deterministic shuffle).
Circle minimal_enclosing_circle(const Points& x);

}  // namespace swarm
