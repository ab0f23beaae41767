#include "swarm/types.hpp"

#include <sstream>

namespace swarm {

void ModelParams::validate() const
{
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(M > 0.0)) throw ConfigError("M must be > 0");
  if (N < 2) throw ConfigError("N must be >= 2");
}

namespace {

std::string collision_message(Eigen::Index i, Eigen::Index j, double distance, double t)
{
  std::ostringstream os;
  os << "collision between agents " << i << " and " << j << " (distance " << distance << ")";
  if (!std::isnan(t)) os << " at t = " << t;
  return os.str();
}

}  // namespace

CollisionError::CollisionError(Eigen::Index i, Eigen::Index j, double d, double t)
    : NumericError(collision_message(i, j, d, t)), first(i), second(j), distance(d), time(t)
{
}

NonFiniteError::NonFiniteError(double t, const std::string& what)
    : NumericError("non-finite state in " + what + (std::isnan(t) ? std::string() : " at t = " + std::to_string(t)))
{
}

PhaseTimeoutError::PhaseTimeoutError(std::string ph, std::string pred, double t)
    : SwarmError("phase '" + ph + "' timed out at t = " + std::to_string(t) + " before '" + pred + "' held"),
      phase(std::move(ph)),
      predicate(std::move(pred))
{
}

}  // namespace swarm
