#include "swarm/config.hpp"

#include "swarm/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swarm {

// ---------------------------------------------------------------- Record

Record::Record(const Json& j, std::string where) : j_(j), where_(std::move(where))
{
  if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
}

bool Record::has(const std::string& key) const { return j_.contains(key); }

const Json& Record::raw(const std::string& key)
{
  if (!j_.contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
  used_.push_back(key);
  return j_.at(key);
}

const Json* Record::optional(const std::string& key)
{
  if (!j_.contains(key)) return nullptr;
  used_.push_back(key);
  return &j_.at(key);
}

double Record::number(const std::string& key)
{
  const Json& v = raw(key);
  if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
  return v.get<double>();
}

double Record::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

int Record::integer(const std::string& key)
{
  const Json& v = raw(key);
  if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
  return v.get<int>();
}

int Record::integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

std::uint64_t Record::u64(const std::string& key, std::uint64_t fallback)
{
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError(where_ + "." + key + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool Record::flag(const std::string& key, bool fallback)
{
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string Record::string(const std::string& key)
{
  const Json& v = raw(key);
  if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string Record::string(const std::string& key, const std::string& fallback)
{
  return has(key) ? string(key) : fallback;
}

Vec2 Record::vec2(const std::string& key)
{
  const Json& v = raw(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(where_ + "." + key + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Vec2 Record::vec2(const std::string& key, const Vec2& fallback) { return has(key) ? vec2(key) : fallback; }

void Record::finish() const
{
  for (const auto& [k, v] : j_.items()) {
    (void)v;
    if (std::find(used_.begin(), used_.end(), k) == used_.end())
      throw ConfigError(where_ + ": unknown key '" + k + "'");
  }
}

// ---------------------------------------------------------------- potential and parameters

RadialPotential parse_potential(const Json& j)
{
  Record r(j, "potential");
  const std::string fam = r.string("family");
  RadialPotential pot;
  if (fam == "power_law") {
    pot = PowerLaw{r.number("a"), r.number("b")};
  } else if (fam == "morse") {
    pot = Morse{r.number("C_A"), r.number("ell_A"), r.number("C_R"), r.number("ell_R")};
  } else if (fam == "quasi_morse") {
    pot = QuasiMorse{r.number("C"), r.number("l"), r.number("p")};
  } else if (fam == "none") {
    pot = NoInteraction{};
  } else {
    throw ConfigError("potential: unknown family '" + fam + "'");
  }
  r.finish();
  validate(pot);
  return pot;
}

Json to_json(const RadialPotential& pot)
{
  return std::visit(
      [](const auto& k) -> Json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerLaw>) return {{"family", "power_law"}, {"a", k.a}, {"b", k.b}};
        else if constexpr (std::is_same_v<K, Morse>)
          return {{"family", "morse"}, {"C_A", k.C_A}, {"ell_A", k.ell_A}, {"C_R", k.C_R}, {"ell_R", k.ell_R}};
        else if constexpr (std::is_same_v<K, QuasiMorse>)
          return {{"family", "quasi_morse"}, {"C", k.C}, {"l", k.l}, {"p", k.p}};
        else return {{"family", "none"}};
      },
      pot);
}

ModelParams parse_params(const Json& j)
{
  Record r(j, "params");
  ModelParams p;
  p.alpha = r.number("alpha");
  p.beta = r.number("beta");
  p.M = r.number("M");
  p.N = r.integer("N");
  r.finish();
  p.validate();
  return p;
}

Json to_json(const ModelParams& p)
{
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"M", p.M}, {"N", p.N}};
}

SimConfig parse_sim(const Json& j, SimConfig base)
{
  Record r(j, "sim");
  base.dt = r.number("dt", base.dt);
  base.t_end = r.number("t_end", base.t_end);
  base.record_every = r.integer("record_every", base.record_every);
  base.seed = r.u64("seed", base.seed);
  base.guard = r.number("guard", base.guard);
  r.finish();
  if (!(base.dt > 0.0)) throw ConfigError("sim.dt must be > 0");
  if (base.record_every < 1) throw ConfigError("sim.record_every must be >= 1");
  if (!(base.guard >= 0.0)) throw ConfigError("sim.guard must be >= 0");
  return base;
}

// ---------------------------------------------------------------- initial conditions

double parse_radius(const Json& j, const RadialPotential& pot, const ModelParams& params, RingKind kind, double lo,
                    double hi)
{
  if (j.is_number()) {
    const double R = j.get<double>();
    if (!(R > 0)) throw ConfigError("radius must be > 0");
    return R;
  }
  if (j.is_string() && j.get<std::string>() == "solve") {
    const auto roots = mill_radius_scan(pot, params, params.N, kind, lo, hi);
    if (roots.empty()) throw ConfigError("no ring radius in the search interval");
    // the outermost root is the stable one for the families used here
    return roots.back();
  }
  if (j.is_object()) {
    Record r(j, "radius");
    const std::string how = r.string("solve");
    const Json& b = r.raw("bracket");
    r.finish();
    if (!b.is_array() || b.size() != 2) throw ConfigError("radius.bracket: expected [lo, hi]");
    const RingKind k = how == "flock" ? RingKind::Flock : how == "mill" ? RingKind::Mill : throw ConfigError("radius.solve: flock or mill");
    return mill_radius_solve(pot, params, params.N, b[0].get<double>(), b[1].get<double>(), k);
  }
  throw ConfigError("radius: expected a number, \"solve\" or {solve, bracket}");
}

SwarmState make_initial(const Json& j, const RadialPotential& pot, const ModelParams& params, std::uint64_t seed)
{
  Record r(j, "init");
  const std::string kind = r.string("kind");
  SwarmState s;
  if (kind == "explicit") {
    const Json& x = r.raw("x");
    const Json& v = r.raw("v");
    if (!x.is_array() || !v.is_array() || x.size() != v.size())
      throw ConfigError("init.x and init.v must be lists of equal length");
    s = SwarmState(static_cast<Eigen::Index>(x.size()));
    s.t = r.number("t", 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!x[i].is_array() || x[i].size() != 2 || !v[i].is_array() || v[i].size() != 2)
        throw ConfigError("init: each agent needs [x, y] position and velocity");
      s.x.col(static_cast<Eigen::Index>(i)) = Vec2(x[i][0].get<double>(), x[i][1].get<double>());
      s.v.col(static_cast<Eigen::Index>(i)) = Vec2(v[i][0].get<double>(), v[i][1].get<double>());
    }
  } else if (kind == "random") {
    RandomInit ri;
    ri.N = params.N;
    const Vec2 lo = r.vec2("box_lo", Vec2(-1, -1)), hi = r.vec2("box_hi", Vec2(1, 1));
    ri.box_lo = lo;
    ri.box_hi = hi;
    ri.speed_disk = r.number("speed_disk", 0.0);
    ri.seed = r.u64("seed", seed);
    s = random_state(ri);
    if (const Json* relax = r.optional("relax")) {
      if (!relax->is_number()) throw ConfigError("init.relax: expected a force tolerance");
      s.x = relax_to_equilibrium(pot, s.x, relax->get<double>());
    }
    if (r.has("velocity")) s.v.colwise() = r.vec2("velocity");
  } else if (kind == "ring") {
    const std::string ring = r.string("ring");
    const RingKind rk = ring == "mill" ? RingKind::Mill : ring == "flock" ? RingKind::Flock : throw ConfigError("init.ring: mill or flock");
    double R = parse_radius(r.raw("R"), pot, params, rk);
    R += r.number("R_offset", 0.0);
    const Vec2 c = r.vec2("center", Vec2::Zero());
    const double theta = r.number("theta", 0.0);
    const int orient = r.integer("orientation", 1);
    RingSpec spec = rk == RingKind::Mill ? RingSpec::mill(params, params.N, R, c, theta, orient)
                                         : RingSpec::flock(params.N, R, c, theta);
    const Vec2 vbar = r.vec2("vbar", Vec2(params.cruise_speed(), 0.0));
    s = ring_state(spec, params, rk, vbar);
    const double g0 = r.number("gamma0", 0.0);
    if (g0 != 0.0) s.v = rotation(g0) * s.v;
  } else {
    throw ConfigError("init: unknown kind '" + kind + "'");
  }
  r.finish();
  if (s.size() != params.N) throw ConfigError("init: agent count differs from params.N");
  return s;
}

// ---------------------------------------------------------------- laws

InstantaneousSpec parse_instantaneous(const Json& j)
{
  Record r(j, "instantaneous");
  InstantaneousSpec s;
  s.dt_horizon = r.number("horizon", s.dt_horizon);
  s.R_target = r.number("R_target", s.R_target);
  s.v_bar = r.vec2("vbar", s.v_bar);
  s.lambda1 = r.number("lambda1", s.lambda1);
  s.lambda2 = r.number("lambda2", s.lambda2);
  s.lambda = r.number("lambda", s.lambda);
  s.box = r.number("box", s.box);
  const std::string pred = r.string("predictor", "explicit");
  if (pred == "explicit") s.predictor = Predictor::ExplicitEuler;
  else if (pred == "semi_implicit") s.predictor = Predictor::SemiImplicitEuler;
  else throw ConfigError("instantaneous.predictor: explicit or semi_implicit");
  const std::string tgt = r.string("mill_target", "as_written");
  if (tgt == "as_written") s.mill_target = MillTarget::AsWritten;
  else if (tgt == "unit_tangent") s.mill_target = MillTarget::UnitTangent;
  else throw ConfigError("instantaneous.mill_target: as_written or unit_tangent");
  r.finish();
  s.validate();
  return s;
}

namespace {

// Keys of an instantaneous spec inside a law record.
Json strip(const Json& j, std::initializer_list<const char*> keys)
{
  Json out = j;
  for (const char* k : keys) out.erase(k);
  return out;
}

}  // namespace

ControlLaw parse_law(const Json& j, const RadialPotential& pot, const ModelParams& params, const SimConfig& sim,
                     const SwarmState& start)
{
  if (!j.is_object() || !j.contains("law") || !j.at("law").is_string())
    throw ConfigError("law record needs {\"law\": \"<name>\"}");
  const std::string name = j.at("law").get<std::string>();

  if (name == "instantaneous_mill" || name == "instantaneous_flock") {
    Json body = strip(j, {"law"});
    if (name == "instantaneous_mill" && body.contains("R_target") && body["R_target"].is_string())
      body["R_target"] = parse_radius(body["R_target"], pot, params, RingKind::Mill);
    const InstantaneousSpec spec = parse_instantaneous(body);
    return name == "instantaneous_mill" ? instantaneous_mill_law(params, spec) : instantaneous_flock_law(params, spec);
  }

  Record r(j, "law");
  r.string("law");
  ControlLaw law;
  if (name == "none") {
    law = zero_control();
  } else if (name == "jq") {
    law = jq_feedback(params, JQParams{r.number("gamma", 1.1 * jq_gamma_lower_bound(params))});
  } else if (name == "velocity_kill") {
    law = velocity_kill(params, r.number("eta"), r.number("dt", sim.dt));
  } else if (name == "flock_hold") {
    law = flock_hold();
  } else if (name == "quasi_static_rotation") {
    QuasiStaticPlan q;
    q.theta0 = r.number("theta0", 0.0);
    q.thetaT = r.number("thetaT");
    q.T = r.number("T");
    q.t0 = start.t + r.number("delay", 0.0);
    q.v0 = params.cruise_speed() * Vec2(1.0, 0.0);
    q.validate(params);
    law = quasi_static_rotation(params.M, q);
  } else if (name == "mill_centripetal") {
    law = mill_centripetal(parse_radius(r.raw("R"), pot, params, RingKind::Mill), r.vec2("center", Vec2::Zero()));
  } else if (name == "mill_velocity_feedback") {
    law = mill_velocity_feedback(params.M, params, r.integer("orientation", 1));
  } else if (name == "pd_hold") {
    const TrackingReference ref{start.x, Points::Zero(2, start.size()), Points::Zero(2, start.size())};
    law = pd_tracking(params, [ref](double) { return ref; }, r.number("k1", 1.0), r.number("k2", 2.0));
  } else if (name == "cancel_and_inject") {
    ControlLaw w = parse_law(r.raw("w"), pot, params, sim, start);
    law = cancel_and_inject(params, std::move(w), r.number("w_bound", params.M / 2));
  } else if (name == "velocity_pd") {
    const Vec2 target = r.vec2("target");
    const double k = r.number("k", 2.0);
    law = {"velocity_pd", [target, k](const ControlInput& in) { return (-k * (in.state.v.colwise() - target)).eval(); }};
  } else if (name == "sparsify") {
    ControlLaw inner = parse_law(r.raw("inner"), pot, params, sim, start);
    SparsifySpec sp;
    sp.slot = r.number("slot", sim.dt);
    sp.t0 = start.t;
    sp.sparse_bound = r.number("sparse_bound", sp.sparse_bound);
    law = sparsify(std::move(inner), sp);
  } else if (name == "fictitious") {
    const double eta = r.number("eta");
    double R0 = r.number("R0", 0.0);
    if (!(R0 > 0)) R0 = decay_radius(pot, eta);
    const RepulsiveSurrogate s = build_repulsive_surrogate(pot, eta, R0);
    ControlLaw inner = parse_law(r.raw("inner"), pot, params, sim, start);
    law = fictitious_potential_control(s.dU, std::move(inner), sim.guard);
  } else {
    throw ConfigError("unknown law '" + name + "'");
  }
  r.finish();
  return law;
}

// ---------------------------------------------------------------- plans

StopCondition parse_stop(const Json& j, const ModelParams& params, std::string* description)
{
  Record r(j, "stop");
  std::vector<StopCondition> parts;
  std::string desc;
  auto add = [&](const std::string& key, StopCondition c) {
    parts.push_back(std::move(c));
    desc += (desc.empty() ? "" : " and ") + key;
  };
  if (r.has("max_speed_below")) {
    const double tol = r.number("max_speed_below");
    add("max_speed_below", [tol](const SwarmState& s, const Points&) { return s.v.colwise().norm().maxCoeff() < tol; });
  }
  if (r.has("max_force_below")) {
    const double tol = r.number("max_force_below");
    add("max_force_below", [tol](const SwarmState&, const Points& F) { return F.colwise().norm().maxCoeff() < tol; });
  }
  if (r.has("polarization_above")) {
    const double v = r.number("polarization_above");
    add("polarization_above", [v](const SwarmState& s, const Points&) { return order_parameters(s).polarization > v; });
  }
  if (r.has("ang_momentum_above")) {
    const double v = r.number("ang_momentum_above");
    add("ang_momentum_above", [v](const SwarmState& s, const Points&) { return order_parameters(s).ang_momentum > v; });
  }
  if (r.has("speeds_near_cruise")) {
    const double tol = r.number("speeds_near_cruise");
    const double sp = params.cruise_speed();
    add("speeds_near_cruise", [tol, sp](const SwarmState& s, const Points&) {
      return (s.v.colwise().norm().array() - sp).abs().maxCoeff() < tol;
    });
  }
  r.finish();
  if (description) *description = desc.empty() ? "horizon" : desc;
  if (parts.empty()) return {};
  return [parts](const SwarmState& s, const Points& F) {
    return std::all_of(parts.begin(), parts.end(), [&](const StopCondition& c) { return c(s, F); });
  };
}

PhasePlan parse_plan(const Json& j, const RadialPotential& pot, const ModelParams& params, const SimConfig& sim)
{
  if (!j.is_array()) throw ConfigError("plan: expected a list of phases");
  PhasePlan plan;
  for (std::size_t k = 0; k < j.size(); ++k) {
    Record r(j[k], "plan[" + std::to_string(k) + "]");
    PhaseSpec p;
    p.name = r.string("name", "phase_" + std::to_string(k));
    const Json law = r.raw("law");
    // fail early on bad law records
    parse_law(law, pot, params, sim, SwarmState(params.N));
    p.law = [law, pot, params, sim](const SwarmState& start) { return parse_law(law, pot, params, sim, start); };
    if (const Json* st = r.optional("stop")) p.stop = parse_stop(*st, params, &p.predicate);
    p.max_duration = r.number("max_duration");
    p.require_predicate = r.flag("require", true);
    r.finish();
    plan.phases.push_back(std::move(p));
  }
  plan.validate();
  return plan;
}

PipelineOptions parse_pipeline_options(const Json& j, const SimConfig& sim)
{
  PipelineOptions o;
  o.sim = sim;
  Record r(j, "options");
  o.gamma = r.number("gamma", o.gamma);
  o.nu = r.number("nu", o.nu);
  o.k1 = r.number("k1", o.k1);
  o.k2 = r.number("k2", o.k2);
  o.phase_cap = r.number("phase_cap", o.phase_cap);
  o.min_hold = r.number("min_hold", o.min_hold);
  o.v_max = r.number("v_max", o.v_max);
  r.finish();
  return o;
}

void set_by_path(Json& j, const std::string& path, const Json& value)
{
  Json* cur = &j;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (cur->is_array()) {
      const std::size_t idx = static_cast<std::size_t>(std::stoul(key));
      if (idx >= cur->size()) throw ConfigError("sweep key '" + path + "': index out of range");
      cur = &(*cur)[idx];
    } else {
      if (!cur->is_object() || !cur->contains(key)) throw ConfigError("sweep key '" + path + "' does not exist");
      cur = &(*cur)[key];
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  *cur = value;
}

}  // namespace swarm
