#include "vesselnav/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "vesselnav/errors.hpp"
#include "vesselnav/rng.hpp"

namespace vesselnav {

bool FeasibilityReport::pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionCheck& c) { return c.pass; });
}

namespace {

nlohmann::json sample_json(const BoundSample& s) {
  return {{"index", s.index},
          {"t", s.t},
          {"value", s.value},
          {"state",
           {{"x", s.state.p.x()}, {"y", s.state.p.y()}, {"psi", s.state.psi},
            {"u", s.state.u}, {"v", s.state.v}, {"r", s.state.r}}},
          {"reference", {s.reference.x(), s.reference.y()}},
          {"reference_velocity", {s.reference_velocity.x(), s.reference_velocity.y()}}};
}

// Velocity references as functions of the kinematic configuration.
struct References {
  double u_des;
  double r_des;
};

References references_at(const VesselState& s, const Vec2& p_des, double t,
                         const ControllerConfig& cfg) {
  const TrackingErrors e = compute_errors(s, p_des);
  const VelocityReferences v = velocity_references(e, t, cfg, ViolationPolicy::Clamp);
  return {v.u_des, v.r_des};
}

// Moves the vessel along its frozen body velocities and the reference along
// its own velocity for a short time h.
VesselState drift(const VesselState& s, double h) {
  VesselState out = s;
  const double c = std::cos(s.psi);
  const double sn = std::sin(s.psi);
  out.p += h * Vec2(c * s.u - sn * s.v, sn * s.u + c * s.v);
  out.psi = s.psi + h * s.r;
  out.t = s.t + h;
  return out;
}

}  // namespace

std::string FeasibilityReport::to_json() const {
  nlohmann::json j;
  j["F_bar_u"] = F_bar_u;
  j["F_bar_r"] = F_bar_r;
  j["F_T_lower"] = F_T_lower;
  j["v_bar"] = v_bar;
  j["n_samples"] = n_samples;
  j["worst_u"] = sample_json(worst_u);
  j["worst_r"] = sample_json(worst_r);
  auto& conds = j["conditions"] = nlohmann::json::array();
  for (const ConditionCheck& c : conditions)
    conds.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"margin", c.margin},
                     {"pass", c.pass}});
  j["pass"] = pass();
  return j.dump(2);
}

FeasibilityReport estimate_bounds(const FeasibilityInputs& in) {
  if (in.n_samples < 100)
    throw InsufficientSamples("feasibility estimate needs at least 100 samples, got " +
                              std::to_string(in.n_samples));
  in.vessel.validate();
  in.controller.validate();
  const ControllerConfig& cfg = in.controller;
  const SampleBox& box = in.box;

  FeasibilityReport rep;
  rep.F_T_lower = in.min_thrust;
  rep.v_bar = box.v_bar;
  rep.n_samples = in.n_samples;

  std::uint64_t counter = 0;
  auto uniform = [&](std::uint64_t sample, double lo, double hi) {
    return lo + (hi - lo) * unit_interval(derive_seed(derive_seed(in.seed, sample), counter++));
  };

  for (int i = 0; i < in.n_samples; ++i) {
    counter = 0;
    const auto id = static_cast<std::uint64_t>(i);
    const double t = uniform(id, 0.0, in.horizon);
    const double rho_d = cfg.funnel_d(t);
    const double rho_o = cfg.funnel_o(t);
    const double rho_u = cfg.funnel_u(t);
    const double rho_r = cfg.funnel_r(t);

    const double xi_d = uniform(id, -box.xi, box.xi);
    const double xi_o = uniform(id, -box.xi, box.xi);
    const double e_d = 0.5 * (xi_d * (rho_d - cfg.rho_d_min) + rho_d + cfg.rho_d_min);
    const double psi_e = std::asin(std::clamp(xi_o * rho_o, -1.0, 1.0));

    VesselState s;
    s.t = t;
    s.psi = uniform(id, 0.0, kTwoPi);
    s.v = uniform(id, -box.v_bar, box.v_bar);
    const Vec2 p_des = s.p + e_d * Vec2(std::cos(s.psi - psi_e), std::sin(s.psi - psi_e));
    const double ref_dir = uniform(id, 0.0, kTwoPi);
    const Vec2 ref_vel = uniform(id, 0.0, in.reference_speed) * Vec2(std::cos(ref_dir), std::sin(ref_dir));

    const References ref = references_at(s, p_des, t, cfg);
    // Velocity errors inside the funnel box, clipped to the operating envelope.
    const double u_lo = std::max(box.u_min, ref.u_des - box.xi * rho_u);
    const double u_hi = std::min(box.u_max, ref.u_des + box.xi * rho_u);
    const double r_lo = std::max(-box.r_max, ref.r_des - box.xi * rho_r);
    const double r_hi = std::min(box.r_max, ref.r_des + box.xi * rho_r);
    const double pick_u = uniform(id, 0.0, 1.0);
    const double pick_r = uniform(id, 0.0, 1.0);
    if (u_lo > u_hi || r_lo > r_hi) continue;  // reference outside the envelope
    s.u = u_lo + pick_u * (u_hi - u_lo);
    s.r = r_lo + pick_r * (r_hi - r_lo);
    const double xi_u = (s.u - ref.u_des) / rho_u;
    const double xi_r = (s.r - ref.r_des) / rho_r;

    const double h = in.fd_step;
    const References fwd = references_at(drift(s, h), p_des + h * ref_vel, t + h, cfg);
    const References bwd = references_at(drift(s, -h), p_des - h * ref_vel, t - h, cfg);
    const double u_des_dot = (fwd.u_des - bwd.u_des) / (2.0 * h);
    const double r_des_dot = (fwd.r_des - bwd.r_des) / (2.0 * h);

    const Vec3 f = lumped_forces(s, in.vessel, in.disturbance);
    const double lhs_u =
        std::abs(f.x() - in.vessel.mass * (u_des_dot + cfg.funnel_u.rate(t) * xi_u));
    const double lhs_r =
        std::abs(f.z() - in.vessel.inertia_z * (r_des_dot + cfg.funnel_r.rate(t) * xi_r));

    if (lhs_u > rep.F_bar_u) {
      rep.F_bar_u = lhs_u;
      rep.worst_u = {i, t, s, p_des, ref_vel, lhs_u};
    }
    if (lhs_r > rep.F_bar_r) {
      rep.F_bar_r = lhs_r;
      rep.worst_r = {i, t, s, p_des, ref_vel, lhs_r};
    }
  }

  const double alpha = cfg.max_rudder;
  auto& a = rep.conditions[0];
  a.name = "thrust_floor";
  a.lhs = in.min_thrust;
  a.rhs = cfg.max_thrust;
  a.margin = std::min(in.min_thrust, cfg.max_thrust - in.min_thrust);
  a.pass = in.min_thrust > 0.0 && in.min_thrust <= cfg.max_thrust;

  auto& b = rep.conditions[1];
  b.name = "surge_authority";
  b.lhs = rep.F_bar_u;
  b.rhs = cfg.max_thrust * std::cos(alpha);
  b.margin = b.rhs - b.lhs;
  b.pass = b.margin >= 0.0;

  auto& c = rep.conditions[2];
  c.name = "yaw_authority";
  c.lhs = rep.F_bar_r;
  c.rhs = in.vessel.thruster_offset * in.min_thrust * std::sin(alpha);
  c.margin = c.rhs - c.lhs;
  c.pass = c.margin >= 0.0;

  auto& d = rep.conditions[3];
  d.name = "initial_bearing";
  const Vec2 diff = in.initial_reference - in.initial.p;
  if (diff.norm() >= kDegenerateDistance) {
    d.lhs = std::abs(compute_errors(in.initial, in.initial_reference).psi_e);
    d.rhs = std::numbers::pi / 2.0;
    d.margin = d.rhs - d.lhs;
    d.pass = d.margin > 0.0;
  } else {
    d.lhs = std::numeric_limits<double>::quiet_NaN();
    d.rhs = std::numbers::pi / 2.0;
    d.margin = -std::numeric_limits<double>::infinity();
    d.pass = false;
  }
  return rep;
}

}  // namespace vesselnav
