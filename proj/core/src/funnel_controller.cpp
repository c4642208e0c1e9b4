#include "vesselnav/funnel_controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "vesselnav/errors.hpp"

namespace vesselnav {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::Distance:
      return "d";
    case Channel::Orientation:
      return "o";
    case Channel::Surge:
      return "u";
    case Channel::Yaw:
      return "r";
  }
  return "?";
}

const FunnelSpec& ControllerConfig::funnel(Channel c) const {
  switch (c) {
    case Channel::Distance:
      return funnel_d;
    case Channel::Orientation:
      return funnel_o;
    case Channel::Surge:
      return funnel_u;
    case Channel::Yaw:
      break;
  }
  return funnel_r;
}

FunnelSpec& ControllerConfig::funnel(Channel c) {
  return const_cast<FunnelSpec&>(std::as_const(*this).funnel(c));
}

void ControllerConfig::validate() const {
  if (!(gains.k_d > 0.0 && gains.k_u > 0.0 && gains.k_o > 0.0 && gains.k_r > 0.0))
    throw std::invalid_argument("controller gains must be positive");
  for (Channel c : kChannels) funnel(c).validate();
  if (!(rho_d_min > 0.0)) throw std::invalid_argument("rho_d_min must be positive");
  if (!(funnel_d.rho_inf > rho_d_min))
    throw std::invalid_argument("distance funnel rho_inf must exceed rho_d_min");
  if (!(funnel_o.rho0 < 1.0))
    throw std::invalid_argument("orientation funnel rho0 must be below 1");
  if (!(max_rudder > 0.0 && max_rudder <= std::numbers::pi / 6.0 + 1e-15))
    throw std::invalid_argument("max_rudder must lie in (0, pi/6]");
  if (!(max_thrust > 0.0)) throw std::invalid_argument("max_thrust must be positive");
  if (!(eps_u_guard > 0.0)) throw std::invalid_argument("eps_u_guard must be positive");
  if (!(nominal_thruster_offset > 0.0))
    throw std::invalid_argument("nominal_thruster_offset must be positive");
}

namespace {

// atanh with the configured out-of-funnel behaviour.
double funnel_transform(double& xi, Channel channel, double t, ViolationPolicy policy,
                        std::uint8_t& violations) {
  if (!(std::abs(xi) < 1.0)) {
    if (policy == ViolationPolicy::Throw)
      throw FunnelViolation(std::string(channel_name(channel)), t, xi);
    violations |= channel_bit(channel);
    xi = std::isnan(xi) ? 0.0 : std::clamp(xi, -kViolationClamp, kViolationClamp);
  }
  return std::atanh(xi);
}

}  // namespace

VelocityReferences velocity_references(const TrackingErrors& errors, double t,
                                       const ControllerConfig& cfg, ViolationPolicy policy) {
  VelocityReferences out;
  out.xi_d = normalize_asymmetric(errors.e_d, cfg.funnel_d(t), cfg.rho_d_min);
  out.eps_d = funnel_transform(out.xi_d, Channel::Distance, t, policy, out.violations);
  out.u_des = cfg.gains.k_d * out.eps_d;

  out.xi_o = normalize_symmetric(errors.e_o, cfg.funnel_o(t));
  out.eps_o = funnel_transform(out.xi_o, Channel::Orientation, t, policy, out.violations);
  out.r_des = -cfg.gains.k_o * out.eps_o;
  return out;
}

WrenchReferences wrench_references(const VesselState& state, double u_des, double r_des,
                                   double t, const ControllerConfig& cfg,
                                   ViolationPolicy policy) {
  WrenchReferences out;
  out.xi_u = normalize_symmetric(state.u - u_des, cfg.funnel_u(t));
  out.eps_u = funnel_transform(out.xi_u, Channel::Surge, t, policy, out.violations);
  out.X_des = -cfg.gains.k_u * out.eps_u;

  out.xi_r = normalize_symmetric(state.r - r_des, cfg.funnel_r(t));
  out.eps_r = funnel_transform(out.xi_r, Channel::Yaw, t, policy, out.violations);
  out.N_des = -cfg.gains.k_r * out.eps_r;
  return out;
}

Allocation saturate_and_allocate(double eps_u, double eps_r, const ControllerConfig& cfg) {
  Allocation out;
  // eps_u may only approach zero from below; at or above zero the thrust is cut.
  const double eps_u_guarded = std::min(eps_u, -cfg.eps_u_guard);
  out.u_alpha = std::atan(cfg.k_alpha() * eps_r / eps_u_guarded);

  double rudder = out.u_alpha;
  if (std::abs(out.u_alpha) > cfg.max_rudder) {
    rudder = std::copysign(cfg.max_rudder, out.u_alpha);
    out.rudder_saturated = true;
  }

  out.u_F = -cfg.gains.k_u * eps_u / std::cos(rudder);
  double thrust = out.u_F;
  if (!(out.u_F > 0.0)) {
    thrust = 0.0;
    out.thrust_saturated = true;
  } else if (out.u_F > cfg.max_thrust) {
    thrust = cfg.max_thrust;
    out.thrust_saturated = true;
  }
  out.command = ActuatorCommand(thrust, rudder, cfg.max_thrust, cfg.max_rudder);
  return out;
}

ControlOutput control_tick(const VesselState& state, const Vec2& p_des, double t,
                           const ControllerConfig& cfg, ViolationPolicy policy) {
  ControlOutput out;
  ControllerDebug& dbg = out.debug;

  TrackingErrors errors;
  try {
    errors = compute_errors(state, p_des);
  } catch (const DegenerateDistance&) {
    if (policy == ViolationPolicy::Throw) throw;
    // Treated as a distance-channel fault; orientation is undefined, take zero.
    errors.e_x = p_des.x() - state.p.x();
    errors.e_y = p_des.y() - state.p.y();
    errors.e_d = std::hypot(errors.e_x, errors.e_y);
    dbg.violations |= channel_bit(Channel::Distance);
  }

  const VelocityReferences vel = velocity_references(errors, t, cfg, policy);
  const WrenchReferences wr = wrench_references(state, vel.u_des, vel.r_des, t, cfg, policy);
  const Allocation alloc = saturate_and_allocate(wr.eps_u, wr.eps_r, cfg);

  dbg.xi_d = vel.xi_d;
  dbg.xi_o = vel.xi_o;
  dbg.eps_d = vel.eps_d;
  dbg.eps_o = vel.eps_o;
  dbg.u_des = vel.u_des;
  dbg.r_des = vel.r_des;
  dbg.xi_u = wr.xi_u;
  dbg.xi_r = wr.xi_r;
  dbg.eps_u = wr.eps_u;
  dbg.eps_r = wr.eps_r;
  dbg.X_des = wr.X_des;
  dbg.N_des = wr.N_des;
  dbg.u_alpha = alloc.u_alpha;
  dbg.u_F = alloc.u_F;
  dbg.thrust_saturated = alloc.thrust_saturated;
  dbg.rudder_saturated = alloc.rudder_saturated;
  dbg.violations |= static_cast<std::uint8_t>(vel.violations | wr.violations);

  out.command = alloc.command;
  return out;
}

bool ComplianceReport::ok() const {
  if (!distance_above_min || !psi_e_ok) return false;
  return std::all_of(channels.begin(), channels.end(),
                     [](const ChannelStatus& c) { return c.ok; });
}

bool ComplianceReport::inflatable() const {
  if (!distance_above_min || !psi_e_ok) return false;
  return std::all_of(channels.begin(), channels.end(), [](const ChannelStatus& c) {
    return c.ok || c.required_rho0.has_value();
  });
}

std::string ComplianceReport::describe() const {
  std::ostringstream os;
  os.precision(6);
  if (!distance_above_min)
    os << "distance error " << channels[0].error << " m is not above rho_d_min; ";
  if (!psi_e_ok) os << "|psi_e(0)| = " << std::abs(psi_e) << " rad is not below pi/2; ";
  for (Channel c : kChannels) {
    const auto& s = channels[static_cast<std::size_t>(c)];
    if (s.ok) continue;
    os << "channel " << channel_name(c) << ": error " << s.error << " outside rho(0) = "
       << s.bound;
    if (s.required_rho0) os << " (needs rho0 >= " << *s.required_rho0 << ")";
    os << "; ";
  }
  std::string text = os.str();
  return text.empty() ? "initially compliant" : text;
}

namespace {

constexpr double kInflationHeadroom = 1.05;

}  // namespace

ComplianceReport check_initial_compliance(const VesselState& state, const Vec2& p_des,
                                          const ControllerConfig& cfg) {
  ComplianceReport rep;
  ControllerConfig eff = cfg;  // funnels after any inflation upstream in the cascade

  const double ex = p_des.x() - state.p.x();
  const double ey = p_des.y() - state.p.y();
  const double e_d = std::hypot(ex, ey);

  auto& d = rep.channels[static_cast<std::size_t>(Channel::Distance)];
  d.error = e_d;
  d.bound = cfg.funnel_d(0.0);
  rep.distance_above_min = e_d > cfg.rho_d_min;
  d.ok = rep.distance_above_min && e_d < d.bound;
  if (rep.distance_above_min && !(e_d < d.bound)) {
    d.required_rho0 = e_d * kInflationHeadroom;
    eff.funnel_d.rho0 = *d.required_rho0;
  }

  if (e_d < kDegenerateDistance) {
    rep.psi_e_ok = false;
    return rep;
  }
  const TrackingErrors errors = compute_errors(state, p_des);
  rep.psi_e = errors.psi_e;
  rep.psi_e_ok = std::abs(errors.psi_e) < std::numbers::pi / 2.0;

  auto& o = rep.channels[static_cast<std::size_t>(Channel::Orientation)];
  o.error = std::abs(errors.e_o);
  o.bound = cfg.funnel_o(0.0);
  o.ok = o.error < o.bound;
  if (!o.ok && o.error < 1.0) {
    o.required_rho0 = std::min(o.error * kInflationHeadroom, 0.5 * (1.0 + o.error));
    eff.funnel_o.rho0 = *o.required_rho0;
  }

  double u_des = 0.0;
  double r_des = 0.0;
  if (rep.distance_above_min && o.error < 1.0) {
    const VelocityReferences vel = velocity_references(errors, 0.0, eff, ViolationPolicy::Clamp);
    u_des = vel.u_des;
    r_des = vel.r_des;
  }

  auto& su = rep.channels[static_cast<std::size_t>(Channel::Surge)];
  su.error = std::abs(state.u - u_des);
  su.bound = cfg.funnel_u(0.0);
  su.ok = su.error < su.bound;
  if (!su.ok) su.required_rho0 = std::max(su.error * kInflationHeadroom, su.error + 1e-6);

  auto& sr = rep.channels[static_cast<std::size_t>(Channel::Yaw)];
  sr.error = std::abs(state.r - r_des);
  sr.bound = cfg.funnel_r(0.0);
  sr.ok = sr.error < sr.bound;
  if (!sr.ok) sr.required_rho0 = std::max(sr.error * kInflationHeadroom, sr.error + 1e-6);

  return rep;
}

ControllerConfig inflate_for_compliance(const ControllerConfig& cfg,
                                        const ComplianceReport& report) {
  if (!report.inflatable())
    throw InitialComplianceError("funnel inflation cannot restore compliance: " +
                                 report.describe());
  ControllerConfig out = cfg;
  for (Channel c : kChannels) {
    const auto& s = report.channels[static_cast<std::size_t>(c)];
    if (!s.ok && s.required_rho0) out.funnel(c).rho0 = *s.required_rho0;
  }
  out.validate();
  return out;
}

}  // namespace vesselnav
