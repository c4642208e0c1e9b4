#include "vesselnav/vessel_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vesselnav/errors.hpp"
#include "vesselnav/rng.hpp"

namespace vesselnav {

double wrap_angle(double psi) {
  double w = psi - kTwoPi * std::floor(psi / kTwoPi);
  if (w >= kTwoPi || w < 0.0) w = 0.0;  // rounding at the seam
  return w;
}

double wrap_pi(double angle) {
  double w = std::remainder(angle, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

bool VesselState::is_finite() const {
  return p.allFinite() && std::isfinite(psi) && std::isfinite(u) && std::isfinite(v) &&
         std::isfinite(r) && std::isfinite(t);
}

Eigen::Matrix3d rotation(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Eigen::Matrix3d R;
  R << c, -s, 0.0,  //
      s, c, 0.0,    //
      0.0, 0.0, 1.0;
  return R;
}

void VesselParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("vessel mass must be positive");
  if (!(inertia_z > 0.0)) throw std::invalid_argument("vessel inertia_z must be positive");
  if (!(thruster_offset > 0.0))
    throw std::invalid_argument("thruster_offset must be positive");
  for (const AxisDrag* d : {&surge_drag, &sway_drag, &yaw_drag}) {
    if (!(d->linear >= 0.0) || !(d->quadratic >= 0.0))
      throw std::invalid_argument("drag coefficients must be non-negative");
  }
}

double AxisDisturbance::bound() const {
  return std::abs(bias) + std::abs(amplitude) + std::abs(noise);
}

namespace {

double axis_value(const AxisDisturbance& a, double t, double extra_phase,
                  std::uint64_t seed, std::uint64_t axis, double hold) {
  double value = a.bias;
  if (a.amplitude != 0.0) value += a.amplitude * std::sin(a.frequency * t + a.phase + extra_phase);
  if (a.noise != 0.0) {
    const auto window = static_cast<std::int64_t>(std::floor(t / hold));
    const std::uint64_t h =
        mix64(derive_seed(seed, axis) ^ mix64(static_cast<std::uint64_t>(window)));
    value += a.noise * (2.0 * unit_interval(h) - 1.0);
  }
  return value;
}

}  // namespace

Vec3 DisturbanceProfile::evaluate(double t) const {
  Vec3 phases = Vec3::Zero();
  if (randomize_phase) {
    for (int i = 0; i < 3; ++i)
      phases[i] = kTwoPi * unit_interval(derive_seed(seed, 100 + static_cast<std::uint64_t>(i)));
  }
  return {axis_value(surge, t, phases[0], seed, 0, noise_hold),
          axis_value(sway, t, phases[1], seed, 1, noise_hold),
          axis_value(yaw, t, phases[2], seed, 2, noise_hold)};
}

Vec3 DisturbanceProfile::bound() const { return {surge.bound(), sway.bound(), yaw.bound()}; }

void DisturbanceProfile::validate() const {
  if (!(noise_hold > 0.0)) throw std::invalid_argument("noise_hold must be positive");
  for (const AxisDisturbance* a : {&surge, &sway, &yaw}) {
    if (!std::isfinite(a->bias) || !std::isfinite(a->amplitude) ||
        !std::isfinite(a->frequency) || !std::isfinite(a->phase) || !(a->noise >= 0.0))
      throw std::invalid_argument("disturbance parameters must be finite, noise >= 0");
  }
}

ActuatorCommand::ActuatorCommand(double thrust, double rudder, double max_thrust,
                                 double max_rudder)
    : thrust_(thrust), rudder_(rudder) {
  if (!(thrust >= 0.0 && thrust <= max_thrust))
    throw std::invalid_argument("thrust outside [0, max_thrust]");
  if (!(std::abs(rudder) <= max_rudder))
    throw std::invalid_argument("rudder angle outside [-max_rudder, max_rudder]");
}

Wrench actuator_to_wrench(const ActuatorCommand& cmd, const VesselParams& params) {
  Wrench w;
  w.X = cmd.thrust() * std::cos(cmd.rudder());
  w.Y = cmd.thrust() * std::sin(cmd.rudder());
  w.N = params.thruster_offset * w.Y;
  return w;
}

namespace {

double drag(const AxisDrag& d, double x) { return d.linear * x + d.quadratic * std::abs(x) * x; }

}  // namespace

Vec3 lumped_forces(const VesselState& s, const VesselParams& params,
                   const DisturbanceProfile& dist) {
  Vec3 f(-drag(params.surge_drag, s.u), -drag(params.sway_drag, s.v),
         -drag(params.yaw_drag, s.r));
  if (params.coriolis) {
    // -C(nu) nu for M = diag(m, m, Iz) with the CG at the body origin.
    f[0] += params.mass * s.v * s.r;
    f[1] -= params.mass * s.u * s.r;
  }
  return f + dist.evaluate(s.t);
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 derivative(const Vec6& x, double t, const Wrench& w, const VesselParams& params,
                const DisturbanceProfile& dist) {
  VesselState s;
  s.p = x.head<2>();
  s.psi = x[2];
  s.u = x[3];
  s.v = x[4];
  s.r = x[5];
  s.t = t;
  const double c = std::cos(s.psi);
  const double sn = std::sin(s.psi);
  const Vec3 f = lumped_forces(s, params, dist);
  Vec6 dx;
  dx[0] = c * s.u - sn * s.v;
  dx[1] = sn * s.u + c * s.v;
  dx[2] = s.r;
  dx[3] = (w.X + f[0]) / params.mass;
  dx[4] = (w.Y + f[1]) / params.mass;
  dx[5] = (w.N + f[2]) / params.inertia_z;
  return dx;
}

}  // namespace

VesselState step(const VesselState& state, const ActuatorCommand& cmd,
                 const VesselParams& params, const DisturbanceProfile& dist, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!state.is_finite()) throw NonFiniteState("input state is not finite");

  const Wrench w = actuator_to_wrench(cmd, params);
  Vec6 x;
  x << state.p, state.psi, state.u, state.v, state.r;
  const double t = state.t;

  const Vec6 k1 = derivative(x, t, w, params, dist);
  const Vec6 k2 = derivative(x + 0.5 * dt * k1, t + 0.5 * dt, w, params, dist);
  const Vec6 k3 = derivative(x + 0.5 * dt * k2, t + 0.5 * dt, w, params, dist);
  const Vec6 k4 = derivative(x + dt * k3, t + dt, w, params, dist);
  const Vec6 xn = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  if (!xn.allFinite()) throw NonFiniteState("RK4 step produced a non-finite state");

  VesselState out;
  out.p = xn.head<2>();
  out.psi = wrap_angle(xn[2]);
  out.u = xn[3];
  out.v = xn[4];
  out.r = xn[5];
  out.t = t + dt;
  return out;
}

}  // namespace vesselnav
