#pragma once

// Ground-truth 3-DoF surface vessel simulator (surge, sway, yaw) with a single
// steerable thruster at the stern. Nothing in here is visible to the
// controller; it only ever sees measured VesselState values.

#include <Eigen/Core>
#include <cstdint>

namespace vesselnav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double psi);

/// Wraps an angle into (-pi, pi].
double wrap_pi(double angle);

/// Full vessel state in the inertial NED frame plus simulation time.
struct VesselState {
  Vec2 p = Vec2::Zero();  ///< position [m]
  double psi = 0.0;       ///< heading [rad], kept in [0, 2*pi)
  double u = 0.0;         ///< surge velocity [m/s]
  double v = 0.0;         ///< sway velocity [m/s]
  double r = 0.0;         ///< yaw rate [rad/s]
  double t = 0.0;         ///< simulation time [s]

  bool is_finite() const;
};

/// Body-to-inertial rotation about the z axis.
Eigen::Matrix3d rotation(double psi);

struct AxisDrag {
  double linear = 0.0;     ///< N per (m/s), or N*m per (rad/s) for yaw
  double quadratic = 0.0;  ///< N per (m/s)^2, or N*m per (rad/s)^2
};

struct VesselParams {
  double mass = 300.0;            ///< [kg]
  double inertia_z = 400.0;       ///< [kg*m^2]
  double thruster_offset = 1.5;   ///< longitudinal thruster distance from CG [m]
  AxisDrag surge_drag{60.0, 20.0};
  AxisDrag sway_drag{300.0, 150.0};
  AxisDrag yaw_drag{400.0, 200.0};
  bool coriolis = false;          ///< rigid-body C(nu)nu terms

  /// Throws std::invalid_argument when a physical invariant is broken.
  void validate() const;
};

/// One bounded exogenous signal: bias + A sin(w t + phase) + held uniform noise.
struct AxisDisturbance {
  double bias = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;  ///< [rad/s]
  double phase = 0.0;      ///< [rad]
  double noise = 0.0;      ///< half-width of the uniform noise band

  double bound() const;
};

/// Deterministic disturbance wrench tau_d(t) in the body frame.
///
/// Noise is piecewise constant over windows of `noise_hold` seconds and is a
/// pure function of (seed, axis, window index), so two evaluations at the
/// same time always agree regardless of call order.
struct DisturbanceProfile {
  AxisDisturbance surge;
  AxisDisturbance sway;
  AxisDisturbance yaw;
  double noise_hold = 0.5;     ///< [s]
  bool randomize_phase = true; ///< add a seed-derived phase offset per axis
  std::uint64_t seed = 0;

  /// (tau_x [N], tau_y [N], tau_psi [N*m]) at time t.
  Vec3 evaluate(double t) const;
  /// Per-axis absolute bound: |evaluate(t)_i| <= bound()_i for all t.
  Vec3 bound() const;

  void validate() const;
};

/// Actuator command inside the admissible set [0, max_thrust] x [-max_rudder, max_rudder].
class ActuatorCommand {
 public:
  ActuatorCommand() = default;
  /// Throws std::invalid_argument if the command is outside the given limits.
  ActuatorCommand(double thrust, double rudder, double max_thrust, double max_rudder);

  double thrust() const noexcept { return thrust_; }
  double rudder() const noexcept { return rudder_; }

 private:
  double thrust_ = 0.0;
  double rudder_ = 0.0;
};

/// Generalized actuator wrench (X, Y, N) in the body frame.
struct Wrench {
  double X = 0.0;
  double Y = 0.0;
  double N = 0.0;
};

/// Single-thruster allocation; N == thruster_offset * Y holds bit-exactly.
Wrench actuator_to_wrench(const ActuatorCommand& cmd, const VesselParams& params);

/// Everything on the right-hand side of the rewritten dynamics except the
/// actuator wrench: (f_u, f_v, f_r) = -D(nu)nu - C(nu)nu + tau_d.
Vec3 lumped_forces(const VesselState& state, const VesselParams& params,
                   const DisturbanceProfile& dist);

/// One fixed-step RK4 integration of the kinematics and rigid-body dynamics.
/// The command is held constant over the step. Throws NonFiniteState.
VesselState step(const VesselState& state, const ActuatorCommand& cmd,
                 const VesselParams& params, const DisturbanceProfile& dist, double dt);

}  // namespace vesselnav
