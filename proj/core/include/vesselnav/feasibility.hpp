#pragma once

// Numerical audit of the sufficient conditions for funnel invariance:
//   (a) 0 < F_T_lower <= F_T_max
//   (b) F_bar_u <= F_T_max cos(alpha_max)
//   (c) F_bar_r <= thruster_offset F_T_lower sin(alpha_max)
//   (d) |psi_e(0)| < pi/2
// F_bar_u and F_bar_r are Monte-Carlo maxima over a declared state box. The
// checker reads the true model; the controller never does.

#include <array>
#include <cstdint>
#include <string>

#include "vesselnav/funnel_controller.hpp"
#include "vesselnav/vessel_dynamics.hpp"

namespace vesselnav {

/// Region the bounds are maximized over: every normalized error within
/// +-xi of its funnel, intersected with an operating envelope on the velocities.
struct SampleBox {
  double xi = 0.9;      ///< fraction of each funnel
  double u_min = 0.0;   ///< [m/s]
  double u_max = 5.0;   ///< [m/s]
  double r_max = 0.5;   ///< [rad/s]
  double v_bar = 0.5;   ///< sway bound [m/s]
};

struct FeasibilityInputs {
  VesselParams vessel;
  DisturbanceProfile disturbance;
  ControllerConfig controller;
  double min_thrust = 100.0;  ///< declared operational floor F_T_lower [N]
  SampleBox box;
  double reference_speed = 5.0;  ///< largest reference speed [m/s]
  double horizon = 180.0;        ///< [s]
  int n_samples = 20000;
  std::uint64_t seed = 0;
  VesselState initial;
  Vec2 initial_reference = Vec2(10.0, 0.0);
  double fd_step = 1e-4;  ///< [s]
};

struct ConditionCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs; pass iff margin >= 0 (strict for (a) and (d))
  bool pass = false;
};

struct BoundSample {
  int index = -1;
  double t = 0.0;
  VesselState state;
  Vec2 reference = Vec2::Zero();
  Vec2 reference_velocity = Vec2::Zero();
  double value = 0.0;
};

struct FeasibilityReport {
  double F_bar_u = 0.0;
  double F_bar_r = 0.0;
  double F_T_lower = 0.0;
  double v_bar = 0.0;
  BoundSample worst_u;
  BoundSample worst_r;
  int n_samples = 0;
  std::array<ConditionCheck, 4> conditions{};

  bool pass() const;
  std::string to_json() const;
};

/// Throws InsufficientSamples when n_samples < 100.
FeasibilityReport estimate_bounds(const FeasibilityInputs& in);

}  // namespace vesselnav
