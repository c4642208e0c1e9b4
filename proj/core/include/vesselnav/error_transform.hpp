#pragma once

#include "vesselnav/vessel_dynamics.hpp"

namespace vesselnav {

/// Below this distance [m] the orientation error is undefined.
inline constexpr double kDegenerateDistance = 1e-9;

/// Exponentially decaying performance bound rho(t) = (rho0 - rho_inf) e^{-l t} + rho_inf.
struct FunnelSpec {
  double rho0 = 1.0;
  double rho_inf = 1.0;
  double decay = 0.0;  ///< l [1/s]

  static FunnelSpec constant(double rho) { return {rho, rho, 0.0}; }

  double operator()(double t) const;
  /// d rho / dt; identically zero for static funnels.
  double rate(double t) const;
  bool is_static() const { return decay == 0.0 || rho0 == rho_inf; }

  /// Throws std::invalid_argument unless rho0 >= rho_inf > 0 and l >= 0.
  void validate() const;
};

struct TrackingErrors {
  double e_x = 0.0;    ///< p_des,x - p_x [m]
  double e_y = 0.0;    ///< p_des,y - p_y [m]
  double e_d = 0.0;    ///< Euclidean distance error [m]
  double e_o = 0.0;    ///< sin(psi_e)
  double psi_e = 0.0;  ///< bearing of the reference relative to the heading, (-pi, pi]
};

/// Distance/orientation error coordinates. Throws DegenerateDistance when the
/// reference coincides with the vessel position.
TrackingErrors compute_errors(const VesselState& state, const Vec2& p_des);

/// Maps rho_d_min < e_d < rho_d onto (-1, 1); affine in e_d.
double normalize_asymmetric(double e_d, double rho_d, double rho_d_min);

/// e / rho.
double normalize_symmetric(double e, double rho);

/// atanh(xi). Throws FunnelViolation (channel "?") when |xi| >= 1.
double transform(double xi);

}  // namespace vesselnav
