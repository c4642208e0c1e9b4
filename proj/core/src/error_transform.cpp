#include "vesselnav/error_transform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vesselnav/errors.hpp"

namespace vesselnav {

double FunnelSpec::operator()(double t) const {
  if (is_static()) return rho0;
  return (rho0 - rho_inf) * std::exp(-decay * t) + rho_inf;
}

double FunnelSpec::rate(double t) const {
  if (is_static()) return 0.0;
  return -decay * (rho0 - rho_inf) * std::exp(-decay * t);
}

void FunnelSpec::validate() const {
  if (!(rho_inf > 0.0)) throw std::invalid_argument("funnel rho_inf must be positive");
  if (!(rho0 >= rho_inf)) throw std::invalid_argument("funnel rho0 must be >= rho_inf");
  if (!(decay >= 0.0)) throw std::invalid_argument("funnel decay rate must be >= 0");
}

TrackingErrors compute_errors(const VesselState& state, const Vec2& p_des) {
  TrackingErrors e;
  e.e_x = p_des.x() - state.p.x();
  e.e_y = p_des.y() - state.p.y();
  e.e_d = std::hypot(e.e_x, e.e_y);
  if (!(e.e_d >= kDegenerateDistance))
    throw DegenerateDistance("distance error below 1e-9 m; orientation error undefined");

  const double c = std::cos(state.psi);
  const double s = std::sin(state.psi);
  e.e_o = (e.e_x / e.e_d) * s - (e.e_y / e.e_d) * c;
  // Body-frame error components; sin(psi_e) = -lateral / e_d = e_o.
  const double forward = e.e_x * c + e.e_y * s;
  const double lateral = -e.e_x * s + e.e_y * c;
  e.psi_e = std::atan2(-lateral, forward);
  if (e.psi_e <= -std::numbers::pi) e.psi_e = std::numbers::pi;
  return e;
}

double normalize_asymmetric(double e_d, double rho_d, double rho_d_min) {
  return (2.0 * e_d - rho_d - rho_d_min) / (rho_d - rho_d_min);
}

double normalize_symmetric(double e, double rho) { return e / rho; }

double transform(double xi) {
  if (!(std::abs(xi) < 1.0)) throw FunnelViolation("?", 0.0, xi);
  return std::atanh(xi);
}

}  // namespace vesselnav
