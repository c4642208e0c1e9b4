#pragma once

// Four-stage prescribed-performance cascade:
//   distance error  -> surge velocity reference u_des
//   orientation err -> yaw rate reference r_des
//   surge error     -> desired surge force X_des
//   yaw rate error  -> desired yaw torque N_des
// followed by the saturating thrust/rudder allocation. The controller is a
// pure function of the measured state, the reference position and time; it
// never reads VesselParams.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vesselnav/error_transform.hpp"
#include "vesselnav/vessel_dynamics.hpp"

namespace vesselnav {

enum class Channel : std::uint8_t { Distance = 0, Orientation = 1, Surge = 2, Yaw = 3 };

inline constexpr std::array<Channel, 4> kChannels{Channel::Distance, Channel::Orientation,
                                                  Channel::Surge, Channel::Yaw};

std::string_view channel_name(Channel c);

constexpr std::uint8_t channel_bit(Channel c) {
  return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c));
}

struct ControllerGains {
  double k_d = 1.0;
  double k_u = 1.0;
  double k_o = 1.0;
  double k_r = 1.0;
};

struct ControllerConfig {
  ControllerGains gains;
  FunnelSpec funnel_d = FunnelSpec::constant(28.0);
  FunnelSpec funnel_o = FunnelSpec::constant(0.9999);
  FunnelSpec funnel_u = FunnelSpec::constant(25.0);
  FunnelSpec funnel_r = FunnelSpec::constant(15.0);
  double rho_d_min = 0.5;                 ///< [m]
  double max_thrust = 1000.0;             ///< [N]
  double max_rudder = 0.5235987755982988; ///< [rad], pi/6
  double eps_u_guard = 1e-6;
  /// Nominal thruster lever arm used only for k_alpha; need not match the plant.
  double nominal_thruster_offset = 1.0;

  double k_alpha() const { return gains.k_r / (nominal_thruster_offset * gains.k_u); }
  const FunnelSpec& funnel(Channel c) const;
  FunnelSpec& funnel(Channel c);

  void validate() const;
};

/// How a normalized error outside (-1, 1) is handled.
enum class ViolationPolicy {
  Throw,  ///< raise FunnelViolation
  Clamp,  ///< clamp to +-(1 - 1e-9), flag the channel and keep going
};

inline constexpr double kViolationClamp = 1.0 - 1e-9;

struct ControllerDebug {
  double xi_d = 0.0, xi_o = 0.0, xi_u = 0.0, xi_r = 0.0;
  double eps_d = 0.0, eps_o = 0.0, eps_u = 0.0, eps_r = 0.0;
  double u_des = 0.0, r_des = 0.0;
  double X_des = 0.0, N_des = 0.0;
  double u_alpha = 0.0, u_F = 0.0;
  bool thrust_saturated = false;
  bool rudder_saturated = false;
  std::uint8_t violations = 0;  ///< bitmask of channel_bit()
};

struct VelocityReferences {
  double u_des = 0.0;
  double r_des = 0.0;
  double xi_d = 0.0, xi_o = 0.0;
  double eps_d = 0.0, eps_o = 0.0;
  std::uint8_t violations = 0;
};

struct WrenchReferences {
  double X_des = 0.0;
  double N_des = 0.0;
  double xi_u = 0.0, xi_r = 0.0;
  double eps_u = 0.0, eps_r = 0.0;
  std::uint8_t violations = 0;
};

struct Allocation {
  ActuatorCommand command;
  double u_alpha = 0.0;
  double u_F = 0.0;
  bool thrust_saturated = false;
  bool rudder_saturated = false;
};

struct ControlOutput {
  ActuatorCommand command;
  ControllerDebug debug;
};

VelocityReferences velocity_references(const TrackingErrors& errors, double t,
                                       const ControllerConfig& cfg,
                                       ViolationPolicy policy = ViolationPolicy::Throw);

WrenchReferences wrench_references(const VesselState& state, double u_des, double r_des,
                                   double t, const ControllerConfig& cfg,
                                   ViolationPolicy policy = ViolationPolicy::Throw);

/// Rudder from the clamped virtual angle, thrust from the clamped virtual force.
/// The returned command always lies in the admissible set.
Allocation saturate_and_allocate(double eps_u, double eps_r, const ControllerConfig& cfg);

/// Full cascade. With ViolationPolicy::Throw raises DegenerateDistance or
/// FunnelViolation; with Clamp records violations in debug.violations.
ControlOutput control_tick(const VesselState& state, const Vec2& p_des, double t,
                           const ControllerConfig& cfg,
                           ViolationPolicy policy = ViolationPolicy::Throw);

/// Per-channel initial compliance diagnostics.
struct ComplianceReport {
  struct ChannelStatus {
    double error = 0.0;      ///< |e| for symmetric channels, e_d for distance
    double bound = 0.0;      ///< rho(0)
    bool ok = true;
    std::optional<double> required_rho0;  ///< smallest compliant rho0 (inflation)
  };
  std::array<ChannelStatus, 4> channels{};
  bool distance_above_min = true;  ///< rho_d_min < e_d(0)
  double psi_e = 0.0;
  bool psi_e_ok = true;            ///< |psi_e(0)| < pi/2

  bool ok() const;
  /// True when every failure can be cured by enlarging some rho0.
  bool inflatable() const;
  std::string describe() const;
};

ComplianceReport check_initial_compliance(const VesselState& state, const Vec2& p_des,
                                          const ControllerConfig& cfg);

/// Returns a copy of cfg with every failing rho0 raised to its required value.
/// Throws InitialComplianceError if some failure cannot be fixed that way.
ControllerConfig inflate_for_compliance(const ControllerConfig& cfg,
                                        const ComplianceReport& report);

}  // namespace vesselnav
