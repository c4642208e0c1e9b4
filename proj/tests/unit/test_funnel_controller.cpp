#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vesselnav/errors.hpp"
#include "vesselnav/funnel_controller.hpp"

using namespace vesselnav;

namespace {

// Static funnels of the field trial.
ControllerConfig trial_config() {
  ControllerConfig c;
  c.funnel_d = FunnelSpec::constant(28.0);
  c.funnel_o = FunnelSpec::constant(0.9999);
  c.funnel_u = FunnelSpec::constant(25.0);
  c.funnel_r = FunnelSpec::constant(15.0);
  c.rho_d_min = 0.5;
  c.max_thrust = 1000.0;
  c.max_rudder = std::numbers::pi / 6;
  return c;
}

TrackingErrors errors_with(double e_d, double e_o) {
  TrackingErrors e;
  e.e_d = e_d;
  e.e_o = e_o;
  e.psi_e = std::asin(e_o);
  return e;
}

// Vessel at the origin heading along x with the reference at distance e_d, bearing psi_e.
Vec2 reference_at(double e_d, double psi_e) { return e_d * Vec2(std::cos(-psi_e), std::sin(-psi_e)); }

}  // namespace

TEST(VelocityReferences, MidpointGivesZeroReferences) {
  const VelocityReferences v = velocity_references(errors_with(14.25, 0.0), 0.0, trial_config());
  EXPECT_EQ(v.u_des, 0.0);
  EXPECT_EQ(v.r_des, 0.0);
}

TEST(VelocityReferences, DistanceChain) {
  ControllerConfig c = trial_config();
  c.gains.k_d = 2.0;
  const VelocityReferences v = velocity_references(errors_with(20.0, 0.0), 0.0, c);
  EXPECT_NEAR(v.xi_d, 11.5 / 27.5, 1e-15);
  EXPECT_NEAR(v.u_des, 2.0 * 0.5 * std::log((27.5 + 11.5) / (27.5 - 11.5)), 1e-14);
}

TEST(VelocityReferences, OrientationChain) {
  ControllerConfig c = trial_config();
  c.gains.k_o = 1.0;
  const VelocityReferences v = velocity_references(errors_with(10.0, 0.5), 0.0, c);
  EXPECT_NEAR(v.r_des, -std::atanh(0.5 / 0.9999), 1e-14);
  EXPECT_NEAR(v.r_des, -0.54937, 1e-5);
}

TEST(VelocityReferences, ViolationPolicies) {
  const ControllerConfig c = trial_config();
  try {
    velocity_references(errors_with(30.0, 0.0), 2.0, c);
    FAIL() << "expected a funnel violation";
  } catch (const FunnelViolation& v) {
    EXPECT_EQ(v.channel(), "d");
    EXPECT_EQ(v.time(), 2.0);
  }
  const VelocityReferences clamped = velocity_references(errors_with(30.0, 0.0), 2.0, c, ViolationPolicy::Clamp);
  EXPECT_EQ(clamped.violations, channel_bit(Channel::Distance));
  EXPECT_NEAR(clamped.u_des, c.gains.k_d * std::atanh(kViolationClamp), 1e-9);
}

TEST(VelocityReferences, MonotoneInErrors) {
  const ControllerConfig c = trial_config();
  double prev_u = -std::numeric_limits<double>::infinity();
  for (double e = 0.51; e < 28.0; e += 0.05) {
    const double u = velocity_references(errors_with(e, 0.0), 0.0, c).u_des;
    ASSERT_GT(u, prev_u);
    prev_u = u;
  }
  double prev_r = std::numeric_limits<double>::infinity();
  for (double eo = -0.999; eo < 0.999; eo += 0.001) {
    const double r = velocity_references(errors_with(10.0, eo), 0.0, c).r_des;
    ASSERT_LT(r, prev_r);
    prev_r = r;
  }
}

TEST(WrenchReferences, ZeroVelocityErrors) {
  VesselState s;
  s.u = 1.7;
  s.r = -0.2;
  const WrenchReferences w = wrench_references(s, 1.7, -0.2, 0.0, trial_config());
  EXPECT_EQ(w.X_des, 0.0);
  EXPECT_EQ(w.N_des, 0.0);
}

TEST(WrenchReferences, SurgeAndYawChains) {
  ControllerConfig c = trial_config();
  c.gains.k_u = 50.0;
  c.gains.k_r = 10.0;
  VesselState s;
  s.u = 0.0;
  s.r = 7.5;
  const WrenchReferences w = wrench_references(s, 12.5, 0.0, 0.0, c);
  EXPECT_DOUBLE_EQ(w.xi_u, -0.5);
  EXPECT_NEAR(w.X_des, 27.465, 1e-3);
  EXPECT_NEAR(w.N_des, -5.4931, 1e-4);
}

TEST(WrenchReferences, ScaleConsistent) {
  ControllerConfig a = trial_config();
  ControllerConfig b = a;
  b.funnel_u = FunnelSpec::constant(50.0);
  VesselState sa, sb;
  sa.u = 3.0;
  sb.u = 6.0;
  EXPECT_DOUBLE_EQ(wrench_references(sa, 0.0, 0.0, 0.0, a).X_des, wrench_references(sb, 0.0, 0.0, 0.0, b).X_des);
}

TEST(SaturateAndAllocate, PureSurgeDemand) {
  ControllerConfig c = trial_config();
  c.gains.k_u = 300.0;
  Allocation a = saturate_and_allocate(-1.0, 0.0, c);
  EXPECT_EQ(a.command.rudder(), 0.0);
  EXPECT_DOUBLE_EQ(a.command.thrust(), 300.0);
  c.gains.k_u = 3000.0;
  a = saturate_and_allocate(-1.0, 0.0, c);
  EXPECT_EQ(a.command.thrust(), c.max_thrust);
  EXPECT_TRUE(a.thrust_saturated);
}

TEST(SaturateAndAllocate, OverspeedCutsThrust) {
  for (double eps_u : {0.0, 1e-9, 0.3, 5.0}) {
    const Allocation a = saturate_and_allocate(eps_u, 0.7, trial_config());
    EXPECT_EQ(a.command.thrust(), 0.0);
  }
}

TEST(SaturateAndAllocate, RudderClampSign) {
  ControllerConfig c = trial_config();
  c.gains.k_r = 1.0;
  c.gains.k_u = 1.0;
  c.nominal_thruster_offset = 1.0;
  const Allocation a = saturate_and_allocate(-1.0, 10.0, c);
  EXPECT_NEAR(a.u_alpha, std::atan(-10.0), 1e-15);
  EXPECT_NEAR(a.u_alpha, -1.4711, 1e-4);
  EXPECT_EQ(a.command.rudder(), -c.max_rudder);
  EXPECT_TRUE(a.rudder_saturated);
  // Thrust uses the saturated angle.
  EXPECT_NEAR(a.u_F, 1.0 / std::cos(c.max_rudder), 1e-12);
}

TEST(SaturateAndAllocate, UnsaturatedRegimeReproducesDemands) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> eu(-2.0, -0.01), er(-0.5, 0.5);
  ControllerConfig c = trial_config();
  c.gains.k_u = 100.0;
  c.gains.k_r = 60.0;
  c.nominal_thruster_offset = 1.5;
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const double eps_u = eu(rng);
    const double eps_r = er(rng);
    const Allocation a = saturate_and_allocate(eps_u, eps_r, c);
    if (a.thrust_saturated || a.rudder_saturated) continue;
    ++checked;
    const double F = a.command.thrust();
    const double al = a.command.rudder();
    EXPECT_NEAR(F * std::cos(al), -c.gains.k_u * eps_u, 1e-9 * std::abs(c.gains.k_u * eps_u));
    EXPECT_NEAR(c.nominal_thruster_offset * F * std::sin(al), -c.gains.k_r * eps_r,
                1e-9 * std::max(1e-12, std::abs(c.gains.k_r * eps_r)));
  }
  EXPECT_GT(checked, 1000);
}

TEST(ControlTick, EquilibriumNeedsAlmostNoActuation) {
  ControllerConfig c = trial_config();
  c.gains = {1.0, 100.0, 1.0, 100.0};
  const ControlOutput out = control_tick(VesselState{}, Vec2(14.25, 0.0), 0.0, c);
  EXPECT_EQ(out.command.rudder(), 0.0);
  EXPECT_LE(out.command.thrust(), 100.0 * c.eps_u_guard);
  EXPECT_EQ(out.debug.violations, 0);
}

TEST(ControlTick, CommandsAlwaysAdmissible) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ed(0.6, 27.9), bearing(-1.5, 1.5), vel(-20.0, 20.0), rate(-10.0, 10.0),
      gain(0.1, 1e4);
  for (int i = 0; i < 20000; ++i) {
    ControllerConfig c = trial_config();
    c.gains = {gain(rng), gain(rng), gain(rng), gain(rng)};
    VesselState s;
    s.u = vel(rng);
    s.v = vel(rng);
    s.r = rate(rng);
    const ControlOutput out = control_tick(s, reference_at(ed(rng), bearing(rng)), 0.0, c, ViolationPolicy::Clamp);
    ASSERT_GE(out.command.thrust(), 0.0);
    ASSERT_LE(out.command.thrust(), c.max_thrust);
    ASSERT_LE(std::abs(out.command.rudder()), c.max_rudder);
  }
}

TEST(ControlTick, CompliantTrialStatesNeverThrow) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ed(0.51, 27.99), bearing(-1.55, 1.55), frac(-0.99, 0.99);
  const ControllerConfig c = trial_config();
  for (int i = 0; i < 20000; ++i) {
    const double e_d = ed(rng);
    const double psi_e = bearing(rng);
    if (std::abs(std::sin(psi_e)) >= 0.9999) continue;
    const VelocityReferences v = velocity_references(errors_with(e_d, std::sin(psi_e)), 0.0, c);
    VesselState s;
    s.u = v.u_des + frac(rng) * 25.0;
    s.r = v.r_des + frac(rng) * 15.0;
    ASSERT_NO_THROW(control_tick(s, reference_at(e_d, psi_e), 0.0, c));
  }
}

TEST(ControlTick, StaticFunnelsAreTimeInvariant) {
  ControllerConfig c = trial_config();
  c.gains = {2.0, 200.0, 0.5, 300.0};
  VesselState s;
  s.u = 1.0;
  s.r = 0.1;
  s.psi = 0.3;
  const ControlOutput a = control_tick(s, Vec2(10.0, 4.0), 0.0, c);
  const ControlOutput b = control_tick(s, Vec2(10.0, 4.0), 100.0, c);
  EXPECT_EQ(a.command.thrust(), b.command.thrust());
  EXPECT_EQ(a.command.rudder(), b.command.rudder());
}

TEST(ControlTick, DegenerateDistance) {
  EXPECT_THROW(control_tick(VesselState{}, Vec2::Zero(), 0.0, trial_config()), DegenerateDistance);
}

TEST(ControllerConfig, Validation) {
  ControllerConfig c = trial_config();
  EXPECT_NO_THROW(c.validate());
  c.funnel_o = FunnelSpec::constant(1.0);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = trial_config();
  c.max_rudder = 0.6;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = trial_config();
  c.gains.k_u = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = trial_config();
  c.rho_d_min = 30.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(InitialCompliance, ReportsAndInflates) {
  const ControllerConfig c = trial_config();
  VesselState s;
  ComplianceReport ok = check_initial_compliance(s, Vec2(14.0, 0.0), c);
  EXPECT_TRUE(ok.ok());

  const ComplianceReport far = check_initial_compliance(s, Vec2(40.0, 0.0), c);
  EXPECT_FALSE(far.ok());
  EXPECT_TRUE(far.inflatable());
  const auto& d = far.channels[static_cast<std::size_t>(Channel::Distance)];
  ASSERT_TRUE(d.required_rho0.has_value());
  EXPECT_GT(*d.required_rho0, 40.0);
  const ControllerConfig inflated = inflate_for_compliance(c, far);
  EXPECT_TRUE(check_initial_compliance(s, Vec2(40.0, 0.0), inflated).ok());

  // Reference behind the vessel: |psi_e| >= pi/2 cannot be fixed by inflation.
  const ComplianceReport behind = check_initial_compliance(s, Vec2(-10.0, 0.0), c);
  EXPECT_FALSE(behind.psi_e_ok);
  EXPECT_FALSE(behind.inflatable());
  EXPECT_THROW(inflate_for_compliance(c, behind), InitialComplianceError);

  // Too close: below rho_d_min.
  EXPECT_FALSE(check_initial_compliance(s, Vec2(0.3, 0.0), c).distance_above_min);
}
