#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vesselnav/errors.hpp"
#include "vesselnav/feasibility.hpp"

using namespace vesselnav;

namespace {

FeasibilityInputs calm_inputs() {
  FeasibilityInputs in;
  in.vessel.surge_drag = {0.0, 0.0};
  in.vessel.sway_drag = {0.0, 0.0};
  in.vessel.yaw_drag = {0.0, 0.0};
  in.controller.max_thrust = 1e9;
  in.min_thrust = 1e8;
  in.n_samples = 2000;
  in.seed = 5;
  return in;
}

}  // namespace

TEST(Feasibility, TooFewSamplesThrows) {
  FeasibilityInputs in = calm_inputs();
  in.n_samples = 99;
  EXPECT_THROW(estimate_bounds(in), InsufficientSamples);
}

TEST(Feasibility, HugeAuthorityPassesEverything) {
  const FeasibilityReport rep = estimate_bounds(calm_inputs());
  EXPECT_TRUE(rep.pass());
  for (const ConditionCheck& c : rep.conditions) {
    EXPECT_TRUE(c.pass) << c.name;
    EXPECT_GT(c.margin, 0.0) << c.name;
  }
}

TEST(Feasibility, SurgeDisturbanceBeyondAuthorityFailsSurgeCondition) {
  FeasibilityInputs in = calm_inputs();
  in.controller.max_thrust = 1000.0;
  in.min_thrust = 500.0;
  in.disturbance.surge.bias = 2000.0;
  const FeasibilityReport rep = estimate_bounds(in);
  const ConditionCheck& b = rep.conditions[1];
  EXPECT_EQ(b.name, "surge_authority");
  EXPECT_FALSE(b.pass);
  EXPECT_LT(b.margin, 0.0);
  EXPECT_FALSE(rep.pass());
}

TEST(Feasibility, SurgeRightSideIsCosineOfRudderLimit) {
  FeasibilityInputs in = calm_inputs();
  in.controller.max_thrust = 6000.0;
  in.controller.max_rudder = std::numbers::pi / 6.0;
  in.min_thrust = 3000.0;
  const FeasibilityReport rep = estimate_bounds(in);
  EXPECT_NEAR(rep.conditions[1].rhs, 0.8660254037844386 * 6000.0, 1e-9);
  EXPECT_NEAR(rep.conditions[2].rhs, in.vessel.thruster_offset * 3000.0 * 0.5, 1e-9);
  EXPECT_DOUBLE_EQ(rep.conditions[1].margin, rep.conditions[1].rhs - rep.conditions[1].lhs);
}

TEST(Feasibility, ThrustFloorMustBePositiveAndBelowLimit) {
  FeasibilityInputs in = calm_inputs();
  in.min_thrust = 0.0;
  EXPECT_FALSE(estimate_bounds(in).conditions[0].pass);
  in.min_thrust = 2e9;
  EXPECT_FALSE(estimate_bounds(in).conditions[0].pass);
}

TEST(Feasibility, InitialBearingBehindFails) {
  FeasibilityInputs in = calm_inputs();
  in.initial.psi = std::numbers::pi;
  in.initial_reference = Vec2(10.0, 0.0);
  const ConditionCheck& d = estimate_bounds(in).conditions[3];
  EXPECT_FALSE(d.pass);
  EXPECT_NEAR(d.lhs, std::numbers::pi, 1e-12);
}

TEST(Feasibility, MonotoneInThrustLimit) {
  FeasibilityInputs in = calm_inputs();
  in.vessel = VesselParams{};
  in.disturbance.surge.bias = 800.0;
  in.min_thrust = 100.0;
  bool passed = false;
  for (double thrust = 200.0; thrust <= 20000.0; thrust *= 1.25) {
    in.controller.max_thrust = thrust;
    const bool pass = estimate_bounds(in).conditions[1].pass;
    if (passed) EXPECT_TRUE(pass) << thrust;
    passed = passed || pass;
  }
  EXPECT_TRUE(passed);
}

TEST(Feasibility, RunningMaxNondecreasingInSamples) {
  FeasibilityInputs in = calm_inputs();
  in.vessel = VesselParams{};
  in.disturbance.surge = {10.0, 40.0, 0.3, 0.0, 10.0};
  double prev_u = 0.0;
  double prev_r = 0.0;
  for (int n = 100; n <= 3200; n *= 2) {
    in.n_samples = n;
    const FeasibilityReport rep = estimate_bounds(in);
    EXPECT_GE(rep.F_bar_u, prev_u);
    EXPECT_GE(rep.F_bar_r, prev_r);
    EXPECT_EQ(rep.worst_u.value, rep.F_bar_u);
    EXPECT_LT(rep.worst_u.index, n);
    prev_u = rep.F_bar_u;
    prev_r = rep.F_bar_r;
  }
}

TEST(Feasibility, ReportIsReproducible) {
  const FeasibilityInputs in = calm_inputs();
  EXPECT_EQ(estimate_bounds(in).to_json(), estimate_bounds(in).to_json());
}
