#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vesselnav/error_transform.hpp"
#include "vesselnav/errors.hpp"

using namespace vesselnav;

TEST(ComputeErrors, TargetDeadAhead) {
  const TrackingErrors e = compute_errors(VesselState{}, Vec2(10.0, 0.0));
  EXPECT_DOUBLE_EQ(e.e_d, 10.0);
  EXPECT_DOUBLE_EQ(e.e_o, 0.0);
  EXPECT_DOUBLE_EQ(e.psi_e, 0.0);
}

TEST(ComputeErrors, TargetAbeam) {
  const TrackingErrors e = compute_errors(VesselState{}, Vec2(0.0, 5.0));
  EXPECT_DOUBLE_EQ(e.e_d, 5.0);
  EXPECT_DOUBLE_EQ(e.e_o, -1.0);
  EXPECT_DOUBLE_EQ(e.psi_e, -std::numbers::pi / 2);
}

TEST(ComputeErrors, CoincidentReferenceIsDegenerate) {
  VesselState s;
  s.p = Vec2(3.0, 4.0);
  EXPECT_THROW(compute_errors(s, Vec2(3.0, 4.0)), DegenerateDistance);
}

TEST(ComputeErrors, OrientationIdentityOnRandomStates) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-100.0, 100.0), a(0.0, kTwoPi);
  for (int i = 0; i < 10000; ++i) {
    VesselState s;
    s.p = Vec2(c(rng), c(rng));
    s.psi = a(rng);
    const TrackingErrors e = compute_errors(s, Vec2(c(rng), c(rng)));
    const double along = (e.e_x * std::cos(s.psi) + e.e_y * std::sin(s.psi)) / e.e_d;
    ASSERT_LE(std::abs(e.e_o), 1.0);
    ASSERT_NEAR(e.e_o * e.e_o + along * along, 1.0, 1e-12);
    ASSERT_NEAR(std::sin(e.psi_e), e.e_o, 1e-12);
    ASSERT_GT(e.psi_e, -std::numbers::pi);
    ASSERT_LE(e.psi_e, std::numbers::pi);
  }
}

TEST(NormalizeAsymmetric, MidpointAndBoundary) {
  EXPECT_DOUBLE_EQ(normalize_asymmetric(14.25, 28.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(normalize_asymmetric(28.0, 28.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(normalize_asymmetric(0.5, 28.0, 0.5), -1.0);
}

TEST(NormalizeAsymmetric, FieldTrialFunnel) {
  EXPECT_NEAR(normalize_asymmetric(14.0, 28.0, 0.5), -0.5 / 27.5, 1e-15);
}

TEST(NormalizeAsymmetric, IsAffineInDistance) {
  const double x0 = normalize_asymmetric(3.0, 20.0, 1.0);
  const double x1 = normalize_asymmetric(11.0, 20.0, 1.0);
  for (double e = 0.0; e < 30.0; e += 0.37) {
    const double interpolated = x0 + (x1 - x0) * (e - 3.0) / 8.0;
    EXPECT_NEAR(normalize_asymmetric(e, 20.0, 1.0), interpolated, 1e-13);
  }
}

TEST(NormalizeSymmetric, Examples) {
  EXPECT_EQ(normalize_symmetric(0.0, 25.0), 0.0);
  EXPECT_EQ(normalize_symmetric(25.0, 25.0), 1.0);
  EXPECT_EQ(normalize_symmetric(12.5, 25.0), 0.5);
}

TEST(Transform, ClosedFormValues) {
  EXPECT_EQ(transform(0.0), 0.0);
  EXPECT_NEAR(transform(0.5), 0.5 * std::log(3.0), 1e-15);
  EXPECT_NEAR(transform(0.999), 0.5 * std::log(1.999 / 0.001), 1e-12);
  EXPECT_NEAR(transform(0.999), 3.8002, 1e-4);
}

TEST(Transform, OddStrictlyIncreasingAndInvertible) {
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 10000; ++i) {
    const double xi = -1.0 + 2.0 * i / 10000.0;
    const double eps = transform(xi);
    ASSERT_GT(eps, prev);
    ASSERT_EQ(transform(-xi), -eps);
    ASSERT_NEAR(std::tanh(eps), xi, 1e-12);
    prev = eps;
  }
}

TEST(Transform, OutsideFunnelThrows) {
  EXPECT_THROW(transform(1.0), FunnelViolation);
  EXPECT_THROW(transform(-1.2), FunnelViolation);
}

TEST(FunnelSpec, ValuesAndRate) {
  const FunnelSpec f{10.0, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(f(0.0), 10.0);
  EXPECT_NEAR(f(4.0), 8.0 * std::exp(-2.0) + 2.0, 1e-14);
  double prev = f(0.0);
  for (double t = 0.1; t < 50.0; t += 0.1) {
    ASSERT_LE(f(t), prev);
    ASSERT_GE(f(t), 2.0);
    const double fd = (f(t + 1e-6) - f(t - 1e-6)) / 2e-6;
    ASSERT_NEAR(f.rate(t), fd, 1e-7);
    prev = f(t);
  }
  EXPECT_EQ(FunnelSpec::constant(28.0).rate(3.0), 0.0);
}

TEST(FunnelSpec, Validation) {
  EXPECT_THROW((FunnelSpec{1.0, 2.0, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((FunnelSpec{1.0, 0.0, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((FunnelSpec{2.0, 1.0, -0.1}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((FunnelSpec{2.0, 1.0, 0.1}.validate()));
}
