#include <gtest/gtest.h>

#include <random>

#include "vesselnav/errors.hpp"
#include "vesselnav/trajopt.hpp"

using namespace vesselnav;

namespace {

ConvexPolygon box(double x0, double y0, double x1, double y1) {
  return ConvexPolygon({Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)});
}

TrajOptProblem straight_problem() {
  TrajOptProblem p;
  p.waypoints = {Vec2(0, 0), Vec2(10, 0), Vec2(20, 0)};
  p.v_max = 2.0;
  p.a_max = 100.0;
  return p;
}

TrajOptProblem detour_problem() {
  TrajOptProblem p;
  p.waypoints = {Vec2(0, 0), Vec2(20, 25), Vec2(50, 30), Vec2(80, 25), Vec2(100, 0)};
  p.obstacles = {box(40, -20, 60, 10)};
  p.v_max = 3.0;
  p.a_max = 0.5;
  return p;
}

// Speed and acceleration maxima over a dense sampling.
std::pair<double, double> dense_maxima(const SplineTrajectory& s, int per_segment) {
  double v = 0.0;
  double a = 0.0;
  const int n = s.segment_count() * per_segment;
  for (int i = 0; i <= n; ++i) {
    const auto d = s.eval_derivatives(std::min(s.duration(), s.duration() * i / n));
    v = std::max(v, d.velocity.norm());
    a = std::max(a, d.acceleration.norm());
  }
  return {v, a};
}

}  // namespace

TEST(TrajOptBuild, StraightPathSatisfiesConstraints) {
  const TrajOptProblem p = straight_problem();
  const InitialGuess g = build(p);
  const SplineTrajectory s(g.control_points, g.dt);
  const ResidualReport r = validate(s, p);
  EXPECT_TRUE(r.ok(p));
  EXPECT_LE(r.velocity, 0.0);
  EXPECT_LE(r.acceleration, 0.0);
}

TEST(TrajOptBuild, InitialSpacingIsHalfSpeedOnLongestLeg) {
  TrajOptProblem p = straight_problem();
  p.waypoints = {Vec2(0, 0), Vec2(4, 0), Vec2(8, 0), Vec2(12, 0), Vec2(16, 0)};
  const InitialGuess g = build(p);
  EXPECT_DOUBLE_EQ(g.dt, 2.0 * 4.0 / p.v_max);
}

TEST(TrajOptBuild, ControlPointCountIsWaypointsPlusFour) {
  const TrajOptProblem p = detour_problem();
  const InitialGuess g = build(p);
  EXPECT_EQ(g.control_points.size(), p.waypoints.size() + 4);
  EXPECT_EQ(g.lines.size(), (g.control_points.size() - 3) * p.obstacles.size());
}

TEST(TrajOptBuild, HullThroughObstacleIsReported) {
  TrajOptProblem p = detour_problem();
  p.waypoints = {Vec2(0, 0), Vec2(30, 0), Vec2(70, 0), Vec2(100, 0)};
  try {
    build(p);
    FAIL() << "expected InfeasibleSeed";
  } catch (const InfeasibleSeed& e) {
    EXPECT_EQ(e.obstacle(), 0);
    EXPECT_GE(e.segment(), 0);
  }
}

TEST(TrajOptProblem, RejectsBadParameters) {
  TrajOptProblem p = straight_problem();
  p.weights.fit = 0.0;
  p.weights.jerk = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = straight_problem();
  p.v_max = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = straight_problem();
  p.dt_min = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(EvaluateCost, PairsKnotValuesWithInteriorWaypoints) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> c(-5.0, 5.0);
  std::vector<Vec2> wp(7);
  for (Vec2& w : wp) w = Vec2(c(rng), c(rng));
  std::vector<Vec2> q;
  q.insert(q.end(), 2, wp.front());
  q.insert(q.end(), wp.begin(), wp.end());
  q.insert(q.end(), 2, wp.back());

  // Tripled waypoints: the knot value at waypoint m is (X[m-1] + 4 X[m] + X[m+1]) / 6.
  double fit = 0.0;
  for (std::size_t m = 1; m + 1 < wp.size(); ++m)
    fit += ((wp[m - 1] - 2.0 * wp[m] + wp[m + 1]) / 6.0).squaredNorm();
  double jerk = 0.0;
  for (std::size_t i = 0; i + 3 < q.size(); ++i) jerk += (q[i + 3] - 3.0 * q[i + 2] + 3.0 * q[i + 1] - q[i]).squaredNorm();

  const CostBreakdown cost = evaluate_cost(q, wp, TrajOptWeights{2.0, 3.0, 0.5}, 1.5);
  EXPECT_NEAR(cost.fit, 2.0 * fit, 1e-12);
  EXPECT_NEAR(cost.jerk, 3.0 * jerk, 1e-9);
  EXPECT_DOUBLE_EQ(cost.time, 0.5 * static_cast<double>(q.size() - 6) * 1.5);
}

TEST(EvaluateCost, CollinearEvenWaypointsFitExactly) {
  std::vector<Vec2> wp;
  for (int k = 0; k < 6; ++k) wp.emplace_back(3.0 * k, -k);
  std::vector<Vec2> q;
  q.insert(q.end(), 2, wp.front());
  q.insert(q.end(), wp.begin(), wp.end());
  q.insert(q.end(), 2, wp.back());
  EXPECT_NEAR(evaluate_cost(q, wp, TrajOptWeights{1.0, 0.0, 0.0}, 1.0).fit, 0.0, 1e-24);
}

TEST(TrajOptSolve, PureFitReachesWaypoints) {
  TrajOptProblem p;
  p.waypoints = {Vec2(0, 0), Vec2(10, 8), Vec2(20, -3), Vec2(30, 5), Vec2(40, 0)};
  p.v_max = 100.0;
  p.a_max = 100.0;
  p.weights = {1.0, 0.0, 0.0};
  const TrajOptSolution sol = solve(p);
  EXPECT_NE(sol.status, TrajOptStatus::Infeasible);
  EXPECT_LT(sol.cost.fit, 1e-6);
}

TEST(TrajOptSolve, DetourConvergesWithinBounds) {
  const TrajOptProblem p = detour_problem();
  const TrajOptSolution sol = solve(p);
  ASSERT_EQ(sol.status, TrajOptStatus::Converged);
  EXPECT_TRUE(sol.monotone);
  for (std::size_t i = 1; i < sol.merit_history.size(); ++i)
    EXPECT_LE(sol.merit_history[i], sol.merit_history[i - 1]);
  const auto [v, a] = dense_maxima(sol.trajectory, 1000);
  EXPECT_LE(v, p.v_max * (1 + 1e-6));
  EXPECT_LE(a, p.a_max * (1 + 1e-6));
  for (const SeparatingLine& l : sol.lines) {
    const auto h = sol.trajectory.segment_hull(l.segment);
    EXPECT_TRUE(verify_separation(h, p.obstacles[static_cast<std::size_t>(l.obstacle)],
                                  l.h, l.d, p.sep_margin));
  }
  const SplineTrajectory& s = sol.trajectory;
  EXPECT_LT((s.eval(0.0) - p.waypoints.front()).norm(), 1e-12);
  EXPECT_LT((s.eval(s.duration()) - p.waypoints.back()).norm(), 1e-12);
  for (double t : {0.0, s.duration()}) {
    EXPECT_EQ(s.eval_derivatives(t).velocity, Vec2::Zero());
    EXPECT_EQ(s.eval_derivatives(t).acceleration, Vec2::Zero());
  }
}

TEST(TrajOptSolve, Deterministic) {
  const TrajOptProblem p = detour_problem();
  const TrajOptSolution a = solve(p);
  const TrajOptSolution b = solve(p);
  EXPECT_EQ(to_json(a), to_json(b));
}

TEST(TrajOptSolve, LegacyAccelerationFormIsSelectable) {
  TrajOptProblem p = detour_problem();
  p.legacy_accel_form = true;
  const std::vector<Vec2> q{Vec2(0, 0), Vec2(0, 0), Vec2(0, 0), Vec2(1, 2), Vec2(3, 1), Vec2(4, 4),
                            Vec2(6, 5), Vec2(6, 5), Vec2(6, 5)};
  // The printed form bounds |q_k - 2 q_{k-1} - q_{k-2}| by a_max dt.
  double accel = 0.0;
  double speed = 0.0;
  for (std::size_t k = 2; k < q.size(); ++k) accel = std::max(accel, (q[k] - 2.0 * q[k - 1] - q[k - 2]).norm());
  for (std::size_t k = 1; k < q.size(); ++k) speed = std::max(speed, (q[k] - q[k - 1]).norm());
  EXPECT_NEAR(min_feasible_dt(q, p), std::max(accel / p.a_max, speed / p.v_max), 1e-12);
}

TEST(TrajOptValidate, CorruptedControlPointBreaksSeparation) {
  const TrajOptProblem p = detour_problem();
  const TrajOptSolution sol = solve(p);
  std::vector<Vec2> q = sol.trajectory.control_points();
  q[5] = Vec2(50.0, -5.0);
  const ResidualReport r = validate(SplineTrajectory(q, sol.trajectory.dt()), p);
  EXPECT_GT(r.separation_failures, 0);
  EXPECT_LT(r.min_separation, 0.0);
  EXPECT_FALSE(r.ok(p));
  for (const auto& [seg, obs] : r.failing_pairs) {
    EXPECT_GE(seg, 2);
    EXPECT_LE(seg, 5);
    EXPECT_EQ(obs, 0);
  }
}

TEST(TrajOptValidate, ControlPointBoundImpliesDenseBound) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> c(-50.0, 50.0);
  TrajOptProblem p;
  p.v_max = 3.0;
  p.a_max = 0.7;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec2> q(10);
    for (Vec2& v : q) v = Vec2(c(rng), c(rng));
    const double dt = min_feasible_dt(q, p);
    const SplineTrajectory s(q, dt);
    const auto [v, a] = dense_maxima(s, 1000);
    ASSERT_LE(v, p.v_max * (1 + 1e-9));
    ASSERT_LE(a, p.a_max * (1 + 1e-9));
  }
}
