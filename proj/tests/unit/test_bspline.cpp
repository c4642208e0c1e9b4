#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vesselnav/bspline.hpp"
#include "vesselnav/errors.hpp"

using namespace vesselnav;

namespace {

std::vector<Vec2> random_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::vector<Vec2> pts(static_cast<std::size_t>(n));
  for (Vec2& p : pts) p = Vec2(c(rng), c(rng));
  return pts;
}

}  // namespace

TEST(SplineTrajectory, RejectsShortOrBadSpacing) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(SplineTrajectory(random_points(rng, 7), 1.0), std::invalid_argument);
  EXPECT_THROW(SplineTrajectory(random_points(rng, 8), 0.0), std::invalid_argument);
}

TEST(SplineTrajectory, DurationAndSegmentCount) {
  std::mt19937_64 rng(2);
  const SplineTrajectory s(random_points(rng, 12), 0.5);
  EXPECT_EQ(s.segment_count(), 9);
  EXPECT_DOUBLE_EQ(s.duration(), 4.5);
  EXPECT_EQ(SplineTrajectory::degree(), 3);
}

TEST(SplineTrajectory, KnotValuesUseOneFourOneWeights) {
  std::mt19937_64 rng(3);
  const auto pts = random_points(rng, 10);
  const SplineTrajectory s(pts, 0.7);
  const auto knots = fit_knot_values(s);
  ASSERT_EQ(knots.size(), pts.size() - 2);
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const Vec2 expect = (pts[k] + 4.0 * pts[k + 1] + pts[k + 2]) / 6.0;
    EXPECT_LT((knots[k] - expect).norm(), 1e-14);
    EXPECT_LT((s.eval(0.7 * static_cast<double>(k)) - expect).norm(), 1e-14);
  }
}

TEST(SplineTrajectory, ConstantControlPoints) {
  const Vec2 c(3.5, -1.25);
  const SplineTrajectory s(std::vector<Vec2>(9, c), 0.3);
  for (double t = 0.0; t <= s.duration(); t += 0.01) EXPECT_LT((s.eval(t) - c).norm(), 1e-14);
}

TEST(SplineTrajectory, MatchesDeBoor) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const auto pts = random_points(rng, 10);
    const double dt = 0.2 + u(rng);
    const SplineTrajectory s(pts, dt);
    for (int i = 0; i < 1000; ++i) {
      const double t = u(rng) * s.duration();
      ASSERT_LT((s.eval(t) - oracle::de_boor(pts, dt, t)).norm(), 1e-10);
    }
  }
}

TEST(SplineTrajectory, ArithmeticProgressionHasConstantVelocity) {
  std::vector<Vec2> pts;
  for (int k = 0; k < 12; ++k) pts.emplace_back(2.0 * k, 1.0);
  const SplineTrajectory s(pts, 0.5);
  for (double t = 0.0; t <= s.duration(); t += 0.05) {
    const auto d = s.eval_derivatives(t);
    EXPECT_NEAR(d.velocity.x(), 4.0, 1e-12);
    EXPECT_NEAR(d.velocity.y(), 0.0, 1e-12);
    EXPECT_LT(d.acceleration.norm(), 1e-11);
    EXPECT_LT(d.jerk.norm(), 1e-10);
  }
}

TEST(SplineTrajectory, TripledEndpointsStartAndStopAtRest) {
  std::mt19937_64 rng(5);
  const auto wp = random_points(rng, 6);
  const SplineTrajectory s = SplineTrajectory::from_waypoints(wp, 0.8);
  ASSERT_EQ(s.control_points().size(), wp.size() + 4);
  for (double t : {0.0, s.duration()}) {
    const auto d = s.eval_derivatives(t);
    EXPECT_EQ(d.velocity, Vec2::Zero());
    EXPECT_EQ(d.acceleration, Vec2::Zero());
  }
  EXPECT_LT((s.eval(0.0) - wp.front()).norm(), 1e-12);
  EXPECT_LT((s.eval(s.duration()) - wp.back()).norm(), 1e-12);
}

TEST(SplineTrajectory, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const SplineTrajectory s(random_points(rng, 10), 1.0);
    for (int i = 0; i < 100; ++i) {
      const double t = 0.01 + (s.duration() - 0.02) * u(rng);
      if (std::abs(t - std::round(t)) < 2 * h) continue;
      const auto d = s.eval_derivatives(t);
      const Vec2 v_fd = (s.eval(t + h) - s.eval(t - h)) / (2 * h);
      const Vec2 a_fd = (s.eval_derivatives(t + h).velocity - s.eval_derivatives(t - h).velocity) / (2 * h);
      ASSERT_LT((v_fd - d.velocity).norm(), 1e-8);
      ASSERT_LT((a_fd - d.acceleration).norm(), 1e-8);
    }
  }
}

TEST(SplineTrajectory, VelocityIntegratesToDisplacement) {
  std::mt19937_64 rng(7);
  const SplineTrajectory s(random_points(rng, 10), 1.0);
  const int n = 7000;
  const double h = s.duration() / n;
  Vec2 p = s.eval(0.0);
  auto vel = [&](double t) { return s.eval_derivatives(std::min(t, s.duration())).velocity; };
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    p += h / 6.0 * (vel(t) + 4.0 * vel(t + 0.5 * h) + vel(t + h));
  }
  EXPECT_LT((p - s.eval(s.duration())).norm(), 1e-6);
}

TEST(SplineTrajectory, SegmentsStayInTheirHulls) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const SplineTrajectory s(random_points(rng, 9), 0.4);
    EXPECT_EQ(s.segment_count(), 6);
    for (int i = 0; i < s.segment_count(); ++i) {
      const std::array<Vec2, 4> h = s.segment_hull(i);
      const std::vector<Vec2> hull = oracle::jarvis_hull({h.begin(), h.end()});
      for (int j = 0; j <= 100; ++j) {
        const Vec2 p = s.eval((i + j / 100.0) * s.dt());
        // Containment with a small tolerance on each edge.
        bool inside = true;
        for (std::size_t e = 0; e < hull.size(); ++e) {
          const Vec2& a = hull[e];
          const Vec2& b = hull[(e + 1) % hull.size()];
          if (oracle::cross(a, b, p) < -1e-12 * (b - a).norm()) inside = false;
        }
        ASSERT_TRUE(inside);
      }
    }
  }
}

TEST(SplineTrajectory, TranslationEquivariant) {
  std::mt19937_64 rng(9);
  auto pts = random_points(rng, 10);
  const SplineTrajectory a(pts, 0.6);
  const Vec2 c(10.0, -3.0);
  for (Vec2& p : pts) p += c;
  const SplineTrajectory b(pts, 0.6);
  for (double t = 0.0; t <= a.duration(); t += 0.03) EXPECT_LT((b.eval(t) - a.eval(t) - c).norm(), 1e-12);
}

TEST(SplineTrajectory, DomainAndIndexErrors) {
  std::mt19937_64 rng(10);
  const SplineTrajectory s(random_points(rng, 9), 1.0);
  EXPECT_THROW(s.eval(-1e-9), OutOfDomain);
  EXPECT_THROW(s.eval(s.duration() + 1e-9), OutOfDomain);
  EXPECT_NO_THROW(s.eval(s.duration()));
  EXPECT_EQ(s.locate(s.duration()).first, s.segment_count() - 1);
  EXPECT_THROW(s.segment_hull(-1), IndexOutOfRange);
  EXPECT_THROW(s.segment_hull(s.segment_count()), IndexOutOfRange);
}

TEST(SplineTrajectory, JsonRoundTripIsExact) {
  std::mt19937_64 rng(11);
  const SplineTrajectory s(random_points(rng, 11), 0.123456789);
  const SplineTrajectory r = spline_from_json(to_json(s));
  EXPECT_EQ(r.dt(), s.dt());
  EXPECT_EQ(r.control_points(), s.control_points());
}

TEST(SplineTrajectory, SampleCsvLayout) {
  std::mt19937_64 rng(12);
  const SplineTrajectory s(random_points(rng, 9), 1.0);
  std::ostringstream os;
  write_samples_csv(os, s, 10);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x,y,vx,vy,ax,ay");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, s.segment_count() * 10 + 1);
}
