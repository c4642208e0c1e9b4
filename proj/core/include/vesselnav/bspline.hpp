#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vesselnav/vessel_dynamics.hpp"

namespace vesselnav {

/// Uniform cubic basis matrix: p(u) = [1 u u^2 u^3] * kBasis * [q_i .. q_{i+3}].
const Eigen::Matrix4d& uniform_cubic_basis();

/// Weights of the spline value at the start of a segment: (1, 4, 1, 0) / 6.
inline constexpr std::array<double, 4> kKnotWeights{1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0, 0.0};

/// Third-difference weights; jerk on a segment is kJerkWeights . Q / dt^3.
inline constexpr std::array<double, 4> kJerkWeights{-1.0, 3.0, -3.0, 1.0};

struct SplineDerivatives {
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();
  Vec2 jerk = Vec2::Zero();
};

/// Uniform cubic B-spline on [0, (N-3) dt]. Segment i uses control points
/// q_i..q_{i+3}. With tripled end points the curve starts and stops at rest.
class SplineTrajectory {
 public:
  SplineTrajectory() = default;
  /// Throws std::invalid_argument when N < 8 or dt <= 0.
  SplineTrajectory(std::vector<Vec2> control_points, double dt);

  /// Tripled end points around the given waypoints (N = waypoints + 4).
  static SplineTrajectory from_waypoints(const std::vector<Vec2>& waypoints, double dt);

  const std::vector<Vec2>& control_points() const noexcept { return points_; }
  double dt() const noexcept { return dt_; }
  static constexpr int degree() { return 3; }
  int segment_count() const { return static_cast<int>(points_.size()) - 3; }
  double duration() const { return segment_count() * dt_; }

  /// Position; throws OutOfDomain outside [0, duration()].
  Vec2 eval(double t) const;
  SplineDerivatives eval_derivatives(double t) const;

  /// The four control points bounding segment i; throws IndexOutOfRange.
  std::array<Vec2, 4> segment_hull(int i) const;

  /// Segment index and local parameter in [0, 1]; t == duration maps to the last segment.
  std::pair<int, double> locate(double t) const;

 private:
  std::vector<Vec2> points_;
  double dt_ = 1.0;
};

/// Spline value at every knot 0, dt, ..., duration (N - 2 values).
std::vector<Vec2> fit_knot_values(const SplineTrajectory& traj);

/// JSON document with control points, knot spacing and degree.
std::string to_json(const SplineTrajectory& traj);
SplineTrajectory spline_from_json(const std::string& text);

/// Sampled dump with header t,x,y,vx,vy,ax,ay.
void write_samples_csv(std::ostream& os, const SplineTrajectory& traj, int samples_per_segment);

}  // namespace vesselnav
