#pragma once

// Kinodynamic spline fitting over an RRT prior. Decision variables are the
// interior control points, the knot spacing and one separating line per
// (segment, obstacle) pair. Solved by alternating three exact or convex
// subproblems:
//   A  separating lines for fixed control points (closest pair of hulls)
//   B  control points for fixed lines and knot spacing (log-barrier Newton)
//   C  knot spacing by golden-section search, re-solving B at each probe
// An iterate is accepted only when it lowers the merit function.

#include <iosfwd>
#include <string>
#include <vector>

#include "vesselnav/bspline.hpp"
#include "vesselnav/geometry.hpp"

namespace vesselnav {

struct TrajOptWeights {
  double fit = 1.0;    ///< distance of knot values to the waypoints
  double jerk = 1.0;   ///< squared third differences of control points
  double time = 1.0;   ///< knot spacing, per summed term
};

struct TrajOptProblem {
  std::vector<Vec2> waypoints;              ///< planner output, first = start, last = goal
  std::vector<ConvexPolygon> obstacles;     ///< already inflated by the clearance
  double v_max = 10.0;                      ///< [m/s]
  double a_max = 2.0;                       ///< [m/s^2]
  TrajOptWeights weights;
  double dt_min = 0.05;                     ///< [s]
  double dt_max = 60.0;                     ///< [s]
  double sep_margin = 0.01;                 ///< [m]
  int max_outer = 200;
  double tol_outer = 1e-6;                  ///< relative merit decrease
  double residual_tol = 1e-8;
  double cull_distance = 0.0;               ///< skip pairs farther than this; 0 keeps all
  double penalty = 1e4;                     ///< weight on separation slack
  int golden_iters = 12;
  /// Enforce |q_k - 2 q_{k-1} - q_{k-2}| <= a_max dt instead of the
  /// second-difference bound |q_k - 2 q_{k-1} + q_{k-2}| <= a_max dt^2.
  bool legacy_accel_form = false;

  void validate() const;
};

struct SeparatingLine {
  int segment = 0;
  int obstacle = 0;
  Vec2 h = Vec2::UnitX();
  double d = 0.0;
  double margin = 0.0;  ///< half the hull-to-obstacle distance
};

struct InitialGuess {
  std::vector<Vec2> control_points;
  double dt = 1.0;
  std::vector<SeparatingLine> lines;
};

/// Tripled-endpoint control points on the waypoints, dt at half the speed
/// limit on the longest leg (raised if the acceleration bound needs it).
/// Throws InfeasibleSeed when some segment hull touches an obstacle.
InitialGuess build(const TrajOptProblem& problem);

/// Straight start-to-goal control points with the same count as build();
/// hulls may cross obstacles.
InitialGuess straight_line_guess(const TrajOptProblem& problem);

/// Smallest dt at which the control points meet the speed and acceleration bounds.
double min_feasible_dt(const std::vector<Vec2>& control_points, const TrajOptProblem& problem);

struct CostBreakdown {
  double fit = 0.0;
  double jerk = 0.0;
  double time = 0.0;
  double total() const { return fit + jerk + time; }
};

/// Weighted objective. Knot value (q_j + 4 q_{j+1} + q_{j+2}) / 6 is paired
/// with waypoint j - 1 for j = 2 .. N_X - 1; jerk is summed over every segment.
CostBreakdown evaluate_cost(const std::vector<Vec2>& control_points,
                            const std::vector<Vec2>& waypoints, const TrajOptWeights& w,
                            double dt);

struct ResidualReport {
  double velocity = 0.0;       ///< max_k |q_k - q_{k-1}| - v_max dt
  double acceleration = 0.0;   ///< max_k |second difference| - bound
  double dense_max_speed = 0.0;
  double dense_max_accel = 0.0;
  double min_separation = 0.0; ///< smallest hull-to-obstacle distance (negative = overlap)
  int separation_failures = 0; ///< pairs failing verify_separation at sep_margin
  std::vector<std::pair<int, int>> failing_pairs;
  double endpoint_error = 0.0; ///< position mismatch at both ends
  double endpoint_rate = 0.0;  ///< largest |velocity| or |acceleration| at both ends

  bool ok(const TrajOptProblem& problem) const;
};

/// Recomputes every constraint from scratch; independent of solver state.
ResidualReport validate(const SplineTrajectory& traj, const TrajOptProblem& problem,
                        int samples_per_segment = 1000);

enum class TrajOptStatus { Converged, MaxIters, Infeasible };

std::string status_name(TrajOptStatus s);

struct TrajOptSolution {
  SplineTrajectory trajectory;
  std::vector<SeparatingLine> lines;
  CostBreakdown cost;
  TrajOptStatus status = TrajOptStatus::Infeasible;
  ResidualReport residuals;
  std::vector<double> merit_history;  ///< merit of every accepted iterate, starting with the guess
  int outer_iterations = 0;
  int newton_iterations = 0;
  bool monotone = true;               ///< merit_history never increased
};

/// Runs the alternating scheme from the given guess.
TrajOptSolution solve(const TrajOptProblem& problem, const InitialGuess& guess);

/// build() followed by solve().
TrajOptSolution solve(const TrajOptProblem& problem);

std::string to_json(const TrajOptSolution& solution);

}  // namespace vesselnav
