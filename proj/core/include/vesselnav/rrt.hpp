#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vesselnav/geometry.hpp"

namespace vesselnav {

struct RrtParams {
  double step_size = 0.0;   ///< [m]; <= 0 picks workspace diagonal / 50
  double goal_bias = 0.1;   ///< probability of sampling the goal
  int max_iters = 20000;
  double goal_radius = 0.0; ///< [m]; <= 0 picks step_size
  std::uint64_t seed = 0;
  bool shortcut = true;     ///< greedy segment skipping after extraction
};

struct RrtPath {
  std::vector<Vec2> waypoints;
  int iterations = 0;     ///< tree expansions used
  int tree_size = 0;

  int n_points() const { return static_cast<int>(waypoints.size()); }
};

/// Plain RRT over the inflated free space. Deterministic in params.seed.
/// Throws StartOrGoalInCollision or PlanTimeout.
RrtPath plan(const Workspace& ws, const Vec2& start, const Vec2& goal, const RrtParams& params);

/// Effective step size after defaults are applied.
double effective_step(const Workspace& ws, const RrtParams& params);

/// x,y per row with a header.
void write_path_csv(std::ostream& os, const RrtPath& path);

}  // namespace vesselnav
