#pragma once

// Monte-Carlo disturbance sweep: one planned reference, many disturbance
// realizations, each episode with its own feasibility report.

#include <cstdint>
#include <string>
#include <vector>

#include "vesselnav/episode.hpp"
#include "vesselnav/feasibility.hpp"

namespace vesselnav {

struct SweepOptions {
  int episodes = 100;
  int threads = 0;  ///< 0 means hardware concurrency
  bool auto_inflate = false;
  double dt = 0.0;
  std::uint64_t master_seed = 0;
};

struct SweepEpisode {
  int index = 0;
  std::uint64_t disturbance_seed = 0;
  bool feasible = false;
  EpisodeSummary summary;
};

struct SweepResult {
  std::string scenario;
  std::uint64_t master_seed = 0;
  std::vector<SweepEpisode> episodes;
  int total_violation_ticks = 0;        ///< over feasible episodes
  int feasible_episodes = 0;
  int episodes_with_violations = 0;     ///< among feasible episodes
  bool actuator_bounds_ok = true;
  bool orientation_bounded = true;      ///< |psi_e| < pi/2 in every passing episode
  bool collision_free = true;           ///< positive clearance in every passing episode
  double wall_seconds = 0.0;            ///< not serialized

  std::string to_json() const;
};

std::uint64_t episode_seed(std::uint64_t master_seed, int index);

/// Disturbance profile of episode `index`: same shape, its own seed.
DisturbanceProfile episode_disturbance(const Scenario& scenario, std::uint64_t seed);

SweepResult run_sweep(const Scenario& scenario, const SplineTrajectory& traj, const SweepOptions& options);

}  // namespace vesselnav
