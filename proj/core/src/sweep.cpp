#include "vesselnav/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "vesselnav/rng.hpp"

namespace vesselnav {

std::uint64_t episode_seed(std::uint64_t master_seed, int index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(index));
}

DisturbanceProfile episode_disturbance(const Scenario& scenario, std::uint64_t seed) {
  DisturbanceProfile d = scenario.disturbance;
  d.seed = seed;
  return d;
}

std::string SweepResult::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["master_seed"] = master_seed;
  j["episodes"] = episodes.size();
  j["feasible_episodes"] = feasible_episodes;
  j["total_violation_ticks"] = total_violation_ticks;
  j["episodes_with_violations"] = episodes_with_violations;
  j["actuator_bounds_ok"] = actuator_bounds_ok;
  j["orientation_bounded"] = orientation_bounded;
  j["collision_free"] = collision_free;
  auto& list = j["runs"] = nlohmann::json::array();
  for (const SweepEpisode& e : episodes) {
    const EpisodeSummary& s = e.summary;
    list.push_back({{"index", e.index},
                    {"disturbance_seed", e.disturbance_seed},
                    {"feasible", e.feasible},
                    {"passed", s.passed},
                    {"violations", {s.violations[0], s.violations[1], s.violations[2], s.violations[3]}},
                    {"min_margin", {s.min_margin[0], s.min_margin[1], s.min_margin[2], s.min_margin[3]}},
                    {"min_obstacle_distance", s.min_obstacle_distance},
                    {"max_abs_psi_e", s.max_abs_psi_e},
                    {"goal_reached", s.goal_reached},
                    {"goal_time", s.goal_time},
                    {"thrust_cut_ticks", s.thrust_cut_ticks}});
  }
  return j.dump(2);
}

SweepResult run_sweep(const Scenario& scenario, const SplineTrajectory& traj, const SweepOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  SweepResult result;
  result.scenario = scenario.name;
  result.master_seed = options.master_seed;
  result.episodes.resize(static_cast<std::size_t>(std::max(0, options.episodes)));

  const Reference ref = make_reference(scenario, traj);
  const VesselState initial = initial_state(scenario, ref);
  EpisodeOptions ep;
  ep.auto_inflate = options.auto_inflate;
  ep.record_rows = false;
  ep.dt = options.dt;

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int i = next++; i < options.episodes && !failed; i = next++) {
      try {
        SweepEpisode& e = result.episodes[static_cast<std::size_t>(i)];
        e.index = i;
        e.disturbance_seed = episode_seed(options.master_seed, i);
        Scenario local = scenario;
        local.disturbance = episode_disturbance(scenario, e.disturbance_seed);
        FeasibilityInputs in = local.feasibility_inputs(initial, ref.position(0.0));
        in.seed = e.disturbance_seed;
        e.feasible = estimate_bounds(in).pass();
        e.summary = run_episode(local, traj, e.disturbance_seed, ep).summary;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, options.episodes));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (const SweepEpisode& e : result.episodes) {
    const EpisodeSummary& s = e.summary;
    if (!s.actuator_bounds_ok) result.actuator_bounds_ok = false;
    if (!e.feasible) continue;
    ++result.feasible_episodes;
    result.total_violation_ticks += s.total_violation_ticks;
    if (s.total_violation_ticks > 0) ++result.episodes_with_violations;
    if (s.passed) {
      if (!(s.max_abs_psi_e < std::numbers::pi / 2.0)) result.orientation_bounded = false;
      if (!(s.min_obstacle_distance > 0.0)) result.collision_free = false;
    }
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace vesselnav
