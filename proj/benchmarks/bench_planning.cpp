#include <benchmark/benchmark.h>

#include <random>

#include "vesselnav/bspline.hpp"
#include "vesselnav/episode.hpp"
#include "vesselnav/geometry.hpp"
#include "vesselnav/trajopt.hpp"

using namespace vesselnav;

namespace {

void BM_SplineEval(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> c(-10.0, 10.0);
  std::vector<Vec2> q(40);
  for (Vec2& p : q) p = Vec2(c(rng), c(rng));
  const SplineTrajectory s(q, 1.0);
  double t = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(s.eval_derivatives(t));
    t += 0.013;
    if (t > s.duration()) t = 0.0;
  }
}
BENCHMARK(BM_SplineEval);

void BM_FindSeparator(benchmark::State& st) {
  const ConvexPolygon obstacle = inflate(
      ConvexPolygon({Vec2(10, -5), Vec2(20, -5), Vec2(20, 5), Vec2(10, 5)}), 3.0, 16);
  const Hull4 hull{Vec2(0, 0), Vec2(2, 1), Vec2(3, -1), Vec2(1, 2)};
  for (auto _ : st) benchmark::DoNotOptimize(find_separator(hull, obstacle));
}
BENCHMARK(BM_FindSeparator);

void BM_TrajOptHarbor(benchmark::State& st) {
  const Scenario s = load_scenario(std::string(VESSELNAV_SCENARIO_DIR) + "/harbor_run.json");
  RrtParams params = s.planner.rrt;
  params.seed = planner_seed(s.seed);
  const RrtPath path = plan(s.planning_workspace(), s.start.p, s.goal, params);
  const TrajOptProblem problem = s.trajopt_problem(path.waypoints);
  for (auto _ : st) benchmark::DoNotOptimize(solve(problem));
}
BENCHMARK(BM_TrajOptHarbor)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
