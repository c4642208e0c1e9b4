#include <benchmark/benchmark.h>

#include "vesselnav/funnel_controller.hpp"
#include "vesselnav/vessel_dynamics.hpp"

using namespace vesselnav;

namespace {

void BM_VesselStep(benchmark::State& st) {
  const VesselParams params;
  DisturbanceProfile dist;
  dist.surge = {10.0, 40.0, 0.3, 0.0, 10.0};
  VesselState s;
  s.u = 2.0;
  s.r = 0.05;
  const ActuatorCommand cmd(1500.0, 0.1, 6000.0, 0.5);
  for (auto _ : st) {
    s = step(s, cmd, params, dist, 0.01);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_VesselStep);

void BM_ControlTick(benchmark::State& st) {
  const ControllerConfig cfg;
  VesselState s;
  s.u = 1.0;
  double t = 0.0;
  for (auto _ : st) {
    const ControlOutput out = control_tick(s, Vec2(10.0, 2.0), t, cfg, ViolationPolicy::Clamp);
    benchmark::DoNotOptimize(out);
    t += 0.01;
  }
}
BENCHMARK(BM_ControlTick);

}  // namespace
