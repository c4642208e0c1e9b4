#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vesselnav/feasibility.hpp"
#include "vesselnav/funnel_controller.hpp"
#include "vesselnav/geometry.hpp"
#include "vesselnav/rrt.hpp"
#include "vesselnav/trajopt.hpp"
#include "vesselnav/vessel_dynamics.hpp"

namespace vesselnav {

struct PlannerConfig {
  RrtParams rrt;
  /// Added to the clearance for planning only, so hulls of consecutive
  /// waypoints stay clear of the clearance-inflated obstacles.
  double extra_clearance = 0.0;  ///< [m]
};

struct TrajoptConfig {
  TrajOptWeights weights;
  double dt_min = 0.05;
  double dt_max = 60.0;
  double sep_margin = 0.01;
  int max_outer = 200;
  double tol_outer = 1e-6;
  double penalty = 1e4;
  int golden_iters = 12;
  double cull_distance = 0.0;
  bool legacy_accel_form = false;
};

struct SimConfig {
  double dt = 0.01;             ///< [s]
  double horizon = 180.0;       ///< [s]
  double goal_speed = 0.2;      ///< [m/s]
  /// Reference clock offset [s]; negative means solve for lead_distance.
  double reference_lead = -1.0;
  /// Initial distance to the reference used by the automatic lead [m];
  /// negative means the middle of the distance funnel.
  double lead_distance = -1.0;
  /// Point the bow at the initial reference instead of using start.psi.
  bool auto_heading = true;
};

struct FeasibilityConfig {
  double min_thrust = 100.0;
  SampleBox box;
  int n_samples = 20000;
};

struct Scenario {
  std::string name = "unnamed";
  Workspace workspace;
  VesselState start;
  Vec2 goal = Vec2::Zero();
  double goal_radius = 20.0;  ///< [m]
  VesselParams vessel;
  DisturbanceProfile disturbance;
  ControllerConfig controller;
  double v_max = 3.0;
  double a_max = 0.5;
  PlannerConfig planner;
  TrajoptConfig trajopt;
  SimConfig sim;
  FeasibilityConfig feasibility;
  std::uint64_t seed = 0;

  /// Throws ScenarioError when a cross-section invariant is broken.
  void validate() const;

  Workspace planning_workspace() const;
  TrajOptProblem trajopt_problem(const std::vector<Vec2>& waypoints) const;
  FeasibilityInputs feasibility_inputs(const VesselState& initial, const Vec2& initial_reference) const;
};

/// Parses the JSON scenario document; missing fields keep their defaults.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace vesselnav
