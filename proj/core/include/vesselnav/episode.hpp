#pragma once

// Closed-loop episodes: plan, optimize, then track the spline with the funnel
// controller on the ground-truth simulator. Logs one row per control tick.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vesselnav/bspline.hpp"
#include "vesselnav/funnel_controller.hpp"
#include "vesselnav/rrt.hpp"
#include "vesselnav/scenario.hpp"
#include "vesselnav/trajopt.hpp"

namespace vesselnav {

/// Spline reference with a clock lead; holds the final point after the end.
class Reference {
 public:
  Reference() = default;
  Reference(SplineTrajectory traj, double lead);

  Vec2 position(double t) const;
  Vec2 velocity(double t) const;
  double lead() const noexcept { return lead_; }
  const SplineTrajectory& trajectory() const noexcept { return traj_; }

 private:
  double clock(double t) const;

  SplineTrajectory traj_;
  double lead_ = 0.0;
};

/// Smallest lead whose reference point lies `distance` away from `start`
/// (the whole duration if the spline never gets that far).
double solve_reference_lead(const SplineTrajectory& traj, const Vec2& start, double distance);

struct PlannedReference {
  RrtPath path;
  TrajOptProblem problem;
  TrajOptSolution solution;
};

/// RRT on the planning workspace, then the spline optimizer. Throws
/// PlanTimeout, InfeasibleSeed or Infeasible.
PlannedReference plan_reference(const Scenario& scenario);

/// Seed used by the planner for a scenario seed.
std::uint64_t planner_seed(std::uint64_t scenario_seed);

struct EpisodeRow {
  double t = 0.0;
  double x = 0.0, y = 0.0, psi = 0.0, u = 0.0, v = 0.0, r = 0.0;
  double x_des = 0.0, y_des = 0.0, vx_des = 0.0, vy_des = 0.0;
  double e_x = 0.0, e_y = 0.0, e_d = 0.0, e_o = 0.0, psi_e = 0.0;
  double rho_d = 0.0, rho_o = 0.0, rho_u = 0.0, rho_r = 0.0;
  double xi_d = 0.0, xi_o = 0.0, xi_u = 0.0, xi_r = 0.0;
  double eps_d = 0.0, eps_o = 0.0, eps_u = 0.0, eps_r = 0.0;
  double u_des = 0.0, r_des = 0.0, X_des = 0.0, N_des = 0.0;
  double u_alpha = 0.0, u_F = 0.0;
  double thrust = 0.0, rudder = 0.0;
  double thrust_saturated = 0.0, rudder_saturated = 0.0;
  double violations = 0.0;  ///< channel bitmask
  double tau_x = 0.0, tau_y = 0.0, tau_n = 0.0;
  double obstacle_distance = 0.0;
};

/// Column names in CSV order.
const std::vector<std::string>& episode_columns();

struct EpisodeSummary {
  std::string scenario;
  std::uint64_t disturbance_seed = 0;
  double dt = 0.0;
  int ticks = 0;
  std::array<int, 4> violations{};      ///< ticks flagged per channel (d, o, u, r)
  std::array<double, 4> min_margin{};   ///< min over ticks of 1 - |xi|
  int total_violation_ticks = 0;
  bool passed = false;
  double min_obstacle_distance = 0.0;
  bool goal_reached = false;
  double goal_time = -1.0;
  double final_goal_distance = 0.0;
  double max_abs_psi_e = 0.0;
  double max_abs_sway = 0.0;
  int thrust_cut_ticks = 0;             ///< F_T == 0
  int below_floor_ticks = 0;            ///< F_T below the declared floor
  int thrust_saturated_ticks = 0;
  int rudder_saturated_ticks = 0;
  bool actuator_bounds_ok = true;
  double reference_lead = 0.0;
  double reference_duration = 0.0;
  bool funnels_inflated = false;
  ControllerConfig controller;          ///< as used, after any inflation
  double min_thrust = 0.0;

  std::string to_json() const;
  static EpisodeSummary from_json(const std::string& text);
};

struct EpisodeLog {
  std::vector<EpisodeRow> rows;
  EpisodeSummary summary;
};

struct EpisodeOptions {
  bool auto_inflate = false;
  bool record_rows = true;
  double dt = 0.0;  ///< overrides the scenario step when positive
};

/// Initial vessel state for a reference (auto heading applied).
VesselState initial_state(const Scenario& scenario, const Reference& reference);

/// Reference with the scenario's lead policy applied.
Reference make_reference(const Scenario& scenario, const SplineTrajectory& traj);

/// Tracks the given spline. Throws InitialComplianceError unless the start is
/// compliant or auto_inflate is set. Funnel violations are logged, not thrown.
EpisodeLog run_episode(const Scenario& scenario, const SplineTrajectory& traj,
                       std::uint64_t disturbance_seed, const EpisodeOptions& options = {});

/// plan_reference() followed by run_episode() with the scenario seed.
EpisodeLog run_episode(const Scenario& scenario, const EpisodeOptions& options = {});

void write_episode_csv(std::ostream& os, const std::vector<EpisodeRow>& rows);
std::vector<EpisodeRow> read_episode_csv(std::istream& is);

struct ThrustCut {
  double start = 0.0;
  double end = 0.0;
};

struct AuditReport {
  int ticks = 0;
  std::array<int, 4> violations{};
  std::array<double, 4> min_margin{};
  int actuator_violations = 0;
  double min_obstacle_distance = 0.0;
  double max_abs_psi_e = 0.0;
  std::vector<ThrustCut> thrust_cuts;
  int below_floor_ticks = 0;
  int timestamp_errors = 0;
  std::vector<std::string> discrepancies;  ///< disagreements with the summary

  bool clean() const;
  std::string to_json() const;
};

/// Recomputes every funnel inequality, actuator bound and obstacle distance
/// from positions, headings and commands, then compares with the summary.
AuditReport audit(const std::vector<EpisodeRow>& rows, const EpisodeSummary& summary,
                  const std::vector<ConvexPolygon>& obstacles);

/// errors.csv, inputs.csv, velocity.csv, path.csv and obstacles.csv.
void write_plotdata(const std::string& dir, const std::vector<EpisodeRow>& rows,
                    const EpisodeSummary& summary, const Workspace& workspace);

}  // namespace vesselnav
