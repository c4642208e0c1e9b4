// vesselnav: batch front end for planning, spline optimization, closed-loop
// episodes, disturbance sweeps, feasibility reports and log audits.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vesselnav/episode.hpp"
#include "vesselnav/errors.hpp"
#include "vesselnav/feasibility.hpp"
#include "vesselnav/scenario.hpp"
#include "vesselnav/sweep.hpp"

namespace fs = std::filesystem;
using namespace vesselnav;

namespace {

enum ExitCode { kOk = 0, kError = 1, kEpisodeFailed = 2, kInfeasibleReport = 3, kAuditMismatch = 4 };

struct CommonArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  bool auto_inflate = false;
  double dt = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "override the scenario seed");
  cmd->add_option("--out-dir", args.out_dir, "output directory")->capture_default_str();
  cmd->add_flag("--auto-inflate-funnels", args.auto_inflate,
                "enlarge non-compliant initial funnels instead of failing");
  cmd->add_option("--dt", args.dt, "control/integration step [s], overrides the scenario")
      ->check(CLI::PositiveNumber);
}

Scenario load(const CommonArgs& args) {
  Scenario s = load_scenario(args.scenario);
  if (args.seed) {
    s.seed = *args.seed;
    s.disturbance.seed = *args.seed;
  }
  if (args.dt > 0.0) s.sim.dt = args.dt;
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path prepare(const CommonArgs& args) {
  fs::path dir(args.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_path(const fs::path& dir, const RrtPath& path) {
  std::ofstream f(dir / "path.csv", std::ios::binary);
  write_path_csv(f, path);
}

void write_trajectory(const fs::path& dir, const TrajOptSolution& sol) {
  write_file(dir / "trajectory.json", to_json(sol));
  std::ofstream f(dir / "trajectory.csv", std::ios::binary);
  write_samples_csv(f, sol.trajectory, 20);
}

int cmd_plan(const CommonArgs& args) {
  const Scenario s = load(args);
  const fs::path dir = prepare(args);
  RrtParams params = s.planner.rrt;
  params.seed = planner_seed(s.seed);
  const RrtPath path = plan(s.planning_workspace(), s.start.p, s.goal, params);
  write_path(dir, path);
  std::cout << "plan: " << path.n_points() << " waypoints after " << path.iterations << " iterations\n";
  return kOk;
}

int cmd_traj(const CommonArgs& args) {
  const Scenario s = load(args);
  const fs::path dir = prepare(args);
  const auto t0 = std::chrono::steady_clock::now();
  const PlannedReference planned = plan_reference(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_path(dir, planned.path);
  write_trajectory(dir, planned.solution);
  const TrajOptSolution& sol = planned.solution;
  std::cout << "traj: " << status_name(sol.status) << ", duration " << sol.trajectory.duration() << " s, "
            << sol.outer_iterations << " outer iterations, " << secs << " s\n";
  return kOk;
}

int cmd_run(const CommonArgs& args) {
  const Scenario s = load(args);
  const fs::path dir = prepare(args);
  const PlannedReference planned = plan_reference(s);
  write_path(dir, planned.path);
  write_trajectory(dir, planned.solution);

  const Reference ref = make_reference(s, planned.solution.trajectory);
  const FeasibilityReport feas = estimate_bounds(s.feasibility_inputs(initial_state(s, ref), ref.position(0.0)));
  write_file(dir / "feasibility.json", feas.to_json());

  EpisodeOptions opts;
  opts.auto_inflate = args.auto_inflate;
  const EpisodeLog log = run_episode(s, planned.solution.trajectory, s.seed, opts);
  {
    std::ofstream f(dir / "episode.csv", std::ios::binary);
    write_episode_csv(f, log.rows);
  }
  write_file(dir / "summary.json", log.summary.to_json());
  write_plotdata((dir / "plotdata").string(), log.rows, log.summary, s.workspace);

  const EpisodeSummary& sum = log.summary;
  std::cout << "run: " << (sum.passed ? "PASSED" : "FAILED") << ", " << sum.ticks << " ticks, violations d/o/u/r "
            << sum.violations[0] << '/' << sum.violations[1] << '/' << sum.violations[2] << '/'
            << sum.violations[3] << ", goal " << (sum.goal_reached ? "reached" : "not reached")
            << ", feasibility " << (feas.pass() ? "pass" : "fail") << '\n';
  return sum.passed ? kOk : kEpisodeFailed;
}

int cmd_sweep(const CommonArgs& args, int episodes, int threads) {
  const Scenario s = load(args);
  const fs::path dir = prepare(args);
  const PlannedReference planned = plan_reference(s);
  write_trajectory(dir, planned.solution);
  SweepOptions opts;
  opts.episodes = episodes;
  opts.threads = threads;
  opts.auto_inflate = args.auto_inflate;
  opts.master_seed = s.seed;
  const SweepResult r = run_sweep(s, planned.solution.trajectory, opts);
  write_file(dir / "sweep.json", r.to_json());
  std::cout << "sweep: " << r.episodes.size() << " episodes, " << r.feasible_episodes << " feasible, "
            << r.episodes_with_violations << " with violations, " << r.total_violation_ticks
            << " violation ticks, " << r.wall_seconds << " s\n";
  return r.total_violation_ticks == 0 && r.actuator_bounds_ok ? kOk : kEpisodeFailed;
}

int cmd_check(const CommonArgs& args) {
  const Scenario s = load(args);
  const fs::path dir = prepare(args);
  const PlannedReference planned = plan_reference(s);
  const Reference ref = make_reference(s, planned.solution.trajectory);
  const FeasibilityReport feas = estimate_bounds(s.feasibility_inputs(initial_state(s, ref), ref.position(0.0)));
  write_file(dir / "feasibility.json", feas.to_json());
  for (const ConditionCheck& c : feas.conditions)
    std::cout << (c.pass ? "pass " : "FAIL ") << c.name << ": lhs " << c.lhs << ", rhs " << c.rhs << '\n';
  return feas.pass() ? kOk : kInfeasibleReport;
}

int cmd_audit(const CommonArgs& args, std::string log_path, std::string summary_path) {
  const Scenario s = load(args);
  const fs::path dir = prepare(args);
  if (log_path.empty()) log_path = (dir / "episode.csv").string();
  if (summary_path.empty()) summary_path = (dir / "summary.json").string();
  std::ifstream f(log_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + log_path);
  const auto rows = read_episode_csv(f);
  const EpisodeSummary summary = EpisodeSummary::from_json(read_file(summary_path));
  const AuditReport rep = audit(rows, summary, s.workspace.obstacles());
  write_file(dir / "audit.json", rep.to_json());
  std::cout << "audit: " << rep.ticks << " ticks, violations d/o/u/r " << rep.violations[0] << '/'
            << rep.violations[1] << '/' << rep.violations[2] << '/' << rep.violations[3] << ", "
            << rep.thrust_cuts.size() << " thrust cuts, " << rep.discrepancies.size() << " discrepancies\n";
  for (const std::string& d : rep.discrepancies) std::cout << "  " << d << '\n';
  return rep.clean() ? kOk : kAuditMismatch;
}

int cmd_plot(const CommonArgs& args, std::string log_path, std::string summary_path) {
  const Scenario s = load(args);
  const fs::path dir = prepare(args);
  if (log_path.empty()) log_path = (dir / "episode.csv").string();
  if (summary_path.empty()) summary_path = (dir / "summary.json").string();
  std::ifstream f(log_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + log_path);
  const auto rows = read_episode_csv(f);
  const EpisodeSummary summary = EpisodeSummary::from_json(read_file(summary_path));
  write_plotdata((dir / "plotdata").string(), rows, summary, s.workspace);
  std::cout << "plot: wrote " << (dir / "plotdata").string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Funnel-controlled vessel navigation: planning, optimization and simulation"};
  app.require_subcommand(1);

  CommonArgs plan_args, traj_args, run_args, sweep_args, check_args, audit_args, plot_args;
  add_common(app.add_subcommand("plan", "RRT path in the inflated free space"), plan_args);
  add_common(app.add_subcommand("traj", "RRT path followed by the spline optimizer"), traj_args);
  add_common(app.add_subcommand("run", "full closed-loop episode"), run_args);
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo disturbance sweep");
  add_common(sweep, sweep_args);
  int episodes = 100;
  int threads = 0;
  sweep->add_option("--episodes", episodes, "number of disturbance seeds")->capture_default_str();
  sweep->add_option("--threads", threads, "worker threads, 0 for all cores")->capture_default_str();
  add_common(app.add_subcommand("check", "feasibility report for the scenario"), check_args);
  auto* audit_cmd = app.add_subcommand("audit", "re-verify an episode log against its summary");
  add_common(audit_cmd, audit_args);
  std::string log_path, summary_path;
  audit_cmd->add_option("--log", log_path, "episode CSV (default <out-dir>/episode.csv)");
  audit_cmd->add_option("--summary", summary_path, "summary JSON (default <out-dir>/summary.json)");
  auto* plot_cmd = app.add_subcommand("plot", "regenerate plotdata/*.csv from an episode log");
  add_common(plot_cmd, plot_args);
  plot_cmd->add_option("--log", log_path, "episode CSV (default <out-dir>/episode.csv)");
  plot_cmd->add_option("--summary", summary_path, "summary JSON (default <out-dir>/summary.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("plan")) return cmd_plan(plan_args);
    if (app.got_subcommand("traj")) return cmd_traj(traj_args);
    if (app.got_subcommand("run")) return cmd_run(run_args);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args, episodes, threads);
    if (app.got_subcommand("check")) return cmd_check(check_args);
    if (app.got_subcommand("audit")) return cmd_audit(audit_args, log_path, summary_path);
    if (app.got_subcommand("plot")) return cmd_plot(plot_args, log_path, summary_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
