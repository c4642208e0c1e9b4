#include "vesselnav/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "vesselnav/errors.hpp"
#include "vesselnav/rng.hpp"

namespace vesselnav {

using nlohmann::json;

Reference::Reference(SplineTrajectory traj, double lead) : traj_(std::move(traj)), lead_(lead) {}

double Reference::clock(double t) const { return std::clamp(t + lead_, 0.0, traj_.duration()); }

Vec2 Reference::position(double t) const { return traj_.eval(clock(t)); }

Vec2 Reference::velocity(double t) const {
  if (t + lead_ >= traj_.duration()) return Vec2::Zero();
  return traj_.eval_derivatives(clock(t)).velocity;
}

double solve_reference_lead(const SplineTrajectory& traj, const Vec2& start, double distance) {
  const double end = traj.duration();
  const int steps = traj.segment_count() * 50;
  double prev = 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double t = end * i / steps;
    if ((traj.eval(t) - start).norm() >= distance) {
      double lo = prev;
      double hi = t;
      for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        if ((traj.eval(mid) - start).norm() >= distance) hi = mid;
        else lo = mid;
      }
      return hi;
    }
    prev = t;
  }
  return end;
}

std::uint64_t planner_seed(std::uint64_t scenario_seed) { return derive_seed(scenario_seed, 0x52525400); }

PlannedReference plan_reference(const Scenario& scenario) {
  PlannedReference out;
  RrtParams params = scenario.planner.rrt;
  params.seed = planner_seed(scenario.seed);
  out.path = plan(scenario.planning_workspace(), scenario.start.p, scenario.goal, params);
  out.problem = scenario.trajopt_problem(out.path.waypoints);
  out.solution = solve(out.problem);
  if (out.solution.status == TrajOptStatus::Infeasible)
    throw Infeasible("spline optimizer returned an infeasible trajectory");
  return out;
}

namespace {

struct Column {
  const char* name;
  double EpisodeRow::*field;
};

const std::vector<Column>& column_table() {
  static const std::vector<Column> cols{
      {"t", &EpisodeRow::t},
      {"x", &EpisodeRow::x},
      {"y", &EpisodeRow::y},
      {"psi", &EpisodeRow::psi},
      {"u", &EpisodeRow::u},
      {"v", &EpisodeRow::v},
      {"r", &EpisodeRow::r},
      {"x_des", &EpisodeRow::x_des},
      {"y_des", &EpisodeRow::y_des},
      {"vx_des", &EpisodeRow::vx_des},
      {"vy_des", &EpisodeRow::vy_des},
      {"e_x", &EpisodeRow::e_x},
      {"e_y", &EpisodeRow::e_y},
      {"e_d", &EpisodeRow::e_d},
      {"e_o", &EpisodeRow::e_o},
      {"psi_e", &EpisodeRow::psi_e},
      {"rho_d", &EpisodeRow::rho_d},
      {"rho_o", &EpisodeRow::rho_o},
      {"rho_u", &EpisodeRow::rho_u},
      {"rho_r", &EpisodeRow::rho_r},
      {"xi_d", &EpisodeRow::xi_d},
      {"xi_o", &EpisodeRow::xi_o},
      {"xi_u", &EpisodeRow::xi_u},
      {"xi_r", &EpisodeRow::xi_r},
      {"eps_d", &EpisodeRow::eps_d},
      {"eps_o", &EpisodeRow::eps_o},
      {"eps_u", &EpisodeRow::eps_u},
      {"eps_r", &EpisodeRow::eps_r},
      {"u_des", &EpisodeRow::u_des},
      {"r_des", &EpisodeRow::r_des},
      {"X_des", &EpisodeRow::X_des},
      {"N_des", &EpisodeRow::N_des},
      {"u_alpha", &EpisodeRow::u_alpha},
      {"u_F", &EpisodeRow::u_F},
      {"thrust", &EpisodeRow::thrust},
      {"rudder", &EpisodeRow::rudder},
      {"thrust_saturated", &EpisodeRow::thrust_saturated},
      {"rudder_saturated", &EpisodeRow::rudder_saturated},
      {"violations", &EpisodeRow::violations},
      {"tau_x", &EpisodeRow::tau_x},
      {"tau_y", &EpisodeRow::tau_y},
      {"tau_n", &EpisodeRow::tau_n},
      {"obstacle_distance", &EpisodeRow::obstacle_distance},
  };
  return cols;
}

double obstacle_distance(const Vec2& p, const std::vector<ConvexPolygon>& obstacles) {
  double best = std::numeric_limits<double>::infinity();
  for (const ConvexPolygon& o : obstacles) best = std::min(best, o.distance(p));
  return best;
}

json funnel_json(const FunnelSpec& f) { return {{"rho0", f.rho0}, {"rho_inf", f.rho_inf}, {"decay", f.decay}}; }

FunnelSpec funnel_from(const json& j) {
  return {j.at("rho0").get<double>(), j.at("rho_inf").get<double>(), j.at("decay").get<double>()};
}

json controller_json(const ControllerConfig& c) {
  return {{"gains", {{"k_d", c.gains.k_d}, {"k_u", c.gains.k_u}, {"k_o", c.gains.k_o}, {"k_r", c.gains.k_r}}},
          {"funnel_d", funnel_json(c.funnel_d)},
          {"funnel_o", funnel_json(c.funnel_o)},
          {"funnel_u", funnel_json(c.funnel_u)},
          {"funnel_r", funnel_json(c.funnel_r)},
          {"rho_d_min", c.rho_d_min},
          {"max_thrust", c.max_thrust},
          {"max_rudder", c.max_rudder},
          {"eps_u_guard", c.eps_u_guard},
          {"nominal_thruster_offset", c.nominal_thruster_offset}};
}

ControllerConfig controller_from(const json& j) {
  ControllerConfig c;
  const json& g = j.at("gains");
  c.gains = {g.at("k_d").get<double>(), g.at("k_u").get<double>(), g.at("k_o").get<double>(),
             g.at("k_r").get<double>()};
  c.funnel_d = funnel_from(j.at("funnel_d"));
  c.funnel_o = funnel_from(j.at("funnel_o"));
  c.funnel_u = funnel_from(j.at("funnel_u"));
  c.funnel_r = funnel_from(j.at("funnel_r"));
  c.rho_d_min = j.at("rho_d_min").get<double>();
  c.max_thrust = j.at("max_thrust").get<double>();
  c.max_rudder = j.at("max_rudder").get<double>();
  c.eps_u_guard = j.at("eps_u_guard").get<double>();
  c.nominal_thruster_offset = j.at("nominal_thruster_offset").get<double>();
  return c;
}

constexpr std::array<const char*, 4> kChannelKeys{"d", "o", "u", "r"};

}  // namespace

const std::vector<std::string>& episode_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const Column& c : column_table()) n.emplace_back(c.name);
    return n;
  }();
  return names;
}

std::string EpisodeSummary::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["disturbance_seed"] = disturbance_seed;
  j["dt"] = dt;
  j["ticks"] = ticks;
  json viol;
  json margin;
  for (std::size_t c = 0; c < 4; ++c) {
    viol[kChannelKeys[c]] = violations[c];
    margin[kChannelKeys[c]] = min_margin[c];
  }
  j["violations"] = viol;
  j["min_margin"] = margin;
  j["total_violation_ticks"] = total_violation_ticks;
  j["passed"] = passed;
  j["status"] = passed ? "PASSED" : "FAILED";
  j["min_obstacle_distance"] = min_obstacle_distance;
  j["goal_reached"] = goal_reached;
  j["goal_time"] = goal_time;
  j["final_goal_distance"] = final_goal_distance;
  j["max_abs_psi_e"] = max_abs_psi_e;
  j["max_abs_sway"] = max_abs_sway;
  j["thrust_cut_ticks"] = thrust_cut_ticks;
  j["below_floor_ticks"] = below_floor_ticks;
  j["thrust_saturated_ticks"] = thrust_saturated_ticks;
  j["rudder_saturated_ticks"] = rudder_saturated_ticks;
  j["actuator_bounds_ok"] = actuator_bounds_ok;
  j["reference_lead"] = reference_lead;
  j["reference_duration"] = reference_duration;
  j["funnels_inflated"] = funnels_inflated;
  j["controller"] = controller_json(controller);
  j["min_thrust"] = min_thrust;
  return j.dump(2);
}

EpisodeSummary EpisodeSummary::from_json(const std::string& text) {
  const json j = json::parse(text);
  EpisodeSummary s;
  s.scenario = j.at("scenario").get<std::string>();
  s.disturbance_seed = j.at("disturbance_seed").get<std::uint64_t>();
  s.dt = j.at("dt").get<double>();
  s.ticks = j.at("ticks").get<int>();
  for (std::size_t c = 0; c < 4; ++c) {
    s.violations[c] = j.at("violations").at(kChannelKeys[c]).get<int>();
    s.min_margin[c] = j.at("min_margin").at(kChannelKeys[c]).get<double>();
  }
  s.total_violation_ticks = j.at("total_violation_ticks").get<int>();
  s.passed = j.at("passed").get<bool>();
  s.min_obstacle_distance = j.at("min_obstacle_distance").get<double>();
  s.goal_reached = j.at("goal_reached").get<bool>();
  s.goal_time = j.at("goal_time").get<double>();
  s.final_goal_distance = j.at("final_goal_distance").get<double>();
  s.max_abs_psi_e = j.at("max_abs_psi_e").get<double>();
  s.max_abs_sway = j.at("max_abs_sway").get<double>();
  s.thrust_cut_ticks = j.at("thrust_cut_ticks").get<int>();
  s.below_floor_ticks = j.at("below_floor_ticks").get<int>();
  s.thrust_saturated_ticks = j.at("thrust_saturated_ticks").get<int>();
  s.rudder_saturated_ticks = j.at("rudder_saturated_ticks").get<int>();
  s.actuator_bounds_ok = j.at("actuator_bounds_ok").get<bool>();
  s.reference_lead = j.at("reference_lead").get<double>();
  s.reference_duration = j.at("reference_duration").get<double>();
  s.funnels_inflated = j.at("funnels_inflated").get<bool>();
  s.controller = controller_from(j.at("controller"));
  s.min_thrust = j.at("min_thrust").get<double>();
  return s;
}

Reference make_reference(const Scenario& scenario, const SplineTrajectory& traj) {
  double lead = scenario.sim.reference_lead;
  if (lead < 0.0) {
    const ControllerConfig& c = scenario.controller;
    const double distance = scenario.sim.lead_distance > 0.0
                                ? scenario.sim.lead_distance
                                : 0.5 * (c.funnel_d(0.0) + c.rho_d_min);
    lead = solve_reference_lead(traj, scenario.start.p, distance);
  }
  return Reference(traj, lead);
}

VesselState initial_state(const Scenario& scenario, const Reference& reference) {
  VesselState s = scenario.start;
  s.t = 0.0;
  if (scenario.sim.auto_heading) {
    const Vec2 d = reference.position(0.0) - s.p;
    if (d.norm() >= kDegenerateDistance) s.psi = wrap_angle(std::atan2(d.y(), d.x()));
  }
  return s;
}

EpisodeLog run_episode(const Scenario& scenario, const SplineTrajectory& traj,
                       std::uint64_t disturbance_seed, const EpisodeOptions& options) {
  const Reference ref = make_reference(scenario, traj);
  VesselState state = initial_state(scenario, ref);
  const double dt = options.dt > 0.0 ? options.dt : scenario.sim.dt;

  EpisodeLog log;
  EpisodeSummary& sum = log.summary;
  sum.scenario = scenario.name;
  sum.disturbance_seed = disturbance_seed;
  sum.dt = dt;
  sum.reference_lead = ref.lead();
  sum.reference_duration = traj.duration();
  sum.min_thrust = scenario.feasibility.min_thrust;
  sum.min_margin.fill(1.0);

  ControllerConfig cfg = scenario.controller;
  const ComplianceReport compliance = check_initial_compliance(state, ref.position(0.0), cfg);
  if (!compliance.ok()) {
    if (!options.auto_inflate)
      throw InitialComplianceError("initial state violates the funnels: " + compliance.describe());
    cfg = inflate_for_compliance(cfg, compliance);
    sum.funnels_inflated = true;
  }
  sum.controller = cfg;

  DisturbanceProfile dist = scenario.disturbance;
  dist.seed = disturbance_seed;
  const auto& obstacles = scenario.workspace.obstacles();
  const long n_ticks = static_cast<long>(std::floor(scenario.sim.horizon / dt + 1e-9));
  sum.min_obstacle_distance = std::numeric_limits<double>::infinity();
  if (options.record_rows) log.rows.reserve(static_cast<std::size_t>(n_ticks) + 1);

  for (long n = 0; n <= n_ticks; ++n) {
    const double t = static_cast<double>(n) * dt;
    state.t = t;
    const Vec2 p_des = ref.position(t);
    const ControlOutput out = control_tick(state, p_des, t, cfg, ViolationPolicy::Clamp);
    const ControllerDebug& dbg = out.debug;

    TrackingErrors err;
    try {
      err = compute_errors(state, p_des);
    } catch (const DegenerateDistance&) {
      err.e_x = p_des.x() - state.p.x();
      err.e_y = p_des.y() - state.p.y();
      err.e_d = std::hypot(err.e_x, err.e_y);
    }
    const Vec3 tau = dist.evaluate(t);
    const double clearance = obstacle_distance(state.p, obstacles);

    ++sum.ticks;
    for (Channel c : kChannels) {
      const auto i = static_cast<std::size_t>(c);
      if (dbg.violations & channel_bit(c)) ++sum.violations[i];
    }
    if (dbg.violations != 0) ++sum.total_violation_ticks;
    const std::array<double, 4> xi{dbg.xi_d, dbg.xi_o, dbg.xi_u, dbg.xi_r};
    for (std::size_t i = 0; i < 4; ++i) sum.min_margin[i] = std::min(sum.min_margin[i], 1.0 - std::abs(xi[i]));
    sum.min_obstacle_distance = std::min(sum.min_obstacle_distance, clearance);
    sum.max_abs_psi_e = std::max(sum.max_abs_psi_e, std::abs(err.psi_e));
    sum.max_abs_sway = std::max(sum.max_abs_sway, std::abs(state.v));
    const double thrust = out.command.thrust();
    const double rudder = out.command.rudder();
    if (thrust == 0.0) ++sum.thrust_cut_ticks;
    if (thrust < sum.min_thrust) ++sum.below_floor_ticks;
    if (dbg.thrust_saturated) ++sum.thrust_saturated_ticks;
    if (dbg.rudder_saturated) ++sum.rudder_saturated_ticks;
    if (!(thrust >= 0.0 && thrust <= cfg.max_thrust && std::abs(rudder) <= cfg.max_rudder))
      sum.actuator_bounds_ok = false;

    if (options.record_rows) {
      EpisodeRow row;
      row.t = t;
      row.x = state.p.x();
      row.y = state.p.y();
      row.psi = state.psi;
      row.u = state.u;
      row.v = state.v;
      row.r = state.r;
      row.x_des = p_des.x();
      row.y_des = p_des.y();
      const Vec2 v_des = ref.velocity(t);
      row.vx_des = v_des.x();
      row.vy_des = v_des.y();
      row.e_x = err.e_x;
      row.e_y = err.e_y;
      row.e_d = err.e_d;
      row.e_o = err.e_o;
      row.psi_e = err.psi_e;
      row.rho_d = cfg.funnel_d(t);
      row.rho_o = cfg.funnel_o(t);
      row.rho_u = cfg.funnel_u(t);
      row.rho_r = cfg.funnel_r(t);
      row.xi_d = dbg.xi_d;
      row.xi_o = dbg.xi_o;
      row.xi_u = dbg.xi_u;
      row.xi_r = dbg.xi_r;
      row.eps_d = dbg.eps_d;
      row.eps_o = dbg.eps_o;
      row.eps_u = dbg.eps_u;
      row.eps_r = dbg.eps_r;
      row.u_des = dbg.u_des;
      row.r_des = dbg.r_des;
      row.X_des = dbg.X_des;
      row.N_des = dbg.N_des;
      row.u_alpha = dbg.u_alpha;
      row.u_F = dbg.u_F;
      row.thrust = thrust;
      row.rudder = rudder;
      row.thrust_saturated = dbg.thrust_saturated ? 1.0 : 0.0;
      row.rudder_saturated = dbg.rudder_saturated ? 1.0 : 0.0;
      row.violations = dbg.violations;
      row.tau_x = tau.x();
      row.tau_y = tau.y();
      row.tau_n = tau.z();
      row.obstacle_distance = clearance;
      log.rows.push_back(row);
    }

    const double goal_distance = (state.p - scenario.goal).norm();
    sum.final_goal_distance = goal_distance;
    if (goal_distance <= scenario.goal_radius &&
        std::hypot(state.u, state.v) <= scenario.sim.goal_speed && t + ref.lead() >= traj.duration()) {
      sum.goal_reached = true;
      sum.goal_time = t;
      break;
    }
    if (n == n_ticks) break;
    state = step(state, out.command, scenario.vessel, dist, dt);
  }
  sum.passed = sum.total_violation_ticks == 0 && sum.actuator_bounds_ok;
  return log;
}

EpisodeLog run_episode(const Scenario& scenario, const EpisodeOptions& options) {
  const PlannedReference planned = plan_reference(scenario);
  return run_episode(scenario, planned.solution.trajectory, scenario.seed, options);
}

void write_episode_csv(std::ostream& os, const std::vector<EpisodeRow>& rows) {
  const auto& cols = column_table();
  std::string line;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) line += ',';
    line += cols[c].name;
  }
  os << line << '\n';
  char buf[32];
  for (const EpisodeRow& row : rows) {
    line.clear();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) line += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row.*(cols[c].field));
      line += buf;
    }
    os << line << '\n';
  }
}

std::vector<EpisodeRow> read_episode_csv(std::istream& is) {
  const auto& cols = column_table();
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("episode CSV is empty");
  std::vector<int> mapping;
  {
    std::stringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) {
      int idx = -1;
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (name == cols[c].name) idx = static_cast<int>(c);
      mapping.push_back(idx);
    }
  }
  std::vector<EpisodeRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    EpisodeRow row;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < mapping.size(); ++k) {
      const std::size_t next = line.find(',', pos);
      const std::string cell = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (mapping[k] >= 0) row.*(cols[static_cast<std::size_t>(mapping[k])].field) = std::stod(cell);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

bool AuditReport::clean() const { return discrepancies.empty(); }

std::string AuditReport::to_json() const {
  json j;
  j["ticks"] = ticks;
  json viol;
  json margin;
  for (std::size_t c = 0; c < 4; ++c) {
    viol[kChannelKeys[c]] = violations[c];
    margin[kChannelKeys[c]] = min_margin[c];
  }
  j["violations"] = viol;
  j["min_margin"] = margin;
  j["actuator_violations"] = actuator_violations;
  j["min_obstacle_distance"] = min_obstacle_distance;
  j["max_abs_psi_e"] = max_abs_psi_e;
  auto& cuts = j["thrust_cuts"] = json::array();
  for (const ThrustCut& c : thrust_cuts) cuts.push_back({c.start, c.end});
  j["below_floor_ticks"] = below_floor_ticks;
  j["timestamp_errors"] = timestamp_errors;
  j["discrepancies"] = discrepancies;
  j["clean"] = clean();
  return j.dump(2);
}

AuditReport audit(const std::vector<EpisodeRow>& rows, const EpisodeSummary& summary,
                  const std::vector<ConvexPolygon>& obstacles) {
  const ControllerConfig& cfg = summary.controller;
  AuditReport a;
  a.ticks = static_cast<int>(rows.size());
  a.min_margin.fill(1.0);
  a.min_obstacle_distance = std::numeric_limits<double>::infinity();
  bool in_cut = false;
  int thrust_cut_ticks = 0;

  for (std::size_t n = 0; n < rows.size(); ++n) {
    const EpisodeRow& row = rows[n];
    const double t = row.t;
    if (n > 0 && std::abs(row.t - rows[n - 1].t - summary.dt) > 1e-9) ++a.timestamp_errors;

    VesselState s;
    s.p = Vec2(row.x, row.y);
    s.psi = row.psi;
    const Vec2 p_des(row.x_des, row.y_des);
    const double e_d = (p_des - s.p).norm();
    double e_o = 0.0;
    double psi_e = 0.0;
    if (e_d >= kDegenerateDistance) {
      const TrackingErrors e = compute_errors(s, p_des);
      e_o = e.e_o;
      psi_e = e.psi_e;
    }
    const double rho_d = cfg.funnel_d(t);
    const double rho_o = cfg.funnel_o(t);
    const double rho_u = cfg.funnel_u(t);
    const double rho_r = cfg.funnel_r(t);

    const double xi_d = normalize_asymmetric(e_d, rho_d, cfg.rho_d_min);
    const double xi_o = normalize_symmetric(e_o, rho_o);
    const bool viol_d = !(cfg.rho_d_min < e_d && e_d < rho_d);
    const bool viol_o = !(std::abs(e_o) < rho_o);
    const double u_des = cfg.gains.k_d * std::atanh(std::clamp(xi_d, -kViolationClamp, kViolationClamp));
    const double r_des = -cfg.gains.k_o * std::atanh(std::clamp(xi_o, -kViolationClamp, kViolationClamp));
    const double e_u = row.u - u_des;
    const double e_r = row.r - r_des;
    const bool viol_u = !(std::abs(e_u) < rho_u);
    const bool viol_r = !(std::abs(e_r) < rho_r);

    const std::array<bool, 4> viol{viol_d, viol_o, viol_u, viol_r};
    const std::array<double, 4> xi{xi_d, xi_o, e_u / rho_u, e_r / rho_r};
    for (std::size_t c = 0; c < 4; ++c) {
      if (viol[c]) ++a.violations[c];
      a.min_margin[c] = std::min(a.min_margin[c], 1.0 - std::abs(xi[c]));
    }

    if (!(row.thrust >= 0.0 && row.thrust <= cfg.max_thrust && std::abs(row.rudder) <= cfg.max_rudder))
      ++a.actuator_violations;
    a.min_obstacle_distance = std::min(a.min_obstacle_distance, obstacle_distance(s.p, obstacles));
    a.max_abs_psi_e = std::max(a.max_abs_psi_e, std::abs(psi_e));

    if (row.thrust < summary.min_thrust) ++a.below_floor_ticks;
    if (row.thrust == 0.0) {
      ++thrust_cut_ticks;
      if (!in_cut) a.thrust_cuts.push_back({t, t});
      a.thrust_cuts.back().end = t;
      in_cut = true;
    } else {
      in_cut = false;
    }
  }
  if (rows.empty()) a.min_obstacle_distance = 0.0;

  auto mismatch = [&](const std::string& what, double logged, double recount) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": summary " << logged << ", audit " << recount;
    a.discrepancies.push_back(os.str());
  };
  if (a.ticks != summary.ticks) mismatch("ticks", summary.ticks, a.ticks);
  for (std::size_t c = 0; c < 4; ++c) {
    if (a.violations[c] != summary.violations[c])
      mismatch(std::string("violations.") + kChannelKeys[c], summary.violations[c], a.violations[c]);
  }
  if (a.actuator_violations != 0 || !summary.actuator_bounds_ok) {
    if (summary.actuator_bounds_ok != (a.actuator_violations == 0))
      mismatch("actuator_violations", summary.actuator_bounds_ok ? 0 : 1, a.actuator_violations);
  }
  if (thrust_cut_ticks != summary.thrust_cut_ticks)
    mismatch("thrust_cut_ticks", summary.thrust_cut_ticks, thrust_cut_ticks);
  if (a.below_floor_ticks != summary.below_floor_ticks)
    mismatch("below_floor_ticks", summary.below_floor_ticks, a.below_floor_ticks);
  if (!rows.empty() && std::abs(a.min_obstacle_distance - summary.min_obstacle_distance) > 1e-9)
    mismatch("min_obstacle_distance", summary.min_obstacle_distance, a.min_obstacle_distance);
  if (std::abs(a.max_abs_psi_e - summary.max_abs_psi_e) > 1e-12)
    mismatch("max_abs_psi_e", summary.max_abs_psi_e, a.max_abs_psi_e);
  if (a.timestamp_errors != 0) mismatch("timestamp_errors", 0, a.timestamp_errors);
  return a;
}

void write_plotdata(const std::string& dir, const std::vector<EpisodeRow>& rows,
                    const EpisodeSummary& summary, const Workspace& workspace) {
  std::filesystem::create_directories(dir);
  const ControllerConfig& cfg = summary.controller;
  auto open = [&](const char* name) {
    std::ofstream f(std::filesystem::path(dir) / name);
    if (!f) throw std::runtime_error(std::string("cannot write ") + name);
    f.precision(10);
    return f;
  };
  {
    auto f = open("errors.csv");
    f << "t,e_d,rho_d,rho_d_min,e_o,rho_o,e_u,rho_u,e_r,rho_r\n";
    for (const EpisodeRow& r : rows)
      f << r.t << ',' << r.e_d << ',' << r.rho_d << ',' << cfg.rho_d_min << ',' << r.e_o << ','
        << r.rho_o << ',' << r.u - r.u_des << ',' << r.rho_u << ',' << r.r - r.r_des << ',' << r.rho_r
        << '\n';
  }
  {
    auto f = open("inputs.csv");
    f << "t,thrust,max_thrust,rudder,max_rudder\n";
    for (const EpisodeRow& r : rows)
      f << r.t << ',' << r.thrust << ',' << cfg.max_thrust << ',' << r.rudder << ',' << cfg.max_rudder << '\n';
  }
  {
    auto f = open("velocity.csv");
    f << "t,u,u_des,v,r,r_des\n";
    for (const EpisodeRow& r : rows)
      f << r.t << ',' << r.u << ',' << r.u_des << ',' << r.v << ',' << r.r << ',' << r.r_des << '\n';
  }
  {
    auto f = open("path.csv");
    f << "t,x,y,x_des,y_des\n";
    for (const EpisodeRow& r : rows)
      f << r.t << ',' << r.x << ',' << r.y << ',' << r.x_des << ',' << r.y_des << '\n';
  }
  {
    auto f = open("obstacles.csv");
    f << "obstacle,inflated,vertex,x,y\n";
    for (int inflated = 0; inflated < 2; ++inflated) {
      const auto& polys = inflated ? workspace.inflated_obstacles() : workspace.obstacles();
      for (std::size_t o = 0; o < polys.size(); ++o) {
        const auto& verts = polys[o].vertices();
        for (std::size_t v = 0; v < verts.size(); ++v)
          f << o << ',' << inflated << ',' << v << ',' << verts[v].x() << ',' << verts[v].y() << '\n';
      }
    }
  }
}

}  // namespace vesselnav
