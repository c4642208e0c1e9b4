#include "vesselnav/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vesselnav/errors.hpp"

namespace vesselnav {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vec2 read_vec2(const json& j) {
  if (j.is_array()) return {j.at(0).get<double>(), j.at(1).get<double>()};
  return {j.at("x").get<double>(), j.at("y").get<double>()};
}

void read_drag(const json& j, const char* key, AxisDrag& d) {
  if (!j.contains(key)) return;
  read(j.at(key), "linear", d.linear);
  read(j.at(key), "quadratic", d.quadratic);
}

void read_axis(const json& j, const char* key, AxisDisturbance& a) {
  if (!j.contains(key)) return;
  const json& s = j.at(key);
  read(s, "bias", a.bias);
  read(s, "amplitude", a.amplitude);
  read(s, "frequency", a.frequency);
  read(s, "phase", a.phase);
  read(s, "noise", a.noise);
}

void read_funnel(const json& j, const char* key, FunnelSpec& f) {
  if (!j.contains(key)) return;
  const json& s = j.at(key);
  if (s.is_number()) {
    f = FunnelSpec::constant(s.get<double>());
    return;
  }
  read(s, "rho0", f.rho0);
  f.rho_inf = f.rho0;
  read(s, "rho_inf", f.rho_inf);
  read(s, "decay", f.decay);
}

}  // namespace

void Scenario::validate() const {
  try {
    vessel.validate();
    disturbance.validate();
    controller.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario '") + name + "': " + e.what());
  }
  if (!point_free(start.p, workspace, true))
    throw ScenarioError("start position is not in the inflated free space");
  if (!point_free(goal, workspace, true))
    throw ScenarioError("goal position is not in the inflated free space");
  if (!(controller.funnel_d.rho0 < workspace.clearance()))
    throw ScenarioError("distance funnel rho0 must be smaller than the clearance");
  if (!(sim.dt > 0.0 && sim.horizon > 0.0)) throw ScenarioError("sim dt and horizon must be positive");
  if (!(goal_radius > 0.0)) throw ScenarioError("goal radius must be positive");
  if (!(v_max > 0.0 && a_max > 0.0)) throw ScenarioError("v_max and a_max must be positive");
}

Workspace Scenario::planning_workspace() const {
  return workspace.with_clearance(workspace.clearance() + planner.extra_clearance);
}

TrajOptProblem Scenario::trajopt_problem(const std::vector<Vec2>& waypoints) const {
  TrajOptProblem p;
  p.waypoints = waypoints;
  p.obstacles = workspace.inflated_obstacles();
  p.v_max = v_max;
  p.a_max = a_max;
  p.weights = trajopt.weights;
  p.dt_min = trajopt.dt_min;
  p.dt_max = trajopt.dt_max;
  p.sep_margin = trajopt.sep_margin;
  p.max_outer = trajopt.max_outer;
  p.tol_outer = trajopt.tol_outer;
  p.penalty = trajopt.penalty;
  p.golden_iters = trajopt.golden_iters;
  p.cull_distance = trajopt.cull_distance;
  p.legacy_accel_form = trajopt.legacy_accel_form;
  return p;
}

FeasibilityInputs Scenario::feasibility_inputs(const VesselState& initial,
                                               const Vec2& initial_reference) const {
  FeasibilityInputs in;
  in.vessel = vessel;
  in.disturbance = disturbance;
  in.controller = controller;
  in.min_thrust = feasibility.min_thrust;
  in.box = feasibility.box;
  in.reference_speed = v_max;
  in.horizon = sim.horizon;
  in.n_samples = feasibility.n_samples;
  in.seed = seed;
  in.initial = initial;
  in.initial_reference = initial_reference;
  return in;
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario s;
  try {
    read(j, "name", s.name);
    read(j, "seed", s.seed);

    const json& w = j.at("workspace");
    Bounds b{read_vec2(w.at("min")), read_vec2(w.at("max"))};
    std::vector<ConvexPolygon> obstacles;
    if (w.contains("obstacles")) {
      for (const json& o : w.at("obstacles")) {
        std::vector<Vec2> verts;
        for (const json& v : o) verts.push_back(read_vec2(v));
        obstacles.emplace_back(std::move(verts));
      }
    }
    double clearance = 30.0;
    int k_gon = 16;
    read(w, "clearance", clearance);
    read(w, "k_gon", k_gon);
    s.workspace = Workspace(b, std::move(obstacles), clearance, k_gon);

    const json& st = j.at("start");
    s.start.p = Vec2(st.at("x").get<double>(), st.at("y").get<double>());
    if (st.contains("psi")) {
      if (st.at("psi").is_string()) {
        if (st.at("psi").get<std::string>() != "auto") throw ScenarioError("start.psi must be a number or \"auto\"");
        s.sim.auto_heading = true;
      } else {
        s.start.psi = wrap_angle(st.at("psi").get<double>());
        s.sim.auto_heading = false;
      }
    }
    read(st, "u", s.start.u);
    read(st, "v", s.start.v);
    read(st, "r", s.start.r);

    const json& g = j.at("goal");
    s.goal = Vec2(g.at("x").get<double>(), g.at("y").get<double>());
    read(g, "radius", s.goal_radius);

    if (j.contains("vessel")) {
      const json& v = j.at("vessel");
      read(v, "mass", s.vessel.mass);
      read(v, "inertia_z", s.vessel.inertia_z);
      read(v, "thruster_offset", s.vessel.thruster_offset);
      read_drag(v, "surge_drag", s.vessel.surge_drag);
      read_drag(v, "sway_drag", s.vessel.sway_drag);
      read_drag(v, "yaw_drag", s.vessel.yaw_drag);
      read(v, "coriolis", s.vessel.coriolis);
    }

    if (j.contains("disturbance")) {
      const json& d = j.at("disturbance");
      read_axis(d, "surge", s.disturbance.surge);
      read_axis(d, "sway", s.disturbance.sway);
      read_axis(d, "yaw", s.disturbance.yaw);
      read(d, "noise_hold", s.disturbance.noise_hold);
      read(d, "randomize_phase", s.disturbance.randomize_phase);
    }
    s.disturbance.seed = s.seed;

    if (j.contains("controller")) {
      const json& c = j.at("controller");
      if (c.contains("gains")) {
        const json& k = c.at("gains");
        read(k, "k_d", s.controller.gains.k_d);
        read(k, "k_u", s.controller.gains.k_u);
        read(k, "k_o", s.controller.gains.k_o);
        read(k, "k_r", s.controller.gains.k_r);
      }
      read_funnel(c, "funnel_d", s.controller.funnel_d);
      read_funnel(c, "funnel_o", s.controller.funnel_o);
      read_funnel(c, "funnel_u", s.controller.funnel_u);
      read_funnel(c, "funnel_r", s.controller.funnel_r);
      read(c, "rho_d_min", s.controller.rho_d_min);
      read(c, "max_thrust", s.controller.max_thrust);
      read(c, "max_rudder", s.controller.max_rudder);
      read(c, "eps_u_guard", s.controller.eps_u_guard);
      read(c, "nominal_thruster_offset", s.controller.nominal_thruster_offset);
    }

    if (j.contains("kinodynamic")) {
      read(j.at("kinodynamic"), "v_max", s.v_max);
      read(j.at("kinodynamic"), "a_max", s.a_max);
    }

    if (j.contains("planner")) {
      const json& p = j.at("planner");
      read(p, "step_size", s.planner.rrt.step_size);
      read(p, "goal_bias", s.planner.rrt.goal_bias);
      read(p, "max_iters", s.planner.rrt.max_iters);
      read(p, "goal_radius", s.planner.rrt.goal_radius);
      read(p, "shortcut", s.planner.rrt.shortcut);
      read(p, "extra_clearance", s.planner.extra_clearance);
    }

    if (j.contains("trajopt")) {
      const json& t = j.at("trajopt");
      read(t, "w_fit", s.trajopt.weights.fit);
      read(t, "w_jerk", s.trajopt.weights.jerk);
      read(t, "w_time", s.trajopt.weights.time);
      read(t, "dt_min", s.trajopt.dt_min);
      read(t, "dt_max", s.trajopt.dt_max);
      read(t, "sep_margin", s.trajopt.sep_margin);
      read(t, "max_outer", s.trajopt.max_outer);
      read(t, "tol_outer", s.trajopt.tol_outer);
      read(t, "penalty", s.trajopt.penalty);
      read(t, "golden_iters", s.trajopt.golden_iters);
      read(t, "cull_distance", s.trajopt.cull_distance);
      read(t, "legacy_accel_form", s.trajopt.legacy_accel_form);
    }

    if (j.contains("sim")) {
      const json& m = j.at("sim");
      read(m, "dt", s.sim.dt);
      read(m, "horizon", s.sim.horizon);
      read(m, "goal_speed", s.sim.goal_speed);
      read(m, "reference_lead", s.sim.reference_lead);
      read(m, "lead_distance", s.sim.lead_distance);
    }

    if (j.contains("feasibility")) {
      const json& f = j.at("feasibility");
      read(f, "min_thrust", s.feasibility.min_thrust);
      read(f, "n_samples", s.feasibility.n_samples);
      if (f.contains("box")) {
        const json& b2 = f.at("box");
        read(b2, "xi", s.feasibility.box.xi);
        read(b2, "u_min", s.feasibility.box.u_min);
        read(b2, "u_max", s.feasibility.box.u_max);
        read(b2, "r_max", s.feasibility.box.r_max);
        read(b2, "v_bar", s.feasibility.box.v_bar);
      }
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace vesselnav
