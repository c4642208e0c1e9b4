#include "vesselnav/trajopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "vesselnav/errors.hpp"

namespace vesselnav {

void TrajOptProblem::validate() const {
  if (waypoints.size() < 2) throw std::invalid_argument("need at least two waypoints");
  if (!(weights.fit > 0.0 || weights.jerk > 0.0))
    throw std::invalid_argument("fit or jerk weight must be positive");
  if (weights.fit < 0.0 || weights.jerk < 0.0 || weights.time < 0.0)
    throw std::invalid_argument("weights must be non-negative");
  if (!(v_max > 0.0 && a_max > 0.0)) throw std::invalid_argument("v_max and a_max must be positive");
  if (!(dt_min > 0.0 && dt_max > dt_min)) throw std::invalid_argument("need 0 < dt_min < dt_max");
  if (!(sep_margin > 0.0)) throw std::invalid_argument("sep_margin must be positive");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be at least 1");
}

std::string status_name(TrajOptStatus s) {
  switch (s) {
    case TrajOptStatus::Converged:
      return "converged";
    case TrajOptStatus::MaxIters:
      return "max_iters";
    case TrajOptStatus::Infeasible:
      break;
  }
  return "infeasible";
}

namespace {

// A spline with at least 8 control points needs at least 4 waypoints.
std::vector<Vec2> padded_waypoints(const std::vector<Vec2>& wp) {
  std::vector<Vec2> out = wp;
  while (out.size() < 4) {
    std::size_t longest = 1;
    for (std::size_t i = 1; i < out.size(); ++i)
      if ((out[i] - out[i - 1]).norm() > (out[longest] - out[longest - 1]).norm()) longest = i;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(longest),
               0.5 * (out[longest] + out[longest - 1]));
  }
  return out;
}

std::vector<Vec2> tripled(const std::vector<Vec2>& wp) {
  std::vector<Vec2> pts;
  pts.insert(pts.end(), 2, wp.front());
  pts.insert(pts.end(), wp.begin(), wp.end());
  pts.insert(pts.end(), 2, wp.back());
  return pts;
}

double second_difference_norm(const std::vector<Vec2>& q, std::size_t k, bool legacy) {
  return legacy ? (q[k] - 2.0 * q[k - 1] - q[k - 2]).norm()
                : (q[k] - 2.0 * q[k - 1] + q[k - 2]).norm();
}

double accel_bound(const TrajOptProblem& p, double dt) {
  return p.legacy_accel_form ? p.a_max * dt : p.a_max * dt * dt;
}

// Required hull-to-obstacle gap; leaves room for a mid line with sep_margin on both sides.
double required_gap(const TrajOptProblem& p) { return 3.0 * p.sep_margin; }

std::array<Vec2, 4> window(const std::vector<Vec2>& q, int i) {
  const auto k = static_cast<std::size_t>(i);
  return {q[k], q[k + 1], q[k + 2], q[k + 3]};
}

// Signed distance between a segment hull and an obstacle: positive when
// disjoint, minus the penetration depth when they overlap.
double signed_gap(const std::array<Vec2, 4>& hull, const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  if (auto cp = closest_pair(hull, std::span<const Vec2>(v.data(), v.size()))) return cp->distance;
  return 2.0 * penetration_plane(hull, poly, 0.0).margin;
}

double total_violation(const std::vector<Vec2>& q, const TrajOptProblem& p) {
  const int segments = static_cast<int>(q.size()) - 3;
  double v = 0.0;
  for (int i = 0; i < segments; ++i) {
    const auto hull = window(q, i);
    for (const ConvexPolygon& poly : p.obstacles) {
      const double gap = signed_gap(hull, poly);
      if (p.cull_distance > 0.0 && gap > p.cull_distance) continue;
      v += std::max(0.0, required_gap(p) - gap);
    }
  }
  return v;
}

double merit(const std::vector<Vec2>& q, double dt, const TrajOptProblem& p,
             const std::vector<Vec2>& wp) {
  return evaluate_cost(q, wp, p.weights, dt).total() + p.penalty * total_violation(q, p);
}

// Linear combination of up to four control points.
struct Combo {
  int n = 0;
  std::array<int, 4> idx{};
  std::array<double, 4> coef{};

  void add(int k, double c) {
    idx[static_cast<std::size_t>(n)] = k;
    coef[static_cast<std::size_t>(n)] = c;
    ++n;
  }
  Vec2 value(const std::vector<Vec2>& q) const {
    Vec2 out = Vec2::Zero();
    for (int l = 0; l < n; ++l) out += coef[static_cast<std::size_t>(l)] * q[static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])];
    return out;
  }
};

struct QuadTerm {
  Combo combo;
  Vec2 target;
  double weight;
};

struct BallConstraint {
  Combo combo;
  bool velocity;  // radius from the speed bound, otherwise from the acceleration bound
};

struct HalfspaceConstraint {
  int point;
  Vec2 h;
  double c;
  int slack;  // -1 when hard
};

struct Pair {
  int segment;
  int obstacle;
  Vec2 h;
  double c;
  bool slack;
};

// Control-point step: fixed lines and knot spacing, convex in the free points.
class ControlPointStep {
 public:
  ControlPointStep(const TrajOptProblem& p, const std::vector<Vec2>& wp, int n_points)
      : p_(p), n_(n_points), free_(n_points - 6) {
    const TrajOptWeights& w = p.weights;
    const int nx = n_points - 4;
    if (w.fit > 0.0) {
      for (int j = 2; j <= nx - 1; ++j) {
        QuadTerm t;
        t.combo.add(j, kKnotWeights[0]);
        t.combo.add(j + 1, kKnotWeights[1]);
        t.combo.add(j + 2, kKnotWeights[2]);
        t.target = wp[static_cast<std::size_t>(j - 1)];
        t.weight = w.fit;
        quad_.push_back(t);
      }
    }
    if (w.jerk > 0.0) {
      for (int i = 0; i + 3 < n_points; ++i) {
        QuadTerm t;
        for (int l = 0; l < 4; ++l) t.combo.add(i + l, kJerkWeights[static_cast<std::size_t>(l)]);
        t.target = Vec2::Zero();
        t.weight = w.jerk;
        quad_.push_back(t);
      }
    }
    for (int k = 1; k < n_points; ++k) {
      if (var(k) < 0 && var(k - 1) < 0) continue;
      BallConstraint b;
      b.combo.add(k, 1.0);
      b.combo.add(k - 1, -1.0);
      b.velocity = true;
      balls_.push_back(b);
    }
    for (int k = 2; k < n_points; ++k) {
      if (var(k) < 0 && var(k - 1) < 0 && var(k - 2) < 0) continue;
      BallConstraint b;
      b.combo.add(k, 1.0);
      b.combo.add(k - 1, -2.0);
      b.combo.add(k - 2, p.legacy_accel_form ? -1.0 : 1.0);
      b.velocity = false;
      balls_.push_back(b);
    }
  }

  int var(int k) const { return (k >= 3 && k <= n_ - 4) ? 2 * (k - 3) : -1; }

  /// Minimizes the barrier-smoothed subproblem from a strictly feasible q.
  std::vector<Vec2> solve(std::vector<Vec2> q, double dt, const std::vector<Pair>& pairs,
                          int& newton_count) {
    dt_ = dt;
    halfspaces_.clear();
    slack_.clear();
    for (const Pair& pr : pairs) {
      int s = -1;
      if (pr.slack) {
        s = static_cast<int>(slack_.size());
        double worst = 0.0;
        for (int l = 0; l < 4; ++l)
          worst = std::max(worst, pr.c - pr.h.dot(q[static_cast<std::size_t>(pr.segment + l)]));
        slack_.push_back(worst + std::max(required_gap(p_), 1e-3));
      }
      for (int l = 0; l < 4; ++l) {
        const int k = pr.segment + l;
        if (var(k) < 0 && s < 0) continue;
        halfspaces_.push_back({k, pr.h, pr.c, s});
      }
    }
    dim_ = 2 * free_ + static_cast<int>(slack_.size());
    const int m = static_cast<int>(balls_.size() + halfspaces_.size() + slack_.size());

    Eigen::VectorXd z = pack(q);
    double tau = 1.0;
    const double mu = 20.0;
    for (int stage = 0; stage < 40; ++stage) {
      for (int it = 0; it < 60; ++it) {
        ++newton_count;
        Eigen::VectorXd grad;
        Eigen::SparseMatrix<double> hess;
        const double phi = assemble(z, tau, &grad, &hess);
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(hess);
        if (ldlt.info() != Eigen::Success) break;
        const Eigen::VectorXd dz = ldlt.solve(-grad);
        const double decrement = -grad.dot(dz);
        if (!(decrement > 1e-12)) break;
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
          const Eigen::VectorXd trial = z + alpha * dz;
          const double phi_trial = assemble(trial, tau, nullptr, nullptr);
          if (std::isfinite(phi_trial) && phi_trial <= phi - 0.25 * alpha * decrement) {
            z = trial;
            moved = true;
            break;
          }
        }
        if (!moved || decrement < 1e-10) break;
      }
      const double f = objective(unpack(z));
      if (m / tau < 1e-9 * std::max(1.0, std::abs(f))) break;
      tau *= mu;
    }
    return unpack(z);
  }

 private:
  Eigen::VectorXd pack(const std::vector<Vec2>& q) {
    base_ = q;
    Eigen::VectorXd z(dim_);
    for (int k = 3; k <= n_ - 4; ++k) z.segment<2>(var(k)) = q[static_cast<std::size_t>(k)];
    for (std::size_t s = 0; s < slack_.size(); ++s) z(2 * free_ + static_cast<int>(s)) = slack_[s];
    return z;
  }

  std::vector<Vec2> unpack(const Eigen::VectorXd& z) const {
    std::vector<Vec2> q = base_;
    for (int k = 3; k <= n_ - 4; ++k) q[static_cast<std::size_t>(k)] = z.segment<2>(var(k));
    return q;
  }

  double objective(const std::vector<Vec2>& q) const {
    double f = 0.0;
    for (const QuadTerm& t : quad_) f += t.weight * (t.combo.value(q) - t.target).squaredNorm();
    return f;
  }

  // Returns tau * (quadratic + penalty * slacks) - sum log(constraint),
  // or +inf outside the strict interior.
  double assemble(const Eigen::VectorXd& z, double tau, Eigen::VectorXd* grad,
                  Eigen::SparseMatrix<double>* hess) const {
    const std::vector<Vec2> q = unpack(z);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Triplet<double>> trip;
    if (grad != nullptr) {
      grad->setZero(dim_);
      trip.reserve(static_cast<std::size_t>(dim_) * 40);
    }

    double phi = 0.0;
    for (const QuadTerm& t : quad_) {
      const Vec2 r = t.combo.value(q) - t.target;
      phi += tau * t.weight * r.squaredNorm();
      if (grad == nullptr) continue;
      for (int a = 0; a < t.combo.n; ++a) {
        const int va = var(t.combo.idx[static_cast<std::size_t>(a)]);
        if (va < 0) continue;
        const double ca = t.combo.coef[static_cast<std::size_t>(a)];
        grad->segment<2>(va) += 2.0 * tau * t.weight * ca * r;
        for (int b = 0; b < t.combo.n; ++b) {
          const int vb = var(t.combo.idx[static_cast<std::size_t>(b)]);
          if (vb < 0) continue;
          const double v = 2.0 * tau * t.weight * ca * t.combo.coef[static_cast<std::size_t>(b)];
          trip.emplace_back(va, vb, v);
          trip.emplace_back(va + 1, vb + 1, v);
        }
      }
    }

    const double r_vel = p_.v_max * dt_;
    const double r_acc = accel_bound(p_, dt_);
    for (const BallConstraint& b : balls_) {
      const Vec2 x = b.combo.value(q);
      const double radius = b.velocity ? r_vel : r_acc;
      const double g = radius * radius - x.squaredNorm();
      if (!(g > 0.0)) return inf;
      phi -= std::log(g);
      if (grad == nullptr) continue;
      // d g / d q_l = -2 c_l x
      for (int a = 0; a < b.combo.n; ++a) {
        const int va = var(b.combo.idx[static_cast<std::size_t>(a)]);
        if (va < 0) continue;
        const double ca = b.combo.coef[static_cast<std::size_t>(a)];
        grad->segment<2>(va) += 2.0 * ca * x / g;
        for (int bb = 0; bb < b.combo.n; ++bb) {
          const int vb = var(b.combo.idx[static_cast<std::size_t>(bb)]);
          if (vb < 0) continue;
          const double cb = b.combo.coef[static_cast<std::size_t>(bb)];
          const Eigen::Matrix2d blk =
              4.0 * ca * cb * x * x.transpose() / (g * g) + 2.0 * ca * cb / g * Eigen::Matrix2d::Identity();
          for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) trip.emplace_back(va + r, vb + c, blk(r, c));
        }
      }
    }

    for (const HalfspaceConstraint& hc : halfspaces_) {
      const int vk = var(hc.point);
      const int vs = hc.slack >= 0 ? 2 * free_ + hc.slack : -1;
      double g = hc.h.dot(q[static_cast<std::size_t>(hc.point)]) - hc.c;
      if (vs >= 0) g += z(vs);
      if (!(g > 0.0)) return inf;
      phi -= std::log(g);
      if (grad == nullptr) continue;
      const double g2 = g * g;
      if (vk >= 0) {
        grad->segment<2>(vk) -= hc.h / g;
        const Eigen::Matrix2d blk = hc.h * hc.h.transpose() / g2;
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) trip.emplace_back(vk + r, vk + c, blk(r, c));
      }
      if (vs >= 0) {
        (*grad)(vs) -= 1.0 / g;
        trip.emplace_back(vs, vs, 1.0 / g2);
        if (vk >= 0) {
          for (int r = 0; r < 2; ++r) {
            trip.emplace_back(vk + r, vs, hc.h(r) / g2);
            trip.emplace_back(vs, vk + r, hc.h(r) / g2);
          }
        }
      }
    }

    for (std::size_t s = 0; s < slack_.size(); ++s) {
      const int vs = 2 * free_ + static_cast<int>(s);
      const double sv = z(vs);
      if (!(sv > 0.0)) return inf;
      phi += tau * p_.penalty * sv - std::log(sv);
      if (grad == nullptr) continue;
      (*grad)(vs) += tau * p_.penalty - 1.0 / sv;
      trip.emplace_back(vs, vs, 1.0 / (sv * sv));
    }

    if (hess != nullptr) {
      for (int i = 0; i < dim_; ++i) trip.emplace_back(i, i, 1e-12);
      hess->resize(dim_, dim_);
      hess->setFromTriplets(trip.begin(), trip.end());
    }
    return phi;
  }

  const TrajOptProblem& p_;
  int n_;
  int free_;
  int dim_ = 0;
  double dt_ = 1.0;
  std::vector<QuadTerm> quad_;
  std::vector<BallConstraint> balls_;
  std::vector<HalfspaceConstraint> halfspaces_;
  std::vector<double> slack_;
  std::vector<Vec2> base_;
};

// Step A: one line per (segment, obstacle) pair from the current control points.
std::vector<Pair> separating_step(const std::vector<Vec2>& q, const TrajOptProblem& p) {
  std::vector<Pair> pairs;
  const int segments = static_cast<int>(q.size()) - 3;
  const double gap_req = required_gap(p);
  for (int i = 0; i < segments; ++i) {
    const auto hull = window(q, i);
    for (std::size_t j = 0; j < p.obstacles.size(); ++j) {
      const ConvexPolygon& poly = p.obstacles[j];
      Pair pr{i, static_cast<int>(j), Vec2::UnitX(), 0.0, false};
      double gap = 0.0;
      if (auto sep = find_separator(hull, poly)) {
        pr.h = sep->h;
        gap = 2.0 * sep->margin;
      } else {
        const Separator pen = penetration_plane(hull, poly, 0.0);
        pr.h = pen.h;
        gap = 2.0 * pen.margin;
      }
      if (p.cull_distance > 0.0 && gap > p.cull_distance) continue;
      double support = -std::numeric_limits<double>::infinity();
      for (const Vec2& v : poly.vertices()) support = std::max(support, pr.h.dot(v));
      pr.c = support + gap_req;
      pr.slack = !(gap > gap_req * (1.0 + 1e-6));
      pairs.push_back(pr);
    }
  }
  return pairs;
}

std::vector<SeparatingLine> final_lines(const std::vector<Vec2>& q, const TrajOptProblem& p) {
  std::vector<SeparatingLine> lines;
  const int segments = static_cast<int>(q.size()) - 3;
  for (int i = 0; i < segments; ++i) {
    const auto hull = window(q, i);
    for (std::size_t j = 0; j < p.obstacles.size(); ++j) {
      SeparatingLine line;
      line.segment = i;
      line.obstacle = static_cast<int>(j);
      if (auto sep = find_separator(hull, p.obstacles[j])) {
        line.h = sep->h;
        line.d = sep->d;
        line.margin = sep->margin;
      } else {
        const Separator pen = penetration_plane(hull, p.obstacles[j], p.sep_margin);
        line.h = pen.h;
        line.d = pen.d;
        line.margin = pen.margin;
      }
      lines.push_back(line);
    }
  }
  return lines;
}

}  // namespace

double min_feasible_dt(const std::vector<Vec2>& q, const TrajOptProblem& p) {
  double vel = 0.0;
  double acc = 0.0;
  for (std::size_t k = 1; k < q.size(); ++k) vel = std::max(vel, (q[k] - q[k - 1]).norm());
  for (std::size_t k = 2; k < q.size(); ++k)
    acc = std::max(acc, second_difference_norm(q, k, p.legacy_accel_form));
  const double dt_acc = p.legacy_accel_form ? acc / p.a_max : std::sqrt(acc / p.a_max);
  return std::max(vel / p.v_max, dt_acc);
}

CostBreakdown evaluate_cost(const std::vector<Vec2>& q, const std::vector<Vec2>& wp,
                            const TrajOptWeights& w, double dt) {
  CostBreakdown c;
  const int n = static_cast<int>(q.size());
  const int nx = n - 4;
  for (int j = 2; j <= nx - 1; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Vec2 knot = kKnotWeights[0] * q[k] + kKnotWeights[1] * q[k + 1] + kKnotWeights[2] * q[k + 2];
    c.fit += w.fit * (knot - wp[k - 1]).squaredNorm();
  }
  for (int i = 0; i + 3 < n; ++i) {
    Vec2 j3 = Vec2::Zero();
    for (int l = 0; l < 4; ++l)
      j3 += kJerkWeights[static_cast<std::size_t>(l)] * q[static_cast<std::size_t>(i + l)];
    c.jerk += w.jerk * j3.squaredNorm();
  }
  c.time = w.time * (n - 6) * dt;
  return c;
}

InitialGuess build(const TrajOptProblem& problem) {
  problem.validate();
  const std::vector<Vec2> wp = padded_waypoints(problem.waypoints);
  InitialGuess g;
  g.control_points = tripled(wp);
  const int n = static_cast<int>(g.control_points.size());
  if (n != static_cast<int>(wp.size()) + 4)
    throw std::logic_error("control point count must equal waypoints + 4");

  double longest = 0.0;
  for (std::size_t i = 1; i < wp.size(); ++i) longest = std::max(longest, (wp[i] - wp[i - 1]).norm());
  g.dt = std::max({2.0 * longest / problem.v_max, 1.5 * min_feasible_dt(g.control_points, problem),
                   problem.dt_min});
  if (g.dt > problem.dt_max)
    throw Infeasible("initial knot spacing exceeds dt_max; waypoints too far apart");

  for (int i = 0; i + 3 < n; ++i) {
    const auto hull = window(g.control_points, i);
    for (std::size_t j = 0; j < problem.obstacles.size(); ++j) {
      auto sep = find_separator(hull, problem.obstacles[j]);
      if (!sep || 2.0 * sep->margin <= required_gap(problem)) throw InfeasibleSeed(i, static_cast<int>(j));
      g.lines.push_back({i, static_cast<int>(j), sep->h, sep->d, sep->margin});
    }
  }
  return g;
}

InitialGuess straight_line_guess(const TrajOptProblem& problem) {
  problem.validate();
  const std::vector<Vec2> wp = padded_waypoints(problem.waypoints);
  const std::size_t nx = wp.size();
  std::vector<Vec2> line;
  for (std::size_t i = 0; i < nx; ++i)
    line.push_back(wp.front() + (wp.back() - wp.front()) * (static_cast<double>(i) / (nx - 1)));
  InitialGuess g;
  g.control_points = tripled(line);
  const double leg = (line[1] - line[0]).norm();
  g.dt = std::max({2.0 * leg / problem.v_max, 1.5 * min_feasible_dt(g.control_points, problem),
                   problem.dt_min});
  g.lines.clear();
  return g;
}

bool ResidualReport::ok(const TrajOptProblem& p) const {
  return velocity <= p.residual_tol && acceleration <= p.residual_tol &&
         dense_max_speed <= p.v_max * (1.0 + 1e-6) && dense_max_accel <= p.a_max * (1.0 + 1e-6) &&
         separation_failures == 0 && endpoint_error <= 1e-9 && endpoint_rate <= 1e-9;
}

ResidualReport validate(const SplineTrajectory& traj, const TrajOptProblem& p,
                        int samples_per_segment) {
  ResidualReport r;
  const auto& q = traj.control_points();
  const double dt = traj.dt();
  r.velocity = -std::numeric_limits<double>::infinity();
  r.acceleration = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < q.size(); ++k)
    r.velocity = std::max(r.velocity, (q[k] - q[k - 1]).norm() - p.v_max * dt);
  for (std::size_t k = 2; k < q.size(); ++k)
    r.acceleration = std::max(r.acceleration, second_difference_norm(q, k, p.legacy_accel_form) - accel_bound(p, dt));

  const int segs = traj.segment_count();
  for (int i = 0; i < segs; ++i) {
    for (int s = 0; s <= samples_per_segment; ++s) {
      if (s == samples_per_segment && i + 1 < segs) break;
      const double t = std::min(traj.duration(), (i + static_cast<double>(s) / samples_per_segment) * dt);
      const SplineDerivatives d = traj.eval_derivatives(t);
      r.dense_max_speed = std::max(r.dense_max_speed, d.velocity.norm());
      r.dense_max_accel = std::max(r.dense_max_accel, d.acceleration.norm());
    }
  }

  r.min_separation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < segs; ++i) {
    const auto hull = traj.segment_hull(i);
    for (std::size_t j = 0; j < p.obstacles.size(); ++j) {
      const ConvexPolygon& poly = p.obstacles[j];
      r.min_separation = std::min(r.min_separation, signed_gap(hull, poly));
      const auto sep = find_separator(hull, poly);
      if (!sep || !verify_separation(hull, poly, sep->h, sep->d, p.sep_margin)) {
        ++r.separation_failures;
        r.failing_pairs.emplace_back(i, static_cast<int>(j));
      }
    }
  }
  if (p.obstacles.empty()) r.min_separation = 0.0;

  if (!p.waypoints.empty()) {
    r.endpoint_error = std::max((traj.eval(0.0) - p.waypoints.front()).norm(),
                                (traj.eval(traj.duration()) - p.waypoints.back()).norm());
  }
  for (double t : {0.0, traj.duration()}) {
    const SplineDerivatives d = traj.eval_derivatives(t);
    r.endpoint_rate = std::max({r.endpoint_rate, d.velocity.norm(), d.acceleration.norm()});
  }
  return r;
}

TrajOptSolution solve(const TrajOptProblem& problem, const InitialGuess& guess) {
  problem.validate();
  const std::vector<Vec2> wp = padded_waypoints(problem.waypoints);
  const int n = static_cast<int>(guess.control_points.size());
  if (n != static_cast<int>(wp.size()) + 4)
    throw std::invalid_argument("guess control point count does not match the waypoints");

  ControlPointStep step_b(problem, wp, n);
  TrajOptSolution sol;
  std::vector<Vec2> q = guess.control_points;
  double dt = guess.dt;
  if (!(dt >= min_feasible_dt(q, problem)))
    throw Infeasible("initial guess violates the speed or acceleration bound");
  double current = merit(q, dt, problem, wp);
  sol.merit_history.push_back(current);

  bool converged = false;
  int outer = 0;
  for (; outer < problem.max_outer; ++outer) {
    const std::vector<Pair> pairs = separating_step(q, problem);

    std::vector<Vec2> q_b = step_b.solve(q, dt, pairs, sol.newton_iterations);
    double best_merit = merit(q_b, dt, problem, wp);
    std::vector<Vec2> best_q = q_b;
    double best_dt = dt;

    const double lo = std::max(problem.dt_min, min_feasible_dt(q_b, problem) * (1.0 + 1e-3));
    const double hi = problem.dt_max;
    if (lo < hi) {
      auto probe = [&](double t) {
        std::vector<Vec2> qt = step_b.solve(q_b, t, pairs, sol.newton_iterations);
        const double m = merit(qt, t, problem, wp);
        if (m < best_merit) {
          best_merit = m;
          best_q = std::move(qt);
          best_dt = t;
        }
        return m;
      };
      const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = lo;
      double b = std::min(hi, std::max(lo * 4.0, dt * 2.0));
      double x1 = b - ratio * (b - a);
      double x2 = a + ratio * (b - a);
      double f1 = probe(x1);
      double f2 = probe(x2);
      for (int it = 0; it < problem.golden_iters; ++it) {
        if (f1 <= f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - ratio * (b - a);
          f1 = probe(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + ratio * (b - a);
          f2 = probe(x2);
        }
      }
      probe(lo);
    }

    if (!(best_merit < current)) {
      converged = true;
      break;
    }
    const double decrease = (current - best_merit) / std::max(1.0, std::abs(current));
    if (best_merit > sol.merit_history.back()) sol.monotone = false;
    q = std::move(best_q);
    dt = best_dt;
    current = best_merit;
    sol.merit_history.push_back(current);
    if (decrease < problem.tol_outer) {
      converged = true;
      ++outer;
      break;
    }
  }
  sol.outer_iterations = outer;

  for (std::size_t i = 1; i < sol.merit_history.size(); ++i)
    if (sol.merit_history[i] > sol.merit_history[i - 1]) sol.monotone = false;

  sol.trajectory = SplineTrajectory(q, dt);
  sol.lines = final_lines(q, problem);
  sol.cost = evaluate_cost(q, wp, problem.weights, dt);
  sol.residuals = validate(sol.trajectory, problem);
  if (!sol.residuals.ok(problem)) {
    sol.status = TrajOptStatus::Infeasible;
  } else {
    sol.status = converged ? TrajOptStatus::Converged : TrajOptStatus::MaxIters;
  }
  return sol;
}

TrajOptSolution solve(const TrajOptProblem& problem) { return solve(problem, build(problem)); }

std::string to_json(const TrajOptSolution& s) {
  nlohmann::json j;
  j["status"] = status_name(s.status);
  j["trajectory"] = nlohmann::json::parse(to_json(s.trajectory));
  j["cost"] = {{"fit", s.cost.fit}, {"jerk", s.cost.jerk}, {"time", s.cost.time},
               {"total", s.cost.total()}};
  j["outer_iterations"] = s.outer_iterations;
  j["newton_iterations"] = s.newton_iterations;
  j["monotone"] = s.monotone;
  j["merit_history"] = s.merit_history;
  auto& lines = j["separating_lines"] = nlohmann::json::array();
  for (const SeparatingLine& l : s.lines)
    lines.push_back({{"segment", l.segment}, {"obstacle", l.obstacle},
                     {"h", {l.h.x(), l.h.y()}}, {"d", l.d}, {"margin", l.margin}});
  const ResidualReport& r = s.residuals;
  nlohmann::json failing = nlohmann::json::array();
  for (const auto& [seg, obs] : r.failing_pairs) failing.push_back({seg, obs});
  j["residuals"] = {{"velocity", r.velocity},
                    {"acceleration", r.acceleration},
                    {"dense_max_speed", r.dense_max_speed},
                    {"dense_max_accel", r.dense_max_accel},
                    {"min_separation", r.min_separation},
                    {"separation_failures", r.separation_failures},
                    {"failing_pairs", failing},
                    {"endpoint_error", r.endpoint_error},
                    {"endpoint_rate", r.endpoint_rate}};
  return j.dump(2);
}

}  // namespace vesselnav
