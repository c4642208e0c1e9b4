#include "vesselnav/bspline.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "vesselnav/errors.hpp"

namespace vesselnav {

const Eigen::Matrix4d& uniform_cubic_basis() {
  static const Eigen::Matrix4d basis = [] {
    Eigen::Matrix4d m;
    m << 1, 4, 1, 0,
        -3, 0, 3, 0,
        3, -6, 3, 0,
        -1, 3, -3, 1;
    return Eigen::Matrix4d(m / 6.0);
  }();
  return basis;
}

SplineTrajectory::SplineTrajectory(std::vector<Vec2> control_points, double dt)
    : points_(std::move(control_points)), dt_(dt) {
  if (points_.size() < 8) throw std::invalid_argument("spline needs at least 8 control points");
  if (!(dt_ > 0.0) || !std::isfinite(dt_))
    throw std::invalid_argument("knot spacing must be positive");
}

SplineTrajectory SplineTrajectory::from_waypoints(const std::vector<Vec2>& waypoints, double dt) {
  if (waypoints.size() < 2) throw std::invalid_argument("need at least two waypoints");
  std::vector<Vec2> pts;
  pts.reserve(waypoints.size() + 4);
  pts.insert(pts.end(), 2, waypoints.front());
  pts.insert(pts.end(), waypoints.begin(), waypoints.end());
  pts.insert(pts.end(), 2, waypoints.back());
  return SplineTrajectory(std::move(pts), dt);
}

std::pair<int, double> SplineTrajectory::locate(double t) const {
  if (!(t >= 0.0 && t <= duration()))
    throw OutOfDomain("spline time " + std::to_string(t) + " outside [0, " +
                      std::to_string(duration()) + "]");
  const double s = t / dt_;
  int i = static_cast<int>(std::floor(s));
  if (i >= segment_count()) i = segment_count() - 1;
  return {i, s - i};
}

namespace {

Eigen::Matrix<double, 4, 2> window(const std::vector<Vec2>& pts, int i) {
  Eigen::Matrix<double, 4, 2> q;
  for (int j = 0; j < 4; ++j) q.row(j) = pts[static_cast<std::size_t>(i + j)].transpose();
  return q;
}

}  // namespace

Vec2 SplineTrajectory::eval(double t) const {
  const auto [i, u] = locate(t);
  const Eigen::RowVector4d basis(1.0, u, u * u, u * u * u);
  return (basis * uniform_cubic_basis() * window(points_, i)).transpose();
}

SplineDerivatives SplineTrajectory::eval_derivatives(double t) const {
  const auto [i, u] = locate(t);
  // Difference form of the matrix derivatives; repeated points cancel exactly.
  const auto k = static_cast<std::size_t>(i);
  const Vec2 d0 = points_[k + 1] - points_[k];
  const Vec2 d1 = points_[k + 2] - points_[k + 1];
  const Vec2 d2 = points_[k + 3] - points_[k + 2];
  const Vec2 dd0 = d1 - d0;
  const Vec2 dd1 = d2 - d1;
  SplineDerivatives d;
  d.velocity = (0.5 * (1.0 - u) * (1.0 - u) * d0 + (0.5 + u - u * u) * d1 + 0.5 * u * u * d2) / dt_;
  d.acceleration = ((1.0 - u) * dd0 + u * dd1) / (dt_ * dt_);
  d.jerk = (dd1 - dd0) / (dt_ * dt_ * dt_);
  return d;
}

std::array<Vec2, 4> SplineTrajectory::segment_hull(int i) const {
  if (i < 0 || i >= segment_count())
    throw IndexOutOfRange("segment index " + std::to_string(i) + " outside [0, " +
                          std::to_string(segment_count() - 1) + "]");
  const auto k = static_cast<std::size_t>(i);
  return {points_[k], points_[k + 1], points_[k + 2], points_[k + 3]};
}

std::vector<Vec2> fit_knot_values(const SplineTrajectory& traj) {
  const auto& q = traj.control_points();
  std::vector<Vec2> out;
  out.reserve(q.size() - 2);
  for (std::size_t k = 0; k + 2 < q.size(); ++k)
    out.push_back(kKnotWeights[0] * q[k] + kKnotWeights[1] * q[k + 1] + kKnotWeights[2] * q[k + 2]);
  return out;
}

std::string to_json(const SplineTrajectory& traj) {
  nlohmann::json j;
  j["degree"] = SplineTrajectory::degree();
  j["dt_knot"] = traj.dt();
  j["duration"] = traj.duration();
  auto& pts = j["control_points"] = nlohmann::json::array();
  for (const Vec2& q : traj.control_points()) pts.push_back({q.x(), q.y()});
  return j.dump(2);
}

SplineTrajectory spline_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("degree", 3) != 3) throw std::invalid_argument("only cubic splines are supported");
  std::vector<Vec2> pts;
  for (const auto& p : j.at("control_points")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return SplineTrajectory(std::move(pts), j.at("dt_knot").get<double>());
}

void write_samples_csv(std::ostream& os, const SplineTrajectory& traj, int samples_per_segment) {
  os << "t,x,y,vx,vy,ax,ay\n";
  const int total = traj.segment_count() * samples_per_segment;
  const auto old_precision = os.precision(17);
  for (int s = 0; s <= total; ++s) {
    const double t = traj.duration() * s / total;
    const Vec2 p = traj.eval(t);
    const SplineDerivatives d = traj.eval_derivatives(t);
    os << t << ',' << p.x() << ',' << p.y() << ',' << d.velocity.x() << ',' << d.velocity.y()
       << ',' << d.acceleration.x() << ',' << d.acceleration.y() << '\n';
  }
  os.precision(old_precision);
}

}  // namespace vesselnav
