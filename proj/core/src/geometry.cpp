#include "vesselnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vesselnav {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 perp(const Vec2& a) { return {-a.y(), a.x()}; }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b, Vec2* closest) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const Vec2 c = a + s * ab;
  if (closest != nullptr) *closest = c;
  return (p - c).norm();
}

}  // namespace

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2& p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("convex polygon needs at least 3 vertices");
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const Vec2& c = vertices_[(i + 2) % n];
    if (!a.allFinite()) throw std::invalid_argument("polygon vertex is not finite");
    if (a == b) throw std::invalid_argument("polygon has repeated vertices");
    const Vec2 e1 = b - a;
    const Vec2 e2 = c - b;
    if (!(cross(e1, e2) > 0.0))
      throw std::invalid_argument("polygon is not strictly convex and counterclockwise");
    turning += std::atan2(cross(e1, e2), e1.dot(e2));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6)
    throw std::invalid_argument("polygon winds more than once");
}

ConvexPolygon ConvexPolygon::hull_of(std::span<const Vec2> points) {
  return ConvexPolygon(convex_hull(points));
}

double ConvexPolygon::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  return 0.5 * a;
}

double ConvexPolygon::perimeter() const {
  double p = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    p += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
  return p;
}

Vec2 ConvexPolygon::centroid() const {
  Vec2 c = Vec2::Zero();
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % vertices_.size()];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

bool ConvexPolygon::contains(const Vec2& p) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(vertices_[(i + 1) % n] - vertices_[i], p - vertices_[i]) < 0.0) return false;
  }
  return n >= 3;
}

double ConvexPolygon::distance(const Vec2& p) const {
  if (contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, segment_distance(p, vertices_[i], vertices_[(i + 1) % n], nullptr));
  return best;
}

ConvexPolygon inflate(const ConvexPolygon& poly, double rho_bar, int k_gon) {
  if (!(rho_bar > 0.0)) throw std::invalid_argument("inflation radius must be positive");
  if (k_gon < 3) throw std::invalid_argument("k_gon must be at least 3");
  // Regular k-gon with apothem rho_bar, first vertex on +x.
  const double radius = rho_bar / std::cos(std::numbers::pi / k_gon);
  std::vector<Vec2> sums;
  sums.reserve(poly.size() * static_cast<std::size_t>(k_gon));
  for (int i = 0; i < k_gon; ++i) {
    const double a = 2.0 * std::numbers::pi * i / k_gon;
    const Vec2 offset(radius * std::cos(a), radius * std::sin(a));
    for (const Vec2& v : poly.vertices()) sums.push_back(v + offset);
  }
  return ConvexPolygon(convex_hull(sums));
}

Workspace::Workspace(Bounds bounds, std::vector<ConvexPolygon> obstacles, double clearance,
                     int k_gon)
    : bounds_(bounds), obstacles_(std::move(obstacles)), clearance_(clearance), k_gon_(k_gon) {
  if (!(clearance > 0.0)) throw std::invalid_argument("workspace clearance must be positive");
  if (!(bounds.max.x() > bounds.min.x() && bounds.max.y() > bounds.min.y()))
    throw std::invalid_argument("workspace bounds are empty");
  for (const ConvexPolygon& o : obstacles_) {
    for (const Vec2& v : o.vertices()) {
      if (v.x() < bounds.min.x() || v.x() > bounds.max.x() || v.y() < bounds.min.y() ||
          v.y() > bounds.max.y())
        throw std::invalid_argument("obstacle vertex outside workspace bounds");
    }
    inflated_.push_back(inflate(o, clearance_, k_gon_));
  }
}

Workspace Workspace::with_clearance(double clearance) const {
  return Workspace(bounds_, obstacles_, clearance, k_gon_);
}

bool point_free(const Vec2& p, const Workspace& ws, bool inflated) {
  if (!ws.bounds().strictly_contains(p)) return false;
  const auto& obstacles = inflated ? ws.inflated_obstacles() : ws.obstacles();
  return std::none_of(obstacles.begin(), obstacles.end(),
                      [&](const ConvexPolygon& o) { return o.contains(p); });
}

bool segment_free(const Vec2& a, const Vec2& b, const Workspace& ws, bool inflated,
                  double resolution) {
  const double len = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
  for (int i = 0; i <= steps; ++i) {
    if (!point_free(a + (b - a) * (static_cast<double>(i) / steps), ws, inflated)) return false;
  }
  return true;
}

bool verify_separation(const Hull4& hull, const ConvexPolygon& poly, const Vec2& h, double d,
                       double margin) {
  if (!(h.norm() > 0.0)) return false;
  for (const Vec2& q : hull) {
    if (!(h.dot(q) > d + margin)) return false;
  }
  for (const Vec2& p : poly.vertices()) {
    if (!(h.dot(p) < d - margin)) return false;
  }
  return true;
}

namespace {

// Candidate separating axes for the hulls of two point sets.
void collect_axes(const std::vector<Vec2>& hull, std::vector<Vec2>& axes) {
  if (hull.size() == 2) {
    const Vec2 dir = hull[1] - hull[0];
    axes.push_back(dir);
    axes.push_back(perp(dir));
    return;
  }
  for (std::size_t i = 0; hull.size() >= 3 && i < hull.size(); ++i)
    axes.push_back(perp(hull[(i + 1) % hull.size()] - hull[i]));
}

std::pair<double, double> project(const std::vector<Vec2>& pts, const Vec2& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec2& p : pts) {
    const double s = axis.dot(p);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

bool hulls_intersect(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  std::vector<Vec2> axes;
  collect_axes(a, axes);
  collect_axes(b, axes);
  if (a.size() == 1 && b.size() == 1) return a[0] == b[0];
  if (axes.empty()) axes.push_back(b[0] - a[0]);
  for (const Vec2& axis : axes) {
    if (axis.squaredNorm() == 0.0) continue;
    const auto [alo, ahi] = project(a, axis);
    const auto [blo, bhi] = project(b, axis);
    if (ahi < blo || bhi < alo) return false;
  }
  return true;
}

// Minimum vertex-to-edge distance from hull `from` to hull `to`.
void vertex_edge_min(const std::vector<Vec2>& from, const std::vector<Vec2>& to, bool swap,
                     ClosestPair& best) {
  for (const Vec2& p : from) {
    const std::size_t edges = to.size() == 1 ? 1 : (to.size() == 2 ? 1 : to.size());
    for (std::size_t i = 0; i < edges; ++i) {
      Vec2 c;
      const Vec2& s0 = to[i];
      const Vec2& s1 = to.size() == 1 ? to[0] : to[(i + 1) % to.size()];
      const double dist = segment_distance(p, s0, s1, &c);
      if (dist < best.distance) {
        best.distance = dist;
        best.a = swap ? c : p;
        best.b = swap ? p : c;
      }
    }
  }
}

}  // namespace

std::optional<ClosestPair> closest_pair(std::span<const Vec2> a, std::span<const Vec2> b) {
  const std::vector<Vec2> ha = convex_hull(a);
  const std::vector<Vec2> hb = convex_hull(b);
  if (ha.empty() || hb.empty()) return std::nullopt;
  if (hulls_intersect(ha, hb)) return std::nullopt;
  ClosestPair best;
  best.distance = std::numeric_limits<double>::infinity();
  vertex_edge_min(ha, hb, false, best);
  vertex_edge_min(hb, ha, true, best);
  if (!(best.distance > 0.0)) return std::nullopt;
  return best;
}

std::optional<Separator> find_separator(std::span<const Vec2> points, const ConvexPolygon& poly) {
  const auto& verts = poly.vertices();
  const auto pair = closest_pair(points, std::span<const Vec2>(verts.data(), verts.size()));
  if (!pair) return std::nullopt;
  Separator s;
  s.h = (pair->a - pair->b) / pair->distance;
  s.d = s.h.dot(0.5 * (pair->a + pair->b));
  s.margin = 0.5 * pair->distance;
  return s;
}

Separator penetration_plane(std::span<const Vec2> points, const ConvexPolygon& poly,
                            double margin) {
  const std::vector<Vec2> ha = convex_hull(points);
  const std::vector<Vec2>& hb = poly.vertices();
  std::vector<Vec2> axes;
  collect_axes(ha, axes);
  collect_axes(hb, axes);
  // Fall back to the centroid direction for a point hull.
  Vec2 centre = Vec2::Zero();
  for (const Vec2& p : ha) centre += p;
  centre /= static_cast<double>(ha.size());
  axes.push_back(centre - poly.centroid());

  Separator best;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (Vec2 axis : axes) {
    const double n = axis.norm();
    if (!(n > 0.0)) continue;
    axis /= n;
    for (const Vec2 dir : {axis, Vec2(-axis)}) {
      const double q_lo = project(ha, dir).first;
      const double p_hi = project(hb, dir).second;
      if (q_lo - p_hi > best_gap) {
        best_gap = q_lo - p_hi;
        best.h = dir;
        best.d = p_hi + 2.0 * margin;
        best.margin = 0.5 * best_gap;
      }
    }
  }
  return best;
}

}  // namespace vesselnav
