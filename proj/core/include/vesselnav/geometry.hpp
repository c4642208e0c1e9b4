#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vesselnav/vessel_dynamics.hpp"

namespace vesselnav {

/// Strictly convex polygon with counterclockwise vertices.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Throws std::invalid_argument unless the vertices form a strictly convex
  /// counterclockwise polygon with at least three distinct vertices.
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  /// Builds the convex hull of an arbitrary point set (must be non-degenerate).
  static ConvexPolygon hull_of(std::span<const Vec2> points);

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  double area() const;
  double perimeter() const;
  Vec2 centroid() const;
  /// Closed-set membership: boundary points count as inside.
  bool contains(const Vec2& p) const;
  /// Euclidean distance from p to the polygon (0 when inside).
  double distance(const Vec2& p) const;

 private:
  std::vector<Vec2> vertices_;
};

/// Counterclockwise convex hull (Andrew's monotone chain). Collinear points
/// are dropped; degenerate inputs yield 1 or 2 points.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

/// Outer approximation of poly (+) disk(rho_bar): the Minkowski sum with a
/// regular k_gon whose inscribed circle has radius rho_bar.
ConvexPolygon inflate(const ConvexPolygon& poly, double rho_bar, int k_gon);

struct Bounds {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();

  bool strictly_contains(const Vec2& p) const {
    return p.x() > min.x() && p.x() < max.x() && p.y() > min.y() && p.y() < max.y();
  }
  double diagonal() const { return (max - min).norm(); }
};

/// Planar workspace with convex obstacles and a clearance radius.
class Workspace {
 public:
  Workspace() = default;
  Workspace(Bounds bounds, std::vector<ConvexPolygon> obstacles, double clearance,
            int k_gon = 16);

  const Bounds& bounds() const noexcept { return bounds_; }
  const std::vector<ConvexPolygon>& obstacles() const noexcept { return obstacles_; }
  const std::vector<ConvexPolygon>& inflated_obstacles() const noexcept { return inflated_; }
  double clearance() const noexcept { return clearance_; }
  int k_gon() const noexcept { return k_gon_; }

  /// Same obstacles, different clearance.
  Workspace with_clearance(double clearance) const;

 private:
  Bounds bounds_;
  std::vector<ConvexPolygon> obstacles_;
  std::vector<ConvexPolygon> inflated_;
  double clearance_ = 1.0;
  int k_gon_ = 16;
};

/// True iff p lies strictly inside the bounds and strictly outside every
/// obstacle (inflated ones when `inflated` is set).
bool point_free(const Vec2& p, const Workspace& ws, bool inflated);

/// Sub-sampled segment check at the given resolution (both endpoints included).
bool segment_free(const Vec2& a, const Vec2& b, const Workspace& ws, bool inflated,
                  double resolution);

using Hull4 = std::array<Vec2, 4>;

/// Line h^T x = d. Points with h^T x > d are on the trajectory side.
struct Separator {
  Vec2 h = Vec2::UnitX();
  double d = 0.0;
  /// Half the distance between the two sets along h (|h| = 1).
  double margin = 0.0;
};

/// h^T q > d + margin for all hull points and h^T p < d - margin for all vertices.
bool verify_separation(const Hull4& hull, const ConvexPolygon& poly, const Vec2& h, double d,
                       double margin);

/// Maximum-margin separating line between conv(hull) and poly, or nullopt when
/// the two convex sets intersect (touching counts as intersecting).
std::optional<Separator> find_separator(std::span<const Vec2> points, const ConvexPolygon& poly);

inline std::optional<Separator> find_separator(const Hull4& hull, const ConvexPolygon& poly) {
  return find_separator(std::span<const Vec2>(hull.data(), hull.size()), poly);
}

/// Closest points between two convex point sets' hulls; nullopt if they intersect.
struct ClosestPair {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  double distance = 0.0;
};
std::optional<ClosestPair> closest_pair(std::span<const Vec2> a, std::span<const Vec2> b);

/// Best-effort line for intersecting sets: the separating-axis direction with
/// the smallest overlap, pointing from poly towards the points. `d` is placed
/// just beyond the polygon so the polygon side holds with `margin`.
Separator penetration_plane(std::span<const Vec2> points, const ConvexPolygon& poly,
                            double margin);

}  // namespace vesselnav
