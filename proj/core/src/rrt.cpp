#include "vesselnav/rrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "vesselnav/errors.hpp"
#include "vesselnav/rng.hpp"

namespace vesselnav {

double effective_step(const Workspace& ws, const RrtParams& params) {
  return params.step_size > 0.0 ? params.step_size : ws.bounds().diagonal() / 50.0;
}

namespace {

struct Node {
  Vec2 p;
  int parent;
};

// Counter-based uniform stream so the path does not depend on the standard
// library's distribution implementations.
class UnitStream {
 public:
  explicit UnitStream(std::uint64_t seed) : seed_(seed) {}
  double next() { return unit_interval(derive_seed(seed_, counter_++)); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::vector<Vec2> shortcut_path(const std::vector<Vec2>& path, const Workspace& ws,
                                double resolution) {
  std::vector<Vec2> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !segment_free(path[i], path[j], ws, true, resolution)) --j;
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

// Splits every leg into equal pieces no longer than step.
std::vector<Vec2> subdivide(const std::vector<Vec2>& path, double step) {
  std::vector<Vec2> out{path.front()};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec2 a = path[i - 1];
    const Vec2 b = path[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step - 1e-12)));
    for (int k = 1; k < pieces; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
    out.push_back(b);
  }
  return out;
}

}  // namespace

RrtPath plan(const Workspace& ws, const Vec2& start, const Vec2& goal, const RrtParams& params) {
  if (!point_free(start, ws, true)) throw StartOrGoalInCollision("start lies outside the inflated free space");
  if (!point_free(goal, ws, true)) throw StartOrGoalInCollision("goal lies outside the inflated free space");
  if (!(params.goal_bias >= 0.0 && params.goal_bias <= 1.0))
    throw std::invalid_argument("goal_bias must lie in [0, 1]");

  const double step = effective_step(ws, params);
  const double goal_radius = params.goal_radius > 0.0 ? params.goal_radius : step;
  const double resolution = step / 10.0;
  const Bounds& b = ws.bounds();

  std::vector<Node> tree{{start, -1}};
  UnitStream rng(params.seed);
  int reached = -1;
  int iter = 0;

  if ((goal - start).norm() <= goal_radius && segment_free(start, goal, ws, true, resolution))
    reached = 0;

  while (reached < 0) {
    if (iter >= params.max_iters)
      throw PlanTimeout("RRT found no path within " + std::to_string(params.max_iters) + " iterations");
    ++iter;
    Vec2 sample = goal;
    if (rng.next() >= params.goal_bias) {
      sample = Vec2(b.min.x() + rng.next() * (b.max.x() - b.min.x()),
                    b.min.y() + rng.next() * (b.max.y() - b.min.y()));
    }
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tree.size(); ++k) {
      const double d2 = (tree[k].p - sample).squaredNorm();
      if (d2 < best) {
        best = d2;
        nearest = static_cast<int>(k);
      }
    }
    const Vec2 from = tree[static_cast<std::size_t>(nearest)].p;
    const double dist = std::sqrt(best);
    if (dist <= 0.0) continue;
    const Vec2 to = dist <= step ? sample : Vec2(from + (sample - from) * (step / dist));
    if (!point_free(to, ws, true) || !segment_free(from, to, ws, true, resolution)) continue;
    tree.push_back({to, nearest});
    const int added = static_cast<int>(tree.size()) - 1;
    if ((goal - to).norm() <= goal_radius && segment_free(to, goal, ws, true, resolution))
      reached = added;
  }

  std::vector<Vec2> path;
  for (int k = reached; k >= 0; k = tree[static_cast<std::size_t>(k)].parent)
    path.push_back(tree[static_cast<std::size_t>(k)].p);
  std::reverse(path.begin(), path.end());
  if (path.back() != goal) path.push_back(goal);
  if (path.size() < 2) path.push_back(goal);

  if (params.shortcut) path = shortcut_path(path, ws, resolution);
  path = subdivide(path, step);

  RrtPath out;
  out.waypoints = std::move(path);
  out.iterations = iter;
  out.tree_size = static_cast<int>(tree.size());
  return out;
}

void write_path_csv(std::ostream& os, const RrtPath& path) {
  const auto old_precision = os.precision(17);
  os << "x,y\n";
  for (const Vec2& p : path.waypoints) os << p.x() << ',' << p.y() << '\n';
  os.precision(old_precision);
}

}  // namespace vesselnav
