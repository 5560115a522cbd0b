#include "tcs/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tcs::planner {

using gridmap::is_valid;
namespace layers = gridmap::layers;

void PlanWeights::validate() const {
  if (w_traversability < 0.0 || w_elevation < 0.0 || w_unknown < 0.0) {
    throw std::invalid_argument("plan weights must be >= 0");
  }
  if (eps_traversability <= 0.0) {
    throw std::invalid_argument("traversability epsilon must be > 0");
  }
}

CostEvaluator::CostEvaluator(const GridMap& map, const PlanWeights& weights) : weights_(weights) {
  traversability_ = &map.layer(layers::kTraversability);
  elevation_ = &gridmap::elevation_for_queries(map);

  double lowest = std::numeric_limits<double>::infinity();
  for (const double e : *elevation_) {
    if (is_valid(e) && e < lowest) lowest = e;
  }
  datum_ = std::isfinite(lowest) ? lowest : 0.0;

  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traversability_->size(); ++i) {
    min_cost = std::min(min_cost, at(i));
  }
  min_cell_cost_ = std::isfinite(min_cost) ? min_cost : weights_.w_unknown;
}

double cell_cost(const GridMap& map, CellIndex idx, const PlanWeights& weights) {
  if (!map.in_bounds(idx)) throw std::out_of_range("cell index outside grid map");
  return CostEvaluator(map, weights).at(map.linear(idx));
}

namespace {

struct NodeState {
  double g{std::numeric_limits<double>::infinity()};
  int steps{std::numeric_limits<int>::max()};
  int parent{-1};
};

struct QueueEntry {
  double f;
  int steps;
  int cell;

  bool operator>(const QueueEntry& o) const {
    if (f != o.f) return f > o.f;
    if (steps != o.steps) return steps > o.steps;
    return cell > o.cell;
  }
};

}  // namespace

std::optional<Path> astar_plan(const GridMap& map, Vec2 start, Vec2 goal,
                               const PlanWeights& weights) {
  weights.validate();
  const CellIndex start_idx = map.position_to_index(start.x, start.y);
  const CellIndex goal_idx = map.position_to_index(goal.x, goal.y);
  const int cols = map.cols();
  const int rows = map.rows();

  const CostEvaluator cost(map, weights);

  // A start cell with no valid layers yields no plan.
  {
    const auto& trav = map.layer(layers::kTraversability);
    const auto& elev = gridmap::elevation_for_queries(map);
    const std::size_t s = map.linear(start_idx);
    if (std::isnan(trav[s]) || std::isnan(elev[s])) return std::nullopt;
  }

  // Admissible, consistent heuristic: at least Chebyshev(n, goal) more cells
  // must be entered, each costing at least the cheapest cell on the map.
  const double h_unit = std::max(0.0, cost.min_cell_cost());
  auto heuristic = [&](int cell) {
    const int r = cell / cols, c = cell % cols;
    const int dr = std::abs(r - goal_idx.row), dc = std::abs(c - goal_idx.col);
    return h_unit * std::max(dr, dc);
  };

  std::vector<NodeState> nodes(map.cell_count());
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

  const int start_cell = static_cast<int>(map.linear(start_idx));
  const int goal_cell = static_cast<int>(map.linear(goal_idx));
  nodes[start_cell] = {cost.at(start_cell), 1, -1};
  open.push({nodes[start_cell].g + heuristic(start_cell), 1, start_cell});

  static constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    const NodeState& state = nodes[top.cell];
    if (top.steps != state.steps || top.f != state.g + heuristic(top.cell)) continue;  // stale
    if (top.cell == goal_cell) break;

    const int r = top.cell / cols, c = top.cell % cols;
    for (int k = 0; k < 8; ++k) {
      const int rr = r + kDr[k], cc = c + kDc[k];
      if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
      const int next = rr * cols + cc;
      const double g_next = state.g + cost.at(next);
      const int steps_next = state.steps + 1;
      NodeState& cand = nodes[next];
      const bool key_improved =
          g_next < cand.g || (g_next == cand.g && steps_next < cand.steps);
      if (key_improved) {
        cand = {g_next, steps_next, top.cell};
        open.push({g_next + heuristic(next), steps_next, next});
      } else if (g_next == cand.g && steps_next == cand.steps && top.cell < cand.parent) {
        cand.parent = top.cell;  // deterministic tie-break, no re-expansion needed
      }
    }
  }

  if (!std::isfinite(nodes[goal_cell].g)) return std::nullopt;

  Path path;
  path.total_cost = nodes[goal_cell].g;
  for (int cell = goal_cell; cell != -1; cell = nodes[cell].parent) {
    path.cells.push_back({cell / cols, cell % cols});
  }
  std::reverse(path.cells.begin(), path.cells.end());
  path.waypoints.reserve(path.cells.size());
  for (const auto idx : path.cells) path.waypoints.push_back(map.index_to_position(idx));
  return path;
}

PursuitCommand pure_pursuit_step(const Path& path, const Pose2& pose,
                                 const PursuitParams& params) {
  if (path.waypoints.empty()) return {0.0, 0.0, true};

  const Vec2& last = path.waypoints.back();
  if ((last - pose.position).norm() < 0.5 * params.lookahead) {
    return {0.0, 0.0, true};
  }

  std::size_t nearest = 0;
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const double d = (path.waypoints[i] - pose.position).norm();
    if (d < nearest_dist) {
      nearest_dist = d;
      nearest = i;
    }
  }

  std::size_t target = path.waypoints.size() - 1;
  for (std::size_t i = nearest; i < path.waypoints.size(); ++i) {
    if ((path.waypoints[i] - pose.position).norm() >= params.lookahead) {
      target = i;
      break;
    }
  }

  const Vec2 to_target = path.waypoints[target] - pose.position;
  const double alpha = wrap_angle(std::atan2(to_target.y, to_target.x) - pose.heading);
  const double omega_raw = 2.0 * params.speed * std::sin(alpha) / params.lookahead;
  const double omega = std::clamp(omega_raw, -params.max_angular_rate, params.max_angular_rate);
  return {params.speed, omega, false};
}

Vec3 uav_goto_step(const GridMap& map, const Vec3& uav_position, Vec2 target,
                   const UavGotoParams& params, double dt) {
  const Vec2 pos_xy = uav_position.xy();
  const Vec2 to_target = target - pos_xy;
  const double dist = to_target.norm();
  const Vec2 dir = dist > 1e-12 ? to_target * (1.0 / dist) : Vec2{1.0, 0.0};

  // Corridor scan: highest known cell ahead; unknown cells are stood in for
  // by the highest elevation known anywhere.
  const auto& elevation = gridmap::elevation_for_queries(map);
  double map_known_max = -std::numeric_limits<double>::infinity();
  for (const double e : elevation) {
    if (is_valid(e) && e > map_known_max) map_known_max = e;
  }

  const double res = map.resolution();
  const double ahead = std::min(params.corridor_length, std::max(dist, res));
  double corridor_max = -std::numeric_limits<double>::infinity();
  bool has_unknown = false;
  const Vec2 lateral{-dir.y, dir.x};
  const int n_along = std::max(1, static_cast<int>(std::ceil(ahead / (0.5 * res))));
  const int n_across = std::max(1, static_cast<int>(std::ceil(params.corridor_width / (0.5 * res))));
  for (int i = 0; i <= n_along; ++i) {
    const double s = ahead * i / n_along;
    for (int j = 0; j <= n_across; ++j) {
      const double w = params.corridor_width * (static_cast<double>(j) / n_across - 0.5);
      const Vec2 p = pos_xy + dir * s + lateral * w;
      if (!map.contains(p.x, p.y)) continue;
      const double e = elevation[map.linear(map.position_to_index(p.x, p.y))];
      if (is_valid(e)) {
        corridor_max = std::max(corridor_max, e);
      } else {
        has_unknown = true;
      }
    }
  }
  if (has_unknown && std::isfinite(map_known_max)) {
    corridor_max = std::max(corridor_max, map_known_max);
  }

  double target_altitude = uav_position.z;
  if (std::isfinite(corridor_max)) {
    target_altitude = corridor_max + params.clearance;
  }

  Vec3 next = uav_position;
  const double step = std::min(params.speed * dt, dist);
  next.x += dir.x * step;
  next.y += dir.y * step;
  const double dz = target_altitude - uav_position.z;
  next.z += std::clamp(dz, -params.climb_rate * dt, params.climb_rate * dt);
  return next;
}

void write_path_csv(const Path& path, const GridMap& map, const PlanWeights& weights,
                    const std::string& filepath) {
  std::ofstream os(filepath);
  if (!os) throw std::runtime_error("cannot open for writing: " + filepath);
  os << "tick,x,y,cost\n";
  const CostEvaluator cost(map, weights);
  char buf[128];
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    const Vec2 p = path.waypoints[i];
    const double c = cost.at(map.linear(path.cells[i]));
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, p.x, p.y, c);
    os << buf;
  }
}

}  // namespace tcs::planner
