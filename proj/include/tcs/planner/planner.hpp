#pragma once

#include <optional>
#include <vector>

#include "tcs/core/types.hpp"
#include "tcs/gridmap/grid_map.hpp"

namespace tcs::planner {

using gridmap::CellIndex;
using gridmap::GridMap;

struct PlanWeights {
  double w_traversability{1.0};   // W_T
  double w_elevation{0.5};        // W_E
  double w_unknown{1000.0};       // W_NaN
  double eps_traversability{0.01};  // epsilon_T

  void validate() const;
};

/// 8-connected grid path; total_cost is the sum of per-cell costs over every
/// cell in the sequence, start included.
struct Path {
  std::vector<CellIndex> cells;
  std::vector<Vec2> waypoints;
  double total_cost{0.0};

  bool empty() const { return cells.empty(); }
};

struct Pose2 {
  Vec2 position;
  double heading{0.0};
};

struct PursuitParams {
  double lookahead{0.35};        // m
  double speed{0.3};             // m/s
  double max_angular_rate{1.5};  // rad/s
};

/// Per-cell planning cost: W_T/(T_i + eps) + W_E * E_i when the cell has both
/// traversability and elevation, W_NaN otherwise. E_i is the cell elevation
/// relative to the lowest valid cell of the elevation layer (the inpainted
/// layer when present).
double cell_cost(const GridMap& map, CellIndex idx, const PlanWeights& weights);

/// Pre-resolved cost field so A* avoids per-call layer lookups; cell_cost()
/// evaluates through one of these.
class CostEvaluator {
 public:
  CostEvaluator(const GridMap& map, const PlanWeights& weights);

  double at(std::size_t linear) const {
    const double t = (*traversability_)[linear];
    const double e = (*elevation_)[linear];
    if (std::isnan(t) || std::isnan(e)) return weights_.w_unknown;
    return weights_.w_traversability / (t + weights_.eps_traversability) +
           weights_.w_elevation * (e - datum_);
  }
  double min_cell_cost() const { return min_cell_cost_; }
  double elevation_datum() const { return datum_; }

 private:
  const std::vector<double>* traversability_;
  const std::vector<double>* elevation_;
  PlanWeights weights_;
  double datum_{0.0};
  double min_cell_cost_{0.0};
};

/// Deterministic A* on the 8-connected grid, minimizing the sum of per-cell
/// costs. Cost ties prefer fewer cells, then lower parent indices. Returns
/// no-path when the start cell has no valid layers.
std::optional<Path> astar_plan(const GridMap& map, Vec2 start, Vec2 goal,
                               const PlanWeights& weights);

struct PursuitCommand {
  double linear{0.0};
  double angular{0.0};
  bool done{false};
};

/// One pure-pursuit tracking step: steer toward the first path point at
/// lookahead distance ahead of the nearest path point; done within
/// lookahead/2 of the final waypoint.
PursuitCommand pure_pursuit_step(const Path& path, const Pose2& pose, const PursuitParams& params);

struct UavGotoParams {
  double speed{0.5};            // m/s horizontal
  double climb_rate{1.0};       // m/s vertical
  double clearance{1.5};        // m above highest known terrain
  double corridor_length{2.0};  // m look-ahead along the motion direction
  double corridor_width{0.6};   // m
};

/// Straight-line horizontal step toward the target with the altitude held at
/// (max known elevation within the look-ahead corridor) + clearance. Unknown
/// cells in the corridor fall back to the highest elevation known anywhere in
/// the map.
Vec3 uav_goto_step(const GridMap& map, const Vec3& uav_position, Vec2 target,
                   const UavGotoParams& params, double dt);

/// CSV export (index, x, y, cell_cost per waypoint).
void write_path_csv(const Path& path, const GridMap& map, const PlanWeights& weights,
                    const std::string& filepath);

}  // namespace tcs::planner
