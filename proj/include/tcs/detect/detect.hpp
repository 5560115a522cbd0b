#pragma once

#include <optional>

#include "tcs/core/exec.hpp"
#include "tcs/planner/planner.hpp"

namespace tcs::detect {

using gridmap::CellIndex;
using gridmap::GridMap;

struct CliffParams {
  double cost_threshold{600.0};
  double perturb_radius{1.0};  // m
  int perturb_count{16};

  void validate() const;
};

struct CliffResult {
  bool cliff{false};
  Vec2 best_goal;
  double best_cost{0.0};
  planner::Path best_path;
};

/// Plan to the goal and to perturbed goals on a deterministic Archimedean
/// spiral within the perturbation radius; keep the cheapest. cliff is set
/// when even the cheapest plan exceeds the cost threshold.
/// Throws std::invalid_argument when the start cell has no valid layers.
CliffResult detect_cliff(const GridMap& map, Vec2 start, Vec2 goal,
                         const planner::PlanWeights& weights, const CliffParams& params);

struct AnchorCandidate {
  CellIndex index;
  Vec2 position;
  double peakness{0.0};
  double sigma_xx{0.0};   // m^3
  double sigma_yy{0.0};   // m^3
  double sigma_xy{0.0};   // m^3
  double sigma_major{0.0};  // larger eigenvalue of the moment matrix
  double neighborhood_radius{0.0};
};

/// Floor on the larger eigenvalue before inversion; a zero-variance spike
/// otherwise divides by zero.
inline constexpr double kSigmaFloor = 1e-6;
/// Neighborhoods with total relative elevation below this are treated as
/// flat (sensor-noise bumps would otherwise score unbounded peakness).
inline constexpr double kMinNeighborhoodMass = 0.05;  // m
inline constexpr int kMinNeighborhoodCells = 5;

/// Height-weighted second moments of the neighborhood around a cell, with
/// relative elevation measured from the lowest valid cell in the disc, and
/// peakness as the inverse of the larger eigenvalue. No eligibility gating.
std::optional<AnchorCandidate> anchor_moments(const GridMap& map, CellIndex center, double radius);

/// Gated peakness: the cell must be valid, strictly the highest valid cell
/// within the radius, with at least kMinNeighborhoodCells valid neighbors and
/// neighborhood mass above the floor.
std::optional<AnchorCandidate> peakness(const GridMap& map, CellIndex center, double radius);

/// Best anchor candidate above the peakness threshold within a disc region;
/// ties prefer the lower cell index.
std::optional<AnchorCandidate> detect_anchor(const GridMap& map, Vec2 region_center,
                                             double region_radius, double peakness_threshold,
                                             double neighborhood_radius,
                                             Exec exec = Exec::kParallel);

struct LandingParams {
  double search_radius{2.0};       // m
  double max_elevation_diff{0.05};  // m
  double max_slope{0.2};           // rad
  double min_traversability{0.8};
  double footprint_radius{0.2};    // m

  void validate() const;
};

/// Nearest cell (by center distance, then row, then col) whose footprint
/// disc is fully known, level, gently sloped and traversable.
std::optional<Vec2> find_landing_pose(const GridMap& map, Vec2 uav_position,
                                      const LandingParams& params);

}  // namespace tcs::detect
