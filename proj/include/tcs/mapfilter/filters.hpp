#pragma once

#include "tcs/core/exec.hpp"
#include "tcs/gridmap/grid_map.hpp"

namespace tcs::mapfilter {

using gridmap::GridMap;

struct FilterParams {
  double inpaint_radius{0.15};      // m
  double smooth_radius{0.1};        // m
  double slope_divisor{0.6};        // rad
  double roughness_divisor{0.1};    // m
  double min_filter_radius{0.3};    // m

  void validate() const;
};

struct FilterStats {
  std::size_t inpainted_cells{0};
  bool empty_input{false};
};

/// Fill absent cells whose nearest valid cell lies within the inpaint radius
/// with the mean of valid cells inside that radius; writes the
/// "elevation_inpainted" layer. An all-absent map is passed through unchanged
/// (empty_input flags the warning).
FilterStats inpaint(GridMap& map, const FilterParams& params, Exec exec = Exec::kParallel);

/// Mean filter over valid inpainted cells within the smoothing radius;
/// writes "smoothed". Absent stays absent.
void smooth(GridMap& map, const FilterParams& params, Exec exec = Exec::kParallel);

/// Per-cell slope (rad) from a least-squares plane fit over the valid 3x3
/// neighborhood of "smoothed"; absent where fewer than 3 valid cells or the
/// fit is degenerate.
void compute_slope(GridMap& map, Exec exec = Exec::kParallel);

/// roughness = |elevation_inpainted - smoothed|.
void compute_roughness(GridMap& map, Exec exec = Exec::kParallel);

/// Pre-clamp traversability value for a (slope, roughness) pair.
inline double traversability_value(double slope_rad, double roughness,
                                   const FilterParams& params) {
  return 0.5 * (1.0 - slope_rad / params.slope_divisor) +
         0.5 * (1.0 - roughness / params.roughness_divisor);
}

/// Traversability layer, clamped to [0, 1]; absent where slope or roughness
/// is absent.
void compute_traversability(GridMap& map, const FilterParams& params,
                            Exec exec = Exec::kParallel);

/// Windowed minimum over valid traversability cells within the min-filter
/// radius, expanding non-traversable spots in place.
void min_filter(GridMap& map, const FilterParams& params, Exec exec = Exec::kParallel);

/// Full fixed-order pipeline:
/// inpaint -> smooth -> slope -> roughness -> traversability -> min_filter.
FilterStats run_pipeline(GridMap& map, const FilterParams& params, Exec exec = Exec::kParallel);

struct CellOffset {
  int dr;
  int dc;
};

/// Cell offsets whose center distance is <= radius, row-major order.
std::vector<CellOffset> disc_offsets(double radius, double resolution);

}  // namespace tcs::mapfilter
