#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcs/core/types.hpp"
#include "tcs/worldsim/world_model.hpp"

namespace tcs::gridmap {

/// Canonical layer names used across the pipeline.
namespace layers {
inline constexpr const char* kElevation = "elevation";
inline constexpr const char* kInpainted = "elevation_inpainted";
inline constexpr const char* kSmoothed = "smoothed";
inline constexpr const char* kSlope = "slope";
inline constexpr const char* kRoughness = "roughness";
inline constexpr const char* kTraversability = "traversability";
}  // namespace layers

struct CellIndex {
  int row{0};
  int col{0};

  bool operator==(const CellIndex&) const = default;
  bool operator<(const CellIndex& o) const {
    return row != o.row ? row < o.row : col < o.col;
  }
};

/// An absent cell is stored as NaN; use is_valid / at to observe optionality.
inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
inline bool is_valid(double v) { return !std::isnan(v); }

class GridMapView;

/// Multi-layer 2.5D grid. All layers share resolution, origin and dims.
/// `origin` is the world position of the center of cell (0, 0); rows step
/// along +y, cols along +x. A position belongs to the cell whose center is
/// nearest, with ties broken toward the lower index.
class GridMap {
 public:
  GridMap(double resolution, Vec2 origin, int rows, int cols);

  /// Pre-allocated map whose cells cover `bounds` at the given resolution.
  static GridMap from_bounds(const Rect& bounds, double resolution);

  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(rows_) * cols_; }

  bool has_layer(const std::string& name) const { return layers_.count(name) > 0; }
  std::vector<std::string> layer_names() const;
  /// Creates the layer NaN-filled if missing; existing layers are untouched.
  std::vector<double>& ensure_layer(const std::string& name);
  std::vector<double>& layer(const std::string& name);
  const std::vector<double>& layer(const std::string& name) const;
  const std::vector<double>* find_layer(const std::string& name) const;

  std::size_t linear(CellIndex idx) const {
    return static_cast<std::size_t>(idx.row) * cols_ + idx.col;
  }
  bool in_bounds(CellIndex idx) const {
    return idx.row >= 0 && idx.row < rows_ && idx.col >= 0 && idx.col < cols_;
  }
  bool contains(double x, double y) const;

  /// Throws std::out_of_range for positions outside the map.
  CellIndex position_to_index(double x, double y) const;
  Vec2 index_to_position(CellIndex idx) const;

  std::optional<double> at(const std::string& name, CellIndex idx) const;
  void set(const std::string& name, CellIndex idx, double value);

  /// View over cells within `radius` of `center` (bounding window, clipped
  /// at the borders), sharing storage with this map.
  GridMapView submap(const Vec2& center, double radius);

  /// Lossless binary round trip, absent cells included.
  void save(const std::string& path) const;
  static GridMap load(const std::string& path);

 private:
  double resolution_;
  Vec2 origin_;
  int rows_;
  int cols_;
  std::map<std::string, std::vector<double>> layers_;
};

/// Lightweight window into a parent map; reads and writes pass through.
class GridMapView {
 public:
  GridMapView(GridMap& parent, CellIndex top_left, int rows, int cols)
      : parent_(&parent), top_left_(top_left), rows_(rows), cols_(cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  CellIndex to_parent(CellIndex local) const {
    return {top_left_.row + local.row, top_left_.col + local.col};
  }
  std::optional<double> at(const std::string& name, CellIndex local) const {
    return parent_->at(name, to_parent(local));
  }
  void set(const std::string& name, CellIndex local, double value) {
    parent_->set(name, to_parent(local), value);
  }
  GridMap& parent() { return *parent_; }

 private:
  GridMap* parent_;
  CellIndex top_left_;
  int rows_;
  int cols_;
};

struct IntegrateStats {
  std::size_t integrated{0};
  std::size_t dropped{0};
};

/// Fuse a point cloud into the "elevation" layer as a per-cell running max.
/// Points outside the map are dropped and counted.
IntegrateStats integrate_pointcloud(GridMap& map, const worldsim::PointCloud& cloud);

/// Elevation layer used by consumers that want filled-in data: the inpainted
/// layer when present, the raw elevation layer otherwise.
const std::vector<double>& elevation_for_queries(const GridMap& map);

/// Fully observed elevation map sampled from the ground-truth world, one
/// sample per cell center. Debug/test surrogate for a completed UAV scan.
GridMap ground_truth_elevation_map(const worldsim::WorldModel& world, double resolution);

}  // namespace tcs::gridmap
