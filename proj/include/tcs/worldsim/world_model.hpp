#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcs/core/exec.hpp"
#include "tcs/core/rng.hpp"
#include "tcs/core/types.hpp"

namespace tcs::worldsim {

/// Regular elevation sample grid. Samples sit at origin + (col, row) * resolution;
/// queries between samples are bilinearly interpolated and clamped to the edge
/// values outside the sampled extent.
struct Heightfield {
  double resolution{0.1};
  Vec2 origin;
  int rows{0};
  int cols{0};
  std::vector<double> data;  // row-major, rows along y

  double at(int row, int col) const { return data[static_cast<std::size_t>(row) * cols + col]; }
  double interpolate(double x, double y) const;
};

/// Axis-aligned impenetrable prism. Terrain under it stays defined.
struct BoxObstacle {
  Vec3 center;
  Vec3 extents;  // full side lengths

  double top() const { return center.z + 0.5 * extents.z; }
  bool covers(double x, double y) const {
    return std::abs(x - center.x) <= 0.5 * extents.x && std::abs(y - center.y) <= 0.5 * extents.y;
  }
};

/// Vertical cylinder standing on the terrain.
struct Pole {
  Vec2 center;
  double radius{0.1};
  double base{0.0};    // base elevation (m)
  double height{1.0};  // m

  double top() const { return base + height; }
  bool covers(double x, double y) const {
    const double dx = x - center.x, dy = y - center.y;
    return dx * dx + dy * dy <= radius * radius;
  }
};

struct WorldModel {
  Heightfield heightfield;
  std::vector<BoxObstacle> obstacles;
  std::vector<Pole> poles;
  Rect bounds;

  /// Throws std::invalid_argument if a structural invariant is violated.
  void validate() const;
};

struct SensorSpec {
  double hfov{deg_to_rad(60.0)};
  double vfov{deg_to_rad(45.0)};
  double angular_resolution{deg_to_rad(1.0)};
  double max_range{8.0};
  double range_noise_std{0.0};
  double rate_hz{5.0};

  void validate() const;
};

struct PointCloud {
  std::vector<Vec3> points;
  Vec3 origin;
};

struct RayHit {
  double distance{0.0};
  Vec3 point;
};

/// Elevation of the topmost modeled surface covering (x, y): max of the
/// bilinear heightfield, obstacle tops and pole tops.
/// Throws std::out_of_range when (x, y) is outside the world bounds.
double sample_height(const WorldModel& world, double x, double y);

/// First intersection of a ray with any modeled surface. Boxes and poles are
/// intersected analytically; the heightfield is marched at resolution/2 steps
/// and refined by bisection.
std::optional<RayHit> raycast(const WorldModel& world, const Vec3& origin, const Vec3& dir,
                              double max_range);

/// Simulated depth sensor frame: one ray per angular step across the FOV,
/// range perturbed by Gaussian noise. Rays draw noise from counter-based
/// sub-streams of `rng`, so the result is deterministic under any thread
/// count; `rng` is advanced by the number of rays cast.
PointCloud render_depth_pointcloud(const WorldModel& world, const Pose& sensor_pose,
                                   const SensorSpec& spec, RngStream& rng,
                                   Exec exec = Exec::kParallel);

/// Terrain-following UGV pose: z from sample_height, roll/pitch from the
/// local surface normal under the footprint, heading preserved. Positive
/// pitch is nose-up, positive roll is left-side-up.
Pose ugv_ground_pose(const WorldModel& world, double x, double y, double heading,
                     double footprint_radius = 0.15);

}  // namespace tcs::worldsim
