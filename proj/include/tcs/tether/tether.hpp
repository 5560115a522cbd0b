#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tcs/core/rng.hpp"
#include "tcs/core/types.hpp"
#include "tcs/worldsim/world_model.hpp"

namespace tcs::tether {

/// Taut tether as a polyline: winch end, fixed wrap points on pole surfaces,
/// free end. deployed + wound always equals total_length.
struct TetherState {
  double total_length{30.0};
  double deployed{30.0};
  double wound{0.0};
  std::vector<Vec3> wrap_points;
  std::optional<std::size_t> wrapped_pole;
  bool anchored{false};
  /// Polyline length past the anchor point (wraps plus the hook end); the
  /// winch can only take up what lies on its side of the anchor.
  double anchor_tail{0.0};

  Vec3 winch_end;
  Vec3 free_end;
  bool free_end_initialized{false};

  std::vector<Vec3> polyline() const;
  double polyline_length() const;
  /// Cumulative angle (rad) subtended by the wrap points around a pole axis.
  double wrap_angle_around(const Vec2& pole_center) const;
  /// Drops all wraps (a failed attachment slides off); only legal before
  /// anchoring.
  void release_wraps();
};

/// Angle-binned hook-catch success table, one bin per 20 degrees.
class HookModel {
 public:
  static constexpr double kBinWidthDeg = 20.0;
  static constexpr int kBinCount = 18;

  /// Synthetic calibration table (not measured data): success peaks in the
  /// bins containing 0 and 180 degrees and floors at 0.1 elsewhere.
  static HookModel default_model();
  /// CSV rows: bin_start_deg,probability,trials (one per bin).
  static HookModel from_csv(const std::string& path);

  double probability(double revolution_angle_deg) const;
  int trials(int bin) const { return trials_[bin]; }
  int bin_of(double revolution_angle_deg) const;
  int argmax_bin() const;

  void set_bin(int bin, double probability, int trials);

 private:
  std::array<double, kBinCount> prob_{};
  std::array<int, kBinCount> trials_{};
};

struct WindingPlan {
  Vec2 pole_center;
  double flight_radius{0.0};
  double altitude{0.0};
  double revolution_angle_deg{0.0};
  std::vector<Vec3> waypoints;
};

/// Waypoints on a circle around the pole sweeping 360 degrees plus the
/// revolution angle, entered on the ray from the UAV position to the pole
/// center, counter-clockwise. Throws when flight_radius <= pole_radius.
WindingPlan circle_trajectory(Vec2 pole_center, double pole_radius, double flight_radius,
                              double altitude, double revolution_angle_deg, double step_deg,
                              Vec2 uav_position);

/// Re-derive the taut polyline for the current endpoint positions, inserting
/// wrap points where the straight run from the last fixed point to the free
/// end crosses a pole. Wrap points are never removed here.
void update_tether(TetherState& tether, const Vec3& winch_end, const Vec3& free_end,
                   const worldsim::WorldModel& world);

/// Bernoulli draw from the bin containing the revolution angle.
/// Pre: angle in [0, 360).
bool sample_hook_catch(const HookModel& model, double revolution_angle_deg, RngStream& rng);

struct ClimbStep {
  bool climbed{false};
  bool stalled{false};
};

/// Quasi-static winch step: shorten the deployed length by wind_rate * dt and
/// slide the UGV along the terrain surface toward the anchor's horizontal
/// projection until the straight-line distance fits the deployed length.
/// Climbed once the horizontal distance drops below the footprint radius.
ClimbStep winch_climb_step(Pose& ugv, TetherState& tether, const Vec3& anchor,
                           const worldsim::WorldModel& world, double wind_rate, double dt,
                           double footprint_radius);

}  // namespace tcs::tether
