#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcs/detect/detect.hpp"
#include "tcs/mapfilter/filters.hpp"
#include "tcs/planner/planner.hpp"
#include "tcs/tether/tether.hpp"
#include "tcs/worldsim/world_model.hpp"

namespace tcs::scenario {

/// Load/validation failure carrying the offending field path.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& field_path, const std::string& reason)
      : std::runtime_error(field_path + ": " + reason), field_path_(field_path) {}
  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

/// Additive analytic terrain pieces: the heightfield is the sum of all
/// primitives sampled per cell.
struct TerrainPrimitive {
  enum class Kind { kPlane, kStep, kRamp };
  Kind kind{Kind::kPlane};
  double height{0.0};   // plane offset / step rise / ramp rise
  char axis{'x'};       // step & ramp
  double at{0.0};       // step position
  double from{0.0};     // ramp start
  double to{1.0};       // ramp end
};

struct HeightfieldSpec {
  enum class Source { kAnalytic, kPgm };
  Source source{Source::kAnalytic};
  double resolution{0.05};
  std::vector<TerrainPrimitive> primitives;  // analytic
  std::string pgm_file;                      // pgm
  double pgm_scale{0.001};                   // m per gray level
  double pgm_offset{0.0};                    // m added after scaling
};

struct WorldSpec {
  Rect bounds{{0.0, 0.0}, {10.0, 10.0}};
  HeightfieldSpec heightfield;
  std::vector<worldsim::BoxObstacle> obstacles;
  std::vector<worldsim::Pole> poles;
};

struct UgvConfig {
  Vec2 start{0.5, 0.5};
  double heading{0.0};
  double footprint_radius{0.3};
};

struct UavConfig {
  Vec3 start{0.5, 0.5, 0.3};
  double speed{0.5};
  double climb_rate{1.0};
  double clearance{1.5};
  double standoff{2.0};
};

struct AnchorConfig {
  double peakness_threshold{5000.0};
  double neighborhood_radius{0.5};
  double region_radius{2.5};
  double search_timeout{40.0};  // simulated seconds
};

struct TetherConfig {
  double total_length{30.0};
  double wind_rate{0.4};
  std::string hook_model{"default"};  // "default" or a CSV path
  double flight_radius{0.6};
  double wind_altitude_offset{-0.2};  // relative to the anchor cell elevation
  double revolution_angle_deg{180.0};
  double waypoint_step_deg{15.0};
  int attempt_limit{3};
  double assumed_pole_radius{0.15};
};

struct MissionConfig {
  double filter_period{1.0};        // s
  double cross_distance{2.0};       // m past the detected cliff line
  double traversability_floor{0.1};
  double barrier_cost{50.0};        // per-cell cost treated as impassable when
                                    // truncating the tracked path
  double path_standoff{0.25};       // m trimmed before the first barrier cell
  double landing_timeout{30.0};     // s
  int stall_tick_limit{40};
};

struct Scenario {
  int schema_version{1};
  uint64_t seed{1};
  double dt{0.05};
  int max_ticks{12000};
  std::string base_dir;  // directory of the scenario file, for relative paths

  WorldSpec world;
  UgvConfig ugv;
  UavConfig uav;
  Vec2 goal{8.0, 5.0};
  double map_resolution{0.05};
  worldsim::SensorSpec sensor;
  mapfilter::FilterParams filter;
  planner::PlanWeights weights;
  planner::PursuitParams pursuit;
  detect::CliffParams cliff;
  AnchorConfig anchor;
  detect::LandingParams landing;
  TetherConfig tether;
  MissionConfig mission;

  worldsim::WorldModel build_world() const;
  tether::HookModel load_hook_model() const;
  /// Full invariant check, including that W_NaN exceeds the largest valid
  /// cell cost reachable in this world.
  void validate() const;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);
/// Canonical JSON text of a scenario (used by save and round-trip checks).
std::string scenario_to_json_text(const Scenario& scenario);

}  // namespace tcs::scenario
