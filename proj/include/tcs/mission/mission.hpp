#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcs/detect/detect.hpp"
#include "tcs/gridmap/grid_map.hpp"
#include "tcs/planner/planner.hpp"
#include "tcs/scenario/scenario.hpp"
#include "tcs/tether/tether.hpp"
#include "tcs/worldsim/world_model.hpp"

namespace tcs::mission {

enum class State {
  kTandemNavigate,
  kCliffConfirmed,
  kUavCrossCliff,
  kAnchorSearch,
  kWindTether,
  kLandingSearch,
  kLanded,
  kWinchClimb,
  kDone,
  kFailed,
};

const char* to_string(State state);

struct TickRecord {
  int tick{0};
  double time{0.0};
  State state{State::kTandemNavigate};
  Pose uav_pose;
  Pose ugv_pose;
  double tether_deployed{0.0};
  double tether_wound{0.0};
  double tether_polyline{0.0};
  std::vector<std::string> events;
};

struct MissionLog {
  std::vector<TickRecord> records;
  State outcome{State::kFailed};
  std::string failure_reason;

  /// Distinct states in visit order (consecutive duplicates collapsed).
  std::vector<State> state_sequence() const;
};

/// Deterministic tick simulation of the full cooperative mission. All
/// randomness flows from the scenario seed through named sub-streams.
class MissionSim {
 public:
  explicit MissionSim(const scenario::Scenario& scenario);

  void step();
  bool terminal() const { return state_ == State::kDone || state_ == State::kFailed; }
  MissionLog run();

  State state() const { return state_; }
  int tick() const { return tick_; }
  const gridmap::GridMap& map() const { return map_; }
  const Pose& uav_pose() const { return uav_pose_; }
  const Pose& ugv_pose() const { return ugv_pose_; }
  const tether::TetherState& tether() const { return tether_; }
  const std::optional<detect::AnchorCandidate>& anchor() const { return anchor_; }
  const MissionLog& log() const { return log_; }
  const worldsim::WorldModel& world() const { return world_; }

 private:
  void sense_and_integrate();
  void run_filters_and_replan();
  void check_cliff();
  double path_known_cost(const planner::Path& path) const;
  void derive_staging_from(const planner::Path& path);
  planner::Path truncate_path(const planner::Path& path) const;
  void replan_ugv();
  void move_ugv();
  void move_uav_toward(Vec2 target);
  void start_anchor_search();
  void start_winding(bool retry);
  void finish_winding();
  void transition(State next, const std::string& event);
  void fail(const std::string& reason);
  Vec2 clamp_into_bounds(Vec2 p, double margin) const;
  double map_elevation_at(Vec2 p) const;

  scenario::Scenario scenario_;
  worldsim::WorldModel world_;
  tether::HookModel hook_model_;
  gridmap::GridMap map_;
  RngStream sensor_rng_;
  RngStream hook_rng_;

  State state_{State::kTandemNavigate};
  int tick_{0};
  int sensor_period_{1};
  int filter_period_{1};
  MissionLog log_;
  std::vector<std::string> events_;

  Pose uav_pose_;
  Pose ugv_pose_;
  tether::TetherState tether_;
  bool uav_detached_{false};

  Vec2 ugv_goal_;
  planner::Path ugv_path_;
  bool ugv_path_done_{true};
  double last_plan_cost_{0.0};
  bool have_plan_{false};

  Vec2 cliff_edge_;
  Vec2 staging_;
  Vec2 cross_target_;

  Vec2 region_center_;
  std::vector<Vec2> scan_waypoints_;
  std::size_t scan_index_{0};
  double search_start_time_{0.0};
  std::optional<detect::AnchorCandidate> anchor_;

  tether::WindingPlan winding_;
  std::size_t winding_index_{0};
  int hook_attempts_{0};
  Vec3 anchor_point_;

  std::optional<Vec2> landing_target_;
  bool descending_{false};
  double landing_start_time_{0.0};

  int stall_ticks_{0};
  bool winch_engaged_{false};
  std::string failure_reason_;
};

MissionLog run_mission(const scenario::Scenario& scenario);

/// Line-delimited JSON log plus a summary JSON; identical runs produce
/// identical bytes.
void write_mission_ndjson(const MissionLog& log, const std::string& path);
void write_summary_json(const MissionLog& log, const std::string& path);
void write_trajectory_csv(const MissionLog& log, bool uav, const std::string& path);

}  // namespace tcs::mission
