#include "tcs/mission/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "tcs/core/log.hpp"
#include "tcs/mapfilter/filters.hpp"

namespace tcs::mission {

using gridmap::is_valid;
namespace layers = gridmap::layers;

const char* to_string(State state) {
  switch (state) {
    case State::kTandemNavigate: return "TandemNavigate";
    case State::kCliffConfirmed: return "CliffConfirmed";
    case State::kUavCrossCliff: return "UavCrossCliff";
    case State::kAnchorSearch: return "AnchorSearch";
    case State::kWindTether: return "WindTether";
    case State::kLandingSearch: return "LandingSearch";
    case State::kLanded: return "Landed";
    case State::kWinchClimb: return "WinchClimb";
    case State::kDone: return "Done";
    case State::kFailed: return "Failed";
  }
  return "?";
}

std::vector<State> MissionLog::state_sequence() const {
  std::vector<State> sequence;
  for (const auto& record : records) {
    if (sequence.empty() || sequence.back() != record.state) {
      sequence.push_back(record.state);
    }
  }
  return sequence;
}

MissionSim::MissionSim(const scenario::Scenario& scenario)
    : scenario_(scenario),
      world_(scenario.build_world()),
      hook_model_(scenario.load_hook_model()),
      map_(gridmap::GridMap::from_bounds(scenario.world.bounds, scenario.map_resolution)),
      sensor_rng_(scenario.seed, "sensor"),
      hook_rng_(scenario.seed, "hook"),
      ugv_goal_(scenario.goal) {
  map_.ensure_layer(layers::kElevation);

  sensor_period_ = std::max(1, static_cast<int>(std::lround(1.0 / (scenario.sensor.rate_hz *
                                                                   scenario.dt))));
  filter_period_ =
      std::max(1, static_cast<int>(std::lround(scenario.mission.filter_period / scenario.dt)));

  ugv_pose_ = worldsim::ugv_ground_pose(world_, scenario.ugv.start.x, scenario.ugv.start.y,
                                        scenario.ugv.heading);
  uav_pose_.position = scenario.uav.start;
  uav_pose_.yaw = scenario.ugv.heading;

  tether_.total_length = scenario.tether.total_length;
  tether_.deployed = scenario.tether.total_length;
  tether_.wound = 0.0;
  tether::update_tether(tether_, ugv_pose_.position, uav_pose_.position, world_);
}

Vec2 MissionSim::clamp_into_bounds(Vec2 p, double margin) const {
  const auto& b = world_.bounds;
  return {std::clamp(p.x, b.min.x + margin, b.max.x - margin),
          std::clamp(p.y, b.min.y + margin, b.max.y - margin)};
}

double MissionSim::map_elevation_at(Vec2 p) const {
  const auto& elevation = gridmap::elevation_for_queries(map_);
  if (!map_.contains(p.x, p.y)) return uav_pose_.position.z;
  const double v = elevation[map_.linear(map_.position_to_index(p.x, p.y))];
  return is_valid(v) ? v : uav_pose_.position.z;
}

void MissionSim::sense_and_integrate() {
  Pose sensor_pose;
  sensor_pose.position = uav_pose_.position;
  sensor_pose.yaw = uav_pose_.yaw;
  sensor_pose.pitch = -M_PI / 2.0;  // looking straight down
  const auto cloud =
      worldsim::render_depth_pointcloud(world_, sensor_pose, scenario_.sensor, sensor_rng_);
  gridmap::integrate_pointcloud(map_, cloud);
}

planner::Path MissionSim::truncate_path(const planner::Path& path) const {
  const planner::CostEvaluator cost(map_, scenario_.weights);
  std::size_t cut = path.cells.size();
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    if (cost.at(map_.linear(path.cells[i])) > scenario_.mission.barrier_cost) {
      cut = i;
      break;
    }
  }
  if (cut < path.cells.size()) {
    const auto standoff_cells = static_cast<std::size_t>(
        std::ceil(scenario_.mission.path_standoff / map_.resolution()));
    cut = cut > standoff_cells ? cut - standoff_cells : 0;
  }
  planner::Path result;
  result.cells.assign(path.cells.begin(), path.cells.begin() + cut);
  result.waypoints.assign(path.waypoints.begin(), path.waypoints.begin() + cut);
  for (const auto idx : result.cells) {
    result.total_cost += cost.at(map_.linear(idx));
  }
  return result;
}

void MissionSim::replan_ugv() {
  have_plan_ = false;
  ugv_path_ = {};
  ugv_path_done_ = true;
  if (!map_.contains(ugv_pose_.position.x, ugv_pose_.position.y)) return;
  const auto idx = map_.position_to_index(ugv_pose_.position.x, ugv_pose_.position.y);
  const auto& trav = map_.layer(layers::kTraversability);
  const auto& elev = gridmap::elevation_for_queries(map_);
  if (!is_valid(trav[map_.linear(idx)]) || !is_valid(elev[map_.linear(idx)])) return;

  const auto path = planner::astar_plan(map_, ugv_pose_.position.xy(), ugv_goal_,
                                        scenario_.weights);
  if (!path) return;
  last_plan_cost_ = path->total_cost;
  have_plan_ = true;
  ugv_path_ = truncate_path(*path);
  ugv_path_done_ = ugv_path_.cells.size() < 2;
}

double MissionSim::path_known_cost(const planner::Path& path) const {
  const planner::CostEvaluator cost(map_, scenario_.weights);
  const auto& trav = map_.layer(layers::kTraversability);
  const auto& elev = gridmap::elevation_for_queries(map_);
  double known = 0.0;
  for (const auto idx : path.cells) {
    const std::size_t i = map_.linear(idx);
    if (is_valid(trav[i]) && is_valid(elev[i])) known += cost.at(i);
  }
  return known;
}

void MissionSim::derive_staging_from(const planner::Path& path) {
  const planner::CostEvaluator cost(map_, scenario_.weights);
  std::size_t cut = path.cells.size();
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    if (cost.at(map_.linear(path.cells[i])) > scenario_.mission.barrier_cost) {
      cut = i;
      break;
    }
  }
  cliff_edge_ = cut < path.waypoints.size() ? path.waypoints[cut] : scenario_.goal;
  const auto standoff_cells =
      static_cast<std::size_t>(std::ceil(scenario_.mission.path_standoff / map_.resolution()));
  const std::size_t stage = cut > standoff_cells + 1 ? cut - standoff_cells - 1 : 0;
  staging_ = path.waypoints[std::min(stage, path.waypoints.size() - 1)];
}

void MissionSim::check_cliff() {
  if (!map_.contains(ugv_pose_.position.x, ugv_pose_.position.y)) return;
  const auto idx = map_.position_to_index(ugv_pose_.position.x, ugv_pose_.position.y);
  const auto& trav = map_.layer(layers::kTraversability);
  const auto& elev = gridmap::elevation_for_queries(map_);
  if (!is_valid(trav[map_.linear(idx)]) || !is_valid(elev[map_.linear(idx)])) return;

  const auto result = detect::detect_cliff(map_, ugv_pose_.position.xy(), scenario_.goal,
                                           scenario_.weights, scenario_.cliff);
  if (!result.cliff || result.best_path.empty()) return;

  // Unknown cells also inflate the path cost; confirm the cliff only once the
  // mapped portion alone exceeds the threshold, so an unexplored map is not
  // mistaken for one.
  const double known = path_known_cost(result.best_path);
  if (known <= scenario_.cliff.cost_threshold) return;

  derive_staging_from(result.best_path);
  ugv_goal_ = staging_;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "cliff_confirmed cost=%.3f known=%.3f edge=(%.2f,%.2f)",
                result.best_cost, known, cliff_edge_.x, cliff_edge_.y);
  transition(State::kCliffConfirmed, buf);

  const Vec2 dir = (scenario_.goal - cliff_edge_).norm() > 1e-9
                       ? (scenario_.goal - cliff_edge_).normalized()
                       : Vec2{1.0, 0.0};
  cross_target_ =
      clamp_into_bounds(cliff_edge_ + dir * scenario_.mission.cross_distance, 0.3);
}

void MissionSim::run_filters_and_replan() {
  mapfilter::run_pipeline(map_, scenario_.filter);
  if (state_ != State::kWinchClimb || !ugv_path_done_) replan_ugv();

  switch (state_) {
    case State::kTandemNavigate:
      check_cliff();
      break;
    case State::kAnchorSearch: {
      const auto candidate =
          detect::detect_anchor(map_, region_center_, scenario_.anchor.region_radius,
                                scenario_.anchor.peakness_threshold,
                                scenario_.anchor.neighborhood_radius);
      if (candidate) {
        anchor_ = candidate;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "anchor_found pos=(%.2f,%.2f) peakness=%.1f",
                      candidate->position.x, candidate->position.y, candidate->peakness);
        events_.push_back(buf);
        start_winding(false);
      }
      break;
    }
    case State::kLandingSearch: {
      if (!landing_target_) {
        landing_target_ =
            detect::find_landing_pose(map_, uav_pose_.position.xy(), scenario_.landing);
        if (landing_target_) {
          char buf[96];
          std::snprintf(buf, sizeof(buf), "landing_pose (%.2f,%.2f)", landing_target_->x,
                        landing_target_->y);
          events_.push_back(buf);
        }
      }
      break;
    }
    default:
      break;
  }
}

void MissionSim::move_ugv() {
  if (ugv_path_.waypoints.empty() || ugv_path_done_) return;
  // Past cliff confirmation the UGV holds whenever its plan cost spikes over
  // the cliff threshold.
  if (state_ != State::kTandemNavigate && have_plan_ &&
      last_plan_cost_ > scenario_.cliff.cost_threshold) {
    return;
  }

  planner::Pose2 pose{ugv_pose_.position.xy(), ugv_pose_.yaw};
  const auto cmd = planner::pure_pursuit_step(ugv_path_, pose, scenario_.pursuit);
  if (cmd.done) {
    ugv_path_done_ = true;
    return;
  }
  const double dt = scenario_.dt;
  double heading = wrap_angle(ugv_pose_.yaw + cmd.angular * dt);
  Vec2 next{ugv_pose_.position.x + cmd.linear * std::cos(heading) * dt,
            ugv_pose_.position.y + cmd.linear * std::sin(heading) * dt};
  next = clamp_into_bounds(next, 0.05);
  ugv_pose_ = worldsim::ugv_ground_pose(world_, next.x, next.y, heading);
}

void MissionSim::move_uav_toward(Vec2 target) {
  planner::UavGotoParams params;
  params.speed = scenario_.uav.speed;
  params.climb_rate = scenario_.uav.climb_rate;
  params.clearance = scenario_.uav.clearance;
  const Vec3 next = planner::uav_goto_step(map_, uav_pose_.position, target, params,
                                           scenario_.dt);
  const Vec2 motion = next.xy() - uav_pose_.position.xy();
  if (motion.norm() > 1e-9) uav_pose_.yaw = std::atan2(motion.y, motion.x);
  uav_pose_.position = next;
}

void MissionSim::start_anchor_search() {
  region_center_ = uav_pose_.position.xy();
  search_start_time_ = tick_ * scenario_.dt;
  scan_waypoints_.clear();
  // Outward scan spiral, two and a half turns to the region boundary.
  const int n = 40;
  for (int k = 0; k <= n; ++k) {
    const double frac = static_cast<double>(k) / n;
    const double angle = 2.5 * 2.0 * M_PI * frac;
    const double radius = scenario_.anchor.region_radius * frac;
    scan_waypoints_.push_back(clamp_into_bounds(
        region_center_ + Vec2{radius * std::cos(angle), radius * std::sin(angle)}, 0.3));
  }
  scan_index_ = 0;
  transition(State::kAnchorSearch, "anchor_search_started");
}

void MissionSim::start_winding(bool retry) {
  const double anchor_elev = map_elevation_at(anchor_->position);
  const double altitude = anchor_elev + scenario_.tether.wind_altitude_offset;
  winding_ = tether::circle_trajectory(
      anchor_->position, scenario_.tether.assumed_pole_radius, scenario_.tether.flight_radius,
      altitude, scenario_.tether.revolution_angle_deg, scenario_.tether.waypoint_step_deg,
      uav_pose_.position.xy());
  winding_index_ = 0;
  if (!retry) {
    transition(State::kWindTether, "winding_started");
  } else {
    events_.push_back("winding_restarted");
  }
}

void MissionSim::finish_winding() {
  ++hook_attempts_;
  const bool caught = tether::sample_hook_catch(hook_model_, scenario_.tether.revolution_angle_deg,
                                                hook_rng_);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "hook_attempt %d %s", hook_attempts_,
                caught ? "caught" : "missed");
  events_.push_back(buf);

  if (caught && !tether_.wrap_points.empty()) {
    tether_.anchored = true;
    anchor_point_ = tether_.wrap_points.front();
    tether_.anchor_tail =
        tether_.polyline_length() - (anchor_point_ - tether_.winch_end).norm();
    // The hook end stays at the pole; the UAV releases the tether.
    tether_.free_end = tether_.wrap_points.back();
    uav_detached_ = true;
    landing_start_time_ = tick_ * scenario_.dt;
    landing_target_.reset();
    descending_ = false;
    transition(State::kLandingSearch, "tether_anchored");
    return;
  }

  if (hook_attempts_ >= scenario_.tether.attempt_limit) {
    fail("hook attachment failed after " + std::to_string(hook_attempts_) + " attempts");
    return;
  }
  tether_.release_wraps();
  start_winding(true);
}

void MissionSim::transition(State next, const std::string& event) {
  state_ = next;
  events_.push_back(event);
  log::info(std::to_string(tick_) + " -> " + to_string(next) + " (" + event + ")");
}

void MissionSim::fail(const std::string& reason) {
  failure_reason_ = reason;
  log_.failure_reason = reason;
  transition(State::kFailed, "failed: " + reason);
}

void MissionSim::step() {
  if (terminal()) return;
  events_.clear();
  const double dt = scenario_.dt;

  // Behavior dispatches on the state at tick start; a transition made during
  // the map update phase takes effect next tick, so every state leaves at
  // least one record.
  const State tick_state = state_;

  if (tick_ % sensor_period_ == 0) sense_and_integrate();
  if (tick_ % filter_period_ == 0) run_filters_and_replan();

  if (state_ != tick_state) {
    // A map-update transition fired this tick; drive only the UGV and let the
    // new state take over next tick.
    move_ugv();
  } else {
    switch (tick_state) {
    case State::kTandemNavigate: {
      move_ugv();
      const Vec2 ugv_xy = ugv_pose_.position.xy();
      const Vec2 to_goal = scenario_.goal - ugv_xy;
      if (to_goal.norm() < scenario_.pursuit.lookahead) {
        transition(State::kDone, "goal_reached");
        break;
      }
      // The UAV scouts a standoff ahead of the UGV toward the goal.
      Vec2 target = scenario_.goal;
      if (to_goal.norm() > scenario_.uav.standoff) {
        target = ugv_xy + to_goal.normalized() * scenario_.uav.standoff;
      }
      move_uav_toward(clamp_into_bounds(target, 0.3));
      break;
    }
    case State::kCliffConfirmed:
      move_ugv();
      transition(State::kUavCrossCliff, "uav_crossing_cliff");
      break;
    case State::kUavCrossCliff: {
      move_ugv();
      move_uav_toward(cross_target_);
      if ((uav_pose_.position.xy() - cross_target_).norm() < 0.25) {
        start_anchor_search();
      }
      break;
    }
    case State::kAnchorSearch: {
      move_ugv();
      if (scan_index_ < scan_waypoints_.size()) {
        move_uav_toward(scan_waypoints_[scan_index_]);
        if ((uav_pose_.position.xy() - scan_waypoints_[scan_index_]).norm() < 0.15) {
          ++scan_index_;
        }
      } else {
        scan_index_ = 0;  // sweep again until found or timed out
      }
      if (tick_ * dt - search_start_time_ > scenario_.anchor.search_timeout) {
        fail("no anchor found within the search timeout");
      }
      break;
    }
    case State::kWindTether: {
      move_ugv();
      if (winding_index_ < winding_.waypoints.size()) {
        const Vec3 wp = winding_.waypoints[winding_index_];
        const Vec3 delta = wp - uav_pose_.position;
        const double dist = delta.norm();
        const double step_len = scenario_.uav.speed * dt;
        if (dist <= step_len) {
          uav_pose_.position = wp;
          ++winding_index_;
        } else {
          uav_pose_.position = uav_pose_.position + delta * (step_len / dist);
        }
        const Vec2 motion = delta.xy();
        if (motion.norm() > 1e-9) uav_pose_.yaw = std::atan2(motion.y, motion.x);
      } else {
        finish_winding();
      }
      break;
    }
    case State::kLandingSearch: {
      move_ugv();
      if (landing_target_) {
        const Vec2 target = *landing_target_;
        if (!descending_) {
          move_uav_toward(target);
          if ((uav_pose_.position.xy() - target).norm() < 0.1) descending_ = true;
        } else {
          const double ground = map_elevation_at(target);
          uav_pose_.position.z -= scenario_.uav.climb_rate * dt;
          if (uav_pose_.position.z <= ground + 0.02) {
            uav_pose_.position.z = ground;
            transition(State::kLanded, "landed motors_off");
          }
        }
      }
      if (tick_ * dt - landing_start_time_ > scenario_.mission.landing_timeout) {
        fail("no landing pose found within the timeout");
      }
      break;
    }
    case State::kLanded:
      transition(State::kWinchClimb, "winch_engaged");
      break;
    case State::kWinchClimb: {
      if (!ugv_path_done_ && !ugv_path_.waypoints.empty()) {
        move_ugv();  // finish the staging approach before winding in earnest
        break;
      }
      if (!winch_engaged_) {
        winch_engaged_ = true;
        const double taut = tether_.polyline_length();
        if (tether_.deployed > taut) {
          tether_.wound += tether_.deployed - taut;
          tether_.deployed = taut;
          events_.push_back("slack_wound");
        }
      }
      const auto result =
          tether::winch_climb_step(ugv_pose_, tether_, anchor_point_, world_,
                                   scenario_.tether.wind_rate, dt, scenario_.ugv.footprint_radius);
      if (result.climbed) {
        transition(State::kDone, "climb_complete");
      } else if (result.stalled) {
        if (++stall_ticks_ >= scenario_.mission.stall_tick_limit) {
          fail("winch stalled");
        } else if (stall_ticks_ == 1) {
          events_.push_back("winch_stall");
        }
      } else {
        stall_ticks_ = 0;
      }
      break;
    }
    case State::kDone:
    case State::kFailed:
      break;
    }
  }

  const Vec3 free_end = uav_detached_ ? tether_.free_end : uav_pose_.position;
  tether::update_tether(tether_, ugv_pose_.position, free_end, world_);

  TickRecord record;
  record.tick = tick_;
  record.time = tick_ * dt;
  record.state = state_;
  record.uav_pose = uav_pose_;
  record.ugv_pose = ugv_pose_;
  record.tether_deployed = tether_.deployed;
  record.tether_wound = tether_.wound;
  record.tether_polyline = tether_.polyline_length();
  record.events = events_;
  log_.records.push_back(std::move(record));

  ++tick_;
  if (terminal()) {
    log_.outcome = state_;
    if (state_ == State::kFailed) log_.failure_reason = failure_reason_;
  }
}

MissionLog MissionSim::run() {
  while (!terminal() && tick_ < scenario_.max_ticks) {
    step();
  }
  if (!terminal()) {
    fail("mission exceeded max ticks");
    TickRecord record;
    record.tick = tick_;
    record.time = tick_ * scenario_.dt;
    record.state = state_;
    record.uav_pose = uav_pose_;
    record.ugv_pose = ugv_pose_;
    record.tether_deployed = tether_.deployed;
    record.tether_wound = tether_.wound;
    record.tether_polyline = tether_.polyline_length();
    record.events = events_;
    log_.records.push_back(std::move(record));
    log_.outcome = state_;
  }
  return log_;
}

MissionLog run_mission(const scenario::Scenario& scenario) {
  MissionSim sim(scenario);
  return sim.run();
}

namespace {

nlohmann::json record_to_json(const TickRecord& r) {
  nlohmann::json j;
  j["tick"] = r.tick;
  j["t"] = r.time;
  j["state"] = to_string(r.state);
  j["uav"] = {r.uav_pose.position.x, r.uav_pose.position.y, r.uav_pose.position.z};
  j["uav_yaw"] = r.uav_pose.yaw;
  j["ugv"] = {r.ugv_pose.position.x, r.ugv_pose.position.y, r.ugv_pose.position.z};
  j["ugv_rpy"] = {r.ugv_pose.roll, r.ugv_pose.pitch, r.ugv_pose.yaw};
  j["tether"] = {{"deployed", r.tether_deployed},
                 {"wound", r.tether_wound},
                 {"polyline", r.tether_polyline}};
  j["events"] = r.events;
  return j;
}

}  // namespace

void write_mission_ndjson(const MissionLog& log, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& record : log.records) {
    os << record_to_json(record).dump() << "\n";
  }
}

void write_summary_json(const MissionLog& log, const std::string& path) {
  nlohmann::json j;
  j["outcome"] = to_string(log.outcome);
  if (!log.failure_reason.empty()) j["failure_reason"] = log.failure_reason;
  j["ticks"] = log.records.size();
  nlohmann::json sequence = nlohmann::json::array();
  for (const auto state : log.state_sequence()) sequence.push_back(to_string(state));
  j["state_sequence"] = sequence;
  if (!log.records.empty()) {
    const auto& last = log.records.back();
    j["final_ugv"] = {last.ugv_pose.position.x, last.ugv_pose.position.y,
                      last.ugv_pose.position.z};
    j["final_uav"] = {last.uav_pose.position.x, last.uav_pose.position.y,
                      last.uav_pose.position.z};
    double ugv_distance = 0.0;
    double uav_distance = 0.0;
    for (std::size_t i = 1; i < log.records.size(); ++i) {
      ugv_distance +=
          (log.records[i].ugv_pose.position - log.records[i - 1].ugv_pose.position).norm();
      uav_distance +=
          (log.records[i].uav_pose.position - log.records[i - 1].uav_pose.position).norm();
    }
    j["ugv_distance"] = ugv_distance;
    j["uav_distance"] = uav_distance;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

void write_trajectory_csv(const MissionLog& log, bool uav, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "tick,time,x,y,z\n";
  char buf[160];
  for (const auto& record : log.records) {
    const Pose& pose = uav ? record.uav_pose : record.ugv_pose;
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", record.tick, record.time,
                  pose.position.x, pose.position.y, pose.position.z);
    os << buf;
  }
}

}  // namespace tcs::mission
