#include "tcs/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "tcs/io/exports.hpp"

namespace tcs::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw ScenarioError(path, reason);
}

void expect_keys(const json& obj, const std::string& path,
                 const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "required number missing");
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key,
            std::optional<int> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "required integer missing");
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "required string missing");
  }
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Vec2 get_vec2(const json& obj, const std::string& path, const std::string& key,
              std::optional<Vec2> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "required [x, y] missing");
  }
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(path + "." + key, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Vec3 get_vec3(const json& obj, const std::string& path, const std::string& key,
              std::optional<Vec3> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "." + key, "required [x, y, z] missing");
  }
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) fail(path + "." + key, "expected [x, y, z]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

HeightfieldSpec parse_heightfield(const json& j, const std::string& path) {
  HeightfieldSpec spec;
  expect_keys(j, path, {"type", "resolution", "primitives", "file", "scale_m_per_level",
                        "offset_m"});
  const std::string type = get_string(j, path, "type", std::string("analytic"));
  spec.resolution = get_number(j, path, "resolution", 0.05);
  if (spec.resolution <= 0.0) fail(path + ".resolution", "must be > 0");
  if (type == "analytic") {
    spec.source = HeightfieldSpec::Source::kAnalytic;
    if (j.contains("primitives")) {
      const auto& prims = j.at("primitives");
      if (!prims.is_array()) fail(path + ".primitives", "expected an array");
      for (std::size_t i = 0; i < prims.size(); ++i) {
        const std::string ppath = path + ".primitives[" + std::to_string(i) + "]";
        const auto& pj = prims[i];
        expect_keys(pj, ppath, {"type", "height", "axis", "at", "from", "to"});
        TerrainPrimitive prim;
        const std::string ptype = get_string(pj, ppath, "type");
        if (ptype == "plane") {
          prim.kind = TerrainPrimitive::Kind::kPlane;
          prim.height = get_number(pj, ppath, "height");
        } else if (ptype == "step") {
          prim.kind = TerrainPrimitive::Kind::kStep;
          prim.height = get_number(pj, ppath, "height");
          prim.at = get_number(pj, ppath, "at");
        } else if (ptype == "ramp") {
          prim.kind = TerrainPrimitive::Kind::kRamp;
          prim.height = get_number(pj, ppath, "height");
          prim.from = get_number(pj, ppath, "from");
          prim.to = get_number(pj, ppath, "to");
          if (prim.to <= prim.from) fail(ppath + ".to", "ramp end must exceed start");
        } else {
          fail(ppath + ".type", "unknown primitive type '" + ptype + "'");
        }
        if (ptype != "plane") {
          const std::string axis = get_string(pj, ppath, "axis", std::string("x"));
          if (axis != "x" && axis != "y") fail(ppath + ".axis", "must be 'x' or 'y'");
          prim.axis = axis[0];
        }
        spec.primitives.push_back(prim);
      }
    }
  } else if (type == "pgm") {
    spec.source = HeightfieldSpec::Source::kPgm;
    spec.pgm_file = get_string(j, path, "file");
    spec.pgm_scale = get_number(j, path, "scale_m_per_level");
    spec.pgm_offset = get_number(j, path, "offset_m", 0.0);
    if (spec.pgm_scale <= 0.0) fail(path + ".scale_m_per_level", "must be > 0");
  } else {
    fail(path + ".type", "unknown heightfield type '" + type + "'");
  }
  return spec;
}

json heightfield_to_json(const HeightfieldSpec& spec) {
  json j;
  j["resolution"] = spec.resolution;
  if (spec.source == HeightfieldSpec::Source::kAnalytic) {
    j["type"] = "analytic";
    json prims = json::array();
    for (const auto& p : spec.primitives) {
      json pj;
      switch (p.kind) {
        case TerrainPrimitive::Kind::kPlane:
          pj["type"] = "plane";
          pj["height"] = p.height;
          break;
        case TerrainPrimitive::Kind::kStep:
          pj["type"] = "step";
          pj["height"] = p.height;
          pj["at"] = p.at;
          pj["axis"] = std::string(1, p.axis);
          break;
        case TerrainPrimitive::Kind::kRamp:
          pj["type"] = "ramp";
          pj["height"] = p.height;
          pj["from"] = p.from;
          pj["to"] = p.to;
          pj["axis"] = std::string(1, p.axis);
          break;
      }
      prims.push_back(pj);
    }
    j["primitives"] = prims;
  } else {
    j["type"] = "pgm";
    j["file"] = spec.pgm_file;
    j["scale_m_per_level"] = spec.pgm_scale;
    j["offset_m"] = spec.pgm_offset;
  }
  return j;
}

}  // namespace

worldsim::WorldModel Scenario::build_world() const {
  worldsim::WorldModel model;
  model.bounds = world.bounds;
  model.obstacles = world.obstacles;
  model.poles = world.poles;

  auto& hf = model.heightfield;
  hf.resolution = world.heightfield.resolution;
  hf.origin = world.bounds.min;

  if (world.heightfield.source == HeightfieldSpec::Source::kAnalytic) {
    hf.cols = static_cast<int>(std::ceil(world.bounds.width() / hf.resolution - 1e-9)) + 1;
    hf.rows = static_cast<int>(std::ceil(world.bounds.height() / hf.resolution - 1e-9)) + 1;
    hf.data.resize(static_cast<std::size_t>(hf.rows) * hf.cols, 0.0);
    for (int r = 0; r < hf.rows; ++r) {
      for (int c = 0; c < hf.cols; ++c) {
        const double x = hf.origin.x + c * hf.resolution;
        const double y = hf.origin.y + r * hf.resolution;
        double z = 0.0;
        for (const auto& prim : world.heightfield.primitives) {
          const double coord = prim.axis == 'x' ? x : y;
          switch (prim.kind) {
            case TerrainPrimitive::Kind::kPlane:
              z += prim.height;
              break;
            case TerrainPrimitive::Kind::kStep:
              if (coord >= prim.at) z += prim.height;
              break;
            case TerrainPrimitive::Kind::kRamp: {
              const double t =
                  std::clamp((coord - prim.from) / (prim.to - prim.from), 0.0, 1.0);
              z += prim.height * t;
              break;
            }
          }
        }
        hf.data[static_cast<std::size_t>(r) * hf.cols + c] = z;
      }
    }
  } else {
    const std::filesystem::path file =
        std::filesystem::path(base_dir) / world.heightfield.pgm_file;
    const io::Pgm16 image = io::read_pgm16(file.string());
    hf.rows = image.rows;
    hf.cols = image.cols;
    hf.data.resize(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i) {
      hf.data[i] = world.heightfield.pgm_offset + image.data[i] * world.heightfield.pgm_scale;
    }
  }

  model.validate();
  return model;
}

tether::HookModel Scenario::load_hook_model() const {
  if (tether.hook_model == "default") return tether::HookModel::default_model();
  const std::filesystem::path file = std::filesystem::path(base_dir) / tether.hook_model;
  return tether::HookModel::from_csv(file.string());
}

void Scenario::validate() const {
  if (schema_version != 1) fail("schema_version", "unsupported schema version");
  if (dt <= 0.0) fail("dt", "must be > 0");
  if (max_ticks < 1) fail("max_ticks", "must be >= 1");
  if (map_resolution <= 0.0) fail("map.resolution", "must be > 0");
  if (world.bounds.width() <= 0.0 || world.bounds.height() <= 0.0) {
    fail("world.bounds", "max must exceed min");
  }
  try {
    sensor.validate();
  } catch (const std::exception& e) {
    fail("sensor", e.what());
  }
  try {
    filter.validate();
  } catch (const std::exception& e) {
    fail("filter", e.what());
  }
  try {
    weights.validate();
  } catch (const std::exception& e) {
    fail("planner", e.what());
  }
  try {
    cliff.validate();
  } catch (const std::exception& e) {
    fail("cliff", e.what());
  }
  try {
    landing.validate();
  } catch (const std::exception& e) {
    fail("landing", e.what());
  }
  if (pursuit.lookahead <= 0.0) fail("pursuit.lookahead", "must be > 0");
  if (tether.total_length <= 0.0) fail("tether.length", "must be > 0");
  if (tether.wind_rate <= 0.0) fail("tether.wind_rate", "must be > 0");
  if (tether.flight_radius <= tether.assumed_pole_radius) {
    fail("tether.flight_radius", "must exceed the assumed pole radius");
  }
  if (tether.revolution_angle_deg < 0.0 || tether.revolution_angle_deg >= 360.0) {
    fail("tether.revolution_angle_deg", "must be in [0, 360)");
  }
  if (tether.attempt_limit < 1) fail("tether.attempt_limit", "must be >= 1");
  if (anchor.peakness_threshold <= 0.0) fail("anchor.peakness_threshold", "must be > 0");
  if (anchor.neighborhood_radius <= 0.0) fail("anchor.neighborhood_radius", "must be > 0");
  if (anchor.region_radius <= 0.0) fail("anchor.region_radius", "must be > 0");

  const worldsim::WorldModel model = build_world();  // validates world invariants
  if (!model.bounds.contains(ugv.start.x, ugv.start.y)) {
    fail("robots.ugv.start", "outside world bounds");
  }
  if (!model.bounds.contains(uav.start.x, uav.start.y)) {
    fail("robots.uav.start", "outside world bounds");
  }
  if (!model.bounds.contains(goal.x, goal.y)) fail("goal", "outside world bounds");

  // W_NaN must exceed any reachable valid-cell cost in this world.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double z : model.heightfield.data) {
    lo = std::min(lo, z);
    hi = std::max(hi, z);
  }
  for (const auto& box : model.obstacles) hi = std::max(hi, box.top());
  for (const auto& pole : model.poles) hi = std::max(hi, pole.top());
  const double max_valid_cost =
      weights.w_traversability / weights.eps_traversability + weights.w_elevation * (hi - lo);
  if (weights.w_unknown <= max_valid_cost) {
    fail("planner.w_nan", "must exceed the largest valid-cell cost (" +
                              std::to_string(max_valid_cost) + ") reachable in this world");
  }

  (void)load_hook_model();  // referenced files must resolve
}

namespace {

Scenario parse_scenario(const json& j, const std::string& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  expect_keys(j, "$",
              {"schema_version", "seed", "dt", "max_ticks", "world", "robots", "goal", "map",
               "sensor", "filter", "planner", "pursuit", "cliff", "anchor", "landing", "tether",
               "mission"});
  s.schema_version = get_int(j, "$", "schema_version");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      fail("$.seed", "expected a non-negative integer");
    }
    s.seed = j.at("seed").get<uint64_t>();
  }
  s.dt = get_number(j, "$", "dt", 0.05);
  s.max_ticks = get_int(j, "$", "max_ticks", 12000);

  if (!j.contains("world")) fail("$.world", "required object missing");
  {
    const auto& w = j.at("world");
    expect_keys(w, "$.world", {"bounds", "heightfield", "obstacles", "poles"});
    if (!w.contains("bounds")) fail("$.world.bounds", "required object missing");
    const auto& b = w.at("bounds");
    expect_keys(b, "$.world.bounds", {"min", "max"});
    s.world.bounds.min = get_vec2(b, "$.world.bounds", "min");
    s.world.bounds.max = get_vec2(b, "$.world.bounds", "max");
    if (w.contains("heightfield")) {
      s.world.heightfield = parse_heightfield(w.at("heightfield"), "$.world.heightfield");
    }
    if (w.contains("obstacles")) {
      const auto& obstacles = w.at("obstacles");
      if (!obstacles.is_array()) fail("$.world.obstacles", "expected an array");
      for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const std::string path = "$.world.obstacles[" + std::to_string(i) + "]";
        expect_keys(obstacles[i], path, {"center", "extents"});
        worldsim::BoxObstacle box;
        box.center = get_vec3(obstacles[i], path, "center");
        box.extents = get_vec3(obstacles[i], path, "extents");
        if (box.extents.x <= 0.0 || box.extents.y <= 0.0 || box.extents.z <= 0.0) {
          fail(path + ".extents", "must be > 0");
        }
        s.world.obstacles.push_back(box);
      }
    }
    if (w.contains("poles")) {
      const auto& poles = w.at("poles");
      if (!poles.is_array()) fail("$.world.poles", "expected an array");
      for (std::size_t i = 0; i < poles.size(); ++i) {
        const std::string path = "$.world.poles[" + std::to_string(i) + "]";
        expect_keys(poles[i], path, {"center", "radius", "base", "height"});
        worldsim::Pole pole;
        pole.center = get_vec2(poles[i], path, "center");
        pole.radius = get_number(poles[i], path, "radius");
        pole.base = get_number(poles[i], path, "base", 0.0);
        pole.height = get_number(poles[i], path, "height");
        if (pole.radius <= 0.0) fail(path + ".radius", "must be > 0");
        if (pole.height <= 0.0) fail(path + ".height", "must be > 0");
        s.world.poles.push_back(pole);
      }
    }
  }

  if (j.contains("robots")) {
    const auto& robots = j.at("robots");
    expect_keys(robots, "$.robots", {"ugv", "uav"});
    if (robots.contains("ugv")) {
      const auto& ugv = robots.at("ugv");
      expect_keys(ugv, "$.robots.ugv", {"start", "heading", "footprint_radius"});
      s.ugv.start = get_vec2(ugv, "$.robots.ugv", "start", s.ugv.start);
      s.ugv.heading = get_number(ugv, "$.robots.ugv", "heading", s.ugv.heading);
      s.ugv.footprint_radius =
          get_number(ugv, "$.robots.ugv", "footprint_radius", s.ugv.footprint_radius);
      if (s.ugv.footprint_radius <= 0.0) fail("$.robots.ugv.footprint_radius", "must be > 0");
    }
    if (robots.contains("uav")) {
      const auto& uav = robots.at("uav");
      expect_keys(uav, "$.robots.uav",
                  {"start", "speed", "climb_rate", "clearance", "standoff"});
      s.uav.start = get_vec3(uav, "$.robots.uav", "start", s.uav.start);
      s.uav.speed = get_number(uav, "$.robots.uav", "speed", s.uav.speed);
      s.uav.climb_rate = get_number(uav, "$.robots.uav", "climb_rate", s.uav.climb_rate);
      s.uav.clearance = get_number(uav, "$.robots.uav", "clearance", s.uav.clearance);
      s.uav.standoff = get_number(uav, "$.robots.uav", "standoff", s.uav.standoff);
      if (s.uav.speed <= 0.0) fail("$.robots.uav.speed", "must be > 0");
    }
  }

  s.goal = get_vec2(j, "$", "goal");
  if (j.contains("map")) {
    expect_keys(j.at("map"), "$.map", {"resolution"});
    s.map_resolution = get_number(j.at("map"), "$.map", "resolution", s.map_resolution);
    if (s.map_resolution <= 0.0) fail("$.map.resolution", "must be > 0");
  }

  if (j.contains("sensor")) {
    const auto& sensor = j.at("sensor");
    expect_keys(sensor, "$.sensor",
                {"hfov_deg", "vfov_deg", "angular_res_deg", "max_range", "noise_std", "rate_hz"});
    s.sensor.hfov = deg_to_rad(get_number(sensor, "$.sensor", "hfov_deg", 60.0));
    s.sensor.vfov = deg_to_rad(get_number(sensor, "$.sensor", "vfov_deg", 45.0));
    s.sensor.angular_resolution =
        deg_to_rad(get_number(sensor, "$.sensor", "angular_res_deg", 1.0));
    s.sensor.max_range = get_number(sensor, "$.sensor", "max_range", 8.0);
    s.sensor.range_noise_std = get_number(sensor, "$.sensor", "noise_std", 0.0);
    s.sensor.rate_hz = get_number(sensor, "$.sensor", "rate_hz", 5.0);
  }

  if (j.contains("filter")) {
    const auto& filter = j.at("filter");
    expect_keys(filter, "$.filter",
                {"inpaint_radius", "smooth_radius", "slope_divisor", "roughness_divisor",
                 "min_filter_radius"});
    s.filter.inpaint_radius =
        get_number(filter, "$.filter", "inpaint_radius", s.filter.inpaint_radius);
    s.filter.smooth_radius =
        get_number(filter, "$.filter", "smooth_radius", s.filter.smooth_radius);
    s.filter.slope_divisor =
        get_number(filter, "$.filter", "slope_divisor", s.filter.slope_divisor);
    s.filter.roughness_divisor =
        get_number(filter, "$.filter", "roughness_divisor", s.filter.roughness_divisor);
    s.filter.min_filter_radius =
        get_number(filter, "$.filter", "min_filter_radius", s.filter.min_filter_radius);
  }

  if (j.contains("planner")) {
    const auto& planner = j.at("planner");
    expect_keys(planner, "$.planner", {"w_t", "w_e", "w_nan", "eps_t"});
    s.weights.w_traversability = get_number(planner, "$.planner", "w_t", s.weights.w_traversability);
    s.weights.w_elevation = get_number(planner, "$.planner", "w_e", s.weights.w_elevation);
    s.weights.w_unknown = get_number(planner, "$.planner", "w_nan", s.weights.w_unknown);
    s.weights.eps_traversability =
        get_number(planner, "$.planner", "eps_t", s.weights.eps_traversability);
  }

  if (j.contains("pursuit")) {
    const auto& pursuit = j.at("pursuit");
    expect_keys(pursuit, "$.pursuit", {"lookahead", "speed", "max_angular_rate"});
    s.pursuit.lookahead = get_number(pursuit, "$.pursuit", "lookahead", s.pursuit.lookahead);
    s.pursuit.speed = get_number(pursuit, "$.pursuit", "speed", s.pursuit.speed);
    s.pursuit.max_angular_rate =
        get_number(pursuit, "$.pursuit", "max_angular_rate", s.pursuit.max_angular_rate);
  }

  if (j.contains("cliff")) {
    const auto& cliff = j.at("cliff");
    expect_keys(cliff, "$.cliff", {"cost_threshold", "perturb_radius", "perturb_count"});
    s.cliff.cost_threshold = get_number(cliff, "$.cliff", "cost_threshold", s.cliff.cost_threshold);
    s.cliff.perturb_radius = get_number(cliff, "$.cliff", "perturb_radius", s.cliff.perturb_radius);
    s.cliff.perturb_count = get_int(cliff, "$.cliff", "perturb_count", s.cliff.perturb_count);
  }

  if (j.contains("anchor")) {
    const auto& anchor = j.at("anchor");
    expect_keys(anchor, "$.anchor",
                {"peakness_threshold", "neighborhood_radius", "region_radius", "search_timeout"});
    s.anchor.peakness_threshold =
        get_number(anchor, "$.anchor", "peakness_threshold", s.anchor.peakness_threshold);
    s.anchor.neighborhood_radius =
        get_number(anchor, "$.anchor", "neighborhood_radius", s.anchor.neighborhood_radius);
    s.anchor.region_radius =
        get_number(anchor, "$.anchor", "region_radius", s.anchor.region_radius);
    s.anchor.search_timeout =
        get_number(anchor, "$.anchor", "search_timeout", s.anchor.search_timeout);
  }

  if (j.contains("landing")) {
    const auto& landing = j.at("landing");
    expect_keys(landing, "$.landing",
                {"search_radius", "max_elev_diff", "max_slope", "min_traversability",
                 "footprint_radius"});
    s.landing.search_radius =
        get_number(landing, "$.landing", "search_radius", s.landing.search_radius);
    s.landing.max_elevation_diff =
        get_number(landing, "$.landing", "max_elev_diff", s.landing.max_elevation_diff);
    s.landing.max_slope = get_number(landing, "$.landing", "max_slope", s.landing.max_slope);
    s.landing.min_traversability =
        get_number(landing, "$.landing", "min_traversability", s.landing.min_traversability);
    s.landing.footprint_radius =
        get_number(landing, "$.landing", "footprint_radius", s.landing.footprint_radius);
  }

  if (j.contains("tether")) {
    const auto& tether = j.at("tether");
    expect_keys(tether, "$.tether",
                {"length", "wind_rate", "hook_model", "flight_radius", "wind_altitude_offset",
                 "revolution_angle_deg", "waypoint_step_deg", "attempt_limit",
                 "assumed_pole_radius"});
    s.tether.total_length = get_number(tether, "$.tether", "length", s.tether.total_length);
    s.tether.wind_rate = get_number(tether, "$.tether", "wind_rate", s.tether.wind_rate);
    s.tether.hook_model = get_string(tether, "$.tether", "hook_model", s.tether.hook_model);
    s.tether.flight_radius =
        get_number(tether, "$.tether", "flight_radius", s.tether.flight_radius);
    s.tether.wind_altitude_offset =
        get_number(tether, "$.tether", "wind_altitude_offset", s.tether.wind_altitude_offset);
    s.tether.revolution_angle_deg =
        get_number(tether, "$.tether", "revolution_angle_deg", s.tether.revolution_angle_deg);
    s.tether.waypoint_step_deg =
        get_number(tether, "$.tether", "waypoint_step_deg", s.tether.waypoint_step_deg);
    s.tether.attempt_limit = get_int(tether, "$.tether", "attempt_limit", s.tether.attempt_limit);
    s.tether.assumed_pole_radius =
        get_number(tether, "$.tether", "assumed_pole_radius", s.tether.assumed_pole_radius);
  }

  if (j.contains("mission")) {
    const auto& mission = j.at("mission");
    expect_keys(mission, "$.mission",
                {"filter_period", "cross_distance", "traversability_floor", "barrier_cost",
                 "path_standoff", "landing_timeout", "stall_tick_limit"});
    s.mission.filter_period =
        get_number(mission, "$.mission", "filter_period", s.mission.filter_period);
    s.mission.cross_distance =
        get_number(mission, "$.mission", "cross_distance", s.mission.cross_distance);
    s.mission.traversability_floor = get_number(mission, "$.mission", "traversability_floor",
                                                s.mission.traversability_floor);
    s.mission.barrier_cost = get_number(mission, "$.mission", "barrier_cost", s.mission.barrier_cost);
    s.mission.path_standoff =
        get_number(mission, "$.mission", "path_standoff", s.mission.path_standoff);
    s.mission.landing_timeout =
        get_number(mission, "$.mission", "landing_timeout", s.mission.landing_timeout);
    s.mission.stall_tick_limit =
        get_int(mission, "$.mission", "stall_tick_limit", s.mission.stall_tick_limit);
  }

  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["seed"] = s.seed;
  j["dt"] = s.dt;
  j["max_ticks"] = s.max_ticks;

  json world;
  world["bounds"] = {{"min", {s.world.bounds.min.x, s.world.bounds.min.y}},
                     {"max", {s.world.bounds.max.x, s.world.bounds.max.y}}};
  world["heightfield"] = heightfield_to_json(s.world.heightfield);
  json obstacles = json::array();
  for (const auto& box : s.world.obstacles) {
    obstacles.push_back({{"center", {box.center.x, box.center.y, box.center.z}},
                         {"extents", {box.extents.x, box.extents.y, box.extents.z}}});
  }
  world["obstacles"] = obstacles;
  json poles = json::array();
  for (const auto& pole : s.world.poles) {
    poles.push_back({{"center", {pole.center.x, pole.center.y}},
                     {"radius", pole.radius},
                     {"base", pole.base},
                     {"height", pole.height}});
  }
  world["poles"] = poles;
  j["world"] = world;

  j["robots"] = {{"ugv",
                  {{"start", {s.ugv.start.x, s.ugv.start.y}},
                   {"heading", s.ugv.heading},
                   {"footprint_radius", s.ugv.footprint_radius}}},
                 {"uav",
                  {{"start", {s.uav.start.x, s.uav.start.y, s.uav.start.z}},
                   {"speed", s.uav.speed},
                   {"climb_rate", s.uav.climb_rate},
                   {"clearance", s.uav.clearance},
                   {"standoff", s.uav.standoff}}}};
  j["goal"] = {s.goal.x, s.goal.y};
  j["map"] = {{"resolution", s.map_resolution}};
  j["sensor"] = {{"hfov_deg", rad_to_deg(s.sensor.hfov)},
                 {"vfov_deg", rad_to_deg(s.sensor.vfov)},
                 {"angular_res_deg", rad_to_deg(s.sensor.angular_resolution)},
                 {"max_range", s.sensor.max_range},
                 {"noise_std", s.sensor.range_noise_std},
                 {"rate_hz", s.sensor.rate_hz}};
  j["filter"] = {{"inpaint_radius", s.filter.inpaint_radius},
                 {"smooth_radius", s.filter.smooth_radius},
                 {"slope_divisor", s.filter.slope_divisor},
                 {"roughness_divisor", s.filter.roughness_divisor},
                 {"min_filter_radius", s.filter.min_filter_radius}};
  j["planner"] = {{"w_t", s.weights.w_traversability},
                  {"w_e", s.weights.w_elevation},
                  {"w_nan", s.weights.w_unknown},
                  {"eps_t", s.weights.eps_traversability}};
  j["pursuit"] = {{"lookahead", s.pursuit.lookahead},
                  {"speed", s.pursuit.speed},
                  {"max_angular_rate", s.pursuit.max_angular_rate}};
  j["cliff"] = {{"cost_threshold", s.cliff.cost_threshold},
                {"perturb_radius", s.cliff.perturb_radius},
                {"perturb_count", s.cliff.perturb_count}};
  j["anchor"] = {{"peakness_threshold", s.anchor.peakness_threshold},
                 {"neighborhood_radius", s.anchor.neighborhood_radius},
                 {"region_radius", s.anchor.region_radius},
                 {"search_timeout", s.anchor.search_timeout}};
  j["landing"] = {{"search_radius", s.landing.search_radius},
                  {"max_elev_diff", s.landing.max_elevation_diff},
                  {"max_slope", s.landing.max_slope},
                  {"min_traversability", s.landing.min_traversability},
                  {"footprint_radius", s.landing.footprint_radius}};
  j["tether"] = {{"length", s.tether.total_length},
                 {"wind_rate", s.tether.wind_rate},
                 {"hook_model", s.tether.hook_model},
                 {"flight_radius", s.tether.flight_radius},
                 {"wind_altitude_offset", s.tether.wind_altitude_offset},
                 {"revolution_angle_deg", s.tether.revolution_angle_deg},
                 {"waypoint_step_deg", s.tether.waypoint_step_deg},
                 {"attempt_limit", s.tether.attempt_limit},
                 {"assumed_pole_radius", s.tether.assumed_pole_radius}};
  j["mission"] = {{"filter_period", s.mission.filter_period},
                  {"cross_distance", s.mission.cross_distance},
                  {"traversability_floor", s.mission.traversability_floor},
                  {"barrier_cost", s.mission.barrier_cost},
                  {"path_standoff", s.mission.path_standoff},
                  {"landing_timeout", s.mission.landing_timeout},
                  {"stall_tick_limit", s.mission.stall_tick_limit}};
  return j;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ScenarioError("$", "cannot open scenario file: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ScenarioError("$", std::string("invalid JSON: ") + e.what());
  }
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  return parse_scenario(j, base_dir);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ScenarioError("$", "cannot open for writing: " + path);
  os << scenario_to_json_text(scenario) << "\n";
}

std::string scenario_to_json_text(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2);
}

}  // namespace tcs::scenario
