#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcs/core/log.hpp"
#include "tcs/detect/detect.hpp"
#include "tcs/io/exports.hpp"
#include "tcs/mapfilter/filters.hpp"
#include "tcs/mission/mission.hpp"
#include "tcs/planner/planner.hpp"
#include "tcs/scenario/scenario.hpp"

namespace fs = std::filesystem;
using tcs::gridmap::GridMap;

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir{"out"};
  std::optional<uint64_t> seed;
  std::optional<int> max_ticks;
  bool export_svg{false};
  bool quiet{false};
  std::string map_path;
};

tcs::scenario::Scenario load(const CommonArgs& args) {
  auto scenario = tcs::scenario::load_scenario(args.scenario_path);
  if (args.seed) scenario.seed = *args.seed;
  if (args.max_ticks) scenario.max_ticks = *args.max_ticks;
  if (args.quiet) tcs::log::set_level(tcs::log::Level::kQuiet);
  return scenario;
}

/// Map for component subcommands: a saved map when --map is given, otherwise
/// a fully observed scan of the scenario's ground truth.
GridMap component_map(const tcs::scenario::Scenario& scenario, const CommonArgs& args) {
  if (!args.map_path.empty()) return GridMap::load(args.map_path);
  GridMap map =
      tcs::gridmap::ground_truth_elevation_map(scenario.build_world(), scenario.map_resolution);
  tcs::mapfilter::run_pipeline(map, scenario.filter);
  return map;
}

int cmd_run(const CommonArgs& args) {
  const auto scenario = load(args);
  tcs::mission::MissionSim sim(scenario);
  const auto log = sim.run();

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  tcs::mission::write_mission_ndjson(log, (out / "mission_log.ndjson").string());
  tcs::mission::write_summary_json(log, (out / "summary.json").string());
  tcs::mission::write_trajectory_csv(log, false, (out / "ugv_trajectory.csv").string());
  tcs::mission::write_trajectory_csv(log, true, (out / "uav_trajectory.csv").string());
  tcs::io::export_layers(sim.map(), (out / "layers").string(), "map");
  sim.map().save((out / "map.tcsmap").string());

  if (args.export_svg) {
    std::vector<tcs::Vec3> ugv_traj, uav_traj;
    for (const auto& record : log.records) {
      ugv_traj.push_back(record.ugv_pose.position);
      uav_traj.push_back(record.uav_pose.position);
    }
    tcs::io::write_annotated_svg(sim.map(), ugv_traj, uav_traj, sim.anchor(),
                                 (out / "mission.svg").string());
  }

  if (!args.quiet) {
    std::printf("outcome: %s", tcs::mission::to_string(log.outcome));
    if (!log.failure_reason.empty()) std::printf(" (%s)", log.failure_reason.c_str());
    std::printf(" after %zu ticks\n", log.records.size());
  }
  return log.outcome == tcs::mission::State::kDone ? 0 : 1;
}

int cmd_filter(const CommonArgs& args) {
  const auto scenario = load(args);
  GridMap map = args.map_path.empty()
                    ? tcs::gridmap::ground_truth_elevation_map(scenario.build_world(),
                                                               scenario.map_resolution)
                    : GridMap::load(args.map_path);
  const auto stats = tcs::mapfilter::run_pipeline(map, scenario.filter);
  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  tcs::io::export_layers(map, (out / "layers").string(), "map");
  map.save((out / "filtered.tcsmap").string());
  if (!args.quiet) {
    std::printf("filtered %d x %d map, %zu cells inpainted\n", map.rows(), map.cols(),
                stats.inpainted_cells);
  }
  return 0;
}

int cmd_plan(const CommonArgs& args) {
  const auto scenario = load(args);
  const GridMap map = component_map(scenario, args);
  const auto path = tcs::planner::astar_plan(map, scenario.ugv.start, scenario.goal,
                                             scenario.weights);
  if (!path) {
    std::fprintf(stderr, "no path found\n");
    return 1;
  }
  fs::create_directories(args.out_dir);
  tcs::planner::write_path_csv(*path, map, scenario.weights,
                               (fs::path(args.out_dir) / "path.csv").string());
  nlohmann::json j;
  j["cost"] = path->total_cost;
  j["cells"] = path->cells.size();
  std::printf("%s\n", j.dump().c_str());
  return 0;
}

int cmd_detect_anchor(const CommonArgs& args) {
  const auto scenario = load(args);
  const GridMap map = component_map(scenario, args);
  const auto candidate =
      tcs::detect::detect_anchor(map, scenario.goal, scenario.anchor.region_radius,
                                 scenario.anchor.peakness_threshold,
                                 scenario.anchor.neighborhood_radius);
  nlohmann::json j;
  j["found"] = candidate.has_value();
  if (candidate) {
    j["position"] = {candidate->position.x, candidate->position.y};
    j["peakness"] = candidate->peakness;
    j["sigma_major"] = candidate->sigma_major;
  }
  std::printf("%s\n", j.dump().c_str());
  return 0;
}

int cmd_detect_cliff(const CommonArgs& args) {
  const auto scenario = load(args);
  const GridMap map = component_map(scenario, args);
  const auto result = tcs::detect::detect_cliff(map, scenario.ugv.start, scenario.goal,
                                                scenario.weights, scenario.cliff);
  nlohmann::json j;
  j["cliff"] = result.cliff;
  j["best_goal"] = {result.best_goal.x, result.best_goal.y};
  j["best_cost"] = result.best_cost;
  std::printf("%s\n", j.dump().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2.5D tethered UAV/UGV cooperation simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&args](CLI::App* cmd, bool with_map) {
    cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the scenario seed");
    cmd->add_option("--max-ticks", args.max_ticks, "override the tick limit");
    cmd->add_flag("--export-svg", args.export_svg, "write an annotated SVG top view");
    cmd->add_flag("--quiet", args.quiet, "suppress console output");
    if (with_map) {
      cmd->add_option("--map", args.map_path, "saved .tcsmap to operate on");
    }
  };

  auto* run = app.add_subcommand("run", "run a full mission");
  add_common(run, false);
  auto* filter = app.add_subcommand("filter", "run the map filter pipeline");
  add_common(filter, true);
  auto* plan = app.add_subcommand("plan", "plan a single UGV path");
  add_common(plan, true);
  auto* danchor = app.add_subcommand("detect-anchor", "run the anchor detector");
  add_common(danchor, true);
  auto* dcliff = app.add_subcommand("detect-cliff", "run the cliff detector");
  add_common(dcliff, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(args);
    if (filter->parsed()) return cmd_filter(args);
    if (plan->parsed()) return cmd_plan(args);
    if (danchor->parsed()) return cmd_detect_anchor(args);
    if (dcliff->parsed()) return cmd_detect_cliff(args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
