// Acceptance suite: one test case per criterion, each printing a PASS line
// once its assertions hold at the stated tolerances.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "tcs/core/rng.hpp"
#include "tcs/detect/detect.hpp"
#include "tcs/mapfilter/filters.hpp"
#include "tcs/mission/mission.hpp"
#include "tcs/planner/planner.hpp"
#include "tcs/scenario/scenario.hpp"
#include "tcs/tether/tether.hpp"

using namespace tcs;
using gridmap::CellIndex;
using gridmap::GridMap;
using gridmap::kAbsent;
namespace layers = gridmap::layers;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return buffer.str();
}

/// Fully observed 200x200 map at 0.05 m built from an analytic surface and
/// run through the filter pipeline.
GridMap scenario_map(const std::function<double(double, double)>& surface) {
  GridMap map(0.05, {0.025, 0.025}, 200, 200);
  auto& elevation = map.ensure_layer(layers::kElevation);
  for (int r = 0; r < 200; ++r) {
    for (int c = 0; c < 200; ++c) {
      const Vec2 p = map.index_to_position({r, c});
      elevation[map.linear({r, c})] = surface(p.x, p.y);
    }
  }
  mapfilter::FilterParams params;
  mapfilter::run_pipeline(map, params);
  return map;
}

void verify_against_dijkstra(const GridMap& map, Vec2 start, const detect::CliffResult& result,
                             const planner::PlanWeights& weights, double threshold) {
  const double oracle_cost = oracle::dijkstra_cost(
      map, map.position_to_index(start.x, start.y),
      map.position_to_index(result.best_goal.x, result.best_goal.y), weights);
  REQUIRE(result.best_cost == oracle_cost);
  REQUIRE(result.cliff == (oracle_cost > threshold));
}

}  // namespace

TEST_CASE("criterion 1: traversability formula") {
  const auto t0 = std::chrono::steady_clock::now();
  mapfilter::FilterParams params;

  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double slope = 0.9 * i / 9.0;
      const double roughness = 0.18 * j / 9.0;
      const double expected = 0.5 * (1.0 - slope / 0.6) + 0.5 * (1.0 - roughness / 0.1);
      REQUIRE(std::abs(mapfilter::traversability_value(slope, roughness, params) - expected) <=
              1e-9);
    }
  }
  REQUIRE(mapfilter::traversability_value(0.0, 0.0, params) == 1.0);
  REQUIRE(mapfilter::traversability_value(0.6, 0.1, params) == 0.0);
  const double elapsed = seconds_since(t0);
  REQUIRE(elapsed < 1.0);
  std::printf("[criterion 1] PASS traversability formula (%.3f s)\n", elapsed);
}

TEST_CASE("criterion 2: minimum filter expansion") {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 200;
  const double res = 0.05;
  const double radius = 0.3;
  GridMap map(res, {0.5 * res, 0.5 * res}, n, n);
  auto& trav = map.ensure_layer(layers::kTraversability);
  std::fill(trav.begin(), trav.end(), 1.0);

  RngStream rng(2024, "acceptance-minfilter");
  std::vector<CellIndex> zeros;
  for (int k = 0; k < 25; ++k) {
    const CellIndex idx{static_cast<int>(rng.uniform() * n), static_cast<int>(rng.uniform() * n)};
    trav[map.linear(idx)] = 0.0;
    zeros.push_back(idx);
  }
  const std::vector<double> before = trav;

  mapfilter::FilterParams params;
  params.min_filter_radius = radius;
  mapfilter::min_filter(map, params);
  const auto& after = map.layer(layers::kTraversability);

  const auto expected = oracle::brute_force_min_filter(before, n, n, res, radius);
  REQUIRE(after == expected);

  const double half_diagonal = res * std::sqrt(2.0) / 2.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double nearest = 1e300;
      for (const auto z : zeros) {
        nearest = std::min(nearest, std::hypot((r - z.row) * res, (c - z.col) * res));
      }
      const std::size_t i = map.linear({r, c});
      if (nearest <= radius) {
        REQUIRE(after[i] == 0.0);
      } else if (nearest > radius + half_diagonal) {
        REQUIRE(after[i] == before[i]);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  REQUIRE(elapsed < 5.0);
  std::printf("[criterion 2] PASS minimum filter oracle equality (%.3f s)\n", elapsed);
}

TEST_CASE("criterion 3: A* equals Dijkstra on 500 random grids") {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(777, "acceptance-astar");
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 40;
    GridMap map(0.1, {0.05, 0.05}, n, n);
    auto& trav = map.ensure_layer(layers::kTraversability);
    auto& elev = map.ensure_layer(layers::kElevation);
    for (std::size_t i = 0; i < trav.size(); ++i) {
      if (rng.uniform() < 0.2) continue;
      trav[i] = rng.uniform();
      elev[i] = rng.uniform() * 3.0;
    }
    planner::PlanWeights w;
    w.w_traversability = 0.05 + rng.uniform() * 4.0;
    w.w_elevation = rng.uniform() * 2.0;
    w.w_unknown = 0.5 + rng.uniform() * 1000.0;
    w.eps_traversability = 0.005 + rng.uniform() * 0.1;

    int start = -1, goal = -1;
    for (std::size_t i = 0; i < trav.size(); ++i) {
      if (std::isnan(trav[i])) continue;
      if (start < 0) start = static_cast<int>(i);
      goal = static_cast<int>(i);
    }
    REQUIRE(start >= 0);
    REQUIRE(goal > start);

    const CellIndex s{start / n, start % n};
    const CellIndex g{goal / n, goal % n};
    const auto path =
        planner::astar_plan(map, map.index_to_position(s), map.index_to_position(g), w);
    REQUIRE(path.has_value());
    REQUIRE(path->total_cost == oracle::dijkstra_cost(map, s, g, w));

    double recomputed = 0.0;
    for (const auto idx : path->cells) recomputed += planner::cell_cost(map, idx, w);
    REQUIRE(std::abs(path->total_cost - recomputed) <= 1e-9);
  }
  const double elapsed = seconds_since(t0);
  REQUIRE(elapsed < 30.0);
  std::printf("[criterion 3] PASS A*/Dijkstra equality over 500 grids (%.3f s)\n", elapsed);
}

TEST_CASE("criterion 4: peakness moments on hand-computed stencils") {
  // 7x7, 0.1 m cells, neighborhood radius covering the full stencil.
  auto make_stencil = [](const std::function<double(int, int)>& f) {
    GridMap map(0.1, {0.05, 0.05}, 7, 7);
    auto& elev = map.ensure_layer(layers::kElevation);
    for (int r = 0; r < 7; ++r) {
      for (int c = 0; c < 7; ++c) elev[static_cast<std::size_t>(r) * 7 + c] = f(r, c);
    }
    return map;
  };

  // Ridge along the center row, unit height:
  //   sigma_x^2 = (1/49) * 2*(0.1^2 + 0.2^2 + 0.3^2) = 0.28/49, sigma_y = sigma_xy = 0.
  const GridMap ridge = make_stencil([](int r, int) { return r == 3 ? 1.0 : 0.0; });
  const auto ridge_m = detect::anchor_moments(ridge, {3, 3}, 0.45);
  REQUIRE(ridge_m.has_value());
  REQUIRE(std::abs(ridge_m->sigma_xx - 0.28 / 49.0) <= 1e-12);
  REQUIRE(std::abs(ridge_m->sigma_yy - 0.0) <= 1e-12);
  REQUIRE(std::abs(ridge_m->sigma_xy - 0.0) <= 1e-12);
  REQUIRE(std::abs(ridge_m->sigma_major - 0.28 / 49.0) <= 1e-12);
  REQUIRE(std::abs(ridge_m->peakness - 175.0) <= 1e-9);

  // Symmetric peak: center 1.0, cross neighbors 0.4, diagonals 0.25,
  // two-cell cross 0.1:
  //   sigma_x^2 = (1/49) * (2*0.4*0.01 + 4*0.25*0.01 + 2*0.1*0.04) = 0.026/49.
  const GridMap peak = make_stencil([](int r, int c) {
    const int dr = std::abs(r - 3), dc = std::abs(c - 3);
    if (dr == 0 && dc == 0) return 1.0;
    if (dr + dc == 1) return 0.4;
    if (dr == 1 && dc == 1) return 0.25;
    if (dr + dc == 2 && (dr == 0 || dc == 0)) return 0.1;
    return 0.0;
  });
  const auto peak_m = detect::anchor_moments(peak, {3, 3}, 0.45);
  REQUIRE(peak_m.has_value());
  REQUIRE(std::abs(peak_m->sigma_xx - 0.026 / 49.0) <= 1e-12);
  REQUIRE(std::abs(peak_m->sigma_yy - 0.026 / 49.0) <= 1e-12);
  REQUIRE(std::abs(peak_m->sigma_xy - 0.0) <= 1e-12);
  REQUIRE(std::abs(peak_m->sigma_major - 0.026 / 49.0) <= 1e-12);
  REQUIRE(std::abs(peak_m->peakness - 49.0 / 0.026) <= 1e-9);

  // Edge rejection: the isolated peak scores far above the ridge.
  REQUIRE(peak_m->peakness > 5.0 * ridge_m->peakness);

  // Rotating the ridge by 90 degrees leaves peakness bitwise identical.
  const GridMap rotated = make_stencil([](int, int c) { return c == 3 ? 1.0 : 0.0; });
  const auto rotated_m = detect::anchor_moments(rotated, {3, 3}, 0.45);
  REQUIRE(rotated_m.has_value());
  REQUIRE(rotated_m->peakness == ridge_m->peakness);

  std::printf("[criterion 4] PASS peakness stencils (ridge %.3f, peak %.3f)\n",
              ridge_m->peakness, peak_m->peakness);
}

TEST_CASE("criterion 5: cliff detector scenarios") {
  const auto t0 = std::chrono::steady_clock::now();
  planner::PlanWeights weights;
  weights.w_elevation = 0.5;
  detect::CliffParams params;
  params.cost_threshold = 600.0;
  params.perturb_radius = 1.0;
  params.perturb_count = 16;

  const Vec2 start{1.0, 5.0};
  const Vec2 goal{9.0, 5.0};

  SUBCASE("full-width vertical step reports a cliff") {
    const GridMap map = scenario_map([](double x, double) { return x >= 5.0 ? 1.2 : 0.0; });
    const auto result = detect::detect_cliff(map, start, goal, weights, params);
    REQUIRE(result.cliff);
    verify_against_dijkstra(map, start, result, weights, params.cost_threshold);
    std::printf("[criterion 5a] PASS full-width step -> cliff (cost %.1f)\n", result.best_cost);
  }

  SUBCASE("a 1 m ramp gap clears the cliff flag") {
    const GridMap map = scenario_map([](double x, double y) {
      if (std::abs(y - 5.0) <= 0.5) {
        return 1.2 * std::clamp((x - 4.0) / 2.0, 0.0, 1.0);  // ramp corridor
      }
      return x >= 5.0 ? 1.2 : 0.0;
    });
    const auto result = detect::detect_cliff(map, start, goal, weights, params);
    REQUIRE(!result.cliff);
    verify_against_dijkstra(map, start, result, weights, params.cost_threshold);
    // The best path actually runs through the gap corridor where the wall
    // line is crossed.
    bool through_gap = false;
    for (const auto idx : result.best_path.cells) {
      const Vec2 p = map.index_to_position(idx);
      if (std::abs(p.x - 5.0) < 0.3) {
        REQUIRE(std::abs(p.y - 5.0) < 0.5);
        through_gap = true;
      }
    }
    REQUIRE(through_gap);
    std::printf("[criterion 5b] PASS ramp gap -> no cliff (cost %.1f)\n", result.best_cost);
  }

  SUBCASE("a goal on an obstacle is rescued by perturbation") {
    const GridMap map = scenario_map([](double x, double y) {
      const bool on_box = std::abs(x - 5.0) <= 0.4 && std::abs(y - 5.0) <= 0.4;
      return on_box ? 0.5 : 0.0;
    });
    const Vec2 box_goal{5.0, 5.0};
    const auto result = detect::detect_cliff(map, start, box_goal, weights, params);
    REQUIRE(!result.cliff);
    REQUIRE((result.best_goal - box_goal).norm() > 0.1);
    verify_against_dijkstra(map, start, result, weights, params.cost_threshold);
    std::printf("[criterion 5c] PASS goal-on-obstacle -> perturbed goal (%.2f, %.2f)\n",
                result.best_goal.x, result.best_goal.y);
  }

  const double elapsed = seconds_since(t0);
  REQUIRE(elapsed < 10.0);
}

TEST_CASE("criterion 6: hook model and winding geometry") {
  const Vec2 pole{5.0, 5.0};
  const auto plan = tether::circle_trajectory(pole, 0.1, 0.8, 2.0, 180.0, 15.0, {2.0, 5.0});
  const Vec2 entry = plan.waypoints.front().xy() - pole;
  const Vec2 exit = plan.waypoints.back().xy() - pole;
  const double delta =
      wrap_angle(std::atan2(exit.y, exit.x) - std::atan2(entry.y, entry.x) - M_PI);
  REQUIRE(std::abs(delta) <= 1e-9);

  const auto model = tether::HookModel::default_model();
  const int argmax = model.argmax_bin();
  REQUIRE((argmax == 0 || argmax == 9));  // bins containing 0 and 180 degrees

  tether::HookModel half = model;
  half.set_bin(4, 0.5, 10);
  RngStream rng(555, "hook");
  int successes = 0;
  for (int i = 0; i < 10000; ++i) {
    successes += tether::sample_hook_catch(half, 90.0, rng) ? 1 : 0;
  }
  const double rate = successes / 10000.0;
  REQUIRE(std::abs(rate - 0.5) <= 0.02);
  std::printf("[criterion 6] PASS winding end bearing, argmax bin %d, rate %.4f\n", argmax,
              rate);
}

namespace {

struct MissionArtifacts {
  mission::MissionLog log;
  std::optional<detect::AnchorCandidate> anchor;
  tether::TetherState tether;
  double wall_seconds{0.0};
};

MissionArtifacts run_field_mission() {
  const auto scenario =
      scenario::load_scenario(std::string(TCS_SCENARIO_DIR) + "/field_mission.json");
  const auto t0 = std::chrono::steady_clock::now();
  mission::MissionSim sim(scenario);
  MissionArtifacts artifacts;
  artifacts.log = sim.run();
  artifacts.wall_seconds = seconds_since(t0);
  artifacts.anchor = sim.anchor();
  artifacts.tether = sim.tether();
  return artifacts;
}

}  // namespace

TEST_CASE("criteria 7-9: end-to-end field mission, determinism, tether conservation") {
  const auto first = run_field_mission();

  // --- criterion 7: outcome, state sequence, obstacle avoidance, final pose.
  REQUIRE(first.log.outcome == mission::State::kDone);
  REQUIRE(first.wall_seconds < 60.0);

  const std::vector<mission::State> expected_sequence = {
      mission::State::kTandemNavigate, mission::State::kCliffConfirmed,
      mission::State::kUavCrossCliff,  mission::State::kAnchorSearch,
      mission::State::kWindTether,     mission::State::kLandingSearch,
      mission::State::kLanded,         mission::State::kWinchClimb,
      mission::State::kDone};
  REQUIRE(first.log.state_sequence() == expected_sequence);

  // The UGV trajectory never enters the obstacle's min-filtered footprint
  // (the box grown by the 0.3 m min-filter radius).
  const Rect inflated{{3.5 - 0.6 - 0.3, 3.0 - 0.6 - 0.3}, {3.5 + 0.6 + 0.3, 3.0 + 0.6 + 0.3}};
  for (const auto& record : first.log.records) {
    REQUIRE(!inflated.contains(record.ugv_pose.position.x, record.ugv_pose.position.y));
  }

  REQUIRE(!first.tether.wrap_points.empty());
  const Vec2 anchor_xy = first.tether.wrap_points.front().xy();
  const Vec2 final_ugv = first.log.records.back().ugv_pose.position.xy();
  REQUIRE((final_ugv - anchor_xy).norm() <= 0.5);
  std::printf(
      "[criterion 7] PASS end-to-end mission Done in %zu ticks (%.1f s wall), final UGV %.2f m "
      "from anchor\n",
      first.log.records.size(), first.wall_seconds, (final_ugv - anchor_xy).norm());

  // --- criterion 8: bit-identical reruns.
  const auto second = run_field_mission();
  const auto tmp = std::filesystem::temp_directory_path();
  mission::write_mission_ndjson(first.log, (tmp / "tcs_a.ndjson").string());
  mission::write_mission_ndjson(second.log, (tmp / "tcs_b.ndjson").string());
  mission::write_trajectory_csv(first.log, false, (tmp / "tcs_a_ugv.csv").string());
  mission::write_trajectory_csv(second.log, false, (tmp / "tcs_b_ugv.csv").string());
  mission::write_trajectory_csv(first.log, true, (tmp / "tcs_a_uav.csv").string());
  mission::write_trajectory_csv(second.log, true, (tmp / "tcs_b_uav.csv").string());
  REQUIRE(slurp(tmp / "tcs_a.ndjson") == slurp(tmp / "tcs_b.ndjson"));
  REQUIRE(slurp(tmp / "tcs_a_ugv.csv") == slurp(tmp / "tcs_b_ugv.csv"));
  REQUIRE(slurp(tmp / "tcs_a_uav.csv") == slurp(tmp / "tcs_b_uav.csv"));
  for (const char* name : {"tcs_a.ndjson", "tcs_b.ndjson", "tcs_a_ugv.csv", "tcs_b_ugv.csv",
                           "tcs_a_uav.csv", "tcs_b_uav.csv"}) {
    std::filesystem::remove(tmp / name);
  }
  std::printf("[criterion 8] PASS identical seeds give byte-identical logs and CSVs\n");

  // --- criterion 9: tether conservation and tautness at every tick.
  REQUIRE(!first.log.records.empty());
  const double budget = first.log.records.front().tether_deployed +
                        first.log.records.front().tether_wound;
  for (const auto& record : first.log.records) {
    REQUIRE(std::abs(record.tether_deployed + record.tether_wound - budget) <= 1e-9);
    REQUIRE(record.tether_polyline <= record.tether_deployed + 1e-6);
  }
  std::printf("[criterion 9] PASS tether conservation over %zu ticks (budget %.3f m)\n",
              first.log.records.size(), budget);
}
