#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tcs/mapfilter/filters.hpp"
#include "tcs/mission/mission.hpp"
#include "tcs/scenario/scenario.hpp"

using namespace tcs;
using mission::MissionLog;
using mission::State;
using mission::TickRecord;

namespace {

scenario::Scenario load_shipped(const char* name) {
  return scenario::load_scenario(std::string(TCS_SCENARIO_DIR) + "/" + name);
}

std::string serialize(const MissionLog& log) {
  const auto path = std::filesystem::temp_directory_path() / "tcs_mission_serialize.ndjson";
  mission::write_mission_ndjson(log, path.string());
  std::ifstream is(path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  std::filesystem::remove(path);
  return buffer.str();
}

}  // namespace

TEST_CASE("a flat obstacle-free mission finishes without leaving tandem navigation") {
  const auto scenario = load_shipped("flat_field.json");
  const auto log = mission::run_mission(scenario);
  CHECK(log.outcome == State::kDone);
  for (const auto state : log.state_sequence()) {
    CHECK((state == State::kTandemNavigate || state == State::kDone));
  }
}

TEST_CASE("a cliff with no pole fails after the anchor search timeout") {
  auto scenario = load_shipped("cliff_no_pole.json");
  const auto log = mission::run_mission(scenario);
  CHECK(log.outcome == State::kFailed);
  CHECK(log.failure_reason.find("anchor") != std::string::npos);
  const auto sequence = log.state_sequence();
  // The mission must at least have confirmed the cliff and crossed.
  CHECK(std::find(sequence.begin(), sequence.end(), State::kAnchorSearch) != sequence.end());
}

TEST_CASE("hook misses exhaust the attempt limit and fail the mission") {
  auto scenario = load_shipped("field_mission.json");
  // A hook table that never catches forces the retry path.
  const auto csv = std::filesystem::temp_directory_path() / "tcs_hopeless_hook.csv";
  {
    std::ofstream os(csv);
    os << "bin_start_deg,probability,trials\n";
    for (int bin = 0; bin < 18; ++bin) os << bin * 20 << ",0.0,10\n";
  }
  scenario.tether.hook_model = csv.string();

  const auto log = mission::run_mission(scenario);
  std::filesystem::remove(csv);

  CHECK(log.outcome == State::kFailed);
  CHECK(log.failure_reason.find("hook") != std::string::npos);
  int attempts = 0;
  for (const auto& record : log.records) {
    for (const auto& event : record.events) {
      if (event.rfind("hook_attempt", 0) == 0) {
        ++attempts;
        CHECK(event.find("missed") != std::string::npos);
      }
    }
  }
  CHECK(attempts == scenario.tether.attempt_limit);
}

TEST_CASE("running out of ticks fails with a terminal record") {
  auto scenario = load_shipped("flat_field.json");
  scenario.max_ticks = 10;
  const auto log = mission::run_mission(scenario);
  CHECK(log.outcome == State::kFailed);
  CHECK(log.failure_reason.find("ticks") != std::string::npos);
  CHECK(log.records.size() == 11);  // ten driven ticks plus the terminal record
  CHECK(log.records.back().state == State::kFailed);
}

TEST_CASE("identical scenario and seed give bit-identical logs") {
  const auto scenario = load_shipped("flat_field.json");
  const auto log_a = mission::run_mission(scenario);
  const auto log_b = mission::run_mission(scenario);
  CHECK(serialize(log_a) == serialize(log_b));
}

TEST_CASE("field mission invariants hold along the whole run") {
  const auto scenario = load_shipped("field_mission.json");
  mission::MissionSim sim(scenario);
  const auto log = sim.run();
  REQUIRE(log.outcome == State::kDone);
  const auto& map = sim.map();
  const auto& trav = map.layer(gridmap::layers::kTraversability);

  SUBCASE("the UGV stays on traversable cells during tandem navigation") {
    // Checked against the final map within one cell of tolerance.
    for (const auto& record : log.records) {
      if (record.state != State::kTandemNavigate) continue;
      const auto& p = record.ugv_pose.position;
      if (!map.contains(p.x, p.y)) continue;
      const auto idx = map.position_to_index(p.x, p.y);
      double best = -1.0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const gridmap::CellIndex n{idx.row + dr, idx.col + dc};
          if (!map.in_bounds(n)) continue;
          const double v = trav[map.linear(n)];
          if (!std::isnan(v)) best = std::max(best, v);
        }
      }
      CHECK(best >= scenario.mission.traversability_floor);
    }
  }

  SUBCASE("while winding, the UAV circles the pole at the flight radius") {
    REQUIRE(sim.anchor().has_value());
    const Vec2 pole = sim.anchor()->position;
    bool on_circle = false;
    for (const auto& record : log.records) {
      if (record.state != State::kWindTether) continue;
      const double distance = (record.uav_pose.position.xy() - pole).norm();
      if (!on_circle && std::abs(distance - scenario.tether.flight_radius) <= 0.1) {
        on_circle = true;  // the approach leg ends here
      }
      if (on_circle) {
        CHECK(std::abs(distance - scenario.tether.flight_radius) <= 0.1);
      }
    }
    CHECK(on_circle);
  }

  SUBCASE("the landed pose satisfies every landing condition") {
    const TickRecord* landed = nullptr;
    for (const auto& record : log.records) {
      if (record.state == State::kLanded) landed = &record;
    }
    REQUIRE(landed != nullptr);
    const Vec2 pos = landed->uav_pose.position.xy();
    const auto& elevation = gridmap::elevation_for_queries(map);
    const auto& slope = map.layer(gridmap::layers::kSlope);
    const auto center = map.position_to_index(pos.x, pos.y);
    const auto offsets =
        mapfilter::disc_offsets(scenario.landing.footprint_radius, map.resolution());
    double lo = 1e300, hi = -1e300;
    for (const auto [dr, dc] : offsets) {
      const gridmap::CellIndex idx{center.row + dr, center.col + dc};
      REQUIRE(map.in_bounds(idx));
      const std::size_t i = map.linear(idx);
      REQUIRE(!std::isnan(elevation[i]));
      CHECK(slope[i] <= scenario.landing.max_slope);
      CHECK(trav[i] >= scenario.landing.min_traversability);
      lo = std::min(lo, elevation[i]);
      hi = std::max(hi, elevation[i]);
    }
    CHECK(hi - lo <= scenario.landing.max_elevation_diff);
  }
}

TEST_CASE("tick records are strictly increasing with one terminal record") {
  const auto scenario = load_shipped("flat_field.json");
  const auto log = mission::run_mission(scenario);
  REQUIRE(!log.records.empty());
  int terminal_records = 0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    if (i > 0) CHECK(log.records[i].tick == log.records[i - 1].tick + 1);
    const auto state = log.records[i].state;
    if (state == State::kDone || state == State::kFailed) ++terminal_records;
  }
  CHECK(terminal_records == 1);
  CHECK(log.records.back().state == log.outcome);
}
