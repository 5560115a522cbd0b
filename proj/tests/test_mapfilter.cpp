#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tcs/core/rng.hpp"
#include "tcs/mapfilter/filters.hpp"

using namespace tcs;
using gridmap::CellIndex;
using gridmap::GridMap;
using gridmap::is_valid;
using gridmap::kAbsent;
using mapfilter::FilterParams;
namespace layers = gridmap::layers;

namespace {

GridMap make_map(int rows, int cols, double resolution = 0.1) {
  GridMap map(resolution, {0.0, 0.0}, rows, cols);
  map.ensure_layer(layers::kElevation);
  return map;
}

void fill_layer(GridMap& map, const char* name, double value) {
  auto& layer = map.ensure_layer(name);
  std::fill(layer.begin(), layer.end(), value);
}

GridMap random_noisy_map(int rows, int cols, uint64_t seed) {
  GridMap map = make_map(rows, cols, 0.05);
  auto& elevation = map.layer(layers::kElevation);
  RngStream rng(seed, "mapfilter");
  for (std::size_t i = 0; i < elevation.size(); ++i) {
    if (rng.uniform() < 0.1) continue;
    elevation[i] = 0.2 * rng.gaussian() + 0.3 * std::sin(0.1 * static_cast<double>(i % cols));
  }
  return map;
}

}  // namespace

TEST_CASE("inpaint fills holes from the surrounding mean") {
  FilterParams params;
  params.inpaint_radius = 0.25;

  SUBCASE("a fully valid map passes through unchanged") {
    GridMap map = make_map(8, 8);
    fill_layer(map, layers::kElevation, 0.7);
    mapfilter::inpaint(map, params);
    for (const double v : map.layer(layers::kInpainted)) CHECK(v == doctest::Approx(0.7));
  }

  SUBCASE("a hole surrounded by equal values takes that value") {
    GridMap map = make_map(8, 8);
    fill_layer(map, layers::kElevation, 1.0);
    map.layer(layers::kElevation)[map.linear({4, 4})] = kAbsent;
    const auto stats = mapfilter::inpaint(map, params);
    CHECK(stats.inpainted_cells == 1);
    CHECK(map.at(layers::kInpainted, {4, 4}) == doctest::Approx(1.0));
  }

  SUBCASE("a hole between two plateaus takes the in-radius neighborhood mean") {
    GridMap map = make_map(9, 9);
    auto& elevation = map.layer(layers::kElevation);
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 9; ++c) {
        elevation[map.linear({r, c})] = c < 4 ? 0.0 : 1.0;
      }
    }
    elevation[map.linear({4, 4})] = kAbsent;
    mapfilter::inpaint(map, params);
    const double expected =
        oracle::disc_mean(elevation, 9, 9, 4, 4, map.resolution(), params.inpaint_radius);
    CHECK(map.at(layers::kInpainted, {4, 4}) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("cells far from any data stay absent") {
    GridMap map = make_map(20, 20);
    map.layer(layers::kElevation)[map.linear({0, 0})] = 1.0;
    mapfilter::inpaint(map, params);
    CHECK(!map.at(layers::kInpainted, {10, 10}).has_value());
  }

  SUBCASE("an all-absent map is returned unchanged with a warning") {
    GridMap map = make_map(6, 6);
    const auto stats = mapfilter::inpaint(map, params);
    CHECK(stats.empty_input);
    CHECK(stats.inpainted_cells == 0);
    for (const double v : map.layer(layers::kInpainted)) CHECK(!is_valid(v));
  }
}

TEST_CASE("smoothing is a disc mean over valid cells") {
  FilterParams params;
  params.smooth_radius = 0.25;

  SUBCASE("constant layers are unchanged") {
    GridMap map = make_map(8, 8);
    fill_layer(map, layers::kElevation, 0.4);
    mapfilter::inpaint(map, params);
    mapfilter::smooth(map, params);
    for (const double v : map.layer(layers::kSmoothed)) CHECK(v == doctest::Approx(0.4));
  }

  SUBCASE("a unit spike becomes 1/k at its cell") {
    GridMap map = make_map(11, 11);
    fill_layer(map, layers::kElevation, 0.0);
    map.layer(layers::kElevation)[map.linear({5, 5})] = 1.0;
    mapfilter::inpaint(map, params);
    mapfilter::smooth(map, params);
    const auto k = mapfilter::disc_offsets(params.smooth_radius, map.resolution()).size();
    CHECK(map.at(layers::kSmoothed, {5, 5}) ==
          doctest::Approx(1.0 / static_cast<double>(k)).epsilon(1e-12));
  }

  SUBCASE("a linear ramp is unchanged away from the borders") {
    GridMap map = make_map(12, 12);
    auto& elevation = map.layer(layers::kElevation);
    for (int r = 0; r < 12; ++r) {
      for (int c = 0; c < 12; ++c) elevation[map.linear({r, c})] = 0.2 * c;
    }
    mapfilter::inpaint(map, params);
    mapfilter::smooth(map, params);
    for (int r = 4; r < 8; ++r) {
      for (int c = 4; c < 8; ++c) {
        CHECK(*map.at(layers::kSmoothed, {r, c}) ==
              doctest::Approx(0.2 * c).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("slope comes from the fitted plane") {
  FilterParams params;

  SUBCASE("flat terrain has zero slope") {
    GridMap map = make_map(8, 8);
    fill_layer(map, layers::kElevation, 0.8);
    mapfilter::inpaint(map, params);
    mapfilter::smooth(map, params);
    mapfilter::compute_slope(map);
    for (const double v : map.layer(layers::kSlope)) CHECK(v == doctest::Approx(0.0));
  }

  SUBCASE("a planar ramp recovers its grade") {
    const double grade = 0.6;  // rad
    GridMap map = make_map(12, 12);
    auto& elevation = map.layer(layers::kElevation);
    for (int r = 0; r < 12; ++r) {
      for (int c = 0; c < 12; ++c) {
        elevation[map.linear({r, c})] = std::tan(grade) * c * map.resolution();
      }
    }
    mapfilter::inpaint(map, params);
    mapfilter::smooth(map, params);
    mapfilter::compute_slope(map);
    for (int r = 3; r < 9; ++r) {
      for (int c = 3; c < 9; ++c) {
        CHECK(std::abs(*map.at(layers::kSlope, {r, c}) - grade) < 0.01);
      }
    }
  }

  SUBCASE("slope is rotation-consistent for tilted planes") {
    for (const double theta : {0.3, 0.8, 1.4}) {
      GridMap map = make_map(14, 14);
      auto& elevation = map.layer(layers::kElevation);
      const double gx = std::cos(theta) * 0.5, gy = std::sin(theta) * 0.5;
      for (int r = 0; r < 14; ++r) {
        for (int c = 0; c < 14; ++c) {
          elevation[map.linear({r, c})] =
              gx * c * map.resolution() + gy * r * map.resolution();
        }
      }
      mapfilter::inpaint(map, params);
      mapfilter::smooth(map, params);
      mapfilter::compute_slope(map);
      const double expected = std::atan(0.5);
      for (int r = 5; r < 9; ++r) {
        for (int c = 5; c < 9; ++c) {
          CHECK(std::abs(*map.at(layers::kSlope, {r, c}) - expected) < 0.02);
        }
      }
    }
  }

  SUBCASE("a vertical step saturates toward pi/2") {
    GridMap map = make_map(10, 10);
    auto& elevation = map.layer(layers::kElevation);
    for (int r = 0; r < 10; ++r) {
      for (int c = 0; c < 10; ++c) {
        elevation[map.linear({r, c})] = c >= 5 ? 5.0 : 0.0;
      }
    }
    mapfilter::inpaint(map, params);
    // Slope on the raw step (no smoothing blur) to probe the stencil itself.
    map.ensure_layer(layers::kSmoothed) = map.layer(layers::kInpainted);
    mapfilter::compute_slope(map);
    CHECK(*map.at(layers::kSlope, {5, 5}) > 1.4);  // close to pi/2
  }

  SUBCASE("fewer than three valid neighbors yields no slope") {
    GridMap map = make_map(8, 8);
    map.ensure_layer(layers::kSmoothed);
    map.set(layers::kSmoothed, {3, 3}, 1.0);
    map.set(layers::kSmoothed, {3, 4}, 1.0);
    mapfilter::compute_slope(map);
    CHECK(!map.at(layers::kSlope, {3, 3}).has_value());
  }
}

TEST_CASE("roughness is the deviation from the smoothed surface") {
  FilterParams params;

  SUBCASE("constant terrain is perfectly smooth") {
    GridMap map = make_map(8, 8);
    fill_layer(map, layers::kElevation, 0.5);
    mapfilter::inpaint(map, params);
    mapfilter::smooth(map, params);
    mapfilter::compute_roughness(map);
    for (const double v : map.layer(layers::kRoughness)) CHECK(v == doctest::Approx(0.0));
  }

  SUBCASE("a spike is roughest at the spike") {
    GridMap map = make_map(11, 11);
    fill_layer(map, layers::kElevation, 0.0);
    map.layer(layers::kElevation)[map.linear({5, 5})] = 1.0;
    mapfilter::inpaint(map, params);
    mapfilter::smooth(map, params);
    mapfilter::compute_roughness(map);
    const auto& roughness = map.layer(layers::kRoughness);
    const double at_spike = roughness[map.linear({5, 5})];
    for (std::size_t i = 0; i < roughness.size(); ++i) {
      CHECK(roughness[i] <= at_spike + 1e-12);
    }
  }

  SUBCASE("checkerboard roughness approaches the amplitude") {
    const double a = 0.05;
    GridMap map = make_map(12, 12, 0.1);
    auto& elevation = map.layer(layers::kElevation);
    for (int r = 0; r < 12; ++r) {
      for (int c = 0; c < 12; ++c) {
        elevation[map.linear({r, c})] = ((r + c) % 2 == 0) ? a : -a;
      }
    }
    FilterParams tight = params;
    tight.smooth_radius = 0.1;  // 5-cell plus stencil: mean = -a/5 on +a cells
    mapfilter::inpaint(map, tight);
    mapfilter::smooth(map, tight);
    mapfilter::compute_roughness(map);
    for (int r = 4; r < 8; ++r) {
      for (int c = 4; c < 8; ++c) {
        const double raw = elevation[map.linear({r, c})];
        const double smoothed = oracle::disc_mean(elevation, 12, 12, r, c, 0.1, 0.1);
        CHECK(*map.at(layers::kRoughness, {r, c}) ==
              doctest::Approx(std::abs(raw - smoothed)).epsilon(1e-12));
        CHECK(*map.at(layers::kRoughness, {r, c}) > 0.9 * a);
      }
    }
  }
}

TEST_CASE("traversability formula substitutions") {
  FilterParams params;
  CHECK(mapfilter::traversability_value(0.0, 0.0, params) == doctest::Approx(1.0));
  CHECK(mapfilter::traversability_value(0.6, 0.1, params) == doctest::Approx(0.0));
  CHECK(mapfilter::traversability_value(0.3, 0.05, params) == doctest::Approx(0.5));

  GridMap map = make_map(4, 4);
  auto& slope = map.ensure_layer(layers::kSlope);
  auto& roughness = map.ensure_layer(layers::kRoughness);
  std::fill(slope.begin(), slope.end(), 1.5);  // far beyond the divisor
  std::fill(roughness.begin(), roughness.end(), 0.5);
  slope[0] = kAbsent;
  mapfilter::compute_traversability(map, params);
  CHECK(!map.at(layers::kTraversability, {0, 0}).has_value());
  CHECK(*map.at(layers::kTraversability, {1, 1}) == doctest::Approx(0.0));  // clamped

  SUBCASE("monotone non-increasing in slope and roughness") {
    for (double s = 0.0; s <= 0.9; s += 0.1) {
      CHECK(mapfilter::traversability_value(s + 0.1, 0.02, params) <=
            mapfilter::traversability_value(s, 0.02, params));
      CHECK(mapfilter::traversability_value(0.2, s * 0.2 + 0.01, params) <=
            mapfilter::traversability_value(0.2, s * 0.2, params));
    }
  }
}

TEST_CASE("min filter expands low-traversability discs") {
  FilterParams params;
  params.min_filter_radius = 0.3;

  SUBCASE("uniform layers are unchanged") {
    GridMap map = make_map(10, 10);
    fill_layer(map, layers::kTraversability, 0.8);
    mapfilter::min_filter(map, params);
    for (const double v : map.layer(layers::kTraversability)) CHECK(v == doctest::Approx(0.8));
  }

  SUBCASE("two low spots blank the union of their discs (oracle equality)") {
    GridMap map = make_map(30, 30);
    fill_layer(map, layers::kTraversability, 1.0);
    map.set(layers::kTraversability, {10, 10}, 0.0);
    map.set(layers::kTraversability, {14, 12}, 0.0);
    const auto before = map.layer(layers::kTraversability);
    mapfilter::min_filter(map, params);
    const auto expected =
        oracle::brute_force_min_filter(before, 30, 30, map.resolution(), 0.3);
    CHECK(oracle::layers_identical(map.layer(layers::kTraversability), expected));
  }

  SUBCASE("never increases any cell") {
    GridMap map = random_noisy_map(25, 25, 9);
    auto& trav = map.ensure_layer(layers::kTraversability);
    RngStream rng(10, "minf");
    for (auto& v : trav) v = rng.uniform();
    const auto before = trav;
    mapfilter::min_filter(map, params);
    const auto& after = map.layer(layers::kTraversability);
    for (std::size_t i = 0; i < after.size(); ++i) {
      if (is_valid(before[i])) CHECK(after[i] <= before[i]);
    }
  }
}

TEST_CASE("pipeline order is fixed and idempotent on unchanged elevation") {
  GridMap map = random_noisy_map(40, 40, 21);
  FilterParams params;
  mapfilter::run_pipeline(map, params);

  const auto snapshot_trav = map.layer(layers::kTraversability);
  const auto snapshot_slope = map.layer(layers::kSlope);
  mapfilter::run_pipeline(map, params);
  CHECK(oracle::layers_identical(map.layer(layers::kTraversability), snapshot_trav));
  CHECK(oracle::layers_identical(map.layer(layers::kSlope), snapshot_slope));

  SUBCASE("traversability stays in [0, 1] wherever defined") {
    for (const double v : map.layer(layers::kTraversability)) {
      if (!is_valid(v)) continue;
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("serial and OpenMP kernels produce identical layers") {
  GridMap serial_map = random_noisy_map(60, 45, 33);
  GridMap parallel_map = random_noisy_map(60, 45, 33);
  FilterParams params;
  mapfilter::run_pipeline(serial_map, params, Exec::kSerial);
  mapfilter::run_pipeline(parallel_map, params, Exec::kParallel);
  REQUIRE(serial_map.layer_names() == parallel_map.layer_names());
  for (const auto& name : serial_map.layer_names()) {
    const auto& a = serial_map.layer(name);
    const auto& b = parallel_map.layer(name);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool na = std::isnan(a[i]), nb = std::isnan(b[i]);
      CHECK(na == nb);
      if (!na && !nb) CHECK(a[i] == b[i]);
    }
  }
}
