// Benchmark comparing the serial reference kernels against the OpenMP path.
// Both must produce bit-identical layers; timings are wall-clock medians.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "tcs/core/rng.hpp"
#include "tcs/gridmap/grid_map.hpp"
#include "tcs/mapfilter/filters.hpp"

using tcs::Exec;
using tcs::gridmap::GridMap;
namespace layers = tcs::gridmap::layers;

namespace {

GridMap make_test_map(int rows, int cols) {
  GridMap map(0.05, {0.0, 0.0}, rows, cols);
  auto& elevation = map.ensure_layer(layers::kElevation);
  tcs::RngStream rng(7, "bench");
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (rng.uniform() < 0.07) continue;  // holes for the inpaint stage
      const double x = c * 0.05, y = r * 0.05;
      elevation[static_cast<std::size_t>(r) * cols + c] =
          0.3 * std::sin(0.8 * x) * std::cos(0.5 * y) + 0.02 * rng.gaussian();
    }
  }
  return map;
}

double median_ms(const std::function<void()>& fn, int reps) {
  std::vector<double> samples;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

bool layers_equal(const GridMap& a, const GridMap& b) {
  for (const auto& name : a.layer_names()) {
    const auto& la = a.layer(name);
    const auto& lb = b.layer(name);
    for (std::size_t i = 0; i < la.size(); ++i) {
      const bool na = std::isnan(la[i]), nb = std::isnan(lb[i]);
      if (na != nb || (!na && la[i] != lb[i])) return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const int size = argc > 1 ? std::atoi(argv[1]) : 400;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
  tcs::mapfilter::FilterParams params;

  std::printf("map %dx%d, %d reps (median ms)\n", size, size, reps);
  std::printf("%-16s %10s %10s %9s\n", "stage", "serial", "openmp", "speedup");

  struct Stage {
    const char* name;
    std::function<void(GridMap&, Exec)> run;
  };
  const std::vector<Stage> stages = {
      {"inpaint", [&](GridMap& m, Exec e) { tcs::mapfilter::inpaint(m, params, e); }},
      {"smooth", [&](GridMap& m, Exec e) { tcs::mapfilter::smooth(m, params, e); }},
      {"slope", [&](GridMap& m, Exec e) { tcs::mapfilter::compute_slope(m, e); }},
      {"roughness", [&](GridMap& m, Exec e) { tcs::mapfilter::compute_roughness(m, e); }},
      {"traversability",
       [&](GridMap& m, Exec e) { tcs::mapfilter::compute_traversability(m, params, e); }},
      {"min_filter", [&](GridMap& m, Exec e) { tcs::mapfilter::min_filter(m, params, e); }},
  };

  GridMap serial_map = make_test_map(size, size);
  GridMap parallel_map = make_test_map(size, size);

  bool all_equal = true;
  for (const auto& stage : stages) {
    const double t_serial =
        median_ms([&] { stage.run(serial_map, Exec::kSerial); }, reps);
    const double t_parallel =
        median_ms([&] { stage.run(parallel_map, Exec::kParallel); }, reps);
    all_equal = all_equal && layers_equal(serial_map, parallel_map);
    std::printf("%-16s %9.2f %9.2f %8.2fx\n", stage.name, t_serial, t_parallel,
                t_serial / t_parallel);
  }

  std::printf("serial/openmp layers identical: %s\n", all_equal ? "yes" : "NO");
  return all_equal ? 0 : 1;
}
