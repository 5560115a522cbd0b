#include "tcs/mapfilter/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tcs/core/log.hpp"

namespace tcs::mapfilter {

using gridmap::is_valid;
using gridmap::kAbsent;
namespace layers = gridmap::layers;

void FilterParams::validate() const {
  if (inpaint_radius <= 0.0 || smooth_radius <= 0.0 || min_filter_radius <= 0.0) {
    throw std::invalid_argument("filter radii must be > 0");
  }
  if (slope_divisor <= 0.0 || roughness_divisor <= 0.0) {
    throw std::invalid_argument("filter divisors must be > 0");
  }
}

std::vector<CellOffset> disc_offsets(double radius, double resolution) {
  const int reach = static_cast<int>(std::ceil(radius / resolution));
  std::vector<CellOffset> offsets;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (std::hypot(dr * resolution, dc * resolution) <= radius) {
        offsets.push_back({dr, dc});
      }
    }
  }
  return offsets;
}

FilterStats inpaint(GridMap& map, const FilterParams& params, Exec exec) {
  const auto& elevation = map.layer(layers::kElevation);
  auto& out = map.ensure_layer(layers::kInpainted);
  const int rows = map.rows(), cols = map.cols();

  const bool any_valid = std::any_of(elevation.begin(), elevation.end(),
                                     [](double v) { return is_valid(v); });
  if (!any_valid) {
    log::info("inpaint: elevation layer has no valid cells, map unchanged");
    std::fill(out.begin(), out.end(), kAbsent);
    return {0, true};
  }

  const auto offsets = disc_offsets(params.inpaint_radius, map.resolution());
  std::vector<std::size_t> filled_per_row(rows, 0);

  detail::parallel_rows(rows, exec, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      if (is_valid(elevation[i])) {
        out[i] = elevation[i];
        continue;
      }
      double sum = 0.0;
      int count = 0;
      for (const auto [dr, dc] : offsets) {
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        const double v = elevation[static_cast<std::size_t>(rr) * cols + cc];
        if (is_valid(v)) {
          sum += v;
          ++count;
        }
      }
      if (count > 0) {
        out[i] = sum / count;
        ++filled_per_row[r];
      } else {
        out[i] = kAbsent;
      }
    }
  });

  FilterStats stats;
  for (const auto n : filled_per_row) stats.inpainted_cells += n;
  return stats;
}

void smooth(GridMap& map, const FilterParams& params, Exec exec) {
  const auto& in = map.layer(layers::kInpainted);
  auto& out = map.ensure_layer(layers::kSmoothed);
  const int rows = map.rows(), cols = map.cols();
  const auto offsets = disc_offsets(params.smooth_radius, map.resolution());

  detail::parallel_rows(rows, exec, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      if (!is_valid(in[i])) {
        out[i] = kAbsent;
        continue;
      }
      double sum = 0.0;
      int count = 0;
      for (const auto [dr, dc] : offsets) {
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        const double v = in[static_cast<std::size_t>(rr) * cols + cc];
        if (is_valid(v)) {
          sum += v;
          ++count;
        }
      }
      out[i] = sum / count;  // count >= 1: the cell itself is valid
    }
  });
}

void compute_slope(GridMap& map, Exec exec) {
  const auto& in = map.layer(layers::kSmoothed);
  auto& out = map.ensure_layer(layers::kSlope);
  const int rows = map.rows(), cols = map.cols();
  const double res = map.resolution();

  detail::parallel_rows(rows, exec, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      // Least-squares plane z = a*x + b*y + d over the valid 3x3 window.
      double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sz = 0, sxz = 0, syz = 0;
      int n = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const double z = in[static_cast<std::size_t>(rr) * cols + cc];
          if (!is_valid(z)) continue;
          const double x = dc * res, y = dr * res;
          sxx += x * x;
          sxy += x * y;
          syy += y * y;
          sx += x;
          sy += y;
          sz += z;
          sxz += x * z;
          syz += y * z;
          ++n;
        }
      }
      if (n < 3) {
        out[i] = kAbsent;
        continue;
      }
      // Normal equations for [a b d]; solved by Cramer's rule.
      const double m00 = sxx, m01 = sxy, m02 = sx;
      const double m11 = syy, m12 = sy, m22 = static_cast<double>(n);
      const double det = m00 * (m11 * m22 - m12 * m12) - m01 * (m01 * m22 - m12 * m02) +
                         m02 * (m01 * m12 - m11 * m02);
      if (std::abs(det) < 1e-12) {
        out[i] = kAbsent;
        continue;
      }
      const double det_a = sxz * (m11 * m22 - m12 * m12) - m01 * (syz * m22 - m12 * sz) +
                           m02 * (syz * m12 - m11 * sz);
      const double det_b = m00 * (syz * m22 - m12 * sz) - sxz * (m01 * m22 - m12 * m02) +
                           m02 * (m01 * sz - syz * m02);
      const double a = det_a / det;
      const double b = det_b / det;
      out[i] = std::atan(std::hypot(a, b));
    }
  });
}

void compute_roughness(GridMap& map, Exec exec) {
  const auto& raw = map.layer(layers::kInpainted);
  const auto& smoothed = map.layer(layers::kSmoothed);
  auto& out = map.ensure_layer(layers::kRoughness);
  const int rows = map.rows(), cols = map.cols();

  detail::parallel_rows(rows, exec, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      out[i] = (is_valid(raw[i]) && is_valid(smoothed[i])) ? std::abs(raw[i] - smoothed[i])
                                                           : kAbsent;
    }
  });
}

void compute_traversability(GridMap& map, const FilterParams& params, Exec exec) {
  const auto& slope = map.layer(layers::kSlope);
  const auto& roughness = map.layer(layers::kRoughness);
  auto& out = map.ensure_layer(layers::kTraversability);
  const int rows = map.rows(), cols = map.cols();

  detail::parallel_rows(rows, exec, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      if (!is_valid(slope[i]) || !is_valid(roughness[i])) {
        out[i] = kAbsent;
        continue;
      }
      const double t = traversability_value(slope[i], roughness[i], params);
      out[i] = std::clamp(t, 0.0, 1.0);
    }
  });
}

void min_filter(GridMap& map, const FilterParams& params, Exec exec) {
  auto& layer = map.layer(layers::kTraversability);
  const std::vector<double> snapshot = layer;
  const int rows = map.rows(), cols = map.cols();
  const auto offsets = disc_offsets(params.min_filter_radius, map.resolution());

  detail::parallel_rows(rows, exec, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      if (!is_valid(snapshot[i])) continue;
      double lowest = snapshot[i];
      for (const auto [dr, dc] : offsets) {
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        const double v = snapshot[static_cast<std::size_t>(rr) * cols + cc];
        if (is_valid(v) && v < lowest) lowest = v;
      }
      layer[i] = lowest;
    }
  });
}

FilterStats run_pipeline(GridMap& map, const FilterParams& params, Exec exec) {
  params.validate();
  const FilterStats stats = inpaint(map, params, exec);
  smooth(map, params, exec);
  compute_slope(map, exec);
  compute_roughness(map, exec);
  compute_traversability(map, params, exec);
  min_filter(map, params, exec);
  return stats;
}

}  // namespace tcs::mapfilter
