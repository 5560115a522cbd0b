#include "tcs/detect/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tcs/mapfilter/filters.hpp"

namespace tcs::detect {

using gridmap::is_valid;
namespace layers = gridmap::layers;

void CliffParams::validate() const {
  if (cost_threshold <= 0.0) throw std::invalid_argument("cliff cost threshold must be > 0");
  if (perturb_radius <= 0.0) throw std::invalid_argument("cliff perturbation radius must be > 0");
  if (perturb_count < 1) throw std::invalid_argument("cliff perturbation count must be >= 1");
}

void LandingParams::validate() const {
  if (search_radius <= 0.0 || max_elevation_diff <= 0.0 || max_slope <= 0.0 ||
      footprint_radius <= 0.0) {
    throw std::invalid_argument("landing parameters must be > 0");
  }
  if (min_traversability <= 0.0 || min_traversability > 1.0) {
    throw std::invalid_argument("landing min traversability must be in (0, 1]");
  }
}

CliffResult detect_cliff(const GridMap& map, Vec2 start, Vec2 goal,
                         const planner::PlanWeights& weights, const CliffParams& params) {
  params.validate();
  {
    const auto start_idx = map.position_to_index(start.x, start.y);
    const auto& trav = map.layer(layers::kTraversability);
    const auto& elev = gridmap::elevation_for_queries(map);
    const std::size_t s = map.linear(start_idx);
    if (std::isnan(trav[s]) || std::isnan(elev[s])) {
      throw std::invalid_argument("detect_cliff: start cell has no valid map data");
    }
  }

  // Two-turn Archimedean spiral of perturbed goals; sample 0 is the goal
  // itself.
  CliffResult best;
  best.best_cost = std::numeric_limits<double>::infinity();
  best.best_goal = goal;
  for (int k = 0; k <= params.perturb_count; ++k) {
    const double frac = static_cast<double>(k) / params.perturb_count;
    const double angle = 2.0 * (2.0 * M_PI) * frac;
    const double radius = params.perturb_radius * frac;
    const Vec2 candidate = goal + Vec2{radius * std::cos(angle), radius * std::sin(angle)};
    if (!map.contains(candidate.x, candidate.y)) continue;
    const auto path = planner::astar_plan(map, start, candidate, weights);
    if (!path) continue;
    if (path->total_cost < best.best_cost) {
      best.best_cost = path->total_cost;
      best.best_goal = candidate;
      best.best_path = *path;
    }
  }
  best.cliff = best.best_cost > params.cost_threshold;
  return best;
}

std::optional<AnchorCandidate> anchor_moments(const GridMap& map, CellIndex center,
                                              double radius) {
  if (!map.in_bounds(center)) throw std::out_of_range("cell index outside grid map");
  const auto& elevation = gridmap::elevation_for_queries(map);
  const double res = map.resolution();
  const auto offsets = mapfilter::disc_offsets(radius, res);

  // Lowest valid cell in the neighborhood sets the h(p) datum.
  double lowest = std::numeric_limits<double>::infinity();
  int count = 0;
  for (const auto [dr, dc] : offsets) {
    const CellIndex idx{center.row + dr, center.col + dc};
    if (!map.in_bounds(idx)) continue;
    const double v = elevation[map.linear(idx)];
    if (!is_valid(v)) continue;
    lowest = std::min(lowest, v);
    ++count;
  }
  if (count == 0) return std::nullopt;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto [dr, dc] : offsets) {
    const CellIndex idx{center.row + dr, center.col + dc};
    if (!map.in_bounds(idx)) continue;
    const double v = elevation[map.linear(idx)];
    if (!is_valid(v)) continue;
    const double h = v - lowest;
    const double x = dc * res;
    const double y = dr * res;
    sxx += h * x * x;
    syy += h * y * y;
    sxy += h * x * y;
  }
  const double n = static_cast<double>(count);

  AnchorCandidate candidate;
  candidate.index = center;
  candidate.position = map.index_to_position(center);
  candidate.sigma_xx = sxx / n;
  candidate.sigma_yy = syy / n;
  candidate.sigma_xy = sxy / n;
  candidate.neighborhood_radius = radius;
  const double half_trace = 0.5 * (candidate.sigma_xx + candidate.sigma_yy);
  const double disc = std::hypot(0.5 * (candidate.sigma_xx - candidate.sigma_yy),
                                 candidate.sigma_xy);
  candidate.sigma_major = half_trace + disc;
  candidate.peakness = 1.0 / std::max(candidate.sigma_major, kSigmaFloor);
  return candidate;
}

std::optional<AnchorCandidate> peakness(const GridMap& map, CellIndex center, double radius) {
  if (!map.in_bounds(center)) throw std::out_of_range("cell index outside grid map");
  const auto& elevation = gridmap::elevation_for_queries(map);
  const double center_value = elevation[map.linear(center)];
  if (!is_valid(center_value)) return std::nullopt;

  const auto offsets = mapfilter::disc_offsets(radius, map.resolution());
  double lowest = std::numeric_limits<double>::infinity();
  int count = 0;
  for (const auto [dr, dc] : offsets) {
    const CellIndex idx{center.row + dr, center.col + dc};
    if (!map.in_bounds(idx)) continue;
    const double v = elevation[map.linear(idx)];
    if (!is_valid(v)) continue;
    ++count;
    lowest = std::min(lowest, v);
    if ((dr != 0 || dc != 0) && v >= center_value) return std::nullopt;  // not strictly highest
  }
  if (count < kMinNeighborhoodCells) return std::nullopt;

  double mass = 0.0;
  for (const auto [dr, dc] : offsets) {
    const CellIndex idx{center.row + dr, center.col + dc};
    if (!map.in_bounds(idx)) continue;
    const double v = elevation[map.linear(idx)];
    if (is_valid(v)) mass += v - lowest;
  }
  if (mass < kMinNeighborhoodMass) return std::nullopt;

  return anchor_moments(map, center, radius);
}

std::optional<AnchorCandidate> detect_anchor(const GridMap& map, Vec2 region_center,
                                             double region_radius, double peakness_threshold,
                                             double neighborhood_radius, Exec exec) {
  if (region_radius <= 0.0) throw std::invalid_argument("anchor region radius must be > 0");
  const int rows = map.rows(), cols = map.cols();
  std::vector<double> scores(map.cell_count(), -1.0);

  detail::parallel_rows(rows, exec, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const CellIndex idx{r, c};
      const Vec2 p = map.index_to_position(idx);
      if ((p - region_center).norm() > region_radius) continue;
      const auto candidate = peakness(map, idx, neighborhood_radius);
      if (candidate && candidate->peakness > peakness_threshold) {
        scores[map.linear(idx)] = candidate->peakness;
      }
    }
  });

  // Deterministic reduce: highest peakness, lower index on ties.
  int best_cell = -1;
  double best_score = -1.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > best_score) {
      best_score = scores[i];
      best_cell = static_cast<int>(i);
    }
  }
  if (best_cell < 0) return std::nullopt;
  return anchor_moments(map, {best_cell / cols, best_cell % cols}, neighborhood_radius);
}

std::optional<Vec2> find_landing_pose(const GridMap& map, Vec2 uav_position,
                                      const LandingParams& params) {
  params.validate();
  const auto& elevation = gridmap::elevation_for_queries(map);
  const auto* slope = map.find_layer(layers::kSlope);
  const auto* trav = map.find_layer(layers::kTraversability);
  if (slope == nullptr || trav == nullptr) return std::nullopt;

  struct Candidate {
    double dist;
    CellIndex idx;
  };
  std::vector<Candidate> candidates;
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const Vec2 p = map.index_to_position({r, c});
      const double d = (p - uav_position).norm();
      if (d <= params.search_radius) candidates.push_back({d, {r, c}});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.idx < b.idx;
  });

  const auto footprint = mapfilter::disc_offsets(params.footprint_radius, map.resolution());
  for (const auto& cand : candidates) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto [dr, dc] : footprint) {
      const CellIndex idx{cand.idx.row + dr, cand.idx.col + dc};
      if (!map.in_bounds(idx)) {
        ok = false;
        break;
      }
      const std::size_t i = map.linear(idx);
      const double e = elevation[i];
      const double s = (*slope)[i];
      const double t = (*trav)[i];
      if (!is_valid(e) || !is_valid(s) || !is_valid(t) || s > params.max_slope ||
          t < params.min_traversability) {
        ok = false;
        break;
      }
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    if (ok && hi - lo <= params.max_elevation_diff) {
      return map.index_to_position(cand.idx);
    }
  }
  return std::nullopt;
}

}  // namespace tcs::detect
