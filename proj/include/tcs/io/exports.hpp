#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcs/detect/detect.hpp"
#include "tcs/gridmap/grid_map.hpp"

namespace tcs::io {

struct Pgm16 {
  int rows{0};
  int cols{0};
  std::vector<uint16_t> data;  // row-major
};

/// Binary (P5) 16-bit PGM, big-endian samples.
void write_pgm16(const std::string& path, const Pgm16& image);
Pgm16 read_pgm16(const std::string& path);

/// One data PGM + one mask PGM (0 = absent, 65535 = present) per layer, plus
/// one JSON sidecar with resolution, origin, dims and per-layer value scale.
void export_layers(const gridmap::GridMap& map, const std::string& out_dir,
                   const std::string& prefix);

/// Annotated top view: traversability colormap, trajectories, anchor marker.
/// Emits no timestamps so identical inputs give identical bytes.
void write_annotated_svg(const gridmap::GridMap& map,
                         const std::vector<Vec3>& ugv_trajectory,
                         const std::vector<Vec3>& uav_trajectory,
                         const std::optional<detect::AnchorCandidate>& anchor,
                         const std::string& path);

}  // namespace tcs::io
