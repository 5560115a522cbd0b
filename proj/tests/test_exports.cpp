#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tcs/core/rng.hpp"
#include "tcs/io/exports.hpp"

using namespace tcs;
namespace fs = std::filesystem;
namespace layers = gridmap::layers;

TEST_CASE("16-bit PGM write/read round trip") {
  io::Pgm16 image;
  image.rows = 13;
  image.cols = 9;
  RngStream rng(31, "pgm");
  for (int i = 0; i < 13 * 9; ++i) {
    image.data.push_back(static_cast<uint16_t>(rng.uniform() * 65535.0));
  }
  const auto path = fs::temp_directory_path() / "tcs_pgm_roundtrip.pgm";
  io::write_pgm16(path.string(), image);
  const auto restored = io::read_pgm16(path.string());
  fs::remove(path);
  CHECK(restored.rows == image.rows);
  CHECK(restored.cols == image.cols);
  CHECK(restored.data == image.data);
}

TEST_CASE("layer export writes data, mask and sidecar") {
  gridmap::GridMap map(0.1, {0.05, 0.05}, 8, 8);
  auto& elevation = map.ensure_layer(layers::kElevation);
  elevation[10] = 0.5;
  elevation[11] = 1.5;

  const auto dir = fs::temp_directory_path() / "tcs_layer_export";
  io::export_layers(map, dir.string(), "m");

  const auto mask = io::read_pgm16((dir / "m_elevation_mask.pgm").string());
  int present = 0;
  for (const auto v : mask.data) present += v == 65535 ? 1 : 0;
  CHECK(present == 2);

  const auto values = io::read_pgm16((dir / "m_elevation.pgm").string());
  nlohmann::json meta;
  std::ifstream((dir / "m_layers.json").string()) >> meta;
  const double scale = meta["layers"]["elevation"]["scale"].get<double>();
  const double offset = meta["layers"]["elevation"]["offset"].get<double>();
  CHECK(offset + values.data[10] * scale == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(offset + values.data[11] * scale == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(values.data[0] == 0);  // absent cells are written as level 0

  fs::remove_all(dir);
}

TEST_CASE("SVG export is deterministic and timestamp-free") {
  gridmap::GridMap map(0.1, {0.05, 0.05}, 6, 6);
  auto& trav = map.ensure_layer(layers::kTraversability);
  for (std::size_t i = 0; i < trav.size(); ++i) trav[i] = (i % 3) * 0.5;

  const std::vector<Vec3> traj = {{0.1, 0.1, 0.0}, {0.3, 0.2, 0.0}};
  const auto a = fs::temp_directory_path() / "tcs_a.svg";
  const auto b = fs::temp_directory_path() / "tcs_b.svg";
  io::write_annotated_svg(map, traj, traj, std::nullopt, a.string());
  io::write_annotated_svg(map, traj, traj, std::nullopt, b.string());
  std::stringstream sa, sb;
  sa << std::ifstream(a).rdbuf();
  sb << std::ifstream(b).rdbuf();
  fs::remove(a);
  fs::remove(b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("<svg") != std::string::npos);
}
