#include "tcs/io/exports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace tcs::io {

using gridmap::is_valid;

void write_pgm16(const std::string& path, const Pgm16& image) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "P5\n" << image.cols << " " << image.rows << "\n65535\n";
  std::vector<unsigned char> bytes;
  bytes.reserve(image.data.size() * 2);
  for (const uint16_t v : image.data) {  // big-endian per PGM convention
    bytes.push_back(static_cast<unsigned char>(v >> 8));
    bytes.push_back(static_cast<unsigned char>(v & 0xff));
  }
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

Pgm16 read_pgm16(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw std::runtime_error("not a binary PGM (P5): " + path);
  auto next_token = [&is, &path] {
    std::string token;
    while (is >> token) {
      if (token[0] == '#') {
        std::string rest;
        std::getline(is, rest);
        continue;
      }
      return token;
    }
    throw std::runtime_error("truncated PGM header: " + path);
  };
  Pgm16 image;
  image.cols = std::stoi(next_token());
  image.rows = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval != 65535) throw std::runtime_error("expected 16-bit PGM (maxval 65535): " + path);
  is.get();  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(image.rows) * image.cols;
  std::vector<unsigned char> bytes(n * 2);
  is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!is) throw std::runtime_error("truncated PGM data: " + path);
  image.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    image.data[i] = static_cast<uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  }
  return image;
}

void export_layers(const gridmap::GridMap& map, const std::string& out_dir,
                   const std::string& prefix) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  nlohmann::json meta;
  meta["resolution"] = map.resolution();
  meta["origin"] = {map.origin().x, map.origin().y};
  meta["dims"] = {map.rows(), map.cols()};
  nlohmann::json layer_meta;

  for (const auto& name : map.layer_names()) {
    const auto& data = map.layer(name);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const double v : data) {
      if (!is_valid(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 0.0;
    }
    const double scale = hi > lo ? (hi - lo) / 65535.0 : 1.0;

    Pgm16 values{map.rows(), map.cols(), {}};
    Pgm16 mask{map.rows(), map.cols(), {}};
    values.data.resize(data.size(), 0);
    mask.data.resize(data.size(), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!is_valid(data[i])) continue;  // absent cells stay 0 in the data file
      values.data[i] = static_cast<uint16_t>(std::lround((data[i] - lo) / scale));
      mask.data[i] = 65535;
    }

    const std::string data_file = prefix + "_" + name + ".pgm";
    const std::string mask_file = prefix + "_" + name + "_mask.pgm";
    write_pgm16((fs::path(out_dir) / data_file).string(), values);
    write_pgm16((fs::path(out_dir) / mask_file).string(), mask);
    layer_meta[name] = {{"file", data_file},
                        {"mask", mask_file},
                        {"scale", scale},
                        {"offset", lo}};
  }
  meta["layers"] = layer_meta;

  std::ofstream os((fs::path(out_dir) / (prefix + "_layers.json")).string());
  os << meta.dump(2) << "\n";
}

namespace {

// Dark red (0) through yellow to green (1).
void traversability_color(double t, int& red, int& green, int& blue) {
  t = std::clamp(t, 0.0, 1.0);
  red = static_cast<int>(std::lround(220.0 * (1.0 - t) + 40.0 * t));
  green = static_cast<int>(std::lround(40.0 * (1.0 - t) + 180.0 * t));
  blue = 40;
}

}  // namespace

void write_annotated_svg(const gridmap::GridMap& map, const std::vector<Vec3>& ugv_trajectory,
                         const std::vector<Vec3>& uav_trajectory,
                         const std::optional<detect::AnchorCandidate>& anchor,
                         const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);

  const double res = map.resolution();
  const double px_per_m = 60.0;
  const double width = map.cols() * res * px_per_m;
  const double height = map.rows() * res * px_per_m;
  const Vec2 origin = map.origin();

  auto sx = [&](double x) { return (x - origin.x + 0.5 * res) * px_per_m; };
  auto sy = [&](double y) { return height - (y - origin.y + 0.5 * res) * px_per_m; };

  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << static_cast<int>(width)
     << "\" height=\"" << static_cast<int>(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#202020\"/>\n";

  const auto* trav = map.find_layer(gridmap::layers::kTraversability);
  if (trav != nullptr) {
    const double cell_px = res * px_per_m;
    for (int r = 0; r < map.rows(); ++r) {
      for (int c = 0; c < map.cols(); ++c) {
        const double v = (*trav)[static_cast<std::size_t>(r) * map.cols() + c];
        if (!is_valid(v)) continue;
        int red = 0, green = 0, blue = 0;
        traversability_color(v, red, green, blue);
        const Vec2 p = map.index_to_position({r, c});
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                      "fill=\"rgb(%d,%d,%d)\"/>\n",
                      sx(p.x) - cell_px, sy(p.y) - cell_px, cell_px, cell_px, red, green, blue);
        os << buf;
      }
    }
  }

  auto polyline = [&](const std::vector<Vec3>& traj, const char* color) {
    if (traj.empty()) return;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : traj) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(p.x) - 0.5 * res * px_per_m,
                    sy(p.y) - 0.5 * res * px_per_m);
      os << buf;
    }
    os << "\"/>\n";
  };
  polyline(ugv_trajectory, "#4060ff");
  polyline(uav_trajectory, "#ff4040");

  if (anchor) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"8\" fill=\"none\" stroke=\"#ff2020\" "
                  "stroke-width=\"3\"/>\n",
                  sx(anchor->position.x) - 0.5 * res * px_per_m,
                  sy(anchor->position.y) - 0.5 * res * px_per_m);
    os << buf;
  }
  os << "</svg>\n";
}

}  // namespace tcs::io
