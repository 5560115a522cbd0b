#include "tcs/gridmap/grid_map.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tcs::gridmap {

GridMap::GridMap(double resolution, Vec2 origin, int rows, int cols)
    : resolution_(resolution), origin_(origin), rows_(rows), cols_(cols) {
  if (resolution <= 0.0) throw std::invalid_argument("grid map resolution must be > 0");
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid map dims must be >= 1");
}

GridMap GridMap::from_bounds(const Rect& bounds, double resolution) {
  if (resolution <= 0.0) throw std::invalid_argument("grid map resolution must be > 0");
  const int cols = std::max(1, static_cast<int>(std::ceil(bounds.width() / resolution - 1e-9)));
  const int rows = std::max(1, static_cast<int>(std::ceil(bounds.height() / resolution - 1e-9)));
  const Vec2 origin{bounds.min.x + 0.5 * resolution, bounds.min.y + 0.5 * resolution};
  return GridMap(resolution, origin, rows, cols);
}

std::vector<std::string> GridMap::layer_names() const {
  std::vector<std::string> names;
  names.reserve(layers_.size());
  for (const auto& [name, _] : layers_) names.push_back(name);
  return names;
}

std::vector<double>& GridMap::ensure_layer(const std::string& name) {
  auto it = layers_.find(name);
  if (it == layers_.end()) {
    it = layers_.emplace(name, std::vector<double>(cell_count(), kAbsent)).first;
  }
  return it->second;
}

std::vector<double>& GridMap::layer(const std::string& name) {
  auto it = layers_.find(name);
  if (it == layers_.end()) throw std::out_of_range("no such layer: " + name);
  return it->second;
}

const std::vector<double>& GridMap::layer(const std::string& name) const {
  auto it = layers_.find(name);
  if (it == layers_.end()) throw std::out_of_range("no such layer: " + name);
  return it->second;
}

const std::vector<double>* GridMap::find_layer(const std::string& name) const {
  auto it = layers_.find(name);
  return it == layers_.end() ? nullptr : &it->second;
}

bool GridMap::contains(double x, double y) const {
  const double qx = (x - origin_.x) / resolution_;
  const double qy = (y - origin_.y) / resolution_;
  const int col = static_cast<int>(std::ceil(qx - 0.5));
  const int row = static_cast<int>(std::ceil(qy - 0.5));
  return row >= 0 && row < rows_ && col >= 0 && col < cols_;
}

CellIndex GridMap::position_to_index(double x, double y) const {
  // Nearest cell center; an exact half-cell boundary maps to the lower index.
  const double qx = (x - origin_.x) / resolution_;
  const double qy = (y - origin_.y) / resolution_;
  const CellIndex idx{static_cast<int>(std::ceil(qy - 0.5)), static_cast<int>(std::ceil(qx - 0.5))};
  if (!in_bounds(idx)) throw std::out_of_range("position outside grid map");
  return idx;
}

Vec2 GridMap::index_to_position(CellIndex idx) const {
  if (!in_bounds(idx)) throw std::out_of_range("cell index outside grid map");
  return {origin_.x + idx.col * resolution_, origin_.y + idx.row * resolution_};
}

std::optional<double> GridMap::at(const std::string& name, CellIndex idx) const {
  if (!in_bounds(idx)) throw std::out_of_range("cell index outside grid map");
  const double v = layer(name)[linear(idx)];
  if (!is_valid(v)) return std::nullopt;
  return v;
}

void GridMap::set(const std::string& name, CellIndex idx, double value) {
  if (!in_bounds(idx)) throw std::out_of_range("cell index outside grid map");
  layer(name)[linear(idx)] = value;
}

GridMapView GridMap::submap(const Vec2& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("submap radius must be > 0");
  const CellIndex c = position_to_index(center.x, center.y);  // throws when out of bounds
  const int half = static_cast<int>(std::floor(radius / resolution_ + 1e-9));
  const int r0 = std::max(0, c.row - half);
  const int c0 = std::max(0, c.col - half);
  const int r1 = std::min(rows_ - 1, c.row + half);
  const int c1 = std::min(cols_ - 1, c.col + half);
  return GridMapView(*this, {r0, c0}, r1 - r0 + 1, c1 - c0 + 1);
}

namespace {
constexpr uint32_t kMagic = 0x4d534354;  // "TCSM"
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated grid map file");
  return v;
}
}  // namespace

void GridMap::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_pod(os, kMagic);
  write_pod(os, kVersion);
  write_pod(os, resolution_);
  write_pod(os, origin_.x);
  write_pod(os, origin_.y);
  write_pod(os, static_cast<uint32_t>(rows_));
  write_pod(os, static_cast<uint32_t>(cols_));
  write_pod(os, static_cast<uint32_t>(layers_.size()));
  for (const auto& [name, data] : layers_) {
    write_pod(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

GridMap GridMap::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  if (read_pod<uint32_t>(is) != kMagic) throw std::runtime_error("not a grid map file: " + path);
  if (read_pod<uint32_t>(is) != kVersion) throw std::runtime_error("unsupported grid map version");
  const double resolution = read_pod<double>(is);
  const double ox = read_pod<double>(is);
  const double oy = read_pod<double>(is);
  const int rows = static_cast<int>(read_pod<uint32_t>(is));
  const int cols = static_cast<int>(read_pod<uint32_t>(is));
  GridMap map(resolution, {ox, oy}, rows, cols);
  const uint32_t n_layers = read_pod<uint32_t>(is);
  for (uint32_t i = 0; i < n_layers; ++i) {
    const uint32_t len = read_pod<uint32_t>(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    auto& data = map.ensure_layer(name);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated grid map file");
  }
  return map;
}

IntegrateStats integrate_pointcloud(GridMap& map, const worldsim::PointCloud& cloud) {
  auto& elevation = map.ensure_layer(layers::kElevation);
  IntegrateStats stats;
  for (const auto& p : cloud.points) {
    if (!map.contains(p.x, p.y)) {
      ++stats.dropped;
      continue;
    }
    const auto idx = map.position_to_index(p.x, p.y);
    double& cell = elevation[map.linear(idx)];
    if (!is_valid(cell) || p.z > cell) cell = p.z;
    ++stats.integrated;
  }
  return stats;
}

const std::vector<double>& elevation_for_queries(const GridMap& map) {
  if (const auto* inpainted = map.find_layer(layers::kInpainted)) return *inpainted;
  return map.layer(layers::kElevation);
}

GridMap ground_truth_elevation_map(const worldsim::WorldModel& world, double resolution) {
  GridMap map = GridMap::from_bounds(world.bounds, resolution);
  auto& elevation = map.ensure_layer(layers::kElevation);
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const Vec2 p = map.index_to_position({r, c});
      elevation[map.linear({r, c})] = worldsim::sample_height(world, p.x, p.y);
    }
  }
  return map;
}

}  // namespace tcs::gridmap
