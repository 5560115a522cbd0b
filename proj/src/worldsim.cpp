#include "tcs/worldsim/world_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcs::worldsim {

namespace {

constexpr double kRayEps = 1e-9;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

double Heightfield::interpolate(double x, double y) const {
  const double fx = clamp((x - origin.x) / resolution, 0.0, static_cast<double>(cols - 1));
  const double fy = clamp((y - origin.y) / resolution, 0.0, static_cast<double>(rows - 1));
  const int c0 = std::min(static_cast<int>(fx), cols - 2 >= 0 ? cols - 2 : 0);
  const int r0 = std::min(static_cast<int>(fy), rows - 2 >= 0 ? rows - 2 : 0);
  if (rows == 1 && cols == 1) return at(0, 0);
  const int c1 = std::min(c0 + 1, cols - 1);
  const int r1 = std::min(r0 + 1, rows - 1);
  const double tx = fx - c0;
  const double ty = fy - r0;
  const double z00 = at(r0, c0), z10 = at(r0, c1), z01 = at(r1, c0), z11 = at(r1, c1);
  return (1.0 - ty) * ((1.0 - tx) * z00 + tx * z10) + ty * ((1.0 - tx) * z01 + tx * z11);
}

void WorldModel::validate() const {
  if (heightfield.resolution <= 0.0) {
    throw std::invalid_argument("world heightfield resolution must be > 0");
  }
  if (heightfield.rows < 1 || heightfield.cols < 1 ||
      heightfield.data.size() != static_cast<std::size_t>(heightfield.rows) * heightfield.cols) {
    throw std::invalid_argument("world heightfield dims do not match data");
  }
  const double cover_x = heightfield.origin.x + (heightfield.cols - 1) * heightfield.resolution;
  const double cover_y = heightfield.origin.y + (heightfield.rows - 1) * heightfield.resolution;
  if (heightfield.origin.x > bounds.min.x + 1e-9 || heightfield.origin.y > bounds.min.y + 1e-9 ||
      cover_x < bounds.max.x - 1e-9 || cover_y < bounds.max.y - 1e-9) {
    throw std::invalid_argument("world heightfield does not cover bounds");
  }
  for (const auto& pole : poles) {
    if (pole.radius <= 0.0 || pole.height <= 0.0) {
      throw std::invalid_argument("pole radius and height must be > 0");
    }
    if (!bounds.contains(pole.center.x, pole.center.y)) {
      throw std::invalid_argument("pole lies outside world bounds");
    }
  }
}

void SensorSpec::validate() const {
  if (hfov <= 0.0 || hfov > M_PI || vfov <= 0.0 || vfov > M_PI) {
    throw std::invalid_argument("sensor FOV must be in (0, pi]");
  }
  if (angular_resolution <= 0.0) throw std::invalid_argument("sensor angular resolution must be > 0");
  if (max_range <= 0.0) throw std::invalid_argument("sensor max range must be > 0");
  if (range_noise_std < 0.0) throw std::invalid_argument("sensor noise stddev must be >= 0");
}

double sample_height(const WorldModel& world, double x, double y) {
  if (!world.bounds.contains(x, y)) {
    throw std::out_of_range("sample_height: position outside world bounds");
  }
  double h = world.heightfield.interpolate(x, y);
  for (const auto& box : world.obstacles) {
    if (box.covers(x, y)) h = std::max(h, box.top());
  }
  for (const auto& pole : world.poles) {
    if (pole.covers(x, y)) h = std::max(h, pole.top());
  }
  return h;
}

namespace {

// Slab intersection with an AABB; returns entry distance.
std::optional<double> intersect_box(const BoxObstacle& box, const Vec3& o, const Vec3& d,
                                    double max_range) {
  const Vec3 lo = box.center - box.extents * 0.5;
  const Vec3 hi = box.center + box.extents * 0.5;
  double tmin = 0.0, tmax = max_range;
  const double os[3] = {o.x, o.y, o.z};
  const double ds[3] = {d.x, d.y, d.z};
  const double los[3] = {lo.x, lo.y, lo.z};
  const double his[3] = {hi.x, hi.y, hi.z};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ds[i]) < 1e-15) {
      if (os[i] < los[i] || os[i] > his[i]) return std::nullopt;
      continue;
    }
    double t0 = (los[i] - os[i]) / ds[i];
    double t1 = (his[i] - os[i]) / ds[i];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return std::nullopt;
  }
  if (tmin < kRayEps) return std::nullopt;  // origin inside or behind
  return tmin;
}

// Finite vertical cylinder: lateral surface plus top cap.
std::optional<double> intersect_pole(const Pole& pole, const Vec3& o, const Vec3& d,
                                     double max_range) {
  double best = std::numeric_limits<double>::infinity();

  const double ox = o.x - pole.center.x;
  const double oy = o.y - pole.center.y;
  const double a = d.x * d.x + d.y * d.y;
  if (a > 1e-15) {
    const double b = 2.0 * (ox * d.x + oy * d.y);
    const double c = ox * ox + oy * oy - pole.radius * pole.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (const double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t < kRayEps || t > max_range) continue;
        const double z = o.z + t * d.z;
        if (z >= pole.base && z <= pole.top()) best = std::min(best, t);
      }
    }
  }
  if (std::abs(d.z) > 1e-15) {
    const double t = (pole.top() - o.z) / d.z;
    if (t >= kRayEps && t <= max_range) {
      const double x = o.x + t * d.x, y = o.y + t * d.y;
      if (pole.covers(x, y)) best = std::min(best, t);
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

// March at resolution/2, then bisect the bracketing interval.
std::optional<double> intersect_heightfield(const Heightfield& hf, const Vec3& o, const Vec3& d,
                                            double max_range) {
  const double step = 0.5 * hf.resolution;
  auto above = [&](double t) {
    const Vec3 p = o + d * t;
    return p.z - hf.interpolate(p.x, p.y);
  };
  double t0 = 0.0;
  double f0 = above(0.0);
  if (f0 <= 0.0) return std::nullopt;  // origin at or below terrain
  while (t0 < max_range) {
    const double t1 = std::min(t0 + step, max_range);
    const double f1 = above(t1);
    if (f1 <= 0.0) {
      double lo = t0, hi = t1;
      for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (above(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    if (t1 >= max_range) break;
    t0 = t1;
    f0 = f1;
  }
  return std::nullopt;
}

}  // namespace

std::optional<RayHit> raycast(const WorldModel& world, const Vec3& origin, const Vec3& dir,
                              double max_range) {
  double best = std::numeric_limits<double>::infinity();
  if (auto t = intersect_heightfield(world.heightfield, origin, dir, max_range)) {
    best = std::min(best, *t);
  }
  for (const auto& box : world.obstacles) {
    if (auto t = intersect_box(box, origin, dir, max_range)) best = std::min(best, *t);
  }
  for (const auto& pole : world.poles) {
    if (auto t = intersect_pole(pole, origin, dir, max_range)) best = std::min(best, *t);
  }
  if (!std::isfinite(best)) return std::nullopt;
  return RayHit{best, origin + dir * best};
}

PointCloud render_depth_pointcloud(const WorldModel& world, const Pose& sensor_pose,
                                   const SensorSpec& spec, RngStream& rng, Exec exec) {
  const int n_az = static_cast<int>(std::floor(spec.hfov / spec.angular_resolution + 1e-9)) + 1;
  const int n_el = static_cast<int>(std::floor(spec.vfov / spec.angular_resolution + 1e-9)) + 1;
  const double az0 = -0.5 * spec.hfov;
  const double el0 = -0.5 * spec.vfov;

  const uint64_t key = rng.key();
  const uint64_t base = rng.counter();

  std::vector<double> ranges(static_cast<std::size_t>(n_az) * n_el,
                             std::numeric_limits<double>::quiet_NaN());
  std::vector<Vec3> dirs(ranges.size());

  detail::parallel_rows(n_az, exec, [&](int ai) {
    const double az = az0 + ai * spec.angular_resolution;
    for (int ei = 0; ei < n_el; ++ei) {
      const double el = el0 + ei * spec.angular_resolution;
      const Vec3 body_dir{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
      const Vec3 dir = rotate_body_to_world(sensor_pose, body_dir);
      const std::size_t idx = static_cast<std::size_t>(ai) * n_el + ei;
      dirs[idx] = dir;
      const auto hit = raycast(world, sensor_pose.position, dir, spec.max_range);
      if (!hit) continue;
      double range = hit->distance;
      if (spec.range_noise_std > 0.0) {
        range += spec.range_noise_std * gaussian_at(key, base + idx);
      }
      if (range <= 0.0 || range > spec.max_range) continue;
      ranges[idx] = range;
    }
  });
  rng.advance(ranges.size());

  PointCloud cloud;
  cloud.origin = sensor_pose.position;
  cloud.points.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (std::isnan(ranges[i])) continue;
    cloud.points.push_back(sensor_pose.position + dirs[i] * ranges[i]);
  }
  return cloud;
}

Pose ugv_ground_pose(const WorldModel& world, double x, double y, double heading,
                     double footprint_radius) {
  const double z = sample_height(world, x, y);

  auto sample_clamped = [&](double px, double py) {
    px = clamp(px, world.bounds.min.x, world.bounds.max.x);
    py = clamp(py, world.bounds.min.y, world.bounds.max.y);
    return sample_height(world, px, py);
  };

  const double c = std::cos(heading), s = std::sin(heading);
  const double d = footprint_radius;
  const double h_front = sample_clamped(x + d * c, y + d * s);
  const double h_back = sample_clamped(x - d * c, y - d * s);
  const double h_left = sample_clamped(x - d * s, y + d * c);
  const double h_right = sample_clamped(x + d * s, y - d * c);

  Pose pose;
  pose.position = {x, y, z};
  pose.yaw = heading;
  pose.pitch = std::atan2(h_front - h_back, 2.0 * d);
  pose.roll = std::atan2(h_left - h_right, 2.0 * d);
  return pose;
}

}  // namespace tcs::worldsim
