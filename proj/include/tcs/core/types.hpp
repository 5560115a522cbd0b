#pragma once

#include <cmath>
#include <cstdint>

namespace tcs {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
};

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0.0, 0.0, 0.0};
  }
  Vec2 xy() const { return {x, y}; }
};

/// 6-DoF pose as position plus intrinsic yaw-pitch-roll (Z-Y'-X'').
struct Pose {
  Vec3 position;
  double roll{0.0};
  double pitch{0.0};
  double yaw{0.0};
};

/// Rotate a vector from the pose's body frame into the world frame.
/// Body frame: +X forward, +Y left, +Z up. Positive pitch is nose-up,
/// positive roll is left-side-up; a sensor looking straight down has
/// pitch = -pi/2.
inline Vec3 rotate_body_to_world(const Pose& pose, const Vec3& v) {
  const double cr = std::cos(pose.roll), sr = std::sin(pose.roll);
  const double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
  return {
      (cy * cp) * v.x + (-cy * sp * sr - sy * cr) * v.y + (-cy * sp * cr + sy * sr) * v.z,
      (sy * cp) * v.x + (-sy * sp * sr + cy * cr) * v.y + (-sy * sp * cr - cy * sr) * v.z,
      (sp)*v.x + (cp * sr) * v.y + (cp * cr) * v.z};
}

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

constexpr double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

struct Rect {
  Vec2 min;
  Vec2 max;

  bool contains(double x, double y) const {
    return x >= min.x && x <= max.x && y >= min.y && y <= max.y;
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

}  // namespace tcs
