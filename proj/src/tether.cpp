#include "tcs/tether/tether.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tcs::tether {

std::vector<Vec3> TetherState::polyline() const {
  std::vector<Vec3> line;
  line.reserve(wrap_points.size() + 2);
  line.push_back(winch_end);
  line.insert(line.end(), wrap_points.begin(), wrap_points.end());
  line.push_back(free_end);
  return line;
}

double TetherState::polyline_length() const {
  const auto line = polyline();
  double length = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    length += (line[i] - line[i - 1]).norm();
  }
  return length;
}

double TetherState::wrap_angle_around(const Vec2& pole_center) const {
  if (wrap_points.size() < 2) return 0.0;
  double cumulative = 0.0;
  double prev = std::atan2(wrap_points[0].y - pole_center.y, wrap_points[0].x - pole_center.x);
  for (std::size_t i = 1; i < wrap_points.size(); ++i) {
    const double a =
        std::atan2(wrap_points[i].y - pole_center.y, wrap_points[i].x - pole_center.x);
    cumulative += std::abs(wrap_angle(a - prev));
    prev = a;
  }
  return cumulative;
}

void TetherState::release_wraps() {
  if (anchored) throw std::logic_error("cannot release an anchored tether");
  wrap_points.clear();
  wrapped_pole.reset();
}

HookModel HookModel::default_model() {
  HookModel model;
  for (int bin = 0; bin < kBinCount; ++bin) {
    const double start = deg_to_rad(bin * kBinWidthDeg);
    const double c = std::cos(start);
    model.prob_[bin] = std::max(0.1, 0.95 * c * c);
    model.trials_[bin] = 10;
  }
  return model;
}

HookModel HookModel::from_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open hook model: " + path);
  HookModel model;
  std::array<bool, kBinCount> seen{};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("bin_start_deg", 0) == 0) continue;
    std::istringstream row(line);
    double start_deg = 0.0, probability = 0.0;
    int trials = 0;
    char comma = 0;
    if (!(row >> start_deg >> comma >> probability >> comma >> trials)) {
      throw std::runtime_error("malformed hook model row: " + line);
    }
    const int bin = static_cast<int>(std::lround(start_deg / kBinWidthDeg));
    if (bin < 0 || bin >= kBinCount || std::abs(start_deg - bin * kBinWidthDeg) > 1e-9) {
      throw std::runtime_error("hook model bin start must be a multiple of 20 deg: " + line);
    }
    if (probability < 0.0 || probability > 1.0) {
      throw std::runtime_error("hook model probability outside [0, 1]: " + line);
    }
    model.prob_[bin] = probability;
    model.trials_[bin] = trials;
    seen[bin] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw std::runtime_error("hook model must define all 18 bins: " + path);
  }
  return model;
}

int HookModel::bin_of(double revolution_angle_deg) const {
  if (revolution_angle_deg < 0.0 || revolution_angle_deg >= 360.0) {
    throw std::invalid_argument("revolution angle must be in [0, 360)");
  }
  return std::min(kBinCount - 1, static_cast<int>(revolution_angle_deg / kBinWidthDeg));
}

double HookModel::probability(double revolution_angle_deg) const {
  return prob_[bin_of(revolution_angle_deg)];
}

int HookModel::argmax_bin() const {
  int best = 0;
  for (int bin = 1; bin < kBinCount; ++bin) {
    if (prob_[bin] > prob_[best]) best = bin;
  }
  return best;
}

void HookModel::set_bin(int bin, double probability, int trials) {
  prob_.at(bin) = probability;
  trials_.at(bin) = trials;
}

WindingPlan circle_trajectory(Vec2 pole_center, double pole_radius, double flight_radius,
                              double altitude, double revolution_angle_deg, double step_deg,
                              Vec2 uav_position) {
  if (flight_radius <= pole_radius) {
    throw std::invalid_argument("flight radius must exceed the pole radius");
  }
  if (step_deg <= 0.0) throw std::invalid_argument("waypoint step must be > 0");

  const Vec2 offset = uav_position - pole_center;
  const double entry_bearing =
      offset.norm() > 1e-12 ? std::atan2(offset.y, offset.x) : 0.0;
  const double total = deg_to_rad(360.0 + revolution_angle_deg);
  const double step = deg_to_rad(step_deg);

  WindingPlan plan;
  plan.pole_center = pole_center;
  plan.flight_radius = flight_radius;
  plan.altitude = altitude;
  plan.revolution_angle_deg = revolution_angle_deg;

  const int full_steps = static_cast<int>(std::floor(total / step + 1e-12));
  for (int k = 0; k <= full_steps; ++k) {
    const double bearing = entry_bearing + k * step;
    plan.waypoints.push_back({pole_center.x + flight_radius * std::cos(bearing),
                              pole_center.y + flight_radius * std::sin(bearing), altitude});
  }
  if (full_steps * step < total - 1e-12) {
    const double bearing = entry_bearing + total;
    plan.waypoints.push_back({pole_center.x + flight_radius * std::cos(bearing),
                              pole_center.y + flight_radius * std::sin(bearing), altitude});
  }
  return plan;
}

void update_tether(TetherState& tether, const Vec3& winch_end, const Vec3& free_end,
                   const worldsim::WorldModel& world) {
  tether.winch_end = winch_end;
  const Vec3 previous_end = tether.free_end_initialized ? tether.free_end : free_end;
  tether.free_end = free_end;
  tether.free_end_initialized = true;

  // Straight run from the last fixed point to the free end, tested against
  // each pole in horizontal projection.
  const Vec3 fixed = tether.wrap_points.empty() ? winch_end : tether.wrap_points.back();
  const Vec2 p = fixed.xy();
  const Vec2 q = free_end.xy();

  for (std::size_t pole_id = 0; pole_id < world.poles.size(); ++pole_id) {
    const auto& pole = world.poles[pole_id];
    if (tether.wrapped_pole && *tether.wrapped_pole != pole_id) continue;

    const Vec2 c = pole.center;
    const Vec2 pq = q - p;
    const double len2 = pq.squared_norm();
    if (len2 < 1e-18) continue;
    const double t = std::clamp((c - p).dot(pq) / len2, 0.0, 1.0);
    const Vec2 closest = p + pq * t;
    const double clearance = (closest - c).norm();
    if (clearance >= pole.radius * 0.999) continue;  // no crossing (tangent runs stay put)

    // Rope height where it passes the pole; a run above the pole top slides
    // over instead of wrapping.
    const double rope_z = fixed.z + (free_end.z - fixed.z) * t;
    if (rope_z > pole.top()) continue;

    Vec2 tangent;
    const double dist_p = (p - c).norm();
    if (dist_p > pole.radius * (1.0 + 1e-9)) {
      // Fixed point outside the pole: bend at one of its two tangent points,
      // whichever gives the free-end run more clearance.
      const double phi = std::acos(std::clamp(pole.radius / dist_p, -1.0, 1.0));
      const double bearing = std::atan2((p - c).y, (p - c).x);
      Vec2 best_tangent;
      double best_clearance = -1.0;
      for (const double sign : {+1.0, -1.0}) {
        const double a = bearing + sign * phi;
        const Vec2 cand = c + Vec2{pole.radius * std::cos(a), pole.radius * std::sin(a)};
        const Vec2 cq = q - cand;
        const double l2 = cq.squared_norm();
        const double tt = l2 > 1e-18 ? std::clamp((c - cand).dot(cq) / l2, 0.0, 1.0) : 0.0;
        const double clear_cand = (cand + cq * tt - c).norm();
        if (clear_cand > best_clearance) {
          best_clearance = clear_cand;
          best_tangent = cand;
        }
      }
      tangent = best_tangent;
    } else {
      // Fixed point already on the pole surface: the rope leaves the surface
      // at the free end's tangent point, continuing in the winding sense of
      // the free end's motion around the pole.
      const double dist_q = (q - c).norm();
      if (dist_q <= pole.radius * (1.0 + 1e-9)) continue;  // free end touching the pole
      const double phi = std::acos(std::clamp(pole.radius / dist_q, -1.0, 1.0));
      const double bearing_q = std::atan2((q - c).y, (q - c).x);
      const double prev_angle =
          std::atan2(previous_end.y - c.y, previous_end.x - c.x);
      const double sense = wrap_angle(bearing_q - prev_angle) >= 0.0 ? 1.0 : -1.0;
      // The contact point trails the free end against its motion.
      const double a = bearing_q - sense * phi;
      tangent = c + Vec2{pole.radius * std::cos(a), pole.radius * std::sin(a)};
      const Vec2 last = fixed.xy();
      if ((tangent - last).norm() < 0.25 * pole.radius) continue;  // no appreciable advance
    }

    const double tangent_z = std::min(rope_z, pole.top());
    tether.wrap_points.push_back({tangent.x, tangent.y, tangent_z});
    tether.wrapped_pole = pole_id;
    break;  // at most one insertion per update keeps the polyline ordered
  }
}

bool sample_hook_catch(const HookModel& model, double revolution_angle_deg, RngStream& rng) {
  return rng.bernoulli(model.probability(revolution_angle_deg));
}

ClimbStep winch_climb_step(Pose& ugv, TetherState& tether, const Vec3& anchor,
                           const worldsim::WorldModel& world, double wind_rate, double dt,
                           double footprint_radius) {
  if (!tether.anchored) throw std::logic_error("winch_climb_step requires an anchored tether");

  const Vec2 anchor_xy = anchor.xy();
  Vec2 pos = ugv.position.xy();
  auto horizontal = [&] { return (anchor_xy - pos).norm(); };
  auto distance_3d = [&](const Vec2& at) {
    const double z = worldsim::sample_height(world, at.x, at.y);
    return (Vec3{at.x, at.y, z} - anchor).norm();
  };

  ClimbStep result;
  const double available = tether.deployed - tether.anchor_tail;
  if (horizontal() < footprint_radius || available <= footprint_radius) {
    result.climbed = true;
    return result;
  }

  const double target = std::max(0.0, available - wind_rate * dt);
  const double step = std::min(0.01, 0.25 * world.heightfield.resolution);
  const Vec2 dir = (anchor_xy - pos).normalized();

  double best_dist = distance_3d(pos);
  Vec2 best_pos = pos;
  bool reached = best_dist <= target;
  while (!reached && horizontal() >= footprint_radius) {
    const Vec2 previous = pos;
    const double advance = std::min(step, horizontal());
    pos = pos + dir * advance;
    double d = distance_3d(pos);
    if (d <= target) {
      // Bisect the final step so the constraint lands exactly taut.
      Vec2 lo = previous, hi = pos;
      for (int i = 0; i < 30; ++i) {
        const Vec2 mid = (lo + hi) * 0.5;
        (distance_3d(mid) > target ? lo : hi) = mid;
      }
      pos = hi;
      d = distance_3d(pos);
      reached = true;
    }
    if (d < best_dist) {
      best_dist = d;
      best_pos = pos;
    }
    if (advance < step) break;  // arrived at the anchor's projection
  }

  pos = reached ? pos : best_pos;
  const double final_dist = distance_3d(pos);
  const double new_available = reached ? target : std::max(target, final_dist);
  const double wound_now = available - new_available;
  tether.deployed = new_available + tether.anchor_tail;
  tether.wound += wound_now;

  const double heading = std::atan2(anchor_xy.y - pos.y, anchor_xy.x - pos.x);
  ugv = worldsim::ugv_ground_pose(world, pos.x, pos.y, heading);

  if ((anchor_xy - pos).norm() < footprint_radius) {
    result.climbed = true;
  } else if (!reached && wound_now <= 1e-12) {
    result.stalled = true;
  }
  return result;
}

}  // namespace tcs::tether
