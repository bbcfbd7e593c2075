#include "scanplan/uav.hpp"

#include <algorithm>
#include <cmath>

#include "scanplan/error.hpp"

namespace scanplan {

void UwbNoiseModel::validate() const {
  if (!(sigma >= 0.0) || !(bias_walk_sigma >= 0.0)) {
    throw BadConfig("UWB noise parameters must be non-negative");
  }
  if (!(smoothing_alpha > 0.0 && smoothing_alpha <= 1.0)) {
    throw BadConfig("UWB smoothing alpha must be in (0, 1]");
  }
}

Vec3 uwb_estimate(const Vec3& true_position, UwbStream& s, double dt) {
  if (s.model.bias_walk_sigma > 0.0 && dt > 0.0) {
    s.bias += gaussian_vec(s.rng, s.model.bias_walk_sigma * std::sqrt(dt));
  }
  const Vec3 measured = true_position + s.bias + gaussian_vec(s.rng, s.model.sigma);
  if (!s.smoothed) {
    s.smoothed = measured;
  } else {
    const double a = s.model.smoothing_alpha;
    *s.smoothed += a * (measured - *s.smoothed);
  }
  return *s.smoothed;
}

double yaw_facing(const Vec3& position, const Vec3& center) {
  return wrap_angle(std::atan2(center.y() - position.y(), center.x() - position.x()));
}

TrajectoryPlan plan_static_circles(const Vec3& center, double radius, double altitude,
                                   int waypoints_per_circle, int circles,
                                   double start_azimuth) {
  if (!(radius > 0.0)) throw BadConfig("circle radius must be positive");
  if (waypoints_per_circle < 2) throw BadConfig("need at least 2 waypoints per circle");
  if (circles < 1) throw BadConfig("need at least one circle");
  TrajectoryPlan plan;
  plan.waypoints.reserve(static_cast<std::size_t>(waypoints_per_circle * circles));
  for (int c = 0; c < circles; ++c) {
    for (int k = 0; k < waypoints_per_circle; ++k) {
      const double az = wrap_angle(start_azimuth + kTwoPi * k / waypoints_per_circle);
      const Vec3 p(center.x() + radius * std::cos(az), center.y() + radius * std::sin(az),
                   altitude);
      plan.waypoints.push_back({p, wrap_angle(az + kPi)});
    }
  }
  return plan;
}

UavState step(const UavState& state, const Waypoint& target, double speed, double dt,
              double yaw_rate) {
  UavState next = state;
  next.clock = state.clock + dt;
  const Vec3 delta = target.position - state.true_pose.position;
  const double dist = delta.norm();
  const double move = std::min(speed * dt, dist);
  Vec3 pos = state.true_pose.position;
  if (dist > 0.0) pos = (move == dist) ? target.position : pos + delta * (move / dist);

  const double yaw = state.true_pose.yaw();
  const double dyaw = angle_difference(target.yaw, yaw);
  const double max_turn = yaw_rate * dt;
  const double new_yaw =
      std::abs(dyaw) <= max_turn ? target.yaw : yaw + std::copysign(max_turn, dyaw);
  next.true_pose = Pose::from_yaw(pos, wrap_angle(new_yaw));
  return next;
}

}  // namespace scanplan
