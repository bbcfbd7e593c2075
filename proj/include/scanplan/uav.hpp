#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "scanplan/geometry.hpp"
#include "scanplan/random.hpp"

namespace scanplan {

struct UavState {
  int id = 0;
  Pose true_pose;
  Vec3 est_position = Vec3::Zero();  // UWB estimate
  double clock = 0.0;                // seconds
};

// Per-axis Gaussian noise on top of a slow random-walk bias, followed by
// exponential smoothing (a stand-in for the onboard filtering).
struct UwbNoiseModel {
  double sigma = 0.05;             // m
  double bias_walk_sigma = 0.005;  // m / sqrt(s)
  double smoothing_alpha = 0.3;    // (0, 1]

  void validate() const;
};

// Stateful estimate stream for one UAV.
struct UwbStream {
  UwbNoiseModel model;
  Rng rng;
  Vec3 bias = Vec3::Zero();
  std::optional<Vec3> smoothed;

  UwbStream(const UwbNoiseModel& m, Rng r) : model(m), rng(std::move(r)) { m.validate(); }
};

// Advances the stream by dt seconds and returns the smoothed estimate of
// `true_position`.
Vec3 uwb_estimate(const Vec3& true_position, UwbStream& stream, double dt);

struct Waypoint {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

struct TrajectoryPlan {
  std::vector<Waypoint> waypoints;
  std::size_t cursor = 0;

  std::size_t remaining() const { return waypoints.size() - cursor; }
};

// Evenly spaced waypoints on `circles` horizontal circles of `radius` about
// the vertical axis through `center`, at absolute height `altitude`, each
// facing the axis.
TrajectoryPlan plan_static_circles(const Vec3& center, double radius, double altitude,
                                   int waypoints_per_circle, int circles,
                                   double start_azimuth);

// Yaw that faces the vertical axis through `center` from `position`.
double yaw_facing(const Vec3& position, const Vec3& center);

// Moves toward the target by min(speed*dt, remaining distance) along a
// straight line and slews yaw toward the target yaw at `yaw_rate`.
UavState step(const UavState& state, const Waypoint& target, double speed, double dt,
              double yaw_rate = kPi / 2.0);

}  // namespace scanplan
