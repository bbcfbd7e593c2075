#include <gtest/gtest.h>

#include <cmath>

#include "scanplan/error.hpp"
#include "scanplan/slices.hpp"
#include "scanplan/uav.hpp"

using namespace scanplan;

TEST(StaticCircles, FourWaypoints) {
  const TrajectoryPlan plan = plan_static_circles(Vec3(0, 0, 1), 0.5, 1.0, 4, 1, 0.0);
  ASSERT_EQ(plan.waypoints.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    const Waypoint& w = plan.waypoints[static_cast<std::size_t>(k)];
    EXPECT_NEAR(azimuth_about(w.position, Vec3(0, 0, 1)), k * kPi / 2, 1e-12);
    EXPECT_NEAR(std::hypot(w.position.x(), w.position.y()), 0.5, 1e-12);
    EXPECT_NEAR(w.position.z(), 1.0, 1e-12);
    EXPECT_NEAR(angle_difference(w.yaw, yaw_facing(w.position, Vec3(0, 0, 1))), 0.0, 1e-12);
  }
  EXPECT_EQ(plan_static_circles(Vec3::Zero(), 0.5, 1.0, 16, 2, 0.0).waypoints.size(), 32u);
}

TEST(Step, AtTargetOnlyAdvancesClock) {
  UavState s;
  s.true_pose = Pose::from_yaw(Vec3(1, 2, 3), 0.4);
  const UavState n = step(s, Waypoint{Vec3(1, 2, 3), 0.4}, 0.5, 0.1);
  EXPECT_EQ(n.true_pose.position, s.true_pose.position);
  EXPECT_NEAR(n.clock, 0.1, 1e-12);
}

TEST(Step, MovesSpeedTimesDt) {
  UavState s;
  const UavState n = step(s, Waypoint{Vec3(1, 0, 0), 0.0}, 0.5, 1.0);
  EXPECT_NEAR(n.true_pose.position.x(), 0.5, 1e-12);
  EXPECT_NEAR(n.true_pose.position.y(), 0.0, 1e-12);
}

TEST(Step, ArrivesInClosedFormStepCount) {
  const Vec3 target(0.3, -0.4, 0.25);
  const double speed = 0.15, dt = 0.1;
  const int expected = static_cast<int>(std::ceil(target.norm() / (speed * dt)));
  UavState s;
  int steps = 0;
  while ((s.true_pose.position - target).norm() > 1e-6 && steps < 1000) {
    s = step(s, Waypoint{target, 0.0}, speed, dt);
    ++steps;
  }
  EXPECT_EQ(steps, expected);
}

TEST(Step, YawSlewIsRateLimited) {
  UavState s;
  const UavState n = step(s, Waypoint{Vec3::Zero(), kPi / 2}, 0.1, 0.1, kPi / 2);
  EXPECT_NEAR(n.true_pose.yaw(), kPi / 20, 1e-12);
}

TEST(Uwb, NoiseFreeIsExact) {
  UwbStream s(UwbNoiseModel{0.0, 0.0, 0.3}, make_stream(1, 1));
  const Vec3 p(0.1, 0.2, 0.3);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(uwb_estimate(p, s, 0.1), p);
}

TEST(Uwb, SampleStdMatchesSigma) {
  UwbStream s(UwbNoiseModel{0.05, 0.0, 1.0}, make_stream(3, 1));
  const int n = 10000;
  Vec3 sum = Vec3::Zero(), sq = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 e = uwb_estimate(Vec3::Zero(), s, 0.1);
    sum += e;
    sq += e.cwiseProduct(e);
  }
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[k] / n;
    const double sd = std::sqrt(sq[k] / n - mean * mean);
    EXPECT_NEAR(sd, 0.05, 0.05 * 0.05);
    EXPECT_LT(std::abs(mean), 3.0 * 0.05 / std::sqrt(n));
  }
}

TEST(Uwb, DeterministicPerStream) {
  UwbStream a(UwbNoiseModel{}, make_stream(8, 2));
  UwbStream b(UwbNoiseModel{}, make_stream(8, 2));
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(uwb_estimate(Vec3(1, 0, 1), a, 0.1), uwb_estimate(Vec3(1, 0, 1), b, 0.1));
  }
}

TEST(Uwb, RejectsBadModel) {
  EXPECT_THROW((UwbNoiseModel{-1.0, 0.0, 0.3}.validate()), BadConfig);
  EXPECT_THROW((UwbNoiseModel{0.05, 0.0, 0.0}.validate()), BadConfig);
}

TEST(Slices, Examples) {
  SliceModel m;
  EXPECT_EQ(slice_of_azimuth(0.0, m), 0);
  EXPECT_EQ(slice_of_azimuth(kPi, m), 4);
  EXPECT_EQ(slice_of_azimuth(kTwoPi + 0.1, m), slice_of_azimuth(0.1, m));
  EXPECT_EQ(m.region_of_slice(3), 1);
  SliceModel bad;
  bad.slice_count = 6;
  EXPECT_THROW(bad.validate(), BadConfig);
}
