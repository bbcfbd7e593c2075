#include <gtest/gtest.h>

#include <cmath>

#include "scanplan/error.hpp"
#include "scanplan/planner.hpp"

using namespace scanplan;

namespace {

SliceCoverageReport report_with(std::initializer_list<int> uncovered, std::size_t covered_score = 100) {
  SliceCoverageReport r;
  r.threshold = 50.0;
  r.slices.resize(8);
  for (std::size_t k = 0; k < 8; ++k) r.slices[k] = {covered_score + k, true, k};
  for (int k : uncovered) r.slices[static_cast<std::size_t>(k)] = {10, false, std::nullopt};
  return r;
}

UavState at_azimuth(double az, const PlannerConfig& cfg, int id = 0) {
  UavState s;
  s.id = id;
  const Vec3 p = cfg.center + Vec3(cfg.radius * std::cos(az), cfg.radius * std::sin(az), 0.0);
  s.true_pose = Pose::looking_at(Vec3(p.x(), p.y(), cfg.altitude_for(id)), cfg.center);
  return s;
}

PlannerConfig config() {
  PlannerConfig c;
  c.center = Vec3(0.1, -0.2, 1.0);
  c.radius = 0.5;
  c.altitude = 1.0;
  return c;
}

}  // namespace

TEST(Dynamic, AllCoveredLands) {
  const PlannerConfig cfg = config();
  const SliceModel m;
  EXPECT_FALSE(next_waypoint_dynamic(report_with({}), at_azimuth(0, cfg), cfg, m, VisitCounts(8, 0)));
}

TEST(Dynamic, SliceCenterWaypoint) {
  const PlannerConfig cfg = config();
  const SliceModel m;
  const auto w = next_waypoint_dynamic(report_with({5}), at_azimuth(0, cfg), cfg, m, VisitCounts(8, 0));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->slice, 5);
  EXPECT_NEAR(azimuth_about(w->waypoint.position, cfg.center), 11 * kPi / 8, 1e-9);
  const Vec3 d = w->waypoint.position - cfg.center;
  EXPECT_NEAR(std::hypot(d.x(), d.y()), 0.5, 1e-9);
  EXPECT_NEAR(w->waypoint.position.z(), cfg.altitude, 1e-9);
  EXPECT_NEAR(angle_difference(w->waypoint.yaw, std::atan2(-d.y(), -d.x())), 0.0, 1e-9);
}

TEST(Dynamic, NearestSliceWins) {
  const PlannerConfig cfg = config();
  const SliceModel m;
  const auto w = next_waypoint_dynamic(report_with({2, 6}), at_azimuth(m.slice_center_azimuth(1), cfg),
                                       cfg, m, VisitCounts(8, 0));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->slice, 2);
}

TEST(Dynamic, TieGoesToLowerIndex) {
  const PlannerConfig cfg = config();
  const SliceModel m;
  const auto w = next_waypoint_dynamic(report_with({2, 4}), at_azimuth(m.slice_center_azimuth(3), cfg),
                                       cfg, m, VisitCounts(8, 0));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->slice, 2);
}

TEST(Dynamic, VisitCapAndExclusion) {
  const PlannerConfig cfg = config();
  const SliceModel m;
  VisitCounts visits(8, 0);
  visits[2] = cfg.max_visits_per_slice;
  const auto w = next_waypoint_dynamic(report_with({2, 6}), at_azimuth(0, cfg), cfg, m, visits);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->slice, 6);
  const int excluded[] = {6};
  EXPECT_FALSE(next_waypoint_dynamic(report_with({2, 6}), at_azimuth(0, cfg), cfg, m, visits, excluded));
}

TEST(Dynamic, SecondUavFliesHigher) {
  const PlannerConfig cfg = config();
  const Waypoint w = slice_waypoint(3, SliceModel{}, cfg, 1);
  EXPECT_NEAR(w.position.z(), cfg.altitude + 0.10, 1e-12);
}

TEST(Static, WalksThePlan) {
  TrajectoryPlan plan = plan_static_circles(Vec3::Zero(), 0.5, 1.0, 8, 1, 0.0);
  const auto first = next_waypoint_static(plan);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->position, plan.waypoints[0].position);
  for (int i = 0; i < 7; ++i) EXPECT_TRUE(next_waypoint_static(plan));
  EXPECT_FALSE(next_waypoint_static(plan));
}

TEST(Dual, DistinctSlices) {
  const PlannerConfig cfg = config();
  const SliceModel m;
  const auto picks = assign_dual(report_with({1, 5}),
                                 {at_azimuth(0.1, cfg, 0), at_azimuth(0.2, cfg, 1)}, cfg, m,
                                 VisitCounts(8, 0));
  ASSERT_TRUE(picks[0] && picks[1]);
  EXPECT_NE(picks[0]->slice, picks[1]->slice);
  EXPECT_NEAR(picks[1]->waypoint.position.z(), cfg.altitude_for(1), 1e-12);
}

TEST(Dual, OneUncoveredFallsBackToWeakest) {
  const PlannerConfig cfg = config();
  const SliceModel m;
  SliceCoverageReport r = report_with({3});
  r.slices[6].score = 60;  // weakest covered slice
  const auto picks = assign_dual(r, {at_azimuth(0, cfg, 0), at_azimuth(kPi, cfg, 1)}, cfg, m,
                                 VisitCounts(8, 0));
  ASSERT_TRUE(picks[0] && picks[1]);
  EXPECT_EQ(picks[0]->slice, 3);
  EXPECT_EQ(picks[1]->slice, 6);
}

TEST(Dual, NothingUncovered) {
  const PlannerConfig cfg = config();
  const auto picks = assign_dual(report_with({}), {at_azimuth(0, cfg, 0), at_azimuth(kPi, cfg, 1)},
                                 cfg, SliceModel{}, VisitCounts(8, 0));
  EXPECT_FALSE(picks[0]);
  EXPECT_FALSE(picks[1]);
}

TEST(Weakest, SkipsExcludedAndCapped) {
  const PlannerConfig cfg = config();
  SliceCoverageReport r = report_with({});
  r.slices[4].score = 20;
  r.slices[5].score = 30;
  const int excluded[] = {4};
  const auto w = weakest_slice_waypoint(r, at_azimuth(0, cfg), cfg, SliceModel{}, VisitCounts(8, 0),
                                        excluded);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->slice, 5);
}

TEST(PlannerConfig, Validates) {
  PlannerConfig c;
  c.radius = 0.0;
  EXPECT_THROW(c.validate(), BadConfig);
}
