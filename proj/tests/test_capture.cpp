#include <gtest/gtest.h>

#include <set>

#include "scanplan/capture.hpp"
#include "scanplan/error.hpp"

using namespace scanplan;

namespace {

ScanTarget box_target() {
  return ScanTarget(build_engraved_box(Vec3(0.547, 0.203, 0.209), 0.04, 1), 8000, 2);
}

UavState uav_at(const Vec3& p, const Vec3& look_at) {
  UavState s;
  s.true_pose = Pose::looking_at(p, look_at);
  s.est_position = p;
  return s;
}

}  // namespace

TEST(Capture, FacingAwaySeesNothing) {
  const ScanTarget t = box_target();
  Rng rng = make_stream(1, 1);
  const Observation o = capture_observation(t, uav_at(Vec3(0.5, 0, 0), Vec3(2, 0, 0)), Camera{},
                                            CaptureSettings{}, SliceModel{}, rng);
  EXPECT_TRUE(o.points.empty());
  EXPECT_EQ(o.feature_score, 0.0);
}

TEST(Capture, NoiseFreePointsLieOnSamples) {
  const ScanTarget t = box_target();
  Rng rng = make_stream(1, 1);
  const Observation o =
      capture_observation(t, uav_at(Vec3(0.0, 0.5, 0), Vec3::Zero()), Camera{},
                          CaptureSettings{0.0, 400}, SliceModel{}, rng);
  ASSERT_EQ(o.points.size(), 400u);
  const std::set<std::tuple<double, double, double>> surface = [&] {
    std::set<std::tuple<double, double, double>> s;
    for (const Vec3& p : t.surface.points) s.insert({p.x(), p.y(), p.z()});
    return s;
  }();
  for (const Vec3& p : o.points.points) EXPECT_TRUE(surface.count({p.x(), p.y(), p.z()}));
  EXPECT_EQ(o.slice_index, slice_of_position(Vec3(0, 0.5, 0), SliceModel{}));
}

TEST(Capture, EngravedSideScoresHigherThanEndFace) {
  const ScanTarget t = box_target();
  Rng rng = make_stream(1, 1);
  const Observation side = capture_observation(t, uav_at(Vec3(0, 0.5, 0), Vec3::Zero()),
                                               Camera{}, CaptureSettings{}, SliceModel{}, rng);
  const Observation end = capture_observation(t, uav_at(Vec3(0.6, 0, 0), Vec3::Zero()),
                                              Camera{}, CaptureSettings{}, SliceModel{}, rng);
  EXPECT_GT(side.feature_score, end.feature_score);
}

TEST(SfmRegister, ZeroFeatureAlwaysFails) {
  SfmFailureModel m;
  m.p_base = 0.0;
  Rng g = make_stream(2, 0);
  const GaugeTransform gauge = GaugeTransform::draw(g);
  Observation o;
  o.feature_score = 0.0;
  for (int i = 0; i < 200; ++i) EXPECT_FALSE(sfm_register(o, gauge, m, g).sfm_pose);
}

TEST(SfmRegister, RecoveredPosesMapBackThroughGauge) {
  SfmFailureModel m;
  m.p_base = 0.0;
  m.f_ref = 0.1;
  m.scene_diagonal = 0.62;
  Rng g = make_stream(3, 0);
  const GaugeTransform gauge = GaugeTransform::draw(g);
  EXPECT_NO_THROW(gauge.validate());
  const SimilarityTransform inv = gauge.hidden.inverse();
  for (int i = 0; i < 200; ++i) {
    Observation o;
    o.feature_score = 0.2;
    o.true_pose = Pose::from_yaw(Vec3(uniform(g, -1, 1), uniform(g, -1, 1), 1.0), uniform(g, 0, 6));
    const Observation r = sfm_register(o, gauge, m, g);
    ASSERT_TRUE(r.sfm_pose);
    EXPECT_DOUBLE_EQ(r.sfm_scale, gauge.hidden.scale);
    const Pose back = inv.apply(*r.sfm_pose);
    // 5 sigma of the per-axis position noise, 5 sigma of the rotation noise.
    EXPECT_LT((back.position - o.true_pose.position).norm(),
              5.0 * std::sqrt(3.0) * m.position_noise() / std::sqrt(3.0));
    EXPECT_LT(rotation_angle_between(back.orientation, o.true_pose.orientation),
              5.0 * m.rotation_noise_deg * kPi / 180.0);
  }
}

TEST(SfmRegister, DefaultModelDropsFewBoxFrames) {
  SfmFailureModel m;
  Rng g = make_stream(4, 0);
  const GaugeTransform gauge = GaugeTransform::draw(g);
  int failures = 0;
  for (int i = 0; i < 233; ++i) {
    Observation o;
    o.feature_score = 0.45;
    failures += sfm_register(o, gauge, m, g).sfm_pose ? 0 : 1;
  }
  EXPECT_LE(failures, 6);
}

TEST(SfmRegister, SuccessProbability) {
  SfmFailureModel m;
  m.p_base = 0.1;
  m.f_ref = 0.3;
  EXPECT_NEAR(m.success_probability(0.15), 0.45, 1e-12);
  EXPECT_NEAR(m.success_probability(0.9), 0.9, 1e-12);
  EXPECT_EQ(m.success_probability(0.0), 0.0);
  m.p_base = 1.5;
  EXPECT_THROW(m.validate(), BadConfig);
}

TEST(InitialPair, DriftSeparation) {
  UavState s = uav_at(Vec3(0.5, 0, 1), Vec3(0, 0, 1));
  const auto pair = initial_pair(s, Vec3(0, 0, 1), 0.05);
  EXPECT_NEAR((pair[0].position - pair[1].position).norm(), 0.05, 1e-12);
  for (const Waypoint& w : pair) {
    EXPECT_NEAR(angle_difference(w.yaw, yaw_facing(w.position, Vec3(0, 0, 1))), 0.0, 1e-12);
  }
  EXPECT_THROW(initial_pair(s, Vec3(0, 0, 1), 0.0), BadConfig);
}
