#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scanplan/error.hpp"
#include "scanplan/reconstruct.hpp"

using namespace scanplan;

namespace {

std::vector<Observation> pending_in_slice(int n, int slice, double t0) {
  std::vector<Observation> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)].obs_id = i;
    v[static_cast<std::size_t>(i)].timestamp = t0 + 0.5 * i;
    v[static_cast<std::size_t>(i)].slice_index = slice;
  }
  return v;
}

Observation obs_with(const PointCloud& pts, int id) {
  Observation o;
  o.obs_id = id;
  o.points = pts;
  return o;
}

}  // namespace

TEST(Trigger, SectionExitWithWholeBatch) {
  const SliceModel m;
  const auto pending = pending_in_slice(45, 1, 0.0);
  const int now_slice[] = {2};
  EXPECT_EQ(should_trigger(pending, TriggerPolicy{}, 22.1, now_slice, m),
            TriggerReason::SectionExit);
  const int same[] = {0};
  EXPECT_EQ(should_trigger(pending, TriggerPolicy{}, 22.1, same, m), std::nullopt);
}

TEST(Trigger, TimeoutNeedsTwoImages) {
  const SliceModel m;
  const int here[] = {0};
  const auto two = pending_in_slice(2, 0, 0.0);
  EXPECT_EQ(should_trigger(two, TriggerPolicy{}, 0.5 + 3.1, here, m), TriggerReason::Timeout);
  EXPECT_EQ(should_trigger(two, TriggerPolicy{}, 0.5 + 2.9, here, m), std::nullopt);
  const auto one = pending_in_slice(1, 0, 0.0);
  EXPECT_EQ(should_trigger(one, TriggerPolicy{}, 100.0, here, m), std::nullopt);
  EXPECT_EQ(should_trigger({}, TriggerPolicy{}, 100.0, here, m), std::nullopt);
}

TEST(MergeBatch, EmptyBatchAndDuplicates) {
  Rng rng = make_stream(1, 0);
  const PointCloud pts = oracle::random_cloud(rng, 300, 1.0);
  const InstantCloud one = merge_batch(InstantCloud{}, std::vector{obs_with(pts, 0)}, 0.05);
  const InstantCloud same = merge_batch(one, {}, 0.05);
  EXPECT_EQ(same.cloud.points, one.cloud.points);
  EXPECT_EQ(same.contributing_obs, one.contributing_obs);
  const InstantCloud two =
      merge_batch(InstantCloud{}, std::vector{obs_with(pts, 0), obs_with(pts, 1)}, 0.05);
  EXPECT_EQ(two.cloud.size(), one.cloud.size());
  EXPECT_EQ(two.point_source.size(), two.cloud.size());
  EXPECT_THROW(merge_batch(InstantCloud{}, {}, 0.0), BadConfig);
}

TEST(MergeBatch, ThinnedCountBounds) {
  Rng rng = make_stream(2, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud a = oracle::random_cloud(rng, 200, 1.0);
    PointCloud b = oracle::random_cloud(rng, 250, 1.0);
    for (Vec3& p : b.points) p.x() += 0.5;
    const auto ia = merge_batch(InstantCloud{}, std::vector{obs_with(a, 0)}, 0.1);
    const auto ib = merge_batch(InstantCloud{}, std::vector{obs_with(b, 1)}, 0.1);
    const auto both = merge_batch(ia, std::vector{obs_with(b, 1)}, 0.1);
    EXPECT_LE(both.cloud.size(), ia.cloud.size() + ib.cloud.size());
    EXPECT_GE(both.cloud.size(), std::max(ia.cloud.size(), ib.cloud.size()));
    for (std::size_t i = 0; i < both.cloud.size(); ++i) {
      EXPECT_TRUE(both.point_source[i] == 0 || both.point_source[i] == 1);
    }
  }
}

TEST(FilterBackground, ClosedBallAndLinearScan) {
  PointCloud c;
  c.push_back(Vec3(1, 0, 0));
  c.push_back(Vec3(0.5, 0, 0));
  EXPECT_EQ(filter_background(c, Vec3::Zero(), 1.0).size(), 2u);
  Rng rng = make_stream(3, 0);
  const PointCloud m = oracle::random_cloud(rng, 1000, 2.0);
  std::size_t expected = 0;
  for (const Vec3& p : m.points) expected += (p - Vec3(1, 1, 1)).norm() <= 0.8 ? 1 : 0;
  EXPECT_EQ(filter_background(m, Vec3(1, 1, 1), 0.8).size(), expected);
}

TEST(Cluster, BlobsAndChain) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) c.push_back(Vec3(0.01 * i, 0, 0));
  for (int i = 0; i < 10; ++i) c.push_back(Vec3(1.0 + 0.01 * i, 0, 0));
  EXPECT_EQ(cluster_euclidean(c, 0.1, 1).size(), 2u);
  PointCloud chain;
  for (int i = 0; i < 30; ++i) chain.push_back(Vec3(0.09 * i, 0, 0));
  EXPECT_EQ(cluster_euclidean(chain, 0.1, 1).size(), 1u);
}

TEST(Cluster, MatchesUnionFind) {
  Rng rng = make_stream(4, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud c = oracle::random_cloud(rng, 50, 1.0);
    for (double d : {0.1, 0.2, 0.3}) {
      EXPECT_EQ(cluster_euclidean(c, d, 2), oracle::clusters(c, d, 2));
    }
  }
}

TEST(Coverage, EmptyCloudLeavesAllUncovered) {
  const auto r = coverage_report(PointCloud{}, SliceModel{}, ClusterParams{0.1, 2.5, 1}, 0.0);
  EXPECT_EQ(r.uncovered_count(), 8u);
}

TEST(Coverage, UniformRingCoversEverySlice) {
  const PointCloud ring = oracle::ring(Vec3::Zero(), 0.3, 800);
  const auto r = coverage_report(ring, SliceModel{}, ClusterParams{}, 50.0);
  EXPECT_EQ(r.uncovered_count(), 0u);
  for (const auto& s : r.slices) EXPECT_NEAR(static_cast<double>(s.score), 100.0, 1.0);
}

TEST(Coverage, HalfRingLeavesEmptySideUncovered) {
  const PointCloud half = oracle::ring(Vec3::Zero(), 0.3, 400, 0.0, kPi);
  const auto r = coverage_report(half, SliceModel{}, ClusterParams{}, 50.0);
  for (int k = 0; k < 4; ++k) EXPECT_TRUE(r.slices[static_cast<std::size_t>(k)].covered);
  for (int k = 4; k < 8; ++k) EXPECT_FALSE(r.slices[static_cast<std::size_t>(k)].covered);
}

TEST(Coverage, CoveredIffAboveThreshold) {
  const PointCloud ring = oracle::ring(Vec3::Zero(), 0.3, 800);
  const auto r = with_threshold(coverage_report(ring, SliceModel{}, ClusterParams{}, 0.0), 100.0);
  for (const auto& s : r.slices) EXPECT_EQ(s.covered, s.score > 100.0);
  EXPECT_NEAR(calibrate_threshold(r, 0.6), 60.0, 1.0);
}
