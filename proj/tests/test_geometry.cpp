#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scanplan/error.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/ply.hpp"
#include "scanplan/random.hpp"
#include "scanplan/scene.hpp"
#include "scanplan/spatial_grid.hpp"

using namespace scanplan;

TEST(Centroid, MidpointAndSingleton) {
  PointCloud c;
  c.push_back({0, 0, 0});
  c.push_back({2, 0, 0});
  EXPECT_TRUE(centroid(c).isApprox(Vec3(1, 0, 0)));
  PointCloud s;
  s.push_back({1, 1, 1});
  EXPECT_TRUE(centroid(s).isApprox(Vec3(1, 1, 1)));
  EXPECT_THROW(centroid(PointCloud{}), EmptyInput);
}

TEST(Centroid, SphereSamplesNearOrigin) {
  Rng rng = make_stream(11, 0);
  PointCloud c;
  for (int i = 0; i < 100; ++i) c.push_back(unit_vector(rng));
  EXPECT_LT(centroid(c).norm(), 0.2);
}

TEST(Aabb, Basics) {
  PointCloud c;
  c.push_back({0, 0, 0});
  c.push_back({1, 2, 3});
  const Aabb box = aabb(c);
  EXPECT_TRUE(box.min.isApprox(Vec3::Zero()));
  EXPECT_TRUE(box.max.isApprox(Vec3(1, 2, 3)));
  PointCloud s;
  s.push_back({4, 5, 6});
  const Aabb one = aabb(s);
  EXPECT_EQ(one.min, one.max);
  EXPECT_THROW(aabb(PointCloud{}), EmptyInput);
}

TEST(Aabb, EngravedBoxSamplesMatchDimensions) {
  const Vec3 dims(0.547, 0.203, 0.209);
  const PointCloud c = sample_surface(build_engraved_box(dims, 0.04, 1), 20000, 3);
  const Vec3 ext = aabb(c).extents();
  for (int k = 0; k < 3; ++k) {
    EXPECT_LE(ext[k], dims[k] + 1e-9);
    EXPECT_GT(ext[k], dims[k] - 0.01);
  }
}

TEST(Similarity, IdentityAndScale) {
  PointCloud c;
  c.push_back({1, 0, 0}, Vec3::UnitY());
  EXPECT_EQ(apply_similarity(SimilarityTransform::identity(), c).points[0], c.points[0]);
  SimilarityTransform t;
  t.scale = 2.0;
  const PointCloud out = apply_similarity(t, c);
  EXPECT_TRUE(out.points[0].isApprox(Vec3(2, 0, 0)));
  EXPECT_NEAR(out.normals[0].norm(), 1.0, 1e-12);
}

TEST(Similarity, InverseRoundTrip) {
  Rng rng = make_stream(5, 1);
  SimilarityTransform t;
  t.scale = 1.7;
  t.rotation = random_rotation(rng);
  t.translation = Vec3(0.3, -2.0, 1.1);
  const PointCloud c = oracle::random_cloud(rng, 200, 3.0);
  const PointCloud back = apply_similarity(t.inverse(), apply_similarity(t, c));
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_LT((back.points[i] - c.points[i]).norm(), 1e-9);
  }
  const SimilarityTransform id = compose(t, t.inverse());
  EXPECT_NEAR(id.scale, 1.0, 1e-12);
  EXPECT_LT((id.rotation - Mat3::Identity()).norm(), 1e-12);
  EXPECT_LT(id.translation.norm(), 1e-12);
}

TEST(Similarity, ValidateRejectsBadTransforms) {
  SimilarityTransform t;
  t.scale = 0.0;
  EXPECT_THROW(t.validate(), BadConfig);
  SimilarityTransform r;
  r.rotation = -Mat3::Identity();
  EXPECT_THROW(r.validate(), BadConfig);
}

TEST(Pca, AxisAlignedBoxOrdersAxes) {
  Rng rng = make_stream(2, 0);
  PointCloud c;
  for (int i = 0; i < 5000; ++i) {
    c.push_back(Vec3(uniform(rng, -2.5, 2.5), uniform(rng, -1, 1), uniform(rng, -0.5, 0.5)));
  }
  const Mat3 a = pca_axes(c);
  EXPECT_GT(std::abs(a.col(0).x()), 0.99);
  EXPECT_GT(std::abs(a.col(1).y()), 0.99);
  EXPECT_GT(std::abs(a.col(2).z()), 0.99);
  EXPECT_NEAR(a.determinant(), 1.0, 1e-9);

  const Mat3 r = axis_angle_rotation(Vec3(1, 2, 3).normalized(), 0.7);
  SimilarityTransform t;
  t.rotation = r;
  const Mat3 b = pca_axes(apply_similarity(t, c));
  for (int k = 0; k < 3; ++k) {
    EXPECT_GT(std::abs(b.col(k).dot(r * a.col(k))), 0.99);
  }
}

TEST(Pca, CollinearThrows) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) c.push_back(Vec3(i, 2.0 * i, 0));
  EXPECT_THROW(principal_axes(c), DegenerateGeometry);
}

TEST(Angles, WrapAndDifference) {
  EXPECT_NEAR(wrap_angle(-0.1), kTwoPi - 0.1, 1e-12);
  EXPECT_NEAR(wrap_angle(kTwoPi + 0.1), 0.1, 1e-12);
  EXPECT_NEAR(angle_difference(0.1, kTwoPi - 0.1), 0.2, 1e-12);
  EXPECT_NEAR(azimuth_about(Vec3(0, 1, 5), Vec3::Zero()), kPi / 2, 1e-12);
}

TEST(Pose, LookingAtFacesTarget) {
  const Pose p = Pose::looking_at(Vec3(0.5, 0, 1), Vec3(0, 0, 1));
  EXPECT_TRUE(p.forward().isApprox(Vec3(-1, 0, 0)));
  EXPECT_TRUE(is_rotation(p.orientation));
  const Vec3 w(0.2, 0.3, 0.4);
  EXPECT_LT((p.to_world(p.to_local(w)) - w).norm(), 1e-12);
}

TEST(PointGrid, NearestMatchesBruteForce) {
  Rng rng = make_stream(9, 0);
  const PointCloud c = oracle::random_cloud(rng, 500, 1.0);
  PointGrid grid(c.points);
  for (int q = 0; q < 200; ++q) {
    const Vec3 p(uniform(rng, -0.2, 1.2), uniform(rng, -0.2, 1.2), uniform(rng, -0.2, 1.2));
    double best = 1e9;
    for (const Vec3& x : c.points) best = std::min(best, (x - p).norm());
    EXPECT_DOUBLE_EQ(grid.nearest(p)->distance, best);
  }
}

TEST(Ply, RoundTripKeepsAttributes) {
  PointCloud c;
  c.push_back({0.125, -1.5, 2.0}, Vec3::UnitX(), 0.25);
  c.push_back({3.0, 4.0, 5.0}, Vec3::UnitZ(), 1.0);
  const std::string text = to_ply(c);
  const PointCloud back = parse_ply(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(back.has_normals());
  EXPECT_TRUE(back.has_features());
  EXPECT_NEAR(back.points[0].x(), 0.125, 1e-9);
  EXPECT_NEAR(back.feature_strength[0], 0.25, 1e-9);
  EXPECT_EQ(to_ply(back), text);
  EXPECT_THROW(parse_ply("not a ply"), IoError);
}
