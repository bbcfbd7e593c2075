#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "scanplan/error.hpp"
#include "scanplan/scene.hpp"

using namespace scanplan;

TEST(EngravedBox, BoundsMatchDimensions) {
  const Vec3 dims(0.547, 0.203, 0.209);
  const SceneObject box = build_engraved_box(dims, 0.04, 7);
  EXPECT_LT((box.bounds().extents() - dims).norm(), 1e-9);
  EXPECT_NO_THROW(box.validate());
  EXPECT_GT(box.triangles.size(), 12u);
}

TEST(EngravedBox, PlainAndInvalid) {
  EXPECT_EQ(build_engraved_box(Vec3(1, 1, 1), 0.0, 1).triangles.size(), 12u);
  EXPECT_THROW(build_engraved_box(Vec3(0.547, 0.203, 0.209), 0.11, 1), BadConfig);
  EXPECT_THROW(build_engraved_box(Vec3(0.5, -0.2, 0.2), 0.0, 1), BadConfig);
}

TEST(TallObject, HeightAndErrors) {
  const SceneObject t = build_tall_object(0.9, 0.08);
  EXPECT_NEAR(t.bounds().extents().z(), 0.9, 1e-6);
  EXPECT_THROW(build_tall_object(0.9, 0.0), BadConfig);
}

TEST(SampleSurface, SingleTriangle) {
  SceneObject obj;
  obj.add({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, 0.5);
  const PointCloud c = sample_surface(obj, 1, 3);
  ASSERT_EQ(c.size(), 1u);
  const Vec3 p = c.points[0];
  EXPECT_NEAR(p.z(), 0.0, 1e-12);
  EXPECT_GE(p.x(), 0.0);
  EXPECT_GE(p.y(), 0.0);
  EXPECT_LE(p.x() + p.y(), 1.0 + 1e-12);
  EXPECT_DOUBLE_EQ(c.feature_strength[0], 0.5);
}

TEST(SampleSurface, AreaWeightingOnUnitCube) {
  // Face counts are binomial(n, 1/6): each seed stays within 5 sigma and the
  // pooled counts within 5% of an even split.
  const SceneObject cube = build_engraved_box(Vec3(1, 1, 1), 0.0, 1);
  const std::size_t n = 10000;
  const double sigma = std::sqrt(n * (1.0 / 6.0) * (5.0 / 6.0));
  std::array<int, 6> pooled{};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PointCloud c = sample_surface(cube, n, seed);
    std::array<int, 6> faces{};
    for (const Vec3& p : c.points) {
      int axis = 0;
      for (int k = 1; k < 3; ++k) {
        if (std::abs(p[k]) > std::abs(p[axis])) axis = k;
      }
      ++faces[static_cast<std::size_t>(2 * axis + (p[axis] > 0 ? 1 : 0))];
    }
    for (std::size_t f = 0; f < 6; ++f) {
      EXPECT_NEAR(faces[f], n / 6.0, 5.0 * sigma);
      pooled[f] += faces[f];
    }
  }
  for (int f : pooled) EXPECT_NEAR(f, 10 * n / 6.0, 0.05 * 10 * n / 6.0);
}

TEST(SampleSurface, TriangleShareFollowsArea) {
  const SceneObject box = build_engraved_box(Vec3(0.547, 0.203, 0.209), 0.04, 2);
  double total = 0.0;
  for (const Triangle& t : box.triangles) total += t.area();
  const std::size_t n = 200000;
  const PointCloud c = sample_surface(box, n, 4);
  std::vector<int> counts(box.triangles.size(), 0);
  for (const Vec3& p : c.points) {
    for (std::size_t i = 0; i < box.triangles.size(); ++i) {
      const Triangle& t = box.triangles[i];
      const Vec3 nrm = (t.b - t.a).cross(t.c - t.a);
      if (std::abs(nrm.normalized().dot(p - t.a)) > 1e-9) continue;
      const auto hit = oracle::ray_triangle(p + nrm.normalized(), -nrm.normalized(), t);
      if (hit) {
        ++counts[i];
        break;
      }
    }
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double q = box.triangles[i].area() / total;
    EXPECT_NEAR(counts[i], n * q, 5.0 * std::sqrt(n * q * (1 - q)) + 1.0) << "triangle " << i;
  }
}

TEST(SampleSurface, Deterministic) {
  const SceneObject box = build_engraved_box(Vec3(0.5, 0.2, 0.2), 0.04, 3);
  const PointCloud a = sample_surface(box, 500, 9);
  const PointCloud b = sample_surface(box, 500, 9);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.normals, b.normals);
}

TEST(OcclusionGrid, FirstHitMatchesBruteForce) {
  const SceneObject box = build_engraved_box(Vec3(0.547, 0.203, 0.209), 0.04, 5);
  const OcclusionGrid grid(box);
  Rng rng = make_stream(4, 2);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 o = 0.6 * unit_vector(rng);
    const Vec3 target(uniform(rng, -0.3, 0.3), uniform(rng, -0.12, 0.12),
                      uniform(rng, -0.12, 0.12));
    const Vec3 dir = (target - o).normalized();
    const auto got = grid.first_hit(o, dir, 0.0, 5.0);
    const auto want = oracle::first_hit(box, o, dir, 0.0, 5.0);
    ASSERT_EQ(got.has_value(), want.has_value()) << "ray " << i;
    if (got) {
      ++hits;
      EXPECT_NEAR(*got, *want, 1e-9);
    }
  }
  EXPECT_GT(hits, 1000);
}

TEST(Visibility, BackFaceHiddenFromFrontCamera) {
  const SceneObject cube = build_engraved_box(Vec3(1, 1, 1), 0.0, 1);
  const PointCloud c = sample_surface(cube, 6000, 2);
  Camera cam;
  cam.pose = Pose::looking_at(Vec3(3, 0, 0), Vec3::Zero());
  const auto vis = visible_points(c, cube, cam);
  EXPECT_FALSE(vis.empty());
  for (std::size_t i : vis) EXPECT_GT(c.points[i].x(), -0.5 + 1e-6);
  for (std::size_t i : vis) EXPECT_NEAR(c.points[i].x(), 0.5, 1e-9);
}

TEST(Camera, BehindIsExcluded) {
  Camera cam;
  cam.pose = Pose::looking_at(Vec3(0, 0, 0), Vec3(1, 0, 0));
  EXPECT_FALSE(cam.project(Vec3(-1, 0, 0)).has_value());
  const auto p = cam.project(Vec3(1, 0, 0));
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR(p->u, cam.width / 2.0, 1e-9);
  EXPECT_NEAR(p->depth, 1.0, 1e-12);
  PointCloud c;
  c.push_back(Vec3(-1, 0, 0));
  c.push_back(Vec3(1, 0, 0));
  const auto in = frustum_points(c, cam);
  ASSERT_EQ(in.size(), 1u);
  EXPECT_EQ(in[0], 1u);
}
