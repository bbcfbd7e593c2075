#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scanplan/geometry.hpp"

namespace scanplan {

struct Triangle {
  Vec3 a, b, c;

  Vec3 normal() const { return (b - a).cross(c - a).normalized(); }
  double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
};

// Triangle soup with one feature strength in [0,1] per triangle. Feature
// strength stands in for how much texture an image of that surface offers
// to feature matching.
struct SceneObject {
  std::vector<Triangle> triangles;
  std::vector<double> feature;

  void add(const Triangle& t, double strength);
  Aabb bounds() const;
  // Throws BadConfig on degenerate triangles or out-of-range strengths.
  void validate() const;
};

SceneObject translated(const SceneObject& obj, const Vec3& offset);

// Box centred at the origin with rectangular recesses cut into the two
// largest faces. Recess layout is jittered by `seed`; depth 0 gives a plain
// 12-triangle box.
SceneObject build_engraved_box(const Vec3& dims, double engraving_depth,
                               std::uint64_t seed);

// Stacked frustum approximation of an upright figure centred at the origin,
// with a uniform (low) feature strength.
SceneObject build_tall_object(double height, double radius,
                              double feature_strength = 0.15);

// Area-weighted samples with outward normals and the source triangle's
// feature strength. Deterministic for a fixed seed.
PointCloud sample_surface(const SceneObject& obj, std::size_t n, std::uint64_t seed);

struct Camera {
  Pose pose;
  double hfov = 80.0 * kPi / 180.0;
  double vfov = 80.0 * kPi / 180.0;
  double max_range = 3.0;
  int width = 320;
  int height = 320;

  struct Projection {
    double u;      // pixel column, continuous
    double v;      // pixel row, continuous
    double depth;  // along the optical axis
  };

  // Projects a world point; nullopt when it is behind the camera.
  std::optional<Projection> project(const Vec3& p) const;
  bool in_frustum(const Vec3& p) const;
  void validate() const;
};

// Uniform grid over the triangles for ray casting. Cell size is the object
// diagonal divided by `divisions`.
class OcclusionGrid {
 public:
  explicit OcclusionGrid(const SceneObject& obj, int divisions = 32);

  // Smallest t in (t_min, t_max) where origin + t*dir (dir unit) hits a
  // triangle.
  std::optional<double> first_hit(const Vec3& origin, const Vec3& dir,
                                  double t_min, double t_max) const;
  bool occluded(const Vec3& from, const Vec3& to, double epsilon = 1e-4) const;

  const SceneObject& object() const { return obj_; }

 private:
  SceneObject obj_;
  Vec3 origin_;
  double cell_;
  int dims_[3];
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> tris_;
};

// Möller-Trumbore; returns the ray parameter of the hit.
std::optional<double> intersect_ray_triangle(const Vec3& origin, const Vec3& dir,
                                             const Triangle& tri);

std::vector<std::size_t> frustum_points(const PointCloud& cloud, const Camera& cam);

// Indices of points inside the frustum and range, front-facing, and not
// hidden behind any triangle (hits within 1e-4 m of the point are ignored).
std::vector<std::size_t> visible_points(const PointCloud& cloud,
                                        const OcclusionGrid& grid,
                                        const Camera& cam);
std::vector<std::size_t> visible_points(const PointCloud& cloud,
                                        const SceneObject& obj, const Camera& cam);

}  // namespace scanplan
