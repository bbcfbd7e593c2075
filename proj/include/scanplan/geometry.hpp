#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace scanplan {

// World frame: right-handed, z-up, azimuth counter-clockwise from +x.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Normalizes an angle into [0, 2pi).
double wrap_angle(double radians);
// Signed smallest difference a - b in (-pi, pi].
double angle_difference(double a, double b);
// Azimuth of the horizontal offset (p - center), in [0, 2pi).
double azimuth_about(const Vec3& p, const Vec3& center);

Mat3 yaw_rotation(double yaw);
Mat3 axis_angle_rotation(const Vec3& axis, double radians);
// Geodesic angle between two rotations, radians.
double rotation_angle_between(const Mat3& a, const Mat3& b);
bool is_rotation(const Mat3& r, double tol = 1e-9);

// Body frame convention: x forward (optical axis), y left, z up.
struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();

  static Pose from_yaw(const Vec3& position, double yaw);
  // Level pose at `position` whose forward axis points at `target`.
  static Pose looking_at(const Vec3& position, const Vec3& target);

  Vec3 forward() const { return orientation.col(0); }
  double yaw() const;
  // World point -> body frame coordinates.
  Vec3 to_local(const Vec3& world) const;
  Vec3 to_world(const Vec3& local) const;
};

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static SimilarityTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
  Vec3 apply_direction(const Vec3& d) const { return rotation * d; }
  Pose apply(const Pose& pose) const;
  SimilarityTransform inverse() const;
  Eigen::Matrix4d matrix() const;

  // Throws BadConfig if scale <= 0 or rotation is not proper orthonormal.
  void validate(double tol = 1e-9) const;
};

// (a * b)(p) == a(b(p)).
SimilarityTransform compose(const SimilarityTransform& a,
                            const SimilarityTransform& b);

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extents() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double diagonal() const { return extents().norm(); }
  bool contains(const Vec3& p) const;
  void expand(const Vec3& p);
};

// Points with optional per-point normals and feature strength. The optional
// lists are either empty or exactly as long as `points`.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<double> feature_strength;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_features() const { return !feature_strength.empty(); }

  void reserve(std::size_t n);
  // Appends one point; attributes are only stored if the cloud carries them.
  void push_back(const Vec3& p, const Vec3& normal = Vec3::UnitZ(),
                 double feature = 0.0);
  // Appends another cloud. Attributes survive only if both sides carry them.
  void append(const PointCloud& other);
  PointCloud subset(std::span<const std::size_t> indices) const;

  // Throws BadConfig on length mismatch or non-unit normals.
  void validate() const;
};

Vec3 centroid(const PointCloud& cloud);
Aabb aabb(const PointCloud& cloud);
Aabb aabb(std::span<const Vec3> points);
PointCloud apply_similarity(const SimilarityTransform& t, const PointCloud& cloud);

struct PrincipalAxes {
  Mat3 axes;        // columns, descending variance
  Vec3 variances;   // matching eigenvalues
};

// Principal axes of the point covariance. The first two axes are oriented to
// a positive dot with +x (ties toward +y, then +z) and the third completes a
// right-handed frame. Throws DegenerateGeometry for collinear or coincident
// points.
PrincipalAxes principal_axes(const PointCloud& cloud);
Mat3 pca_axes(const PointCloud& cloud);

}  // namespace scanplan
