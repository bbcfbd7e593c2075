#include "scanplan/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "scanplan/error.hpp"

namespace scanplan {

double wrap_angle(double radians) {
  double a = std::fmod(radians, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  // fmod can round a tiny negative value up to exactly 2pi.
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double angle_difference(double a, double b) {
  double d = wrap_angle(a - b);
  if (d > kPi) d -= kTwoPi;
  return d;
}

double azimuth_about(const Vec3& p, const Vec3& center) {
  return wrap_angle(std::atan2(p.y() - center.y(), p.x() - center.x()));
}

Mat3 yaw_rotation(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 axis_angle_rotation(const Vec3& axis, double radians) {
  return Eigen::AngleAxisd(radians, axis.normalized()).toRotationMatrix();
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = ((r.transpose() * r) - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Pose Pose::from_yaw(const Vec3& position, double yaw) {
  return Pose{position, yaw_rotation(yaw)};
}

Pose Pose::looking_at(const Vec3& position, const Vec3& target) {
  const Vec3 d = target - position;
  return from_yaw(position, std::atan2(d.y(), d.x()));
}

double Pose::yaw() const {
  const Vec3 f = forward();
  return wrap_angle(std::atan2(f.y(), f.x()));
}

Vec3 Pose::to_local(const Vec3& world) const {
  return orientation.transpose() * (world - position);
}

Vec3 Pose::to_world(const Vec3& local) const {
  return orientation * local + position;
}

Pose SimilarityTransform::apply(const Pose& pose) const {
  return Pose{apply(pose.position), rotation * pose.orientation};
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.scale * (inv.rotation * translation));
  return inv;
}

Eigen::Matrix4d SimilarityTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = scale * rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

void SimilarityTransform::validate(double tol) const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw BadConfig("similarity transform scale must be positive");
  }
  if (!is_rotation(rotation, tol)) {
    throw BadConfig("similarity transform rotation is not a proper rotation");
  }
  if (!translation.allFinite()) {
    throw BadConfig("similarity transform translation is not finite");
  }
}

SimilarityTransform compose(const SimilarityTransform& a,
                            const SimilarityTransform& b) {
  SimilarityTransform c;
  c.scale = a.scale * b.scale;
  c.rotation = a.rotation * b.rotation;
  c.translation = a.scale * (a.rotation * b.translation) + a.translation;
  return c;
}

bool Aabb::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

void Aabb::expand(const Vec3& p) {
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

void PointCloud::reserve(std::size_t n) {
  points.reserve(n);
  if (has_normals()) normals.reserve(n);
  if (has_features()) feature_strength.reserve(n);
}

void PointCloud::push_back(const Vec3& p, const Vec3& normal, double feature) {
  const bool with_normals = has_normals() || empty();
  const bool with_features = has_features() || empty();
  points.push_back(p);
  if (with_normals) normals.push_back(normal);
  if (with_features) feature_strength.push_back(feature);
}

void PointCloud::append(const PointCloud& other) {
  if (other.empty()) return;
  const bool was_empty = empty();
  const bool keep_normals = other.has_normals() && (was_empty || has_normals());
  const bool keep_features =
      other.has_features() && (was_empty || has_features());
  points.insert(points.end(), other.points.begin(), other.points.end());
  if (keep_normals) {
    normals.insert(normals.end(), other.normals.begin(), other.normals.end());
  } else {
    normals.clear();
  }
  if (keep_features) {
    feature_strength.insert(feature_strength.end(),
                            other.feature_strength.begin(),
                            other.feature_strength.end());
  } else {
    feature_strength.clear();
  }
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  PointCloud out;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.points.push_back(points[i]);
  if (has_normals()) {
    out.normals.reserve(indices.size());
    for (std::size_t i : indices) out.normals.push_back(normals[i]);
  }
  if (has_features()) {
    out.feature_strength.reserve(indices.size());
    for (std::size_t i : indices) out.feature_strength.push_back(feature_strength[i]);
  }
  return out;
}

void PointCloud::validate() const {
  if (has_normals() && normals.size() != points.size()) {
    throw BadConfig("normals and points differ in length");
  }
  if (has_features() && feature_strength.size() != points.size()) {
    throw BadConfig("feature strengths and points differ in length");
  }
  for (const Vec3& n : normals) {
    if (std::abs(n.norm() - 1.0) > 1e-6) throw BadConfig("normal is not unit length");
  }
}

Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyInput("centroid of an empty cloud");
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : cloud.points) sum += p;
  return sum / static_cast<double>(cloud.size());
}

Aabb aabb(std::span<const Vec3> points) {
  if (points.empty()) throw EmptyInput("bounding box of an empty cloud");
  Aabb box{points.front(), points.front()};
  for (const Vec3& p : points) box.expand(p);
  return box;
}

Aabb aabb(const PointCloud& cloud) { return aabb(std::span<const Vec3>(cloud.points)); }

PointCloud apply_similarity(const SimilarityTransform& t, const PointCloud& cloud) {
  PointCloud out = cloud;
  for (Vec3& p : out.points) p = t.apply(p);
  for (Vec3& n : out.normals) n = t.apply_direction(n);
  return out;
}

namespace {

// Orients v to a positive dot with +x; exact ties fall through to +y, +z.
Vec3 canonical_sign(const Vec3& v) {
  constexpr double kTie = 1e-12;
  for (int k = 0; k < 3; ++k) {
    if (v[k] > kTie) return v;
    if (v[k] < -kTie) return -v;
  }
  return v;
}

}  // namespace

PrincipalAxes principal_axes(const PointCloud& cloud) {
  if (cloud.size() < 3) throw DegenerateGeometry("PCA needs at least 3 points");
  const Vec3 c = centroid(cloud);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : cloud.points) {
    const Vec3 d = p - c;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(cloud.size());

  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  const Vec3 ev = solver.eigenvalues();  // ascending
  const double largest = ev[2];
  if (!(largest > 1e-18) || ev[1] <= 1e-10 * largest) {
    throw DegenerateGeometry("points are collinear or coincident");
  }

  PrincipalAxes out;
  const Mat3 vecs = solver.eigenvectors();
  Vec3 a0 = canonical_sign(vecs.col(2));
  Vec3 a1 = canonical_sign(vecs.col(1));
  out.axes.col(0) = a0;
  out.axes.col(1) = a1;
  out.axes.col(2) = a0.cross(a1).normalized();
  out.variances = Vec3(ev[2], ev[1], std::max(ev[0], 0.0));
  return out;
}

Mat3 pca_axes(const PointCloud& cloud) { return principal_axes(cloud).axes; }

}  // namespace scanplan
