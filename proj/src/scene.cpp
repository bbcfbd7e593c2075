#include "scanplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scanplan/error.hpp"
#include "scanplan/random.hpp"

namespace scanplan {

namespace {

constexpr double kRecessFeature = 0.9;
constexpr double kFlatFeature = 0.4;

// Adds the quad p0-p1-p2-p3 (perimeter order) wound so that its normal
// agrees with `outward`.
void add_quad(SceneObject& obj, const Vec3& p0, const Vec3& p1, const Vec3& p2,
              const Vec3& p3, const Vec3& outward, double strength) {
  Triangle t1{p0, p1, p2};
  Triangle t2{p0, p2, p3};
  if ((p1 - p0).cross(p2 - p0).dot(outward) < 0.0) {
    t1 = Triangle{p0, p2, p1};
    t2 = Triangle{p0, p3, p2};
  }
  obj.add(t1, strength);
  obj.add(t2, strength);
}

struct Rect {
  double u0, u1, v0, v1;
  bool contains(double u, double v) const {
    return u > u0 && u < u1 && v > v0 && v < v1;
  }
};

}  // namespace

void SceneObject::add(const Triangle& t, double strength) {
  triangles.push_back(t);
  feature.push_back(strength);
}

Aabb SceneObject::bounds() const {
  if (triangles.empty()) throw EmptyInput("object has no triangles");
  Aabb box{triangles.front().a, triangles.front().a};
  for (const Triangle& t : triangles) {
    box.expand(t.a);
    box.expand(t.b);
    box.expand(t.c);
  }
  return box;
}

void SceneObject::validate() const {
  if (feature.size() != triangles.size()) {
    throw BadConfig("one feature strength per triangle is required");
  }
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    if (!(triangles[i].area() > 1e-12)) throw BadConfig("degenerate triangle");
    if (feature[i] < 0.0 || feature[i] > 1.0) {
      throw BadConfig("feature strength outside [0,1]");
    }
  }
}

SceneObject translated(const SceneObject& obj, const Vec3& offset) {
  SceneObject out = obj;
  for (Triangle& t : out.triangles) {
    t.a += offset;
    t.b += offset;
    t.c += offset;
  }
  return out;
}

SceneObject build_engraved_box(const Vec3& dims, double engraving_depth,
                               std::uint64_t seed) {
  if (!dims.allFinite() || (dims.array() <= 0.0).any()) {
    throw BadConfig("box dimensions must be positive");
  }
  if (engraving_depth < 0.0 || engraving_depth >= dims.minCoeff() / 2.0) {
    throw BadConfig("engraving depth must be in [0, min(dims)/2)");
  }

  // The engraved faces are the two largest, i.e. normal to the thinnest axis.
  int n = 0;
  dims.minCoeff(&n);
  const Vec3 half = dims / 2.0;
  SceneObject obj;

  auto corner = [](int axis_n, double wn, int axis_u, double wu, int axis_v,
                   double wv) {
    Vec3 p;
    p[axis_n] = wn;
    p[axis_u] = wu;
    p[axis_v] = wv;
    return p;
  };

  Rng rng(seed);
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (double s : {-1.0, 1.0}) {
      const double w = s * half[axis];
      Vec3 outward = Vec3::Zero();
      outward[axis] = s;
      if (axis != n || engraving_depth == 0.0) {
        add_quad(obj, corner(axis, w, u, -half[u], v, -half[v]),
                 corner(axis, w, u, half[u], v, -half[v]),
                 corner(axis, w, u, half[u], v, half[v]),
                 corner(axis, w, u, -half[u], v, half[v]), outward, kFlatFeature);
        continue;
      }

      // Three engraved blocks in a row along the longer in-plane axis.
      const bool u_long = dims[u] >= dims[v];
      const int along = u_long ? u : v;
      const int across = u_long ? v : u;
      const double margin = 0.12 * std::min(dims[u], dims[v]);
      const int kBlocks = 3;
      const double slot = (dims[along] - 2.0 * margin) / kBlocks;
      std::vector<Rect> rects;
      for (int b = 0; b < kBlocks; ++b) {
        const double width = slot * uniform(rng, 0.55, 0.8);
        const double lo = -half[along] + margin + b * slot + 0.5 * (slot - width);
        const double h_lo = -half[across] + margin * uniform(rng, 1.0, 1.6);
        const double h_hi = half[across] - margin * uniform(rng, 1.0, 1.6);
        Rect r = u_long ? Rect{lo, lo + width, h_lo, h_hi}
                        : Rect{h_lo, h_hi, lo, lo + width};
        rects.push_back(r);
      }

      std::vector<double> bu{-half[u], half[u]};
      std::vector<double> bv{-half[v], half[v]};
      for (const Rect& r : rects) {
        bu.insert(bu.end(), {r.u0, r.u1});
        bv.insert(bv.end(), {r.v0, r.v1});
      }
      std::sort(bu.begin(), bu.end());
      std::sort(bv.begin(), bv.end());
      bu.erase(std::unique(bu.begin(), bu.end()), bu.end());
      bv.erase(std::unique(bv.begin(), bv.end()), bv.end());

      const double floor = w - s * engraving_depth;
      for (std::size_t i = 0; i + 1 < bu.size(); ++i) {
        for (std::size_t j = 0; j + 1 < bv.size(); ++j) {
          const double cu = 0.5 * (bu[i] + bu[i + 1]);
          const double cv = 0.5 * (bv[j] + bv[j + 1]);
          const bool recessed = std::any_of(rects.begin(), rects.end(),
                                            [&](const Rect& r) { return r.contains(cu, cv); });
          const double wn = recessed ? floor : w;
          add_quad(obj, corner(axis, wn, u, bu[i], v, bv[j]),
                   corner(axis, wn, u, bu[i + 1], v, bv[j]),
                   corner(axis, wn, u, bu[i + 1], v, bv[j + 1]),
                   corner(axis, wn, u, bu[i], v, bv[j + 1]), outward,
                   recessed ? kRecessFeature : kFlatFeature);
        }
      }
      // Recess walls face into the opening.
      for (const Rect& r : rects) {
        Vec3 nu = Vec3::Zero();
        Vec3 nv = Vec3::Zero();
        nu[u] = 1.0;
        nv[v] = 1.0;
        add_quad(obj, corner(axis, w, u, r.u0, v, r.v0), corner(axis, w, u, r.u0, v, r.v1),
                 corner(axis, floor, u, r.u0, v, r.v1), corner(axis, floor, u, r.u0, v, r.v0),
                 nu, kRecessFeature);
        add_quad(obj, corner(axis, w, u, r.u1, v, r.v0), corner(axis, w, u, r.u1, v, r.v1),
                 corner(axis, floor, u, r.u1, v, r.v1), corner(axis, floor, u, r.u1, v, r.v0),
                 -nu, kRecessFeature);
        add_quad(obj, corner(axis, w, u, r.u0, v, r.v0), corner(axis, w, u, r.u1, v, r.v0),
                 corner(axis, floor, u, r.u1, v, r.v0), corner(axis, floor, u, r.u0, v, r.v0),
                 nv, kRecessFeature);
        add_quad(obj, corner(axis, w, u, r.u0, v, r.v1), corner(axis, w, u, r.u1, v, r.v1),
                 corner(axis, floor, u, r.u1, v, r.v1), corner(axis, floor, u, r.u0, v, r.v1),
                 -nv, kRecessFeature);
      }
    }
  }
  obj.validate();
  return obj;
}

SceneObject build_tall_object(double height, double radius, double feature_strength) {
  if (!(height > 0.0) || !(radius > 0.0)) {
    throw BadConfig("tall object height and radius must be positive");
  }
  if (feature_strength < 0.0 || feature_strength > 1.0) {
    throw BadConfig("feature strength outside [0,1]");
  }
  // (height fraction, radius fraction): base, torso, neck, head.
  static constexpr double kProfile[][2] = {
      {0.00, 0.70}, {0.06, 0.85}, {0.30, 1.00}, {0.52, 0.90}, {0.64, 0.55},
      {0.72, 0.40}, {0.78, 0.65}, {0.90, 0.70}, {0.97, 0.45}, {1.00, 0.20}};
  constexpr int kSegments = 24;
  const double z0 = -height / 2.0;

  SceneObject obj;
  auto ring_point = [&](int k, int seg) {
    const double a = kTwoPi * seg / kSegments;
    const double r = radius * kProfile[k][1];
    return Vec3(r * std::cos(a), r * std::sin(a), z0 + height * kProfile[k][0]);
  };
  constexpr int kLevels = static_cast<int>(std::size(kProfile));
  for (int k = 0; k + 1 < kLevels; ++k) {
    for (int seg = 0; seg < kSegments; ++seg) {
      const double mid = kTwoPi * (seg + 0.5) / kSegments;
      const double dr = radius * (kProfile[k + 1][1] - kProfile[k][1]);
      const double dz = height * (kProfile[k + 1][0] - kProfile[k][0]);
      const Vec3 outward =
          Vec3(dz * std::cos(mid), dz * std::sin(mid), -dr).normalized();
      add_quad(obj, ring_point(k, seg), ring_point(k, seg + 1),
               ring_point(k + 1, seg + 1), ring_point(k + 1, seg), outward,
               feature_strength);
    }
  }
  const Vec3 bottom(0.0, 0.0, z0);
  const Vec3 top(0.0, 0.0, z0 + height);
  for (int seg = 0; seg < kSegments; ++seg) {
    Triangle b{bottom, ring_point(0, seg + 1), ring_point(0, seg)};
    if (b.normal().z() > 0.0) std::swap(b.b, b.c);
    obj.add(b, feature_strength);
    Triangle t{top, ring_point(kLevels - 1, seg), ring_point(kLevels - 1, seg + 1)};
    if (t.normal().z() < 0.0) std::swap(t.b, t.c);
    obj.add(t, feature_strength);
  }
  obj.validate();
  return obj;
}

PointCloud sample_surface(const SceneObject& obj, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw BadConfig("sample count must be at least 1");
  if (obj.triangles.empty()) throw EmptyInput("object has no triangles");
  std::vector<double> cumulative(obj.triangles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < obj.triangles.size(); ++i) {
    total += obj.triangles[i].area();
    cumulative[i] = total;
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud cloud;
  cloud.points.reserve(n);
  cloud.normals.reserve(n);
  cloud.feature_strength.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double pick = unit(rng) * total;
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
    i = std::min(i, obj.triangles.size() - 1);
    const Triangle& t = obj.triangles[i];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const Vec3 p = (1.0 - r1) * t.a + r1 * (1.0 - r2) * t.b + r1 * r2 * t.c;
    cloud.points.push_back(p);
    cloud.normals.push_back(t.normal());
    cloud.feature_strength.push_back(obj.feature[i]);
  }
  return cloud;
}

std::optional<Camera::Projection> Camera::project(const Vec3& p) const {
  const Vec3 local = pose.to_local(p);
  if (local.x() <= 1e-12) return std::nullopt;
  const double x = -local.y() / local.x() / std::tan(hfov / 2.0);
  const double y = -local.z() / local.x() / std::tan(vfov / 2.0);
  return Projection{(x + 1.0) * 0.5 * width, (y + 1.0) * 0.5 * height, local.x()};
}

namespace {

bool inside_frustum(const Camera& cam, const Vec3& p, double tan_h, double tan_v) {
  const Vec3 local = cam.pose.to_local(p);
  if (local.x() <= 1e-12) return false;
  if (local.norm() > cam.max_range) return false;
  const double x = local.y() / local.x();
  const double y = local.z() / local.x();
  return std::abs(x) <= tan_h && std::abs(y) <= tan_v;
}

}  // namespace

bool Camera::in_frustum(const Vec3& p) const {
  return inside_frustum(*this, p, std::tan(hfov / 2.0), std::tan(vfov / 2.0));
}

void Camera::validate() const {
  if (!(hfov > 0.0 && hfov < kPi) || !(vfov > 0.0 && vfov < kPi)) {
    throw BadConfig("camera field of view must be in (0, pi)");
  }
  if (!(max_range > 0.0)) throw BadConfig("camera range must be positive");
  if (width < 1 || height < 1) throw BadConfig("camera resolution must be positive");
}

std::optional<double> intersect_ray_triangle(const Vec3& origin, const Vec3& dir,
                                             const Triangle& tri) {
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tv = origin - tri.a;
  const double u = tv.dot(pv) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  return e2.dot(qv) * inv;
}

OcclusionGrid::OcclusionGrid(const SceneObject& obj, int divisions) : obj_(obj) {
  const Aabb box = obj_.bounds();
  const double diag = box.diagonal();
  cell_ = diag / std::max(divisions, 1);
  const double pad = 1e-6 * diag + 1e-9;
  origin_ = box.min - Vec3::Constant(pad);
  const Vec3 ext = box.extents() + Vec3::Constant(2.0 * pad);
  for (int k = 0; k < 3; ++k) {
    dims_[k] = std::max(1, static_cast<int>(std::ceil(ext[k] / cell_)));
  }
  const std::size_t ncells =
      static_cast<std::size_t>(dims_[0]) * dims_[1] * static_cast<std::size_t>(dims_[2]);

  // Conservative binning by triangle bounding box.
  std::vector<std::vector<std::uint32_t>> bins(ncells);
  for (std::size_t i = 0; i < obj_.triangles.size(); ++i) {
    const Triangle& t = obj_.triangles[i];
    const Vec3 lo = t.a.cwiseMin(t.b).cwiseMin(t.c);
    const Vec3 hi = t.a.cwiseMax(t.b).cwiseMax(t.c);
    int c0[3], c1[3];
    for (int k = 0; k < 3; ++k) {
      c0[k] = std::clamp(static_cast<int>(std::floor((lo[k] - origin_[k]) / cell_)), 0, dims_[k] - 1);
      c1[k] = std::clamp(static_cast<int>(std::floor((hi[k] - origin_[k]) / cell_)), 0, dims_[k] - 1);
    }
    for (int z = c0[2]; z <= c1[2]; ++z)
      for (int y = c0[1]; y <= c1[1]; ++y)
        for (int x = c0[0]; x <= c1[0]; ++x)
          bins[(static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x].push_back(
              static_cast<std::uint32_t>(i));
  }
  start_.assign(ncells + 1, 0);
  for (std::size_t c = 0; c < ncells; ++c) {
    start_[c + 1] = start_[c] + static_cast<std::uint32_t>(bins[c].size());
  }
  tris_.reserve(start_.back());
  for (const auto& b : bins) tris_.insert(tris_.end(), b.begin(), b.end());
}

std::optional<double> OcclusionGrid::first_hit(const Vec3& origin, const Vec3& dir,
                                               double t_min, double t_max) const {
  // Clip the ray to the grid box.
  double t0 = t_min;
  double t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    const double lo = origin_[k];
    const double hi = origin_[k] + dims_[k] * cell_;
    if (std::abs(dir[k]) < 1e-15) {
      if (origin[k] < lo || origin[k] > hi) return std::nullopt;
      continue;
    }
    double ta = (lo - origin[k]) / dir[k];
    double tb = (hi - origin[k]) / dir[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }

  // Amanatides-Woo traversal.
  const Vec3 entry = origin + t0 * dir;
  int cell[3], step[3];
  double t_next[3], t_delta[3];
  for (int k = 0; k < 3; ++k) {
    cell[k] = std::clamp(static_cast<int>(std::floor((entry[k] - origin_[k]) / cell_)), 0,
                         dims_[k] - 1);
    if (dir[k] > 0.0) {
      step[k] = 1;
      t_next[k] = (origin_[k] + (cell[k] + 1) * cell_ - origin[k]) / dir[k];
      t_delta[k] = cell_ / dir[k];
    } else if (dir[k] < 0.0) {
      step[k] = -1;
      t_next[k] = (origin_[k] + cell[k] * cell_ - origin[k]) / dir[k];
      t_delta[k] = -cell_ / dir[k];
    } else {
      step[k] = 0;
      t_next[k] = std::numeric_limits<double>::infinity();
      t_delta[k] = std::numeric_limits<double>::infinity();
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    const std::size_t c =
        (static_cast<std::size_t>(cell[2]) * dims_[1] + cell[1]) * dims_[0] + cell[0];
    for (std::uint32_t s = start_[c]; s < start_[c + 1]; ++s) {
      const auto hit = intersect_ray_triangle(origin, dir, obj_.triangles[tris_[s]]);
      if (hit && *hit > t_min && *hit < t_max && *hit < best) best = *hit;
    }
    const double cell_exit = std::min({t_next[0], t_next[1], t_next[2]});
    if (best <= cell_exit || cell_exit > t1) break;
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= dims_[axis]) break;
    t_next[axis] += t_delta[axis];
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

bool OcclusionGrid::occluded(const Vec3& from, const Vec3& to, double epsilon) const {
  const Vec3 d = to - from;
  const double dist = d.norm();
  if (dist <= epsilon) return false;
  return first_hit(from, d / dist, 1e-9, dist - epsilon).has_value();
}

std::vector<std::size_t> frustum_points(const PointCloud& cloud, const Camera& cam) {
  std::vector<std::size_t> out;
  const double tan_h = std::tan(cam.hfov / 2.0);
  const double tan_v = std::tan(cam.vfov / 2.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (inside_frustum(cam, cloud.points[i], tan_h, tan_v)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> visible_points(const PointCloud& cloud,
                                        const OcclusionGrid& grid, const Camera& cam) {
  if (!cloud.has_normals()) throw BadConfig("visibility needs point normals");
  std::vector<std::size_t> out;
  const Vec3& eye = cam.pose.position;
  const double tan_h = std::tan(cam.hfov / 2.0);
  const double tan_v = std::tan(cam.vfov / 2.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (cloud.normals[i].dot(p - eye) >= 0.0) continue;
    if (!inside_frustum(cam, p, tan_h, tan_v)) continue;
    if (grid.occluded(eye, p)) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> visible_points(const PointCloud& cloud,
                                        const SceneObject& obj, const Camera& cam) {
  return visible_points(cloud, OcclusionGrid(obj), cam);
}

}  // namespace scanplan
