#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the basic value types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "scanplan/geometry.hpp"
#include "scanplan/random.hpp"
#include "scanplan/scene.hpp"

namespace oracle {

using scanplan::PointCloud;
using scanplan::Vec3;

inline double directed_hausdorff(const PointCloud& a, const PointCloud& b) {
  double worst = 0.0;
  for (const Vec3& p : a.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b.points) best = std::min(best, (p - q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

inline double hausdorff(const PointCloud& a, const PointCloud& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// Mean cost of the best bijection, by enumerating every permutation.
inline double wasserstein_bijection(const PointCloud& a, const PointCloud& b) {
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      cost += (a.points[i] - b.points[static_cast<std::size_t>(perm[i])]).norm();
    }
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(a.size());
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Single-linkage components over all pairs, in the library's canonical order
// (by smallest member, members ascending), small components dropped.
inline std::vector<std::vector<std::size_t>> clusters(const PointCloud& cloud, double d,
                                                      std::size_t min_size) {
  const std::size_t n = cloud.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((cloud.points[i] - cloud.points[j]).norm() <= d) uf.unite(i, j);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  std::vector<std::size_t> root_order;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = uf.find(i);
    if (!by_root.count(r)) root_order.push_back(r);
    by_root[r].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t r : root_order) {
    if (by_root[r].size() >= min_size) out.push_back(by_root[r]);
  }
  return out;
}

// Ray/plane intersection followed by a barycentric inside test.
inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& dir,
                                          const scanplan::Triangle& tri) {
  const Vec3 n = (tri.b - tri.a).cross(tri.c - tri.a);
  const double denom = n.dot(dir);
  if (std::abs(denom) < 1e-14) return std::nullopt;
  const double t = n.dot(tri.a - o) / denom;
  const Vec3 p = o + t * dir;
  const double area2 = n.squaredNorm();
  const double u = n.dot((tri.c - tri.b).cross(p - tri.b)) / area2;
  const double v = n.dot((tri.a - tri.c).cross(p - tri.c)) / area2;
  const double w = 1.0 - u - v;
  if (u < -1e-12 || v < -1e-12 || w < -1e-12) return std::nullopt;
  return t;
}

inline std::optional<double> first_hit(const scanplan::SceneObject& obj, const Vec3& o,
                                       const Vec3& dir, double t_min, double t_max) {
  std::optional<double> best;
  for (const auto& tri : obj.triangles) {
    const auto t = ray_triangle(o, dir, tri);
    if (t && *t > t_min && *t < t_max && (!best || *t < *best)) best = t;
  }
  return best;
}

// Slice index by direct arithmetic on the wrapped azimuth.
inline int slice_of(double azimuth, int k) {
  double a = std::fmod(azimuth, scanplan::kTwoPi);
  if (a < 0.0) a += scanplan::kTwoPi;
  const int s = static_cast<int>(a / (scanplan::kTwoPi / k));
  return std::min(s, k - 1);
}

// Evenly spaced points on a horizontal ring about `center`.
inline PointCloud ring(const Vec3& center, double radius, std::size_t n,
                       double from = 0.0, double to = scanplan::kTwoPi) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    const double az = from + (to - from) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    c.push_back(center + Vec3(radius * std::cos(az), radius * std::sin(az), 0.0));
  }
  return c;
}

inline PointCloud random_cloud(scanplan::Rng& rng, std::size_t n, double extent) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(Vec3(scanplan::uniform(rng, 0.0, extent), scanplan::uniform(rng, 0.0, extent),
                     scanplan::uniform(rng, 0.0, extent)));
  }
  return c;
}

// SSIM of one window position evaluated directly.
template <typename ImageT>
double ssim_window(const ImageT& a, const ImageT& b, int x0, int y0, int win, double range) {
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  const double n = static_cast<double>(win * win);
  double ma = 0.0, mb = 0.0;
  for (int y = y0; y < y0 + win; ++y) {
    for (int x = x0; x < x0 + win; ++x) {
      ma += a.at(x, y);
      mb += b.at(x, y);
    }
  }
  ma /= n;
  mb /= n;
  double va = 0.0, vb = 0.0, cov = 0.0;
  for (int y = y0; y < y0 + win; ++y) {
    for (int x = x0; x < x0 + win; ++x) {
      va += (a.at(x, y) - ma) * (a.at(x, y) - ma);
      vb += (b.at(x, y) - mb) * (b.at(x, y) - mb);
      cov += (a.at(x, y) - ma) * (b.at(x, y) - mb);
    }
  }
  va /= n;
  vb /= n;
  cov /= n;
  return ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

template <typename ImageT>
double ssim_mean(const ImageT& a, const ImageT& b, double range = 1.0) {
  const int win = 7;
  double sum = 0.0;
  int count = 0;
  for (int y = 0; y + win <= a.height; ++y) {
    for (int x = 0; x + win <= a.width; ++x) {
      sum += ssim_window(a, b, x, y, win, range);
      ++count;
    }
  }
  return sum / count;
}

}  // namespace oracle
