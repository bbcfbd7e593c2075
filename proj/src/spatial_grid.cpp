#include "scanplan/spatial_grid.hpp"

#include <algorithm>
#include <limits>

namespace scanplan {

namespace {
constexpr double kMaxCells = 2.0e6;
constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();
}  // namespace

PointGrid::PointGrid(std::span<const Vec3> points, double cell_size)
    : points_(points) {
  if (points_.empty()) {
    start_.assign(2, 0);
    return;
  }
  const Aabb box = aabb(points_);
  const Vec3 ext = box.extents().cwiseMax(1e-9);
  if (!(cell_size > 0.0)) {
    // About four points per cell for surface-like samples.
    cell_size = 2.0 * ext.norm() / std::sqrt(static_cast<double>(points_.size()));
  }
  cell_ = std::max(cell_size, 1e-9);
  for (;;) {
    double cells = 1.0;
    for (int k = 0; k < 3; ++k) cells *= std::floor(ext[k] / cell_) + 1.0;
    if (cells <= kMaxCells) break;
    cell_ *= 1.25;
  }
  origin_ = box.min;
  for (int k = 0; k < 3; ++k) dims_[k] = static_cast<long>(std::floor(ext[k] / cell_)) + 1;

  const std::size_t ncells = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
  std::vector<std::uint32_t> cell_of(points_.size());
  start_.assign(ncells + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    long c[3];
    for (int k = 0; k < 3; ++k) {
      c[k] = std::clamp<long>(cell_coord(points_[i][k], k), 0, dims_[k] - 1);
    }
    cell_of[i] = static_cast<std::uint32_t>(flat(c[0], c[1], c[2]));
    ++start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) start_[c + 1] += start_[c];
  order_.resize(points_.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    order_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }
}

std::optional<PointGrid::Hit> PointGrid::nearest(const Vec3& q) const {
  return nearest_impl(q, kNoSkip);
}

std::optional<PointGrid::Hit> PointGrid::nearest_excluding(const Vec3& q,
                                                           std::size_t self) const {
  return nearest_impl(q, self);
}

std::optional<PointGrid::Hit> PointGrid::nearest_impl(const Vec3& q,
                                                      std::size_t skip) const {
  if (points_.empty() || (points_.size() == 1 && skip == 0)) return std::nullopt;

  long qc[3];
  long start_ring = 0;
  for (int k = 0; k < 3; ++k) {
    qc[k] = cell_coord(q[k], k);
    if (qc[k] < 0) start_ring = std::max(start_ring, -qc[k]);
    if (qc[k] >= dims_[k]) start_ring = std::max(start_ring, qc[k] - dims_[k] + 1);
  }
  // Distance from q to the boundary of its own cell along each axis bounds
  // the distance to any cell in a farther ring.
  double slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double local = q[k] - (origin_[k] + static_cast<double>(qc[k]) * cell_);
    slack = std::min({slack, local, cell_ - local});
  }
  slack = std::max(slack, 0.0);

  const long max_ring = std::max({dims_[0], dims_[1], dims_[2]}) + start_ring + 1;
  double best2 = std::numeric_limits<double>::infinity();
  std::size_t best = 0;

  for (long r = start_ring; r <= max_ring; ++r) {
    for (long z = qc[2] - r; z <= qc[2] + r; ++z) {
      if (z < 0 || z >= dims_[2]) continue;
      const bool zface = (z == qc[2] - r || z == qc[2] + r);
      for (long y = qc[1] - r; y <= qc[1] + r; ++y) {
        if (y < 0 || y >= dims_[1]) continue;
        const bool yface = (y == qc[1] - r || y == qc[1] + r);
        const long step = (zface || yface || r == 0) ? 1 : 2 * r;
        for (long x = qc[0] - r; x <= qc[0] + r; x += step) {
          if (x < 0 || x >= dims_[0]) continue;
          const std::size_t c = flat(x, y, z);
          for (std::uint32_t s = start_[c]; s < start_[c + 1]; ++s) {
            const std::size_t i = order_[s];
            if (i == skip) continue;
            const double d2 = (points_[i] - q).squaredNorm();
            if (d2 < best2 || (d2 == best2 && i < best)) {
              best2 = d2;
              best = i;
            }
          }
        }
      }
    }
    // Every point in ring r + 1 or beyond is at least r * cell + slack away.
    const double bound = static_cast<double>(r) * cell_ + slack;
    if (best2 <= bound * bound) break;
  }
  if (!std::isfinite(best2)) return std::nullopt;
  return Hit{best, std::sqrt(best2)};
}

}  // namespace scanplan
