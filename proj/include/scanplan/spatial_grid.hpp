#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scanplan/geometry.hpp"

namespace scanplan {

// Uniform bucket grid over a fixed point set for exact nearest-neighbour and
// fixed-radius queries. The grid keeps a view of the points; they must
// outlive it.
class PointGrid {
 public:
  struct Hit {
    std::size_t index;
    double distance;
  };

  // cell_size <= 0 picks a size from the point count and extent.
  explicit PointGrid(std::span<const Vec3> points, double cell_size = 0.0);

  std::size_t size() const { return points_.size(); }
  double cell_size() const { return cell_; }

  // Exact nearest neighbour; nullopt for an empty grid.
  std::optional<Hit> nearest(const Vec3& q) const;
  // Nearest neighbour other than `self`.
  std::optional<Hit> nearest_excluding(const Vec3& q, std::size_t self) const;

  // Calls f(index, squared_distance) for every point with |p - q| <= radius.
  template <typename F>
  void for_each_within(const Vec3& q, double radius, F&& f) const {
    if (points_.empty()) return;
    const double r2 = radius * radius;
    std::array<long, 3> lo{}, hi{};
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::max<long>(0, cell_coord(q[k] - radius, k));
      hi[k] = std::min<long>(dims_[k] - 1, cell_coord(q[k] + radius, k));
      if (lo[k] > hi[k]) return;
    }
    for (long z = lo[2]; z <= hi[2]; ++z) {
      for (long y = lo[1]; y <= hi[1]; ++y) {
        for (long x = lo[0]; x <= hi[0]; ++x) {
          const std::size_t c = flat(x, y, z);
          for (std::uint32_t s = start_[c]; s < start_[c + 1]; ++s) {
            const std::size_t i = order_[s];
            const double d2 = (points_[i] - q).squaredNorm();
            if (d2 <= r2) f(i, d2);
          }
        }
      }
    }
  }

 private:
  long cell_coord(double v, int axis) const {
    return static_cast<long>(std::floor((v - origin_[axis]) / cell_));
  }
  std::size_t flat(long x, long y, long z) const {
    return static_cast<std::size_t>((z * dims_[1] + y) * dims_[0] + x);
  }
  std::optional<Hit> nearest_impl(const Vec3& q, std::size_t skip) const;

  std::span<const Vec3> points_;
  Vec3 origin_ = Vec3::Zero();
  double cell_ = 1.0;
  std::array<long, 3> dims_{1, 1, 1};
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> order_;
};

}  // namespace scanplan
