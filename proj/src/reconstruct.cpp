#include "scanplan/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scanplan/error.hpp"
#include "scanplan/spatial_grid.hpp"

namespace scanplan {

namespace {

std::uint64_t voxel_key(const Vec3& p, double v) {
  constexpr std::int64_t kOffset = std::int64_t{1} << 20;
  constexpr std::uint64_t kMask = (std::uint64_t{1} << 21) - 1;
  std::uint64_t key = 0;
  for (int k = 0; k < 3; ++k) {
    const auto c = static_cast<std::int64_t>(std::floor(p[k] / v)) + kOffset;
    key = (key << 21) | (static_cast<std::uint64_t>(c) & kMask);
  }
  return key;
}

}  // namespace

void TriggerPolicy::validate() const {
  if (!(time_threshold > 0.0)) throw BadConfig("trigger time threshold must be positive");
}

std::string to_string(TriggerReason r) {
  return r == TriggerReason::SectionExit ? "section_exit" : "timeout";
}

std::optional<TriggerReason> should_trigger(std::span<const Observation> pending,
                                            const TriggerPolicy& policy, double now,
                                            std::span<const int> uav_slices,
                                            const SliceModel& slices) {
  if (pending.empty()) return std::nullopt;
  for (std::size_t id = 0; id < uav_slices.size(); ++id) {
    const Observation* last = nullptr;
    for (const Observation& o : pending) {
      if (o.uav_id == static_cast<int>(id)) last = &o;
    }
    if (last == nullptr) continue;
    if (slices.region_of_slice(uav_slices[id]) != slices.region_of_slice(last->slice_index)) {
      return TriggerReason::SectionExit;
    }
  }
  if (pending.size() >= policy.min_timeout_batch &&
      now - pending.back().timestamp > policy.time_threshold) {
    return TriggerReason::Timeout;
  }
  return std::nullopt;
}

InstantCloud merge_batch(const InstantCloud& ic, std::span<const Observation> batch,
                         double voxel_size) {
  if (!(voxel_size > 0.0)) throw BadConfig("voxel size must be positive");
  InstantCloud out = ic;
  if (out.voxel_size != voxel_size) {
    // Re-thin under the new resolution.
    InstantCloud rebuilt;
    rebuilt.voxel_size = voxel_size;
    rebuilt.contributing_obs = ic.contributing_obs;
    rebuilt.last_update = ic.last_update;
    for (std::size_t i = 0; i < ic.cloud.size(); ++i) {
      if (rebuilt.occupied.insert(voxel_key(ic.cloud.points[i], voxel_size)).second) {
        rebuilt.cloud.push_back(ic.cloud.points[i],
                                ic.cloud.has_normals() ? ic.cloud.normals[i] : Vec3::UnitZ(),
                                ic.cloud.has_features() ? ic.cloud.feature_strength[i] : 0.0);
        rebuilt.point_source.push_back(ic.point_source[i]);
      }
    }
    out = std::move(rebuilt);
  }
  for (const Observation& obs : batch) {
    out.contributing_obs.push_back(obs.obs_id);
    out.last_update = std::max(out.last_update, obs.timestamp);
    const PointCloud& pts = obs.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!out.occupied.insert(voxel_key(pts.points[i], voxel_size)).second) continue;
      out.cloud.push_back(pts.points[i], pts.has_normals() ? pts.normals[i] : Vec3::UnitZ(),
                          pts.has_features() ? pts.feature_strength[i] : 0.0);
      out.point_source.push_back(obs.obs_id);
    }
  }
  return out;
}

PointCloud filter_background(const PointCloud& cloud, const Vec3& center, double r_max) {
  if (!(r_max > 0.0)) throw BadConfig("background radius must be positive");
  std::vector<std::size_t> keep;
  const double r2 = r_max * r_max;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if ((cloud.points[i] - center).squaredNorm() <= r2) keep.push_back(i);
  }
  return cloud.subset(keep);
}

std::vector<std::vector<std::size_t>> cluster_euclidean(const PointCloud& cloud, double d,
                                                        std::size_t min_size) {
  if (!(d > 0.0)) throw BadConfig("cluster distance must be positive");
  std::vector<std::vector<std::size_t>> clusters;
  if (cloud.empty()) return clusters;
  const PointGrid grid(cloud.points, d);
  std::vector<char> seen(cloud.size(), 0);
  std::vector<std::size_t> queue;
  for (std::size_t seed = 0; seed < cloud.size(); ++seed) {
    if (seen[seed]) continue;
    seen[seed] = 1;
    queue.assign(1, seed);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      grid.for_each_within(cloud.points[queue[head]], d, [&](std::size_t j, double) {
        if (!seen[j]) {
          seen[j] = 1;
          queue.push_back(j);
        }
      });
    }
    if (queue.size() >= min_size) {
      std::sort(queue.begin(), queue.end());
      clusters.push_back(queue);
    }
  }
  return clusters;
}

double median_nn_spacing(const PointCloud& cloud) {
  if (cloud.size() < 2) throw EmptyInput("spacing needs at least two points");
  const PointGrid grid(cloud.points);
  std::vector<double> nn(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    nn[i] = grid.nearest_excluding(cloud.points[i], i)->distance;
  }
  const auto mid = nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2);
  std::nth_element(nn.begin(), mid, nn.end());
  return *mid;
}

double ClusterParams::resolve(const PointCloud& cloud) const {
  if (distance > 0.0) return distance;
  if (cloud.size() < 2) return 1.0;
  const double spacing = median_nn_spacing(cloud);
  return spacing > 0.0 ? spacing_factor * spacing : 1e-6;
}

std::size_t SliceCoverageReport::uncovered_count() const {
  return static_cast<std::size_t>(
      std::count_if(slices.begin(), slices.end(), [](const SliceScore& s) { return !s.covered; }));
}

std::size_t SliceCoverageReport::min_score() const {
  std::size_t m = slices.empty() ? 0 : slices.front().score;
  for (const SliceScore& s : slices) m = std::min(m, s.score);
  return m;
}

std::vector<std::size_t> SliceCoverageReport::scores() const {
  std::vector<std::size_t> out;
  for (const SliceScore& s : slices) out.push_back(s.score);
  return out;
}

SliceCoverageReport coverage_report(const PointCloud& filtered, const SliceModel& model,
                                    const ClusterParams& params, double threshold) {
  model.validate();
  const auto k_slices = static_cast<std::size_t>(model.slice_count);
  SliceCoverageReport report;
  report.threshold = threshold;
  report.slices.assign(k_slices, SliceScore{});
  if (filtered.empty()) return report;

  const double d = params.resolve(filtered);
  const auto clusters = cluster_euclidean(filtered, d, params.min_size);
  const double w = model.slice_width();

  for (std::size_t c = 0; c < clusters.size(); ++c) {
    std::vector<std::size_t> in_arc(k_slices, 0);
    std::vector<char> in_widened(k_slices, 0);
    for (std::size_t i : clusters[c]) {
      const double a = azimuth_about(filtered.points[i], model.center);
      const int s = slice_of_azimuth(a, model);
      ++in_arc[static_cast<std::size_t>(s)];
      // The widened arc of slice k reaches half a slice past each edge.
      for (int off : {-1, 0, 1}) {
        const int k = (s + off + model.slice_count) % model.slice_count;
        if (std::abs(angle_difference(a, model.slice_center_azimuth(k))) < w) {
          in_widened[static_cast<std::size_t>(k)] = 1;
        }
      }
    }
    for (std::size_t k = 0; k < k_slices; ++k) {
      if (!in_widened[k]) continue;
      SliceScore& slot = report.slices[k];
      if (!slot.cluster_id || in_arc[k] > slot.score) {
        slot.score = in_arc[k];
        slot.cluster_id = c;
      }
    }
  }
  return with_threshold(std::move(report), threshold);
}

SliceCoverageReport with_threshold(SliceCoverageReport report, double threshold) {
  report.threshold = threshold;
  for (SliceScore& s : report.slices) s.covered = static_cast<double>(s.score) > threshold;
  return report;
}

double calibrate_threshold(const SliceCoverageReport& report, double factor) {
  std::vector<std::size_t> s = report.scores();
  if (s.empty()) return 0.0;
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  const double median = n % 2 == 1 ? static_cast<double>(s[n / 2])
                                   : 0.5 * static_cast<double>(s[n / 2 - 1] + s[n / 2]);
  return factor * median;
}

}  // namespace scanplan
