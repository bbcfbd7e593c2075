#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "scanplan/capture.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/slices.hpp"

namespace scanplan {

// Incrementally merged near-real-time cloud, voxel-thinned on insertion.
struct InstantCloud {
  PointCloud cloud;
  std::vector<int> point_source;      // obs_id per point
  std::vector<int> contributing_obs;  // in merge order
  double last_update = 0.0;
  double voxel_size = 0.0;
  std::unordered_set<std::uint64_t> occupied;
};

struct TriggerPolicy {
  double time_threshold = 3.0;  // s
  std::size_t min_timeout_batch = 2;

  void validate() const;
};

enum class TriggerReason { SectionExit, Timeout };
std::string to_string(TriggerReason r);

// `pending` is ordered by timestamp; `uav_slices[id]` is UAV id's current
// slice. SectionExit fires when a UAV's current region differs from the
// region of its latest pending image. Timeout fires when the newest pending
// image is older than the threshold and at least two images are pending.
std::optional<TriggerReason> should_trigger(std::span<const Observation> pending,
                                            const TriggerPolicy& policy, double now,
                                            std::span<const int> uav_slices,
                                            const SliceModel& slices);

// Appends the batch's points (batch order) and keeps the first point that
// lands in each voxel of edge `voxel_size`.
InstantCloud merge_batch(const InstantCloud& ic, std::span<const Observation> batch,
                         double voxel_size);

// Points within the closed ball |p - center| <= r_max, order preserved.
PointCloud filter_background(const PointCloud& cloud, const Vec3& center, double r_max);

// Single-linkage components under |p - q| <= d; components smaller than
// min_size are dropped. Clusters are ordered by their smallest index and
// each lists indices ascending.
std::vector<std::vector<std::size_t>> cluster_euclidean(const PointCloud& cloud, double d,
                                                        std::size_t min_size);

// Median distance from each point to its nearest other point.
double median_nn_spacing(const PointCloud& cloud);

struct ClusterParams {
  double distance = 0.0;  // <= 0: spacing_factor * median NN spacing
  double spacing_factor = 2.5;
  std::size_t min_size = 10;

  double resolve(const PointCloud& cloud) const;
};

struct SliceScore {
  std::size_t score = 0;
  bool covered = false;
  std::optional<std::size_t> cluster_id;
};

struct SliceCoverageReport {
  std::vector<SliceScore> slices;
  double threshold = 0.0;

  std::size_t uncovered_count() const;
  std::size_t min_score() const;
  std::vector<std::size_t> scores() const;
};

// Per slice, candidate clusters are those with points inside the slice arc
// widened by half a slice on each side; the score is the largest number of
// points any candidate has inside the un-widened arc. covered <=> score > tau.
SliceCoverageReport coverage_report(const PointCloud& filtered, const SliceModel& model,
                                    const ClusterParams& params, double threshold);

// Same report with the threshold replaced (covered flags recomputed).
SliceCoverageReport with_threshold(SliceCoverageReport report, double threshold);

// factor * median slice score.
double calibrate_threshold(const SliceCoverageReport& report, double factor = 0.6);

}  // namespace scanplan
