#pragma once

#include <optional>
#include <span>
#include <vector>

#include "scanplan/capture.hpp"
#include "scanplan/geometry.hpp"

namespace scanplan {

// Ratio of the target's bounding-box diagonal to the source's.
double scale_from_aabb(const PointCloud& source, const PointCloud& target);

// Symmetric chamfer distance: mean of the two directed mean NN distances.
double chamfer_distance(const PointCloud& a, const PointCloud& b);

// Rotation taking the source principal frame onto the target's. Proper
// sign assignments are scored by chamfer distance after scaling (bounding
// boxes measured in the principal frames), rotation and centroid alignment; when two variances of a cloud are within 20% of each
// other the corresponding axis swaps are scored as well.
Mat3 orient_pca(const PointCloud& source, const PointCloud& target);

struct IcpParams {
  int max_iterations = 50;
  double min_improvement = 1e-6;
  double rejection_factor = 3.0;  // times the median pair distance
  // Absolute cap on pair distance; <= 0 disables it.
  double max_pair_distance = 0.0;
  bool with_scale = true;
  // Source points used per iteration (evenly strided); 0 means all.
  std::size_t max_source_points = 4000;
};

struct IcpResult {
  SimilarityTransform transform;
  double rmse = 0.0;  // over the inlier pairs of the final iterate
  // Truncated RMS of all source points (distances capped at the initial
  // rejection cutoff), one entry per accepted iterate; non-increasing.
  std::vector<double> rmse_history;
  int iterations = 0;
};

// Point-to-point ICP with closed-form similarity updates fitted on the pairs
// that survive rejection. A step that would raise the truncated RMS is
// rejected and ends the loop. Throws NoCorrespondences when rejection leaves
// fewer than three pairs.
IcpResult icp_refine(const PointCloud& source, const PointCloud& target,
                     const SimilarityTransform& init, const IcpParams& params = {});

// Least-squares similarity (or rigid, with_scale = false) mapping sources
// onto targets. Throws DegenerateGeometry for fewer than 3 pairs or
// collinear sources.
SimilarityTransform umeyama_fit(std::span<const Vec3> source, std::span<const Vec3> target,
                                bool with_scale = true);

struct AlignmentResult {
  SimilarityTransform transform;  // maps source into the target frame
  double icp_rmse = 0.0;
  std::vector<double> rmse_history;
};

// Bounding-box scale (percentile boxes in each cloud's principal frame), PCA
// orientation and centroid translation as the initial guess, then ICP.
AlignmentResult align_clouds(const PointCloud& source, const PointCloud& target,
                             const IcpParams& params = {});

enum class PoseSource { Sfm, UwbSubstituted };
enum class FusionMode { Substitute, Average };

struct FusedPose {
  int obs_id = 0;
  Pose pose;           // SfM gauge frame
  double scale = 1.0;  // gauge units per metre for this pose's structure
  PoseSource source = PoseSource::Sfm;
};

struct FusionResult {
  SimilarityTransform uwb_to_sfm;
  std::vector<FusedPose> poses;  // one per input observation, same order
};

// Fits the UWB -> SfM similarity on observations that have both positions
// and gives every observation a pose: SfM when registered (or the mean of
// SfM and mapped UWB positions in Average mode), otherwise the mapped UWB
// position with the logged yaw. Throws InsufficientAnchors below three
// registered observations.
FusionResult fuse_camera_poses(std::span<const Observation> observations,
                               FusionMode mode = FusionMode::Substitute);

}  // namespace scanplan
