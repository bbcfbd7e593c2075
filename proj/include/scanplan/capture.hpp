#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "scanplan/geometry.hpp"
#include "scanplan/random.hpp"
#include "scanplan/scene.hpp"
#include "scanplan/slices.hpp"
#include "scanplan/uav.hpp"

namespace scanplan {

// Ground truth the simulated camera looks at: the object, its occlusion
// grid and a dense reference sampling of its surface.
struct ScanTarget {
  SceneObject object;
  OcclusionGrid grid;
  PointCloud surface;
  Vec3 center;

  ScanTarget(SceneObject obj, std::size_t samples, std::uint64_t seed);
};

// One image capture plus its metadata.
struct Observation {
  int obs_id = 0;
  int uav_id = 0;
  double timestamp = 0.0;
  Pose true_pose;
  Vec3 uwb_position = Vec3::Zero();
  double logged_yaw = 0.0;          // commanded yaw from the flight log
  std::optional<Pose> sfm_pose;     // gauge frame
  double sfm_scale = 1.0;           // gauge units per metre when registered
  PointCloud points;                // noisy surface points, world frame
  int slice_index = 0;
  double feature_score = 0.0;
};

// The arbitrary similarity between the SfM reconstruction frame and the
// world frame. Drawn once per mission.
struct GaugeTransform {
  SimilarityTransform hidden;

  // scale ~ U[0.5, 2], uniform rotation, translation ~ U[-1, 1]^3 m.
  static GaugeTransform draw(Rng& rng);
  void validate() const;
};

struct SfmFailureModel {
  double p_base = 0.005;
  double f_ref = 0.3;
  double rotation_noise_deg = 0.5;
  // RMS of the 3D position error as a fraction of the scene diagonal.
  double position_noise_fraction = 0.005;
  double scene_diagonal = 1.0;

  double success_probability(double feature_score) const;
  double position_noise() const { return position_noise_fraction * scene_diagonal; }
  void validate() const;
};

struct CaptureSettings {
  double noise_sigma = 0.004;  // m, isotropic
  std::size_t point_budget = 400;
};

// Renders what the camera mounted at the UAV pose sees as a noisy point set.
// obs_id and timestamp are left for the caller.
Observation capture_observation(const ScanTarget& target, const UavState& state,
                                const Camera& intrinsics, const CaptureSettings& settings,
                                const SliceModel& slices, Rng& rng);

// Registration surrogate: succeeds with probability
// clamp(feature_score / f_ref, 0, 1) * (1 - p_base); on success the true pose,
// perturbed, is mapped into the gauge frame. Consumes the same number of
// draws either way so downstream streams do not depend on the outcome.
Observation sfm_register(const Observation& obs, const GaugeTransform& gauge,
                         const SfmFailureModel& model, Rng& rng);

// Two capture poses around the UAV's current position, `drift` apart along
// the tangent, both facing `center`.
std::array<Waypoint, 2> initial_pair(const UavState& state, const Vec3& center,
                                     double drift);

}  // namespace scanplan
