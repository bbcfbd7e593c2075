#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "scanplan/align.hpp"
#include "scanplan/capture.hpp"
#include "scanplan/imaging.hpp"
#include "scanplan/reconstruct.hpp"
#include "scanplan/uav.hpp"

namespace scanplan {

enum class ObjectKind { EngravedBox, TallObject };
enum class MissionMode { Baseline, LocationAware, DynamicPath, Integrated };
enum class CameraMode { Bw, Rgb };
enum class ThresholdMode { Calibrated, Fixed };

std::string to_string(ObjectKind k);
std::string to_string(MissionMode m);
std::string to_string(CameraMode c);
MissionMode parse_mission_mode(const std::string& s);

bool uses_dynamic_path(MissionMode m);
bool uses_fused_poses(MissionMode m);

struct MissionConfig {
  // [mission]
  ObjectKind object = ObjectKind::EngravedBox;
  int uav_count = 1;
  MissionMode mode = MissionMode::Baseline;
  CameraMode camera_mode = CameraMode::Bw;
  std::uint64_t seed = 1;
  std::size_t image_budget = 0;  // 0: size of the static plan
  bool adapt_from_start = false;

  // [object]
  Vec3 box_dims{0.547, 0.203, 0.209};
  double engraving_depth = 0.04;
  double tall_height = 0.9;
  double tall_radius = 0.08;
  double tall_feature = 0.15;
  double object_height = 1.0;  // centroid height above the floor
  double object_yaw_deg = 0.0;
  std::size_t surface_samples = 12000;

  // [flight]
  double radius = 0.5;
  double speed = 0.15;
  double dt = 0.1;
  double yaw_rate_deg = 90.0;
  double arrival_tolerance = 0.05;
  double altitude_offset = 0.10;
  int waypoints_per_circle = 16;
  int circles = 2;
  int captures_per_waypoint = 7;
  double capture_interval = 0.5;
  double initial_drift = 0.05;
  double start_azimuth_deg = 0.0;

  // [camera]
  double fov_deg = 80.0;
  double max_range = 3.0;
  int resolution = 320;
  double noise_sigma = 0.004;
  std::size_t point_budget = 400;

  UwbNoiseModel uwb;          // [uwb]
  SfmFailureModel sfm;        // [sfm]; scene_diagonal is set from the object
  TriggerPolicy trigger;      // [trigger]

  // [coverage]
  int slice_count = 8;
  int region_count = 4;
  ThresholdMode threshold_mode = ThresholdMode::Calibrated;
  double threshold = 0.0;
  double calibration_factor = 0.6;
  double cluster_spacing_factor = 2.5;
  std::size_t cluster_min_size = 10;
  double r_max_factor = 1.5;
  double voxel_divisor = 200.0;

  // [planner]
  int max_visits_per_slice = 4;

  // [fusion]
  FusionMode fusion_mode = FusionMode::Substitute;

  // [evaluation]
  int ring_count = 16;
  double ring_radius = 1.0;
  double ring_fov_deg = 60.0;
  int ring_resolution = 320;
  int splat_px = 2;
  std::size_t wd_points = 256;
  std::size_t reference_samples = 20000;

  // [output]
  bool write_observations = true;
  bool write_snapshots = true;
  bool write_views = false;

  void validate() const;
};

// Parses key = value lines grouped under [section] headers. Unknown
// sections or keys, and malformed values, throw BadConfig.
MissionConfig parse_config(const std::string& text);
MissionConfig load_config(const std::filesystem::path& path);

// Applies SCANPLAN_<SECTION>_<KEY> environment variables (upper case).
void apply_env_overrides(MissionConfig& cfg, const std::string& prefix = "SCANPLAN_");

// Sets one "section.key" entry from text.
void set_config_value(MissionConfig& cfg, const std::string& dotted_key,
                      const std::string& value);

// Full config, every key, in the same format parse_config reads.
std::string format_config(const MissionConfig& cfg);

// Every "section.key" name, in output order.
std::vector<std::string> config_keys();

}  // namespace scanplan
