#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scanplan/align.hpp"
#include "scanplan/capture.hpp"
#include "scanplan/config.hpp"
#include "scanplan/metrics.hpp"
#include "scanplan/reconstruct.hpp"

namespace scanplan {

// Object placed in the world: centroid at (0, 0, object_height), rotated
// about z by object_yaw_deg.
SceneObject build_scene(const MissionConfig& cfg);

struct CoverageEvent {
  int trigger_id = 0;
  double t = 0.0;
  std::string reason;  // section_exit, timeout or mission_end
  std::size_t batch_size = 0;
  std::vector<std::size_t> scores;
  double threshold = 0.0;
  std::size_t uncovered = 0;
  double latency_s = 0.0;  // wall clock of merge + coverage report
};

struct PlannerDecision {
  double t = 0.0;
  int uav_id = 0;
  int slice = -1;
  std::string reason;
  std::vector<Waypoint> route;  // waypoints handed to the UAV, capture stop last
};

struct MissionResult {
  MissionConfig config;
  std::vector<Observation> observations;
  SimilarityTransform gauge;
  std::optional<SimilarityTransform> uwb_to_sfm;
  PointCloud final_cloud;  // SfM gauge frame
  std::size_t images_taken = 0;
  std::size_t images_used = 0;
  std::vector<CoverageEvent> coverage_events;
  std::vector<PlannerDecision> decisions;
  SliceCoverageReport final_report;
  double threshold = 0.0;
  double mission_time = 0.0;

  std::vector<double> merge_latencies() const;
};

// Runs the whole mission: initial pair, capture / trigger / merge / plan
// loop, landing and final cloud assembly. When out_dir is non-empty every
// artifact is written there; `config_text` is stored verbatim as the config
// snapshot (the resolved config is always written too).
MissionResult run_mission(const MissionConfig& cfg,
                          const std::filesystem::path& out_dir = {},
                          const std::string& config_text = {});

struct EvaluationResult {
  RunSummary summary;
  AlignmentResult alignment;
  PointCloud reference;
  PointCloud aligned;
};

// Aligns `reconstruction` to the ground-truth reference, renders the ring
// and computes every metric.
EvaluationResult evaluate_reconstruction(const MissionConfig& cfg,
                                         const PointCloud& reconstruction,
                                         const std::vector<double>& merge_latencies,
                                         std::size_t images_taken, std::size_t images_used);

EvaluationResult evaluate_mission(const MissionResult& result);

// Reads a run directory written by run_mission, evaluates it and writes
// aligned/reference clouds, summary.csv and (optionally) PGM views.
// Throws IncompleteRun when the final cloud is missing.
RunSummary evaluate_run(const std::filesystem::path& run_dir);

}  // namespace scanplan
