#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scanplan/config.hpp"
#include "scanplan/metrics.hpp"

namespace scanplan {

// A batch of missions: the cartesian product of the listed axes, each run
// for every seed. Example:
//
//   [matrix]
//   base = default.ini          ; optional, relative to the spec file
//   modes = baseline, dynamic_path
//   uav_counts = 1, 2
//   objects = engraved_box
//   camera_modes = bw
//   seeds = 1-20
//
//   [override]
//   sfm.p_base = 0.1
struct MatrixSpec {
  MissionConfig base;
  std::vector<MissionMode> modes;
  std::vector<int> uav_counts;
  std::vector<ObjectKind> objects;
  std::vector<CameraMode> camera_modes;
  std::vector<std::uint64_t> seeds;

  std::vector<MissionConfig> cells() const;  // one per (axes, seed)
};

// Throws BadConfig for malformed or empty specs.
MatrixSpec parse_matrix_spec(const std::string& text,
                             const std::filesystem::path& base_dir = {});
MatrixSpec load_matrix_spec(const std::filesystem::path& path);

struct MatrixRow {
  std::string cell;  // object/mode/uav count/camera mode
  std::uint64_t seed = 0;
  std::optional<RunSummary> summary;  // empty if the run failed
  std::string error;
};

std::string cell_name(const MissionConfig& cfg);

// Runs every cell (simulate + evaluate) into out_dir/<cell>/seed_<n>, up to
// `jobs` at a time. Failures are recorded per row and do not stop the
// batch. Writes out_dir/matrix.csv and out_dir/aggregate.csv.
std::vector<MatrixRow> run_matrix(const MatrixSpec& spec, const std::filesystem::path& out_dir,
                                  int jobs = 1);

// Per-cell mean and standard deviation of every metric, in the run summary
// column layout, as CSV.
std::string aggregate_csv(const std::vector<MatrixRow>& rows);

// Reads out_dir/matrix.csv back and renders the aggregate as a text table.
std::string format_report(const std::filesystem::path& out_dir);

}  // namespace scanplan
