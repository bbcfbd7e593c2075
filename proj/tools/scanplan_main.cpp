#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scanplan/config.hpp"
#include "scanplan/error.hpp"
#include "scanplan/experiment.hpp"
#include "scanplan/metrics.hpp"
#include "scanplan/mission.hpp"
#include "scanplan/ply.hpp"

namespace {

constexpr int kExitBadConfig = 2;
constexpr int kExitFailure = 3;

int simulate(const std::string& config_path, const std::string& out_dir,
             const std::vector<std::string>& sets) {
  const std::string text = scanplan::read_text_file(config_path);
  scanplan::MissionConfig cfg = scanplan::parse_config(text);
  scanplan::apply_env_overrides(cfg);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw scanplan::BadConfig("--set expects key=value, got " + kv);
    scanplan::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  const auto res = scanplan::run_mission(cfg, out_dir, text);
  std::printf("%s: %zu images taken, %zu used, %zu of %d slices uncovered, %.1f s mission\n",
              scanplan::to_string(cfg.mode).c_str(), res.images_taken, res.images_used,
              res.final_report.uncovered_count(), cfg.slice_count, res.mission_time);
  return 0;
}

int evaluate(const std::string& dir) {
  const scanplan::RunSummary s = scanplan::evaluate_run(dir);
  std::cout << scanplan::summary_csv_header() << '\n' << scanplan::summary_csv_row(s) << '\n';
  return 0;
}

int matrix(const std::string& spec_path, const std::string& out_dir, int jobs) {
  const auto spec = scanplan::load_matrix_spec(spec_path);
  const auto rows = scanplan::run_matrix(spec, out_dir, jobs);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.summary) {
      ++failed;
      std::cerr << r.cell << " seed " << r.seed << ": " << r.error << '\n';
    }
  }
  std::cout << scanplan::format_report(out_dir);
  std::printf("%zu runs, %zu failed\n", rows.size(), failed);
  return failed == 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV scanning mission simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, spec_path;
  std::vector<std::string> sets;
  int jobs = 1;

  auto* sim = app.add_subcommand("simulate", "Run one mission and write its artifacts");
  sim->add_option("config", config_path, "Mission config file")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--out", out_dir, "Output directory")->required();
  sim->add_option("--set", sets, "Override a config key (section.key=value)");

  auto* eval = app.add_subcommand("evaluate", "Evaluate a finished run directory");
  eval->add_option("dir", run_dir, "Run directory")->required();

  auto* mat = app.add_subcommand("matrix", "Run an experiment matrix");
  mat->add_option("spec", spec_path, "Matrix spec file")->required()->check(CLI::ExistingFile);
  mat->add_option("-o,--out", out_dir, "Output directory")->required();
  mat->add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  auto* rep = app.add_subcommand("report", "Print the aggregate table of a matrix run");
  rep->add_option("dir", run_dir, "Matrix output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  try {
    if (*sim) return simulate(config_path, out_dir, sets);
    if (*eval) return evaluate(run_dir);
    if (*mat) return matrix(spec_path, out_dir, jobs);
    if (*rep) {
      std::cout << scanplan::format_report(run_dir);
      return 0;
    }
  } catch (const scanplan::BadConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
