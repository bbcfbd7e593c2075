#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scanplan/geometry.hpp"
#include "scanplan/imaging.hpp"

namespace scanplan {

// Peak signal-to-noise ratio in dB, capped at 99 (identical images).
double psnr(const Image& a, const Image& b, double data_range = 1.0);

struct SsimResult {
  double mean = 0.0;
  double std = 0.0;  // across windows
};

// SSIM over all 7x7 uniform windows (stride 1) with C1 = (0.01 L)^2 and
// C2 = (0.03 L)^2.
SsimResult ssim(const Image& a, const Image& b, double data_range = 1.0);

// Symmetric Hausdorff distance, exact.
double hausdorff(const PointCloud& a, const PointCloud& b);

// Mean matched distance of an optimal bijection between uniform subsamples
// of m points from each cloud (m is reduced to the smaller cloud size).
double wasserstein(const PointCloud& a, const PointCloud& b, std::size_t m,
                   std::uint64_t seed);

struct RunSummary {
  std::string approach;
  double psnr_db = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;  // across the views of the camera ring
  std::string lpips = "n/a";
  double hd_m = 0.0;
  double wd_m = 0.0;
  double latency_mean_s = 0.0;
  double latency_std_s = 0.0;
  std::size_t images_taken = 0;
  std::size_t images_used = 0;
};

struct SummaryInputs {
  std::string approach;
  PointCloud reference;       // ground-truth surface samples
  PointCloud reconstruction;  // already aligned to the reference frame
  std::vector<double> merge_latencies;
  std::size_t images_taken = 0;
  std::size_t images_used = 0;
  std::vector<Camera> ring;
  RenderMode render_mode = RenderMode::Intensity;
  int splat_px = 2;
  std::size_t wd_points = 256;
  std::uint64_t seed = 0;
};

// Renders both clouds from every ring camera and averages the image
// metrics; geometry metrics compare the clouds directly. Throws
// IncompleteRun for an empty reconstruction.
RunSummary summarize_run(const SummaryInputs& inputs);

std::string summary_csv_header();
std::string summary_csv_row(const RunSummary& s);

}  // namespace scanplan
