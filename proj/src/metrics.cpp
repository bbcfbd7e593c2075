#include "scanplan/metrics.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <cmath>
#include <numeric>

#include "scanplan/assignment.hpp"
#include "scanplan/error.hpp"
#include "scanplan/ply.hpp"
#include "scanplan/random.hpp"
#include "scanplan/spatial_grid.hpp"

namespace scanplan {
namespace {

void check_same_size(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw DimensionMismatch("images differ in size");
  }
  if (a.pixels.empty()) throw EmptyInput("empty image");
}

double directed_hausdorff(const PointCloud& from, const PointGrid& to) {
  double worst = 0.0;
  for (const Vec3& p : from.points) worst = std::max(worst, to.nearest(p)->distance);
  return worst;
}

std::vector<Vec3> subsample(const PointCloud& c, std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = make_stream(seed, 0x57d);
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<Vec3> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(c.points[idx[i]]);
  return out;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

double psnr(const Image& a, const Image& b, double data_range) {
  check_same_size(a, b);
  double sq = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = a.pixels[i] - b.pixels[i];
    sq += d * d;
  }
  const double mse = sq / static_cast<double>(a.pixels.size());
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(data_range * data_range / mse));
}

SsimResult ssim(const Image& a, const Image& b, double data_range) {
  check_same_size(a, b);
  constexpr int kWin = 7;
  if (a.width < kWin || a.height < kWin) throw DimensionMismatch("image smaller than SSIM window");
  const double c1 = std::pow(0.01 * data_range, 2);
  const double c2 = std::pow(0.03 * data_range, 2);
  const int w = a.width, h = a.height;
  // Summed-area tables of a, b, a^2, b^2 and ab.
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  std::array<std::vector<double>, 5> sat;
  for (auto& t : sat) t.assign(stride * (static_cast<std::size_t>(h) + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double va = a.at(x, y), vb = b.at(x, y);
      const std::array<double, 5> v{va, vb, va * va, vb * vb, va * vb};
      const std::size_t k = (y + 1) * stride + (x + 1);
      for (int c = 0; c < 5; ++c) {
        sat[c][k] = v[c] + sat[c][k - 1] + sat[c][k - stride] - sat[c][k - stride - 1];
      }
    }
  }
  const double n = kWin * kWin;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>((w - kWin + 1) * (h - kWin + 1)));
  for (int y = 0; y + kWin <= h; ++y) {
    for (int x = 0; x + kWin <= w; ++x) {
      std::array<double, 5> s{};
      const std::size_t k00 = y * stride + x, k11 = (y + kWin) * stride + (x + kWin);
      const std::size_t k01 = y * stride + (x + kWin), k10 = (y + kWin) * stride + x;
      for (int c = 0; c < 5; ++c) s[c] = (sat[c][k11] - sat[c][k01] - sat[c][k10] + sat[c][k00]) / n;
      const double var_a = s[2] - s[0] * s[0];
      const double var_b = s[3] - s[1] * s[1];
      const double cov = s[4] - s[0] * s[1];
      values.push_back((2.0 * s[0] * s[1] + c1) * (2.0 * cov + c2) /
                       ((s[0] * s[0] + s[1] * s[1] + c1) * (var_a + var_b + c2)));
    }
  }
  const auto [mean, sd] = mean_std(values);
  return {mean, sd};
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw EmptyInput("hausdorff needs two non-empty clouds");
  const PointGrid ga(a.points), gb(b.points);
  return std::max(directed_hausdorff(a, gb), directed_hausdorff(b, ga));
}

double wasserstein(const PointCloud& a, const PointCloud& b, std::size_t m,
                   std::uint64_t seed) {
  if (a.empty() || b.empty()) throw EmptyInput("wasserstein needs two non-empty clouds");
  if (m == 0) throw BadConfig("wasserstein subsample size must be positive");
  m = std::min({m, a.size(), b.size()});
  const std::vector<Vec3> pa = subsample(a, m, seed);
  const std::vector<Vec3> pb = subsample(b, m, seed);
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cost(i, j) = (pa[static_cast<std::size_t>(i)] - pb[static_cast<std::size_t>(j)]).norm();
    }
  }
  const std::vector<int> match = solve_assignment(cost);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += cost(i, match[static_cast<std::size_t>(i)]);
  return total / static_cast<double>(m);
}

RunSummary summarize_run(const SummaryInputs& in) {
  if (in.reconstruction.empty()) throw IncompleteRun("reconstruction is empty");
  if (in.reference.empty()) throw EmptyInput("reference cloud is empty");
  if (in.ring.empty()) throw BadConfig("camera ring is empty");
  RunSummary s;
  s.approach = in.approach;
  std::vector<double> psnrs, ssims;
  for (const Camera& cam : in.ring) {
    const Image ref = render_view(in.reference, cam, in.render_mode, in.splat_px);
    const Image rec = render_view(in.reconstruction, cam, in.render_mode, in.splat_px);
    psnrs.push_back(psnr(ref, rec));
    ssims.push_back(ssim(ref, rec).mean);
  }
  s.psnr_db = mean_std(psnrs).first;
  std::tie(s.ssim_mean, s.ssim_std) = mean_std(ssims);
  s.hd_m = hausdorff(in.reconstruction, in.reference);
  s.wd_m = wasserstein(in.reconstruction, in.reference, in.wd_points, in.seed);
  std::tie(s.latency_mean_s, s.latency_std_s) = mean_std(in.merge_latencies);
  s.images_taken = in.images_taken;
  s.images_used = in.images_used;
  return s;
}

std::string summary_csv_header() {
  return "approach,psnr_db,ssim_mean,ssim_std,lpips,hd_m,wd_m,latency_mean_s,latency_std_s,"
         "images_taken,images_used";
}

std::string summary_csv_row(const RunSummary& s) {
  std::string row = s.approach;
  for (double v : {s.psnr_db, s.ssim_mean, s.ssim_std}) row += "," + format_real(v);
  row += "," + s.lpips;
  for (double v : {s.hd_m, s.wd_m, s.latency_mean_s, s.latency_std_s}) row += "," + format_real(v);
  row += "," + std::to_string(s.images_taken) + "," + std::to_string(s.images_used);
  return row;
}

}  // namespace scanplan
