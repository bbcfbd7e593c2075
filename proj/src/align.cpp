#include "scanplan/align.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "scanplan/error.hpp"
#include "scanplan/spatial_grid.hpp"

namespace scanplan {
namespace {

std::vector<Vec3> strided(std::span<const Vec3> pts, std::size_t cap) {
  if (cap == 0 || pts.size() <= cap) return {pts.begin(), pts.end()};
  std::vector<Vec3> out;
  out.reserve(cap);
  const double step = static_cast<double>(pts.size()) / static_cast<double>(cap);
  for (std::size_t i = 0; i < cap; ++i) {
    out.push_back(pts[static_cast<std::size_t>(static_cast<double>(i) * step)]);
  }
  return out;
}

double mean_nn(std::span<const Vec3> from, const PointGrid& to) {
  double sum = 0.0;
  for (const Vec3& p : from) sum += to.nearest(p)->distance;
  return sum / static_cast<double>(from.size());
}

double chamfer(std::span<const Vec3> a, const PointGrid& grid_a, std::span<const Vec3> b,
               const PointGrid& grid_b) {
  return 0.5 * (mean_nn(a, grid_b) + mean_nn(b, grid_a));
}

// Groups of consecutive principal axes whose variances are too close to be
// told apart reliably.
std::array<int, 3> degenerate_groups(const Vec3& a, const Vec3& b) {
  std::array<int, 3> group{0, 1, 2};
  for (int i = 0; i < 2; ++i) {
    const auto close = [&](const Vec3& v) { return v[i] > 0.0 && v[i + 1] / v[i] > 0.8; };
    if (close(a) || close(b)) group[i + 1] = group[i];
  }
  return group;
}

// Box of a cloud in its own principal frame, with extents from the 1st to
// the 99th percentile per axis: rotation does not change it, and a handful
// of noisy points do not inflate it. The centre is returned in the cloud's
// frame; unlike the centroid it ignores how densely each side was sampled.
struct FrameBox {
  Vec3 center;
  double diagonal;
};

FrameBox frame_box(const PointCloud& c, const Mat3& axes) {
  std::array<std::vector<double>, 3> coords;
  for (auto& v : coords) v.reserve(c.size());
  for (const Vec3& p : c.points) {
    const Vec3 q = axes.transpose() * p;
    for (int k = 0; k < 3; ++k) coords[k].push_back(q[k]);
  }
  Vec3 lo, hi;
  for (int k = 0; k < 3; ++k) {
    auto& v = coords[k];
    const auto a = static_cast<std::ptrdiff_t>(0.01 * static_cast<double>(v.size() - 1));
    const auto b = static_cast<std::ptrdiff_t>(0.99 * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + a, v.end());
    lo[k] = v[static_cast<std::size_t>(a)];
    std::nth_element(v.begin(), v.begin() + b, v.end());
    hi[k] = v[static_cast<std::size_t>(b)];
  }
  const double diag = (hi - lo).norm();
  if (diag <= 1e-9) throw DegenerateGeometry("zero-extent cloud");
  return {axes * (0.5 * (lo + hi)), diag};
}

struct InitialGuess {
  double scale;
  Vec3 source_center;
  Vec3 target_center;
};

InitialGuess initial_guess(const PointCloud& source, const PrincipalAxes& ps,
                           const PointCloud& target, const PrincipalAxes& pt) {
  const FrameBox bs = frame_box(source, ps.axes);
  const FrameBox bt = frame_box(target, pt.axes);
  return {bt.diagonal / bs.diagonal, bs.center, bt.center};
}

Mat3 orient_with(const PointCloud& source, const PrincipalAxes& ps, const PointCloud& target,
                 const PrincipalAxes& pt, const InitialGuess& guess);

}  // namespace

double scale_from_aabb(const PointCloud& source, const PointCloud& target) {
  if (source.empty() || target.empty()) throw EmptyInput("scale_from_aabb needs two clouds");
  const double ds = aabb(source).diagonal();
  const double dt = aabb(target).diagonal();
  if (ds <= 0.0 || dt <= 0.0) throw DegenerateGeometry("zero-extent cloud");
  return dt / ds;
}

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw EmptyInput("chamfer_distance needs two clouds");
  const PointGrid ga(a.points), gb(b.points);
  return chamfer(a.points, ga, b.points, gb);
}

Mat3 orient_pca(const PointCloud& source, const PointCloud& target) {
  const PrincipalAxes ps = principal_axes(source);
  const PrincipalAxes pt = principal_axes(target);
  return orient_with(source, ps, target, pt, initial_guess(source, ps, target, pt));
}

namespace {

Mat3 orient_with(const PointCloud& source, const PrincipalAxes& ps, const PointCloud& target,
                 const PrincipalAxes& pt, const InitialGuess& guess) {
  const double s = guess.scale;
  const Vec3& cs = guess.source_center;
  const Vec3& ct = guess.target_center;

  constexpr std::size_t kSample = 1500;
  const std::vector<Vec3> tgt = strided(target.points, kSample);
  const PointGrid tgt_grid(tgt);
  const std::vector<Vec3> src = strided(source.points, kSample);

  const std::array<int, 3> group = degenerate_groups(ps.variances, pt.variances);
  std::array<int, 3> perm{0, 1, 2};
  Mat3 best = pt.axes * ps.axes.transpose();
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Vec3> moved(src.size());
  do {
    bool allowed = true;
    for (int i = 0; i < 3; ++i) allowed = allowed && group[perm[i]] == group[i];
    if (!allowed) continue;
    Mat3 p = Mat3::Zero();
    for (int i = 0; i < 3; ++i) p(i, perm[i]) = 1.0;
    for (int signs = 0; signs < 8; ++signs) {
      Mat3 d = p;
      for (int i = 0; i < 3; ++i) {
        if (signs & (1 << i)) d.row(i) *= -1.0;
      }
      if (d.determinant() < 0.0) continue;
      const Mat3 r = pt.axes * d * ps.axes.transpose();
      for (std::size_t i = 0; i < src.size(); ++i) moved[i] = s * (r * (src[i] - cs)) + ct;
      const PointGrid moved_grid(moved);
      const double cost = chamfer(moved, moved_grid, tgt, tgt_grid);
      // Strictly better only, so the plain axis match wins ties.
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = r;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

SimilarityTransform umeyama_fit(std::span<const Vec3> source, std::span<const Vec3> target,
                                bool with_scale) {
  if (source.size() != target.size()) throw DimensionMismatch("umeyama_fit: size mismatch");
  if (source.size() < 3) throw DegenerateGeometry("umeyama_fit needs at least 3 pairs");
  const auto n = static_cast<Eigen::Index>(source.size());
  Eigen::Matrix3Xd src(3, n), dst(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    src.col(i) = source[static_cast<std::size_t>(i)];
    dst.col(i) = target[static_cast<std::size_t>(i)];
  }
  const Vec3 mean = src.rowwise().mean();
  const Eigen::Matrix3Xd centered = src.colwise() - mean;
  const Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(centered);
  const Vec3 sv = svd.singularValues();
  if (sv[0] <= 0.0 || sv[1] <= 1e-9 * sv[0]) {
    throw DegenerateGeometry("umeyama_fit: source points are collinear");
  }
  const Eigen::Matrix4d m = Eigen::umeyama(src, dst, with_scale);
  SimilarityTransform t;
  const Mat3 sr = m.topLeftCorner<3, 3>();
  t.scale = with_scale ? std::cbrt(sr.determinant()) : 1.0;
  t.rotation = sr / t.scale;
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

IcpResult icp_refine(const PointCloud& source, const PointCloud& target,
                     const SimilarityTransform& init, const IcpParams& params) {
  if (source.empty() || target.empty()) throw EmptyInput("icp_refine needs two clouds");
  init.validate(1e-6);
  const std::vector<Vec3> src = strided(source.points, params.max_source_points);
  const PointGrid grid(target.points);

  struct State {
    SimilarityTransform t;
    std::vector<double> dist;
    std::vector<std::size_t> match;
    double cutoff = 0.0;  // pair rejection distance for this iterate
  };
  const auto correspond = [&](const SimilarityTransform& t) {
    State st;
    st.t = t;
    st.dist.resize(src.size());
    st.match.resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto hit = grid.nearest(t.apply(src[i]));
      st.dist[i] = hit->distance;
      st.match[i] = hit->index;
    }
    std::vector<double> sorted = st.dist;
    auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    st.cutoff = params.rejection_factor * *mid;
    if (params.max_pair_distance > 0.0) st.cutoff = std::min(st.cutoff, params.max_pair_distance);
    return st;
  };
  // Truncated RMS over every source point with a cap fixed at the start, so
  // iterates are compared on one objective even as the inlier set changes.
  double cap = 0.0;
  const auto objective = [&](const State& st) {
    double sq = 0.0;
    for (double d : st.dist) sq += std::min(d, cap) * std::min(d, cap);
    return std::sqrt(sq / static_cast<double>(st.dist.size()));
  };
  const auto pairs_of = [&](const State& st, std::vector<Vec3>& from, std::vector<Vec3>& to) {
    from.clear();
    to.clear();
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (st.dist[i] > st.cutoff) continue;
      from.push_back(src[i]);
      to.push_back(target.points[st.match[i]]);
    }
    if (from.size() < 3) throw NoCorrespondences("no point pairs survive rejection");
  };

  State cur = correspond(init);
  cap = cur.cutoff;
  std::vector<Vec3> from, to;
  pairs_of(cur, from, to);
  double cur_obj = objective(cur);

  IcpResult result;
  result.transform = init;
  result.rmse_history.push_back(cur_obj);
  for (int it = 0; it < params.max_iterations; ++it) {
    SimilarityTransform next;
    try {
      next = umeyama_fit(from, to, params.with_scale);
    } catch (const DegenerateGeometry&) {
      break;
    }
    State cand = correspond(next);
    const double cand_obj = objective(cand);
    if (cand_obj > cur_obj) break;
    try {
      pairs_of(cand, from, to);
    } catch (const NoCorrespondences&) {
      break;
    }
    const double gain = cur_obj - cand_obj;
    cur = std::move(cand);
    cur_obj = cand_obj;
    result.transform = next;
    result.rmse_history.push_back(cand_obj);
    result.iterations = it + 1;
    if (gain < params.min_improvement) break;
  }
  double sq = 0.0;
  std::size_t n = 0;
  for (double d : cur.dist) {
    if (d > cur.cutoff) continue;
    sq += d * d;
    ++n;
  }
  result.rmse = std::sqrt(sq / static_cast<double>(n));
  return result;
}

AlignmentResult align_clouds(const PointCloud& source, const PointCloud& target,
                             const IcpParams& params) {
  const PrincipalAxes ps = principal_axes(source);
  const PrincipalAxes pt = principal_axes(target);
  const InitialGuess guess = initial_guess(source, ps, target, pt);
  SimilarityTransform init;
  init.scale = guess.scale;
  init.rotation = orient_with(source, ps, target, pt, guess);
  init.translation = guess.target_center - init.scale * (init.rotation * guess.source_center);
  const IcpResult icp = icp_refine(source, target, init, params);
  return {icp.transform, icp.rmse, icp.rmse_history};
}

FusionResult fuse_camera_poses(std::span<const Observation> observations, FusionMode mode) {
  std::vector<Vec3> uwb, sfm;
  for (const Observation& o : observations) {
    if (!o.sfm_pose) continue;
    uwb.push_back(o.uwb_position);
    sfm.push_back(o.sfm_pose->position);
  }
  if (uwb.size() < 3) {
    throw InsufficientAnchors("pose fusion needs at least 3 registered observations, got " +
                              std::to_string(uwb.size()));
  }
  FusionResult out;
  out.uwb_to_sfm = umeyama_fit(uwb, sfm, true);
  const SimilarityTransform& t = out.uwb_to_sfm;
  out.poses.reserve(observations.size());
  for (const Observation& o : observations) {
    FusedPose fp;
    fp.obs_id = o.obs_id;
    if (o.sfm_pose) {
      fp.pose = *o.sfm_pose;
      fp.scale = o.sfm_scale;
      if (mode == FusionMode::Average) {
        fp.pose.position = 0.5 * (o.sfm_pose->position + t.apply(o.uwb_position));
      }
    } else {
      fp.pose.position = t.apply(o.uwb_position);
      fp.pose.orientation = t.rotation * yaw_rotation(o.logged_yaw);
      fp.scale = t.scale;
      fp.source = PoseSource::UwbSubstituted;
    }
    out.poses.push_back(fp);
  }
  return out;
}

}  // namespace scanplan
