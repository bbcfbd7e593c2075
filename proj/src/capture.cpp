#include "scanplan/capture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scanplan/error.hpp"

namespace scanplan {

ScanTarget::ScanTarget(SceneObject obj, std::size_t samples, std::uint64_t seed)
    : object(std::move(obj)),
      grid(object),
      surface(sample_surface(object, samples, seed)),
      center(object.bounds().center()) {}

GaugeTransform GaugeTransform::draw(Rng& rng) {
  GaugeTransform g;
  g.hidden.scale = uniform(rng, 0.5, 2.0);
  g.hidden.rotation = random_rotation(rng);
  const double tx = uniform(rng, -1.0, 1.0);
  const double ty = uniform(rng, -1.0, 1.0);
  const double tz = uniform(rng, -1.0, 1.0);
  g.hidden.translation = Vec3(tx, ty, tz);
  return g;
}

void GaugeTransform::validate() const {
  hidden.validate();
  if (hidden.scale < 0.2 || hidden.scale > 5.0) {
    throw BadConfig("gauge scale must lie in [0.2, 5]");
  }
}

double SfmFailureModel::success_probability(double feature_score) const {
  if (f_ref <= 0.0) return feature_score > 0.0 ? 1.0 - p_base : 0.0;
  return std::clamp(feature_score / f_ref, 0.0, 1.0) * (1.0 - p_base);
}

void SfmFailureModel::validate() const {
  if (p_base < 0.0 || p_base > 1.0) throw BadConfig("p_base must be in [0, 1]");
  if (f_ref < 0.0) throw BadConfig("f_ref must be non-negative");
  if (rotation_noise_deg < 0.0 || position_noise_fraction < 0.0) {
    throw BadConfig("SfM noise must be non-negative");
  }
}

Observation capture_observation(const ScanTarget& target, const UavState& state,
                                const Camera& intrinsics, const CaptureSettings& settings,
                                const SliceModel& slices, Rng& rng) {
  Camera cam = intrinsics;
  cam.pose = state.true_pose;

  Observation obs;
  obs.uav_id = state.id;
  obs.timestamp = state.clock;
  obs.true_pose = state.true_pose;
  obs.uwb_position = state.est_position;
  obs.logged_yaw = state.true_pose.yaw();
  obs.slice_index = slice_of_position(state.true_pose.position, slices);

  std::vector<std::size_t> visible = visible_points(target.surface, target.grid, cam);
  if (!visible.empty()) {
    double sum = 0.0;
    for (std::size_t i : visible) sum += target.surface.feature_strength[i];
    obs.feature_score = sum / static_cast<double>(visible.size());
  }

  if (visible.size() > settings.point_budget) {
    // Partial Fisher-Yates, then restore index order.
    for (std::size_t k = 0; k < settings.point_budget; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, visible.size() - 1);
      std::swap(visible[k], visible[pick(rng)]);
    }
    visible.resize(settings.point_budget);
    std::sort(visible.begin(), visible.end());
  }

  obs.points = target.surface.subset(visible);
  for (Vec3& p : obs.points.points) p += gaussian_vec(rng, settings.noise_sigma);
  return obs;
}

Observation sfm_register(const Observation& obs, const GaugeTransform& gauge,
                         const SfmFailureModel& model, Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  const Vec3 axis = unit_vector(rng);
  const double angle = gaussian(rng, model.rotation_noise_deg * kPi / 180.0);
  const Vec3 offset = gaussian_vec(rng, model.position_noise() / std::sqrt(3.0));

  Observation out = obs;
  out.sfm_pose.reset();
  if (u < model.success_probability(obs.feature_score)) {
    Pose noisy = obs.true_pose;
    noisy.orientation = axis_angle_rotation(axis, angle) * noisy.orientation;
    noisy.position += offset;
    out.sfm_pose = gauge.hidden.apply(noisy);
    out.sfm_scale = gauge.hidden.scale;
  }
  return out;
}

std::array<Waypoint, 2> initial_pair(const UavState& state, const Vec3& center,
                                     double drift) {
  if (!(drift > 0.0)) throw BadConfig("initial pair drift must be positive");
  const Vec3 p = state.true_pose.position;
  Vec3 radial = p - center;
  radial.z() = 0.0;
  if (radial.norm() < 1e-12) throw BadConfig("UAV is on the object axis");
  const Vec3 tangent = Vec3::UnitZ().cross(radial.normalized());
  std::array<Waypoint, 2> pair;
  for (int k = 0; k < 2; ++k) {
    const Vec3 q = p + (k == 0 ? -0.5 : 0.5) * drift * tangent;
    pair[static_cast<std::size_t>(k)] = Waypoint{q, yaw_facing(q, center)};
  }
  return pair;
}

}  // namespace scanplan
