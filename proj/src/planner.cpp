#include "scanplan/planner.hpp"

#include <algorithm>
#include <cmath>

#include "scanplan/error.hpp"

namespace scanplan {

namespace {

bool contains(std::span<const int> xs, int v) {
  return std::find(xs.begin(), xs.end(), v) != xs.end();
}

bool has_visits_left(const VisitCounts& visits, int slice, int max_visits) {
  const auto k = static_cast<std::size_t>(slice);
  return k >= visits.size() || visits[k] < max_visits;
}

}  // namespace

void PlannerConfig::validate() const {
  if (!(radius > 0.0) || !(altitude > 0.0)) {
    throw BadConfig("planner radius and altitude must be positive");
  }
  if (max_visits_per_slice < 0) throw BadConfig("max visits must be non-negative");
}

Waypoint slice_waypoint(int slice, const SliceModel& model, const PlannerConfig& cfg,
                        int uav_id) {
  const double az = model.slice_center_azimuth(slice);
  const Vec3 p(cfg.center.x() + cfg.radius * std::cos(az),
               cfg.center.y() + cfg.radius * std::sin(az), cfg.altitude_for(uav_id));
  return Waypoint{p, wrap_angle(az + kPi)};
}

std::optional<PlannedWaypoint> next_waypoint_dynamic(const SliceCoverageReport& report,
                                                     const UavState& state,
                                                     const PlannerConfig& cfg,
                                                     const SliceModel& model,
                                                     const VisitCounts& visits,
                                                     std::span<const int> excluded) {
  const double here = azimuth_about(state.true_pose.position, cfg.center);
  std::optional<int> best;
  double best_dist = 0.0;
  for (int k = 0; k < static_cast<int>(report.slices.size()); ++k) {
    if (report.slices[static_cast<std::size_t>(k)].covered) continue;
    if (!has_visits_left(visits, k, cfg.max_visits_per_slice)) continue;
    if (contains(excluded, k)) continue;
    const double dist = std::abs(angle_difference(model.slice_center_azimuth(k), here));
    if (!best || dist < best_dist - 1e-12) {
      best = k;
      best_dist = dist;
    }
  }
  if (!best) return std::nullopt;
  return PlannedWaypoint{slice_waypoint(*best, model, cfg, state.id), *best};
}

std::optional<Waypoint> next_waypoint_static(TrajectoryPlan& plan) {
  if (plan.cursor >= plan.waypoints.size()) return std::nullopt;
  return plan.waypoints[plan.cursor++];
}

std::optional<PlannedWaypoint> weakest_slice_waypoint(const SliceCoverageReport& report,
                                                      const UavState& state,
                                                      const PlannerConfig& cfg,
                                                      const SliceModel& model,
                                                      const VisitCounts& visits,
                                                      std::span<const int> excluded) {
  std::optional<int> best;
  for (int k = 0; k < static_cast<int>(report.slices.size()); ++k) {
    if (!has_visits_left(visits, k, cfg.max_visits_per_slice)) continue;
    if (contains(excluded, k)) continue;
    if (!best || report.slices[static_cast<std::size_t>(k)].score <
                     report.slices[static_cast<std::size_t>(*best)].score) {
      best = k;
    }
  }
  if (!best) return std::nullopt;
  return PlannedWaypoint{slice_waypoint(*best, model, cfg, state.id), *best};
}

std::array<std::optional<PlannedWaypoint>, 2> assign_dual(
    const SliceCoverageReport& report, const std::array<UavState, 2>& states,
    const PlannerConfig& cfg, const SliceModel& model, const VisitCounts& visits) {
  std::array<std::optional<PlannedWaypoint>, 2> out;
  out[0] = next_waypoint_dynamic(report, states[0], cfg, model, visits);
  if (!out[0]) return out;
  const int taken[] = {out[0]->slice};
  out[1] = next_waypoint_dynamic(report, states[1], cfg, model, visits, taken);
  if (!out[1]) out[1] = weakest_slice_waypoint(report, states[1], cfg, model, visits, taken);
  return out;
}

}  // namespace scanplan
