#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "scanplan/reconstruct.hpp"
#include "scanplan/slices.hpp"
#include "scanplan/uav.hpp"

namespace scanplan {

enum class TrajectoryMode { Static, Dynamic };

struct PlannerConfig {
  Vec3 center = Vec3::Zero();  // object centre; the flight axis passes through it
  double radius = 0.5;
  double altitude = 1.0;       // absolute flight height of UAV 0
  double altitude_offset = 0.10;  // added for UAV 1
  TrajectoryMode mode = TrajectoryMode::Dynamic;
  int max_visits_per_slice = 4;

  double altitude_for(int uav_id) const {
    return altitude + (uav_id == 1 ? altitude_offset : 0.0);
  }
  void validate() const;
};

struct PlannedWaypoint {
  Waypoint waypoint;
  int slice = 0;
};

// Visits per slice, shared by the fleet.
using VisitCounts = std::vector<int>;

// Waypoint at the centre azimuth of `slice`, on the flight circle, facing
// the object axis.
Waypoint slice_waypoint(int slice, const SliceModel& model, const PlannerConfig& cfg,
                        int uav_id);

// Nearest (by angular distance from the UAV's azimuth, ties to the lower
// index) uncovered slice that has visits left and is not excluded. nullopt
// means nothing is left to do.
std::optional<PlannedWaypoint> next_waypoint_dynamic(const SliceCoverageReport& report,
                                                     const UavState& state,
                                                     const PlannerConfig& cfg,
                                                     const SliceModel& model,
                                                     const VisitCounts& visits,
                                                     std::span<const int> excluded = {});

std::optional<Waypoint> next_waypoint_static(TrajectoryPlan& plan);

// UAV 0 picks first; UAV 1 takes the best remaining uncovered slice or, if
// none is left but UAV 0 got one, the lowest-score covered slice.
std::array<std::optional<PlannedWaypoint>, 2> assign_dual(
    const SliceCoverageReport& report, const std::array<UavState, 2>& states,
    const PlannerConfig& cfg, const SliceModel& model, const VisitCounts& visits);

// Fallback target for an idle UAV: lowest-score slice with visits left,
// excluding `excluded`.
std::optional<PlannedWaypoint> weakest_slice_waypoint(const SliceCoverageReport& report,
                                                      const UavState& state,
                                                      const PlannerConfig& cfg,
                                                      const SliceModel& model,
                                                      const VisitCounts& visits,
                                                      std::span<const int> excluded = {});

}  // namespace scanplan
