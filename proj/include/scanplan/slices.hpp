#pragma once

#include "scanplan/geometry.hpp"

namespace scanplan {

// Angular partition of the flight circle. Slice k covers azimuths
// [k*w, (k+1)*w) with w = 2pi/K; regions are contiguous groups of
// K/region_count slices.
struct SliceModel {
  int slice_count = 8;
  int region_count = 4;
  Vec3 center = Vec3::Zero();

  double slice_width() const { return kTwoPi / slice_count; }
  int slices_per_region() const { return slice_count / region_count; }
  int region_of_slice(int slice) const { return slice / slices_per_region(); }
  double slice_center_azimuth(int slice) const { return (slice + 0.5) * slice_width(); }
  // Throws BadConfig unless K > 0 is divisible by region_count > 0.
  void validate() const;
};

int slice_of_azimuth(double azimuth, const SliceModel& model);
// Slice of a UAV at `position`; the UAV faces the centre, so its yaw is
// azimuth + pi.
int slice_of_position(const Vec3& position, const SliceModel& model);
int slice_of_yaw(double yaw, const SliceModel& model);

}  // namespace scanplan
