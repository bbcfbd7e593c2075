#include "scanplan/slices.hpp"

#include <algorithm>
#include <cmath>

#include "scanplan/error.hpp"

namespace scanplan {

void SliceModel::validate() const {
  if (slice_count < 1 || region_count < 1 || slice_count % region_count != 0) {
    throw BadConfig("slice count must be a positive multiple of the region count");
  }
}

int slice_of_azimuth(double azimuth, const SliceModel& model) {
  const double a = wrap_angle(azimuth);
  const int k = static_cast<int>(std::floor(a / model.slice_width()));
  return std::clamp(k, 0, model.slice_count - 1);
}

int slice_of_position(const Vec3& position, const SliceModel& model) {
  return slice_of_azimuth(azimuth_about(position, model.center), model);
}

int slice_of_yaw(double yaw, const SliceModel& model) {
  return slice_of_azimuth(yaw - kPi, model);
}

}  // namespace scanplan
