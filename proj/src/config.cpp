#include "scanplan/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "scanplan/error.hpp"
#include "scanplan/ply.hpp"

namespace scanplan {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw BadConfig("invalid value '" + value + "' for " + key);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) bad_value(key, text);
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, text);
  return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
  const long long v = to_integer(key, text);
  if (v < 0) bad_value(key, text);
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, text);
}

Vec3 to_vec3(const std::string& key, const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> vals;
  while (std::getline(ss, part, ',')) vals.push_back(to_double(key, part));
  if (vals.size() != 3) bad_value(key, text);
  return {vals[0], vals[1], vals[2]};
}

std::string fmt(bool b) { return b ? "true" : "false"; }
std::string fmt(double v) { return format_real(v); }
std::string fmt(const Vec3& v) {
  return format_real(v.x()) + "," + format_real(v.y()) + "," + format_real(v.z());
}

struct Entry {
  std::string section;
  std::string key;
  std::function<void(MissionConfig&, const std::string&)> set;
  std::function<std::string(const MissionConfig&)> get;
};

#define SP_REAL(sec, name, member)                                                     \
  Entry {                                                                              \
    sec, name, [](MissionConfig& c, const std::string& v) {                            \
      c.member = to_double(std::string(sec) + "." + name, v);                          \
    },                                                                                 \
        [](const MissionConfig& c) { return fmt(c.member); }                           \
  }
#define SP_INT(sec, name, member)                                                      \
  Entry {                                                                              \
    sec, name, [](MissionConfig& c, const std::string& v) {                            \
      c.member = static_cast<int>(to_integer(std::string(sec) + "." + name, v));       \
    },                                                                                 \
        [](const MissionConfig& c) { return std::to_string(c.member); }                \
  }
#define SP_COUNT(sec, name, member)                                                    \
  Entry {                                                                              \
    sec, name, [](MissionConfig& c, const std::string& v) {                            \
      c.member = to_count(std::string(sec) + "." + name, v);                           \
    },                                                                                 \
        [](const MissionConfig& c) { return std::to_string(c.member); }                \
  }
#define SP_BOOL(sec, name, member)                                                     \
  Entry {                                                                              \
    sec, name, [](MissionConfig& c, const std::string& v) {                            \
      c.member = to_bool(std::string(sec) + "." + name, v);                            \
    },                                                                                 \
        [](const MissionConfig& c) { return fmt(c.member); }                           \
  }

template <typename E>
Entry enum_entry(const char* sec, const char* name, E MissionConfig::*member,
                 std::vector<std::pair<std::string, E>> names) {
  const std::string full = std::string(sec) + "." + name;
  return Entry{
      sec, name,
      [member, names, full](MissionConfig& c, const std::string& v) {
        const std::string s = lower(trim(v));
        for (const auto& [n, e] : names) {
          if (n == s) {
            c.*member = e;
            return;
          }
        }
        bad_value(full, v);
      },
      [member, names](const MissionConfig& c) {
        for (const auto& [n, e] : names) {
          if (e == c.*member) return n;
        }
        return std::string("?");
      }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back(enum_entry<ObjectKind>("mission", "object", &MissionConfig::object,
                                       {{"engraved_box", ObjectKind::EngravedBox},
                                        {"tall_object", ObjectKind::TallObject}}));
    e.push_back(SP_INT("mission", "uav_count", uav_count));
    e.push_back(enum_entry<MissionMode>("mission", "mode", &MissionConfig::mode,
                                        {{"baseline", MissionMode::Baseline},
                                         {"location_aware", MissionMode::LocationAware},
                                         {"dynamic_path", MissionMode::DynamicPath},
                                         {"integrated", MissionMode::Integrated}}));
    e.push_back(enum_entry<CameraMode>("mission", "camera_mode", &MissionConfig::camera_mode,
                                       {{"bw", CameraMode::Bw}, {"rgb", CameraMode::Rgb}}));
    e.push_back(Entry{"mission", "seed",
                      [](MissionConfig& c, const std::string& v) {
                        c.seed = static_cast<std::uint64_t>(to_count("mission.seed", v));
                      },
                      [](const MissionConfig& c) { return std::to_string(c.seed); }});
    e.push_back(SP_COUNT("mission", "image_budget", image_budget));
    e.push_back(SP_BOOL("mission", "adapt_from_start", adapt_from_start));

    e.push_back(Entry{"object", "box_dims",
                      [](MissionConfig& c, const std::string& v) {
                        c.box_dims = to_vec3("object.box_dims", v);
                      },
                      [](const MissionConfig& c) { return fmt(c.box_dims); }});
    e.push_back(SP_REAL("object", "engraving_depth", engraving_depth));
    e.push_back(SP_REAL("object", "tall_height", tall_height));
    e.push_back(SP_REAL("object", "tall_radius", tall_radius));
    e.push_back(SP_REAL("object", "tall_feature", tall_feature));
    e.push_back(SP_REAL("object", "height", object_height));
    e.push_back(SP_REAL("object", "yaw_deg", object_yaw_deg));
    e.push_back(SP_COUNT("object", "surface_samples", surface_samples));

    e.push_back(SP_REAL("flight", "radius", radius));
    e.push_back(SP_REAL("flight", "speed", speed));
    e.push_back(SP_REAL("flight", "dt", dt));
    e.push_back(SP_REAL("flight", "yaw_rate_deg", yaw_rate_deg));
    e.push_back(SP_REAL("flight", "arrival_tolerance", arrival_tolerance));
    e.push_back(SP_REAL("flight", "altitude_offset", altitude_offset));
    e.push_back(SP_INT("flight", "waypoints_per_circle", waypoints_per_circle));
    e.push_back(SP_INT("flight", "circles", circles));
    e.push_back(SP_INT("flight", "captures_per_waypoint", captures_per_waypoint));
    e.push_back(SP_REAL("flight", "capture_interval", capture_interval));
    e.push_back(SP_REAL("flight", "initial_drift", initial_drift));
    e.push_back(SP_REAL("flight", "start_azimuth_deg", start_azimuth_deg));

    e.push_back(SP_REAL("camera", "fov_deg", fov_deg));
    e.push_back(SP_REAL("camera", "max_range", max_range));
    e.push_back(SP_INT("camera", "resolution", resolution));
    e.push_back(SP_REAL("camera", "noise_sigma", noise_sigma));
    e.push_back(SP_COUNT("camera", "point_budget", point_budget));

    e.push_back(SP_REAL("uwb", "sigma", uwb.sigma));
    e.push_back(SP_REAL("uwb", "bias_walk_sigma", uwb.bias_walk_sigma));
    e.push_back(SP_REAL("uwb", "smoothing_alpha", uwb.smoothing_alpha));

    e.push_back(SP_REAL("sfm", "p_base", sfm.p_base));
    e.push_back(SP_REAL("sfm", "f_ref", sfm.f_ref));
    e.push_back(SP_REAL("sfm", "rotation_noise_deg", sfm.rotation_noise_deg));
    e.push_back(SP_REAL("sfm", "position_noise_fraction", sfm.position_noise_fraction));

    e.push_back(SP_REAL("trigger", "time_threshold", trigger.time_threshold));
    e.push_back(SP_COUNT("trigger", "min_timeout_batch", trigger.min_timeout_batch));

    e.push_back(SP_INT("coverage", "slice_count", slice_count));
    e.push_back(SP_INT("coverage", "region_count", region_count));
    e.push_back(enum_entry<ThresholdMode>("coverage", "threshold_mode",
                                          &MissionConfig::threshold_mode,
                                          {{"calibrated", ThresholdMode::Calibrated},
                                           {"fixed", ThresholdMode::Fixed}}));
    e.push_back(SP_REAL("coverage", "threshold", threshold));
    e.push_back(SP_REAL("coverage", "calibration_factor", calibration_factor));
    e.push_back(SP_REAL("coverage", "cluster_spacing_factor", cluster_spacing_factor));
    e.push_back(SP_COUNT("coverage", "cluster_min_size", cluster_min_size));
    e.push_back(SP_REAL("coverage", "r_max_factor", r_max_factor));
    e.push_back(SP_REAL("coverage", "voxel_divisor", voxel_divisor));

    e.push_back(SP_INT("planner", "max_visits_per_slice", max_visits_per_slice));

    e.push_back(enum_entry<FusionMode>("fusion", "mode", &MissionConfig::fusion_mode,
                                       {{"substitute", FusionMode::Substitute},
                                        {"average", FusionMode::Average}}));

    e.push_back(SP_INT("evaluation", "ring_count", ring_count));
    e.push_back(SP_REAL("evaluation", "ring_radius", ring_radius));
    e.push_back(SP_REAL("evaluation", "ring_fov_deg", ring_fov_deg));
    e.push_back(SP_INT("evaluation", "ring_resolution", ring_resolution));
    e.push_back(SP_INT("evaluation", "splat_px", splat_px));
    e.push_back(SP_COUNT("evaluation", "wd_points", wd_points));
    e.push_back(SP_COUNT("evaluation", "reference_samples", reference_samples));

    e.push_back(SP_BOOL("output", "write_observations", write_observations));
    e.push_back(SP_BOOL("output", "write_snapshots", write_snapshots));
    e.push_back(SP_BOOL("output", "write_views", write_views));
    return e;
  }();
  return entries;
}

#undef SP_REAL
#undef SP_INT
#undef SP_COUNT
#undef SP_BOOL

const Entry& find_entry(const std::string& section, const std::string& key) {
  for (const Entry& e : registry()) {
    if (e.section == section && e.key == key) return e;
  }
  throw BadConfig("unknown config key " + section + "." + key);
}

}  // namespace

std::string to_string(ObjectKind k) {
  return k == ObjectKind::EngravedBox ? "engraved_box" : "tall_object";
}

std::string to_string(MissionMode m) {
  switch (m) {
    case MissionMode::Baseline: return "baseline";
    case MissionMode::LocationAware: return "location_aware";
    case MissionMode::DynamicPath: return "dynamic_path";
    case MissionMode::Integrated: return "integrated";
  }
  return "?";
}

std::string to_string(CameraMode c) { return c == CameraMode::Bw ? "bw" : "rgb"; }

MissionMode parse_mission_mode(const std::string& s) {
  MissionConfig c;
  set_config_value(c, "mission.mode", s);
  return c.mode;
}

bool uses_dynamic_path(MissionMode m) {
  return m == MissionMode::DynamicPath || m == MissionMode::Integrated;
}

bool uses_fused_poses(MissionMode m) {
  return m == MissionMode::LocationAware || m == MissionMode::Integrated;
}

void MissionConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw BadConfig(what);
  };
  require(uav_count == 1 || uav_count == 2, "mission.uav_count must be 1 or 2");
  require(box_dims.minCoeff() > 0.0, "object.box_dims must be positive");
  require(tall_height > 0.0 && tall_radius > 0.0, "tall object size must be positive");
  require(tall_feature >= 0.0 && tall_feature <= 1.0, "object.tall_feature must be in [0, 1]");
  require(surface_samples > 0, "object.surface_samples must be positive");
  require(radius > 0.0, "flight.radius must be positive");
  require(speed > 0.0 && dt > 0.0, "flight.speed and flight.dt must be positive");
  require(yaw_rate_deg > 0.0, "flight.yaw_rate_deg must be positive");
  require(arrival_tolerance > 0.0, "flight.arrival_tolerance must be positive");
  require(waypoints_per_circle >= 2, "flight.waypoints_per_circle must be >= 2");
  require(circles >= 1, "flight.circles must be >= 1");
  require(captures_per_waypoint >= 1, "flight.captures_per_waypoint must be >= 1");
  require(capture_interval > 0.0, "flight.capture_interval must be positive");
  require(initial_drift > 0.0, "flight.initial_drift must be positive");
  require(fov_deg > 0.0 && fov_deg < 180.0, "camera.fov_deg must be in (0, 180)");
  require(max_range > 0.0 && resolution > 0, "camera range and resolution must be positive");
  require(noise_sigma >= 0.0, "camera.noise_sigma must be non-negative");
  require(point_budget > 0, "camera.point_budget must be positive");
  uwb.validate();
  SfmFailureModel s = sfm;
  s.scene_diagonal = 1.0;
  s.validate();
  trigger.validate();
  SliceModel{slice_count, region_count, Vec3::Zero()}.validate();
  require(threshold_mode == ThresholdMode::Calibrated || threshold >= 0.0,
          "coverage.threshold must be non-negative");
  require(calibration_factor > 0.0, "coverage.calibration_factor must be positive");
  require(cluster_spacing_factor > 0.0, "coverage.cluster_spacing_factor must be positive");
  require(r_max_factor > 0.0 && voxel_divisor > 0.0, "coverage scale factors must be positive");
  require(max_visits_per_slice >= 1, "planner.max_visits_per_slice must be >= 1");
  require(ring_count >= 1 && ring_radius > 0.0, "evaluation ring must be non-empty");
  require(ring_fov_deg > 0.0 && ring_fov_deg < 180.0, "evaluation.ring_fov_deg out of range");
  require(ring_resolution >= 7, "evaluation.ring_resolution must be >= 7");
  require(splat_px >= 0 && wd_points > 0 && reference_samples > 0,
          "evaluation parameters out of range");
}

void set_config_value(MissionConfig& cfg, const std::string& dotted_key,
                      const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw BadConfig("config key needs a section: " + dotted_key);
  find_entry(dotted_key.substr(0, dot), dotted_key.substr(dot + 1)).set(cfg, value);
}

MissionConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw BadConfig(std::string("malformed config: ") + e.what());
  }
  MissionConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw BadConfig("config key outside a section: " + section);
    for (const auto& [key, value] : body) {
      find_entry(section, key).set(cfg, value.get_value<std::string>());
    }
  }
  cfg.validate();
  return cfg;
}

MissionConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

void apply_env_overrides(MissionConfig& cfg, const std::string& prefix) {
  for (const Entry& e : registry()) {
    std::string name = prefix + e.section + "_" + e.key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (const char* v = std::getenv(name.c_str())) e.set(cfg, v);
  }
  cfg.validate();
}

std::string format_config(const MissionConfig& cfg) {
  std::string out;
  std::string section;
  for (const Entry& e : registry()) {
    if (e.section != section) {
      if (!section.empty()) out += "\n";
      section = e.section;
      out += "[" + section + "]\n";
    }
    out += e.key + " = " + e.get(cfg) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Entry& e : registry()) keys.push_back(e.section + "." + e.key);
  return keys;
}

}  // namespace scanplan
