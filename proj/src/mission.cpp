#include "scanplan/mission.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include "scanplan/error.hpp"
#include "scanplan/planner.hpp"
#include "scanplan/ply.hpp"

namespace scanplan {
namespace {

namespace fs = std::filesystem;

// Stream tags; one independent generator per stochastic component.
enum Stream : std::uint64_t {
  kObjectStream = 1,
  kSurfaceStream,
  kCaptureStream,
  kSfmStream,
  kGaugeStream,
  kUwbStream0,
  kUwbStream1,
  kReferenceStream,
  kMetricStream,
};

std::uint64_t derive_seed(std::uint64_t seed, Stream tag) { return make_stream(seed, tag)(); }

double deg(double d) { return d * kPi / 180.0; }

struct Task {
  Waypoint wp;
  int captures = 0;  // 0: fly through without stopping
  int slice = -1;
  bool static_waypoint = false;
};

struct Agent {
  UavState state;
  UwbStream uwb;
  TrajectoryPlan plan;
  std::deque<Task> tasks;
  bool hovering = false;
  int captures_left = 0;
  double next_capture = 0.0;
  bool landed = false;
  int target_slice = -1;
  std::size_t static_completed = 0;
  int last_slice = 0;
};

double bounding_radius(const SceneObject& obj, const Vec3& center) {
  double r = 0.0;
  for (const Triangle& t : obj.triangles) {
    for (const Vec3* v : {&t.a, &t.b, &t.c}) r = std::max(r, (*v - center).norm());
  }
  return r;
}

std::string csv_join(std::initializer_list<std::string> parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += ',';
    out += p;
  }
  return out;
}

std::string r(double v) { return format_real(v); }

std::string transform_row(const std::string& name, const SimilarityTransform& t) {
  std::string row = name + "," + r(t.scale);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) row += "," + r(t.rotation(i, j));
  }
  for (int i = 0; i < 3; ++i) row += "," + r(t.translation[i]);
  return row;
}

// Re-expresses an observation's points through a camera pose in another
// frame: local camera coordinates are scaled and mapped by `pose`.
void append_through_pose(PointCloud& out, const Observation& obs, const Pose& pose,
                         double scale) {
  const Mat3 rel = pose.orientation * obs.true_pose.orientation.transpose();
  for (std::size_t i = 0; i < obs.points.size(); ++i) {
    const Vec3 local = obs.true_pose.to_local(obs.points.points[i]);
    const Vec3 p = pose.position + scale * (pose.orientation * local);
    const Vec3 n = rel * obs.points.normals[i];
    out.push_back(p, n, obs.points.feature_strength[i]);
  }
}

class MissionRunner {
 public:
  MissionRunner(const MissionConfig& cfg, fs::path out_dir)
      : cfg_(cfg),
        out_dir_(std::move(out_dir)),
        object_(build_scene(cfg)),
        target_(object_, cfg.surface_samples, derive_seed(cfg.seed, kSurfaceStream)),
        capture_rng_(make_stream(cfg.seed, kCaptureStream)),
        sfm_rng_(make_stream(cfg.seed, kSfmStream)) {
    center_ = Vec3(0.0, 0.0, cfg.object_height);
    slices_ = SliceModel{cfg.slice_count, cfg.region_count, center_};
    slices_.validate();

    planner_.center = center_;
    planner_.radius = cfg.radius;
    planner_.altitude = cfg.object_height;
    planner_.altitude_offset = cfg.altitude_offset;
    planner_.mode = uses_dynamic_path(cfg.mode) ? TrajectoryMode::Dynamic : TrajectoryMode::Static;
    planner_.max_visits_per_slice = cfg.max_visits_per_slice;
    planner_.validate();

    camera_.hfov = camera_.vfov = deg(cfg.fov_deg);
    camera_.max_range = cfg.max_range;
    camera_.width = camera_.height = cfg.resolution;
    camera_.validate();

    capture_.noise_sigma = cfg.noise_sigma;
    capture_.point_budget = cfg.point_budget;

    sfm_ = cfg.sfm;
    sfm_.scene_diagonal = object_.bounds().diagonal();
    sfm_.validate();
    Rng gauge_rng = make_stream(cfg.seed, kGaugeStream);
    gauge_ = GaugeTransform::draw(gauge_rng);

    voxel_ = object_.bounds().diagonal() / cfg.voxel_divisor;
    r_max_ = cfg.r_max_factor * bounding_radius(object_, center_);
    cluster_.spacing_factor = cfg.cluster_spacing_factor;
    cluster_.min_size = cfg.cluster_min_size;
    threshold_ = cfg.threshold_mode == ThresholdMode::Fixed
                     ? cfg.threshold
                     : std::numeric_limits<double>::infinity();
    calibrated_ = cfg.threshold_mode == ThresholdMode::Fixed;
    visits_.assign(static_cast<std::size_t>(cfg.slice_count), 0);

    const int static_circles = planner_.mode == TrajectoryMode::Static ? cfg.circles
                               : cfg.adapt_from_start                  ? 0
                                                                       : 1;
    static_plan_size_ = 2;
    for (int id = 0; id < cfg.uav_count; ++id) {
      const double start_az = deg(cfg.start_azimuth_deg) + id * kPi;
      // The static plan fixes the start pose even when no circle is flown.
      TrajectoryPlan full = plan_static_circles(center_, cfg.radius, planner_.altitude_for(id),
                                                cfg.waypoints_per_circle, cfg.circles, start_az);
      static_plan_size_ += full.waypoints.size() * static_cast<std::size_t>(cfg.captures_per_waypoint);
      TrajectoryPlan plan = full;
      plan.waypoints.resize(static_cast<std::size_t>(static_circles * cfg.waypoints_per_circle));

      UwbStream uwb(cfg.uwb, make_stream(cfg.seed, id == 0 ? kUwbStream0 : kUwbStream1));
      UavState state;
      state.id = id;
      state.true_pose = Pose::from_yaw(full.waypoints.front().position, full.waypoints.front().yaw);
      state.est_position = uwb_estimate(state.true_pose.position, uwb, cfg.dt);
      Agent agent{state, std::move(uwb), std::move(plan), {}, false, 0, 0.0, false, -1, 0, 0};
      agent.last_slice = slice_of_position(state.true_pose.position, slices_);
      for (const Waypoint& w : initial_pair(state, center_, cfg.initial_drift)) {
        agent.tasks.push_back(Task{w, 1, -1, false});
      }
      agents_.push_back(std::move(agent));
    }
    if (cfg.uav_count == 2) static_plan_size_ += 2;
    budget_ = cfg.image_budget > 0 ? cfg.image_budget : static_plan_size_;
  }

  MissionResult run() {
    constexpr double kMaxMissionTime = 7200.0;
    while (!std::all_of(agents_.begin(), agents_.end(), [](const Agent& a) { return a.landed; })) {
      if (now_ > kMaxMissionTime) throw IncompleteRun("mission exceeded the time limit");
      plan_ready_agents();
      for (Agent& a : agents_) advance(a);
      now_ += cfg_.dt;
      std::vector<int> uav_slices;
      for (Agent& a : agents_) {
        if (!a.landed) a.last_slice = slice_of_position(a.state.true_pose.position, slices_);
        uav_slices.push_back(a.last_slice);
      }
      if (const auto reason = should_trigger(pending_, cfg_.trigger, now_, uav_slices, slices_)) {
        merge(to_string(*reason));
      }
    }
    if (!pending_.empty()) merge("mission_end");
    return finish();
  }

 private:
  bool budget_left() const { return observations_.size() < budget_; }

  bool has_pending(int uav_id) const {
    return std::any_of(pending_.begin(), pending_.end(),
                       [&](const Observation& o) { return o.uav_id == uav_id; });
  }

  void land(Agent& a, const std::string& reason) {
    a.landed = true;
    a.tasks.clear();
    a.hovering = false;
    a.target_slice = -1;
    decisions_.push_back({now_, a.state.id, -1, reason, {}});
  }

  // Route along the flight circle so transfers never cut through the object.
  void push_route(Agent& a, const PlannedWaypoint& pw) {
    const double from = azimuth_about(a.state.true_pose.position, center_);
    const double to = slices_.slice_center_azimuth(pw.slice);
    const double sweep = angle_difference(to, from);
    const double step = kTwoPi / cfg_.waypoints_per_circle;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / step - 1e-9)));
    const double altitude = planner_.altitude_for(a.state.id);
    for (int k = 1; k < n; ++k) {
      const double az = from + sweep * k / n;
      const Vec3 p(center_.x() + cfg_.radius * std::cos(az),
                   center_.y() + cfg_.radius * std::sin(az), altitude);
      a.tasks.push_back(Task{Waypoint{p, yaw_facing(p, center_)}, 0, pw.slice, false});
    }
    a.tasks.push_back(Task{pw.waypoint, cfg_.captures_per_waypoint, pw.slice, false});
    a.target_slice = pw.slice;
  }

  bool ready_for_plan(const Agent& a) const {
    return !a.landed && a.tasks.empty() && a.plan.remaining() == 0 &&
           planner_.mode == TrajectoryMode::Dynamic && calibrated_ && !has_pending(a.state.id);
  }

  void assign(Agent& a, const std::optional<PlannedWaypoint>& pick, const std::string& reason) {
    if (!pick) {
      land(a, "complete");
      return;
    }
    ++visits_[static_cast<std::size_t>(pick->slice)];
    decisions_.push_back({now_, a.state.id, pick->slice, reason, {}});
    push_route(a, *pick);
    for (const Task& t : a.tasks) decisions_.back().route.push_back(t.wp);
  }

  void plan_ready_agents() {
    if (planner_.mode != TrajectoryMode::Dynamic) return;
    std::vector<Agent*> ready;
    for (Agent& a : agents_) {
      if (ready_for_plan(a)) ready.push_back(&a);
    }
    if (ready.empty()) return;
    if (!budget_left()) {
      for (Agent* a : ready) land(*a, "budget");
      return;
    }
    if (ready.size() == 2) {
      const auto picks = assign_dual(report_, {agents_[0].state, agents_[1].state}, planner_,
                                     slices_, visits_);
      assign(agents_[0], picks[0], "uncovered");
      const bool fallback =
          picks[1] && report_.slices[static_cast<std::size_t>(picks[1]->slice)].covered;
      if (!picks[0] && !picks[1]) {
        land(agents_[1], "complete");
      } else {
        assign(agents_[1], picks[1], fallback ? "weakest" : "uncovered");
      }
      return;
    }
    Agent& a = *ready.front();
    std::vector<int> excluded;
    const Agent* other = nullptr;
    for (const Agent& b : agents_) {
      if (&b != &a && !b.landed) other = &b;
    }
    if (other && other->target_slice >= 0) excluded.push_back(other->target_slice);
    auto pick = next_waypoint_dynamic(report_, a.state, planner_, slices_, visits_, excluded);
    if (pick) {
      assign(a, pick, "uncovered");
      return;
    }
    if (!excluded.empty() && report_.uncovered_count() > 0) {
      // The only open slice belongs to the other UAV: revisit the weakest one.
      assign(a, weakest_slice_waypoint(report_, a.state, planner_, slices_, visits_, excluded),
             "weakest");
      return;
    }
    land(a, "complete");
  }

  void next_static_task(Agent& a) {
    if (const auto w = next_waypoint_static(a.plan)) {
      a.tasks.push_back(Task{*w, cfg_.captures_per_waypoint,
                             slice_of_position(w->position, slices_), true});
      decisions_.push_back({now_, a.state.id, a.tasks.back().slice, "static", {*w}});
    }
  }

  void advance(Agent& a) {
    if (a.landed) return;
    if (a.tasks.empty()) next_static_task(a);
    if (a.tasks.empty() && planner_.mode == TrajectoryMode::Static) {
      land(a, "plan_complete");
      return;
    }
    if (!a.tasks.empty()) {
      Task& task = a.tasks.front();
      if (!a.hovering) {
        a.state = step(a.state, task.wp, cfg_.speed, cfg_.dt, deg(cfg_.yaw_rate_deg));
        const bool at_position =
            (a.state.true_pose.position - task.wp.position).norm() <= cfg_.arrival_tolerance;
        const bool at_yaw =
            std::abs(angle_difference(a.state.true_pose.yaw(), task.wp.yaw)) < deg(1.0);
        if (at_position && at_yaw) {
          if (task.captures == 0) {
            a.tasks.pop_front();
          } else {
            a.hovering = true;
            a.captures_left = task.captures;
            a.next_capture = a.state.clock;
          }
        }
      } else {
        // Hold position while hovering; the step finishes any residual offset.
        a.state = step(a.state, task.wp, cfg_.speed, cfg_.dt, deg(cfg_.yaw_rate_deg));
      }
      if (a.hovering && a.state.clock + 1e-9 >= a.next_capture) {
        if (!budget_left()) {
          land(a, "budget");
          return;
        }
        capture(a, task);
        --a.captures_left;
        a.next_capture += cfg_.capture_interval;
        if (a.captures_left == 0) {
          a.hovering = false;
          if (task.static_waypoint) ++a.static_completed;
          if (task.slice >= 0 && !task.static_waypoint) a.target_slice = -1;
          a.tasks.pop_front();
        }
      }
    } else {
      a.state.clock += cfg_.dt;
    }
    a.state.est_position = uwb_estimate(a.state.true_pose.position, a.uwb, cfg_.dt);
    flight_log_ << csv_join({r(a.state.clock), std::to_string(a.state.id),
                             r(a.state.true_pose.position.x()), r(a.state.true_pose.position.y()),
                             r(a.state.true_pose.position.z()), r(a.state.est_position.x()),
                             r(a.state.est_position.y()), r(a.state.est_position.z()),
                             r(a.state.true_pose.yaw())})
                << '\n';
  }

  void capture(const Agent& a, const Task& task) {
    Observation obs = capture_observation(target_, a.state, camera_, capture_, slices_, capture_rng_);
    obs.obs_id = static_cast<int>(observations_.size());
    obs.timestamp = a.state.clock;
    obs.logged_yaw = task.wp.yaw;
    obs = sfm_register(obs, gauge_, sfm_, sfm_rng_);
    pending_.push_back(obs);
    observations_.push_back(std::move(obs));
  }

  bool used_in_pipeline(const Observation& o) const {
    return uses_fused_poses(cfg_.mode) || o.sfm_pose.has_value();
  }

  void merge(const std::string& reason) {
    std::vector<Observation> batch = pending_;
    pending_.clear();
    std::stable_sort(batch.begin(), batch.end(), [](const Observation& x, const Observation& y) {
      return std::tie(x.uav_id, x.timestamp) < std::tie(y.uav_id, y.timestamp);
    });
    std::vector<Observation> used;
    for (const Observation& o : batch) {
      if (used_in_pipeline(o)) used.push_back(o);
    }
    const auto t0 = std::chrono::steady_clock::now();
    instant_ = merge_batch(instant_, used, voxel_);
    instant_.last_update = now_;
    const PointCloud filtered = filter_background(instant_.cloud, center_, r_max_);
    report_ = coverage_report(filtered, slices_, cluster_, threshold_);
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!calibrated_ && circle_one_done()) {
      threshold_ = calibrate_threshold(report_, cfg_.calibration_factor);
      report_ = with_threshold(report_, threshold_);
      calibrated_ = true;
    }
    CoverageEvent ev;
    ev.trigger_id = static_cast<int>(events_.size());
    ev.t = now_;
    ev.reason = reason;
    ev.batch_size = batch.size();
    ev.scores = report_.scores();
    ev.threshold = report_.threshold;
    ev.uncovered = report_.uncovered_count();
    ev.latency_s = latency;
    events_.push_back(ev);
    if (!out_dir_.empty() && cfg_.write_snapshots) {
      char name[64];
      std::snprintf(name, sizeof name, "instant_%04d.ply", ev.trigger_id);
      write_ply(out_dir_ / "snapshots" / name, instant_.cloud);
    }
  }

  bool circle_one_done() const {
    const std::size_t wpc = static_cast<std::size_t>(cfg_.waypoints_per_circle);
    if (planner_.mode == TrajectoryMode::Dynamic && cfg_.adapt_from_start) {
      return std::none_of(agents_.begin(), agents_.end(),
                          [](const Agent& a) { return !a.tasks.empty(); });
    }
    return agents_.front().static_completed >= wpc || agents_.front().landed;
  }

  MissionResult finish() {
    MissionResult res;
    res.config = cfg_;
    res.gauge = gauge_.hidden;
    res.images_taken = observations_.size();
    res.coverage_events = events_;
    res.decisions = decisions_;
    res.final_report = report_;
    res.threshold = threshold_;
    res.mission_time = now_;

    if (uses_fused_poses(cfg_.mode)) {
      const FusionResult fused = fuse_camera_poses(observations_, cfg_.fusion_mode);
      res.uwb_to_sfm = fused.uwb_to_sfm;
      for (std::size_t i = 0; i < observations_.size(); ++i) {
        append_through_pose(res.final_cloud, observations_[i], fused.poses[i].pose,
                            fused.poses[i].scale);
      }
      res.images_used = observations_.size();
    } else {
      for (const Observation& o : observations_) {
        if (!o.sfm_pose) continue;
        append_through_pose(res.final_cloud, o, *o.sfm_pose, o.sfm_scale);
        ++res.images_used;
      }
    }
    res.observations = std::move(observations_);
    if (!out_dir_.empty()) write_artifacts(res);
    return res;
  }

  void write_artifacts(const MissionResult& res) const {
    std::ostringstream obs_csv;
    obs_csv << "obs_id,uav_id,t,true_x,true_y,true_z,true_yaw,uwb_x,uwb_y,uwb_z,logged_yaw,"
               "registered,sfm_x,sfm_y,sfm_z,sfm_qw,sfm_qx,sfm_qy,sfm_qz,feature_score,slice,"
               "points\n";
    for (const Observation& o : res.observations) {
      const Vec3& p = o.true_pose.position;
      obs_csv << o.obs_id << ',' << o.uav_id << ',' << r(o.timestamp) << ',' << r(p.x()) << ','
              << r(p.y()) << ',' << r(p.z()) << ',' << r(o.true_pose.yaw()) << ','
              << r(o.uwb_position.x()) << ',' << r(o.uwb_position.y()) << ','
              << r(o.uwb_position.z()) << ',' << r(o.logged_yaw) << ','
              << (o.sfm_pose ? 1 : 0);
      if (o.sfm_pose) {
        const Eigen::Quaterniond q(o.sfm_pose->orientation);
        const Vec3& s = o.sfm_pose->position;
        obs_csv << ',' << r(s.x()) << ',' << r(s.y()) << ',' << r(s.z()) << ',' << r(q.w())
                << ',' << r(q.x()) << ',' << r(q.y()) << ',' << r(q.z());
      } else {
        obs_csv << ",,,,,,,";
      }
      obs_csv << ',' << r(o.feature_score) << ',' << o.slice_index << ',' << o.points.size()
              << '\n';
      if (cfg_.write_observations) {
        char name[64];
        std::snprintf(name, sizeof name, "obs_%05d.ply", o.obs_id);
        write_ply(out_dir_ / "observations" / name, o.points);
      }
    }
    write_text_file(out_dir_ / "observations.csv", obs_csv.str());
    write_text_file(out_dir_ / "flight_log.csv",
                    "t,uav_id,true_x,true_y,true_z,est_x,est_y,est_z,yaw\n" + flight_log_.str());

    std::ostringstream plan_csv;
    plan_csv << "t,uav_id,chosen_slice,reason\n";
    for (const PlannerDecision& d : res.decisions) {
      plan_csv << r(d.t) << ',' << d.uav_id << ',' << d.slice << ',' << d.reason << '\n';
    }
    write_text_file(out_dir_ / "planner.csv", plan_csv.str());

    std::ostringstream cov;
    cov << "trigger_id,t,reason,batch_size";
    for (int k = 0; k < cfg_.slice_count; ++k) cov << ",score_" << k;
    cov << ",threshold,uncovered,latency_s\n";
    for (const CoverageEvent& e : res.coverage_events) {
      cov << e.trigger_id << ',' << r(e.t) << ',' << e.reason << ',' << e.batch_size;
      for (std::size_t s : e.scores) cov << ',' << s;
      cov << ',' << r(e.threshold) << ',' << e.uncovered << ',' << r(e.latency_s) << '\n';
    }
    write_text_file(out_dir_ / "coverage.csv", cov.str());

    std::string transforms = "name,scale,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz\n";
    transforms += transform_row("gauge_hidden", res.gauge) + "\n";
    if (res.uwb_to_sfm) transforms += transform_row("uwb_to_sfm", *res.uwb_to_sfm) + "\n";
    write_text_file(out_dir_ / "transforms.csv", transforms);

    std::ostringstream info;
    info << "key,value\n"
         << "mode," << to_string(cfg_.mode) << '\n'
         << "object," << to_string(cfg_.object) << '\n'
         << "uav_count," << cfg_.uav_count << '\n'
         << "seed," << cfg_.seed << '\n'
         << "images_taken," << res.images_taken << '\n'
         << "images_used," << res.images_used << '\n'
         << "image_budget," << budget_ << '\n'
         << "triggers," << res.coverage_events.size() << '\n'
         << "threshold," << r(res.threshold) << '\n'
         << "uncovered_slices," << res.final_report.uncovered_count() << '\n'
         << "min_slice_score," << res.final_report.min_score() << '\n'
         << "mission_time_s," << r(res.mission_time) << '\n';
    write_text_file(out_dir_ / "run_info.csv", info.str());
    write_ply(out_dir_ / "final_cloud.ply", res.final_cloud);
  }

  MissionConfig cfg_;
  fs::path out_dir_;
  SceneObject object_;
  ScanTarget target_;
  Rng capture_rng_;
  Rng sfm_rng_;
  Vec3 center_;
  SliceModel slices_;
  PlannerConfig planner_;
  Camera camera_;
  CaptureSettings capture_;
  SfmFailureModel sfm_;
  GaugeTransform gauge_;
  double voxel_ = 0.0;
  double r_max_ = 0.0;
  ClusterParams cluster_;
  double threshold_ = 0.0;
  bool calibrated_ = false;
  VisitCounts visits_;
  std::vector<Agent> agents_;
  std::size_t static_plan_size_ = 0;
  std::size_t budget_ = 0;
  double now_ = 0.0;
  std::vector<Observation> observations_;
  std::vector<Observation> pending_;
  InstantCloud instant_;
  SliceCoverageReport report_;
  std::vector<CoverageEvent> events_;
  std::vector<PlannerDecision> decisions_;
  std::ostringstream flight_log_;
};

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma != std::string::npos) out[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return out;
}

std::vector<double> read_latencies(const fs::path& path) {
  std::vector<double> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.rfind(',');
    if (comma != std::string::npos) out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace

SceneObject build_scene(const MissionConfig& cfg) {
  SceneObject obj = cfg.object == ObjectKind::EngravedBox
                        ? build_engraved_box(cfg.box_dims, cfg.engraving_depth,
                                             derive_seed(cfg.seed, kObjectStream))
                        : build_tall_object(cfg.tall_height, cfg.tall_radius, cfg.tall_feature);
  const Mat3 rot = yaw_rotation(deg(cfg.object_yaw_deg));
  const Vec3 offset(0.0, 0.0, cfg.object_height);
  for (Triangle& t : obj.triangles) {
    t.a = rot * t.a + offset;
    t.b = rot * t.b + offset;
    t.c = rot * t.c + offset;
  }
  return obj;
}

std::vector<double> MissionResult::merge_latencies() const {
  std::vector<double> out;
  for (const CoverageEvent& e : coverage_events) out.push_back(e.latency_s);
  return out;
}

MissionResult run_mission(const MissionConfig& cfg, const fs::path& out_dir,
                          const std::string& config_text) {
  cfg.validate();
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    write_text_file(out_dir / "config.ini", config_text.empty() ? format_config(cfg) : config_text);
    write_text_file(out_dir / "resolved_config.ini", format_config(cfg));
  }
  MissionRunner runner(cfg, out_dir);
  return runner.run();
}

EvaluationResult evaluate_reconstruction(const MissionConfig& cfg,
                                         const PointCloud& reconstruction,
                                         const std::vector<double>& merge_latencies,
                                         std::size_t images_taken, std::size_t images_used) {
  if (reconstruction.empty()) throw IncompleteRun("final cloud is empty");
  const SceneObject obj = build_scene(cfg);
  EvaluationResult ev;
  ev.reference = sample_surface(obj, cfg.reference_samples, derive_seed(cfg.seed, kReferenceStream));
  ev.alignment = align_clouds(reconstruction, ev.reference);
  ev.aligned = apply_similarity(ev.alignment.transform, reconstruction);

  SummaryInputs in;
  in.approach = to_string(cfg.mode);
  in.reference = ev.reference;
  in.reconstruction = ev.aligned;
  in.merge_latencies = merge_latencies;
  in.images_taken = images_taken;
  in.images_used = images_used;
  const Vec3 center(0.0, 0.0, cfg.object_height);
  in.ring = virtual_camera_ring(center, cfg.ring_radius, cfg.ring_count, deg(cfg.ring_fov_deg),
                                cfg.ring_resolution, cfg.ring_radius + obj.bounds().diagonal());
  in.render_mode = cfg.camera_mode == CameraMode::Rgb ? RenderMode::FeatureIntensity
                                                      : RenderMode::Intensity;
  in.splat_px = cfg.splat_px;
  in.wd_points = cfg.wd_points;
  in.seed = derive_seed(cfg.seed, kMetricStream);
  ev.summary = summarize_run(in);
  return ev;
}

EvaluationResult evaluate_mission(const MissionResult& result) {
  return evaluate_reconstruction(result.config, result.final_cloud, result.merge_latencies(),
                                 result.images_taken, result.images_used);
}

RunSummary evaluate_run(const fs::path& run_dir) {
  const fs::path cloud_path = run_dir / "final_cloud.ply";
  if (!fs::exists(cloud_path)) throw IncompleteRun("missing " + cloud_path.string());
  if (!fs::exists(run_dir / "resolved_config.ini") || !fs::exists(run_dir / "run_info.csv")) {
    throw IncompleteRun("run directory " + run_dir.string() + " is incomplete");
  }
  const MissionConfig cfg = load_config(run_dir / "resolved_config.ini");
  const auto info = read_key_values(run_dir / "run_info.csv");
  const auto count = [&](const char* key) -> std::size_t {
    const auto it = info.find(key);
    if (it == info.end()) throw IncompleteRun(std::string("run_info.csv lacks ") + key);
    return static_cast<std::size_t>(std::stoull(it->second));
  };
  const std::vector<double> latencies = fs::exists(run_dir / "coverage.csv")
                                            ? read_latencies(run_dir / "coverage.csv")
                                            : std::vector<double>{};
  const EvaluationResult ev = evaluate_reconstruction(cfg, read_ply(cloud_path), latencies,
                                                      count("images_taken"), count("images_used"));
  write_ply(run_dir / "reference.ply", ev.reference);
  write_ply(run_dir / "aligned_cloud.ply", ev.aligned);
  write_text_file(run_dir / "alignment.csv",
                  "name,scale,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz\n" +
                      transform_row("final_to_reference", ev.alignment.transform) + "\n");
  write_text_file(run_dir / "summary.csv",
                  summary_csv_header() + "\n" + summary_csv_row(ev.summary) + "\n");
  if (cfg.write_views) {
    const Vec3 center(0.0, 0.0, cfg.object_height);
    const auto ring = virtual_camera_ring(center, cfg.ring_radius, cfg.ring_count,
                                          deg(cfg.ring_fov_deg), cfg.ring_resolution,
                                          cfg.ring_radius + aabb(ev.reference).diagonal());
    const RenderMode mode = cfg.camera_mode == CameraMode::Rgb ? RenderMode::FeatureIntensity
                                                               : RenderMode::Intensity;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "ref_%02zu.pgm", i);
      write_pgm(run_dir / "views" / name, render_view(ev.reference, ring[i], mode, cfg.splat_px));
      std::snprintf(name, sizeof name, "rec_%02zu.pgm", i);
      write_pgm(run_dir / "views" / name, render_view(ev.aligned, ring[i], mode, cfg.splat_px));
    }
  }
  return ev.summary;
}

}  // namespace scanplan
