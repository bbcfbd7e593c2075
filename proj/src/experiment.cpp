#include "scanplan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "scanplan/error.hpp"
#include "scanplan/mission.hpp"
#include "scanplan/ply.hpp"

namespace scanplan {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw BadConfig("bad seed '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw BadConfig("bad seed '" + s + "'");
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_seed(item));
      continue;
    }
    const std::uint64_t lo = parse_seed(item.substr(0, dash));
    const std::uint64_t hi = parse_seed(item.substr(dash + 1));
    if (hi < lo) throw BadConfig("empty seed range " + item);
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

// Parses each list item through the config setter for `key`.
template <typename T>
std::vector<T> parse_axis(const std::string& text, const char* key,
                          T (*read)(const MissionConfig&)) {
  std::vector<T> out;
  for (const std::string& item : split_list(text)) {
    MissionConfig c;
    set_config_value(c, key, item);
    out.push_back(read(c));
  }
  return out;
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(v.size()));
  return s;
}

std::vector<std::pair<std::string, double>> numeric_fields(const RunSummary& s) {
  return {{"psnr_db", s.psnr_db},
          {"ssim_mean", s.ssim_mean},
          {"ssim_std", s.ssim_std},
          {"hd_m", s.hd_m},
          {"wd_m", s.wd_m},
          {"latency_mean_s", s.latency_mean_s},
          {"latency_std_s", s.latency_std_s},
          {"images_taken", static_cast<double>(s.images_taken)},
          {"images_used", static_cast<double>(s.images_used)}};
}

}  // namespace

std::vector<MissionConfig> MatrixSpec::cells() const {
  std::vector<MissionConfig> out;
  for (ObjectKind object : objects) {
    for (CameraMode camera : camera_modes) {
      for (int uavs : uav_counts) {
        for (MissionMode mode : modes) {
          for (std::uint64_t seed : seeds) {
            MissionConfig c = base;
            c.object = object;
            c.camera_mode = camera;
            c.uav_count = uavs;
            c.mode = mode;
            c.seed = seed;
            c.validate();
            out.push_back(c);
          }
        }
      }
    }
  }
  return out;
}

MatrixSpec parse_matrix_spec(const std::string& text, const fs::path& base_dir) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw BadConfig(std::string("malformed matrix spec: ") + e.what());
  }
  const auto matrix = tree.get_child_optional("matrix");
  if (!matrix || matrix->empty()) throw BadConfig("matrix spec has no [matrix] section");
  for (const auto& [section, body] : tree) {
    if (section != "matrix" && section != "override") {
      throw BadConfig("unknown matrix spec section [" + section + "]");
    }
  }

  MatrixSpec spec;
  if (const auto base = matrix->get_optional<std::string>("base")) {
    spec.base = load_config(base_dir / *base);
  }
  if (const auto overrides = tree.get_child_optional("override")) {
    for (const auto& [key, value] : *overrides) {
      set_config_value(spec.base, key, value.get_value<std::string>());
    }
    spec.base.validate();
  }
  for (const auto& [key, value] : *matrix) {
    const std::string v = value.get_value<std::string>();
    if (key == "base") continue;
    if (key == "modes") {
      spec.modes = parse_axis<MissionMode>(v, "mission.mode",
                                           [](const MissionConfig& c) { return c.mode; });
    } else if (key == "uav_counts") {
      spec.uav_counts = parse_axis<int>(v, "mission.uav_count",
                                        [](const MissionConfig& c) { return c.uav_count; });
    } else if (key == "objects") {
      spec.objects = parse_axis<ObjectKind>(v, "mission.object",
                                            [](const MissionConfig& c) { return c.object; });
    } else if (key == "camera_modes") {
      spec.camera_modes = parse_axis<CameraMode>(
          v, "mission.camera_mode", [](const MissionConfig& c) { return c.camera_mode; });
    } else if (key == "seeds") {
      spec.seeds = parse_seeds(v);
    } else {
      throw BadConfig("unknown matrix key " + key);
    }
  }
  if (spec.modes.empty()) spec.modes = {spec.base.mode};
  if (spec.uav_counts.empty()) spec.uav_counts = {spec.base.uav_count};
  if (spec.objects.empty()) spec.objects = {spec.base.object};
  if (spec.camera_modes.empty()) spec.camera_modes = {spec.base.camera_mode};
  if (spec.seeds.empty()) throw BadConfig("matrix spec lists no seeds");
  for (int u : spec.uav_counts) {
    if (u != 1 && u != 2) throw BadConfig("uav count must be 1 or 2");
  }
  return spec;
}

MatrixSpec load_matrix_spec(const fs::path& path) {
  return parse_matrix_spec(read_text_file(path), path.parent_path());
}

std::string cell_name(const MissionConfig& cfg) {
  return to_string(cfg.object) + "_" + to_string(cfg.mode) + "_" + std::to_string(cfg.uav_count) +
         "uav_" + to_string(cfg.camera_mode);
}

std::vector<MatrixRow> run_matrix(const MatrixSpec& spec, const fs::path& out_dir, int jobs) {
  const std::vector<MissionConfig> cells = spec.cells();
  if (cells.empty()) throw BadConfig("matrix has no cells");
  std::vector<MatrixRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const MissionConfig& cfg = cells[i];
      MatrixRow& row = rows[i];
      row.cell = cell_name(cfg);
      row.seed = cfg.seed;
      const fs::path dir = out_dir / row.cell / ("seed_" + std::to_string(cfg.seed));
      try {
        run_mission(cfg, dir);
        row.summary = evaluate_run(dir);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::ostringstream csv;
  csv << "cell,seed," << summary_csv_header() << ",error\n";
  for (const MatrixRow& row : rows) {
    csv << row.cell << ',' << row.seed << ',';
    if (row.summary) {
      csv << summary_csv_row(*row.summary) << ',';
    } else {
      csv << ",,,,,,,,,,,";
    }
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    csv << err << '\n';
  }
  write_text_file(out_dir / "matrix.csv", csv.str());
  write_text_file(out_dir / "aggregate.csv", aggregate_csv(rows));
  return rows;
}

std::string aggregate_csv(const std::vector<MatrixRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunSummary*>> groups;
  std::map<std::string, std::size_t> failures;
  for (const MatrixRow& row : rows) {
    if (!groups.count(row.cell)) order.push_back(row.cell);
    auto& g = groups[row.cell];
    if (row.summary) {
      g.push_back(&*row.summary);
    } else {
      ++failures[row.cell];
    }
  }
  std::ostringstream out;
  out << "cell,runs,failed";
  for (const auto& [name, _] : numeric_fields(RunSummary{})) out << ',' << name << "_mean," << name << "_std";
  out << '\n';
  for (const std::string& cell : order) {
    const auto& g = groups[cell];
    out << cell << ',' << g.size() << ',' << failures[cell];
    const std::size_t nf = numeric_fields(RunSummary{}).size();
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<double> v;
      for (const RunSummary* s : g) v.push_back(numeric_fields(*s)[f].second);
      const Stats st = stats(v);
      out << ',' << format_real(st.mean) << ',' << format_real(st.std);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_report(const fs::path& out_dir) {
  const fs::path path = out_dir / "matrix.csv";
  if (!fs::exists(path)) throw IncompleteRun("no matrix.csv in " + out_dir.string());
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<MatrixRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    while (f.size() < 14) f.emplace_back();
    MatrixRow row;
    row.cell = f[0];
    row.seed = std::stoull(f[1]);
    row.error = f[13];
    if (!f[2].empty() && row.error.empty()) {
      RunSummary s;
      s.approach = f[2];
      s.psnr_db = std::stod(f[3]);
      s.ssim_mean = std::stod(f[4]);
      s.ssim_std = std::stod(f[5]);
      s.lpips = f[6];
      s.hd_m = std::stod(f[7]);
      s.wd_m = std::stod(f[8]);
      s.latency_mean_s = std::stod(f[9]);
      s.latency_std_s = std::stod(f[10]);
      s.images_taken = std::stoull(f[11]);
      s.images_used = std::stoull(f[12]);
      row.summary = s;
    }
    rows.push_back(row);
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<RunSummary>> groups;
  for (const MatrixRow& r : rows) {
    if (!groups.count(r.cell)) order.push_back(r.cell);
    if (r.summary) groups[r.cell].push_back(*r.summary);
    else groups[r.cell];
  }
  std::ostringstream out;
  out << std::left << std::setw(40) << "cell" << std::right << std::setw(6) << "runs"
      << std::setw(16) << "PSNR dB" << std::setw(18) << "SSIM" << std::setw(7) << "LPIPS"
      << std::setw(18) << "HD m" << std::setw(18) << "WD m" << std::setw(20) << "latency s"
      << std::setw(10) << "taken" << std::setw(10) << "used" << '\n';
  const auto pm = [](const std::vector<double>& v, int prec) {
    const Stats s = stats(v);
    std::ostringstream o;
    o << std::fixed << std::setprecision(prec) << s.mean << "+-" << s.std;
    return o.str();
  };
  for (const std::string& cell : order) {
    const auto& g = groups[cell];
    std::vector<double> psnr, ssim, hd, wd, lat, taken, used;
    for (const RunSummary& s : g) {
      psnr.push_back(s.psnr_db);
      ssim.push_back(s.ssim_mean);
      hd.push_back(s.hd_m);
      wd.push_back(s.wd_m);
      lat.push_back(s.latency_mean_s);
      taken.push_back(static_cast<double>(s.images_taken));
      used.push_back(static_cast<double>(s.images_used));
    }
    out << std::left << std::setw(40) << cell << std::right << std::setw(6) << g.size()
        << std::setw(16) << pm(psnr, 2) << std::setw(18) << pm(ssim, 3) << std::setw(7) << "n/a"
        << std::setw(18) << pm(hd, 4) << std::setw(18) << pm(wd, 4) << std::setw(20)
        << pm(lat, 4) << std::setw(10) << std::fixed << std::setprecision(1) << stats(taken).mean
        << std::setw(10) << stats(used).mean << '\n';
  }
  return out.str();
}

}  // namespace scanplan
