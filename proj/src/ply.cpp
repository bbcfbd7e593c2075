#include "scanplan/ply.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "scanplan/error.hpp"
#include "scanplan/scene.hpp"

namespace scanplan {

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // folds -0 into 0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string to_ply(const PointCloud& cloud) {
  cloud.validate();
  std::string s;
  s.reserve(64 + cloud.size() * 96);
  s += "ply\nformat ascii 1.0\ncomment scanplan\n";
  s += "element vertex " + std::to_string(cloud.size()) + "\n";
  s += "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals()) {
    s += "property double nx\nproperty double ny\nproperty double nz\n";
  }
  if (cloud.has_features()) s += "property double feature\n";
  s += "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    s += format_real(p.x()) + ' ' + format_real(p.y()) + ' ' + format_real(p.z());
    if (cloud.has_normals()) {
      const Vec3& n = cloud.normals[i];
      s += ' ' + format_real(n.x()) + ' ' + format_real(n.y()) + ' ' + format_real(n.z());
    }
    if (cloud.has_features()) s += ' ' + format_real(cloud.feature_strength[i]);
    s += '\n';
  }
  return s;
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  write_text_file(path, to_ply(cloud));
}

PointCloud parse_ply(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw IoError("not a PLY file");
  }

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> props;
    bool has_list = false;
  };
  std::vector<Element> elements;
  bool ascii = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = (fmt == "ascii");
    } else if (word == "element") {
      Element e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (word == "property") {
      if (elements.empty()) throw IoError("PLY property before element");
      std::string type;
      ls >> type;
      if (type == "list") {
        elements.back().has_list = true;
        std::string a, b;
        ls >> a >> b;
      }
      std::string name;
      ls >> name;
      elements.back().props.push_back(name);
    } else if (word == "end_header") {
      break;
    }
  }
  if (!ascii) throw IoError("only ASCII PLY is supported");

  PointCloud cloud;
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!std::getline(in, line)) throw IoError("truncated PLY element data");
      }
      continue;
    }
    int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1, ifeat = -1;
    for (int k = 0; k < static_cast<int>(e.props.size()); ++k) {
      const std::string& p = e.props[static_cast<std::size_t>(k)];
      if (p == "x") ix = k;
      if (p == "y") iy = k;
      if (p == "z") iz = k;
      if (p == "nx") inx = k;
      if (p == "ny") iny = k;
      if (p == "nz") inz = k;
      if (p == "feature") ifeat = k;
    }
    if (ix < 0 || iy < 0 || iz < 0) throw IoError("PLY vertex lacks x y z");
    const bool normals = inx >= 0 && iny >= 0 && inz >= 0;
    cloud.points.reserve(e.count);
    std::vector<double> vals(e.props.size());
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!std::getline(in, line)) throw IoError("truncated PLY vertex data");
      const char* cur = line.data();
      const char* end = line.data() + line.size();
      for (double& v : vals) {
        while (cur < end && (*cur == ' ' || *cur == '\t')) ++cur;
        const auto [next, ec] = std::from_chars(cur, end, v);
        if (ec != std::errc()) throw IoError("malformed PLY vertex line");
        cur = next;
      }
      cloud.points.emplace_back(vals[static_cast<std::size_t>(ix)],
                                vals[static_cast<std::size_t>(iy)],
                                vals[static_cast<std::size_t>(iz)]);
      if (normals) {
        cloud.normals.emplace_back(vals[static_cast<std::size_t>(inx)],
                                   vals[static_cast<std::size_t>(iny)],
                                   vals[static_cast<std::size_t>(inz)]);
      }
      if (ifeat >= 0) cloud.feature_strength.push_back(vals[static_cast<std::size_t>(ifeat)]);
    }
  }
  // Printed normals lose a few ulps of unit length.
  for (Vec3& n : cloud.normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return cloud;
}

PointCloud read_ply(const std::filesystem::path& path) {
  try {
    return parse_ply(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_mesh_ply(const std::filesystem::path& path, const SceneObject& obj) {
  std::string s = "ply\nformat ascii 1.0\ncomment scanplan\n";
  s += "element vertex " + std::to_string(obj.triangles.size() * 3) + "\n";
  s += "property double x\nproperty double y\nproperty double z\n";
  s += "element face " + std::to_string(obj.triangles.size()) + "\n";
  s += "property list uchar int vertex_indices\nend_header\n";
  for (const Triangle& t : obj.triangles) {
    for (const Vec3& v : {t.a, t.b, t.c}) {
      s += format_real(v.x()) + ' ' + format_real(v.y()) + ' ' + format_real(v.z()) + '\n';
    }
  }
  for (std::size_t i = 0; i < obj.triangles.size(); ++i) {
    s += "3 " + std::to_string(3 * i) + ' ' + std::to_string(3 * i + 1) + ' ' +
         std::to_string(3 * i + 2) + '\n';
  }
  write_text_file(path, s);
}

}  // namespace scanplan
