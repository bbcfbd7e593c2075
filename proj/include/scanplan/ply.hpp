#pragma once

#include <filesystem>
#include <string>

#include "scanplan/geometry.hpp"

namespace scanplan {

struct SceneObject;

// ASCII PLY with one `comment scanplan` header line. Vertices carry x y z,
// then nx ny nz when the cloud has normals, then `feature` when it has
// feature strengths. Numbers are printed with a fixed format so identical
// clouds produce identical files.
std::string to_ply(const PointCloud& cloud);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

// Reads ASCII PLY vertex data. Unknown vertex properties are ignored; faces
// and other elements are skipped. Throws IoError on malformed input.
PointCloud parse_ply(const std::string& text);
PointCloud read_ply(const std::filesystem::path& path);

// Triangulated object export (vertex + face elements, no shared vertices).
void write_mesh_ply(const std::filesystem::path& path, const SceneObject& obj);

// Shared text helpers.
std::string format_real(double v);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace scanplan
