#pragma once

#include <filesystem>
#include <variant>
#include <vector>

#include "scanplan/geometry.hpp"
#include "scanplan/scene.hpp"

namespace scanplan {

// Row-major grey image with values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int w, int h, double fill = 0.0);
  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// `count` cameras evenly spaced on a horizontal circle about `center`, all
// at the centre's height and looking at it. The first sits at azimuth 0.
std::vector<Camera> virtual_camera_ring(const Vec3& center, double radius, int count,
                                        double fov_rad, int resolution, double max_range);

enum class RenderMode {
  Depth,             // distance / max_range, background 1
  Intensity,         // |normal . view direction|, background 0
  FeatureIntensity,  // Intensity scaled by 0.5 + 0.5 * feature strength
};

// Z-buffered point splatting: every visible point paints a disk of radius
// splat_px around the pixel it projects into; the nearest point wins.
Image render_view(const PointCloud& cloud, const Camera& camera, RenderMode mode,
                  int splat_px = 2);

struct UnsharpMask {
  int radius = 2;  // box blur half-width
  double amount = 1.0;
};
struct HistogramEqualize {};
struct Gamma {
  double gamma = 1.0;
};
using ImageOp = std::variant<UnsharpMask, HistogramEqualize, Gamma>;

// Applies the operations in order; results are clamped to [0, 1].
Image preprocess_image(const Image& image, const std::vector<ImageOp>& ops);

// ASCII PGM (P2), maxval 255.
void write_pgm(const std::filesystem::path& path, const Image& image);

}  // namespace scanplan
