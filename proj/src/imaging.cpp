#include "scanplan/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "scanplan/error.hpp"
#include "scanplan/ply.hpp"

namespace scanplan {

Image::Image(int w, int h, double fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw BadConfig("image dimensions must be positive");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

std::vector<Camera> virtual_camera_ring(const Vec3& center, double radius, int count,
                                        double fov_rad, int resolution, double max_range) {
  if (count < 1 || radius <= 0.0) throw BadConfig("camera ring needs count >= 1 and radius > 0");
  std::vector<Camera> ring;
  ring.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double az = kTwoPi * i / count;
    const Vec3 eye = center + radius * Vec3(std::cos(az), std::sin(az), 0.0);
    Camera cam;
    cam.pose = Pose::looking_at(eye, center);
    cam.hfov = fov_rad;
    cam.vfov = fov_rad;
    cam.width = resolution;
    cam.height = resolution;
    cam.max_range = max_range;
    cam.validate();
    ring.push_back(cam);
  }
  return ring;
}

Image render_view(const PointCloud& cloud, const Camera& camera, RenderMode mode,
                  int splat_px) {
  camera.validate();
  if (splat_px < 0) throw BadConfig("splat radius must be non-negative");
  if (mode != RenderMode::Depth && !cloud.has_normals()) {
    throw BadConfig("intensity rendering needs normals");
  }
  const double background = mode == RenderMode::Depth ? 1.0 : 0.0;
  Image img(camera.width, camera.height, background);
  std::vector<double> zbuf(img.pixels.size(), std::numeric_limits<double>::infinity());
  const Vec3 eye = camera.pose.position;
  const int r2 = splat_px * splat_px;
  const double tan_h = std::tan(camera.hfov / 2.0);
  const double tan_v = std::tan(camera.vfov / 2.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    // Same projection as Camera::project with the tangents hoisted.
    const Vec3 local = camera.pose.to_local(p);
    if (local.x() <= 1e-12) continue;
    const double u = (-local.y() / local.x() / tan_h + 1.0) * 0.5 * camera.width;
    const double v = (-local.z() / local.x() / tan_v + 1.0) * 0.5 * camera.height;
    if (u < -splat_px - 1 || v < -splat_px - 1 || u > img.width + splat_px + 1 ||
        v > img.height + splat_px + 1) {
      continue;
    }
    const Vec3 ray = p - eye;
    const double dist = ray.norm();
    if (dist > camera.max_range) continue;
    double value = 0.0;
    switch (mode) {
      case RenderMode::Depth:
        value = dist / camera.max_range;
        break;
      case RenderMode::Intensity:
        value = std::abs(cloud.normals[i].dot(ray) / dist);
        break;
      case RenderMode::FeatureIntensity: {
        const double f = cloud.has_features() ? cloud.feature_strength[i] : 0.0;
        value = std::abs(cloud.normals[i].dot(ray) / dist) * (0.5 + 0.5 * f);
        break;
      }
    }
    const int cx = static_cast<int>(std::floor(u));
    const int cy = static_cast<int>(std::floor(v));
    for (int dy = -splat_px; dy <= splat_px; ++dy) {
      const int y = cy + dy;
      if (y < 0 || y >= img.height) continue;
      for (int dx = -splat_px; dx <= splat_px; ++dx) {
        const int x = cx + dx;
        if (x < 0 || x >= img.width || dx * dx + dy * dy > r2) continue;
        const std::size_t k = static_cast<std::size_t>(y) * img.width + x;
        if (dist < zbuf[k]) {
          zbuf[k] = dist;
          img.pixels[k] = std::clamp(value, 0.0, 1.0);
        }
      }
    }
  }
  return img;
}

namespace {

Image box_blur(const Image& in, int radius) {
  // Separable box filter with clamped borders.
  Image tmp = in, out = in;
  const int n = 2 * radius + 1;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d) s += in.at(std::clamp(x + d, 0, in.width - 1), y);
      tmp.at(x, y) = s / n;
    }
  }
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d) s += tmp.at(x, std::clamp(y + d, 0, in.height - 1));
      out.at(x, y) = s / n;
    }
  }
  return out;
}

void apply(Image& img, const UnsharpMask& op) {
  if (op.radius < 1) throw BadConfig("unsharp mask radius must be >= 1");
  const Image blurred = box_blur(img, op.radius);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] += op.amount * (img.pixels[i] - blurred.pixels[i]);
  }
}

void apply(Image& img, const HistogramEqualize&) {
  constexpr int kBins = 256;
  const auto bin = [](double v) {
    return std::clamp(static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * kBins)), 0, kBins - 1);
  };
  std::array<double, kBins> cdf{};
  for (double v : img.pixels) cdf[static_cast<std::size_t>(bin(v))] += 1.0;
  double acc = 0.0;
  const double n = static_cast<double>(img.pixels.size());
  for (double& c : cdf) {
    acc += c;
    c = acc / n;
  }
  for (double& v : img.pixels) v = cdf[static_cast<std::size_t>(bin(v))];
}

void apply(Image& img, const Gamma& op) {
  if (op.gamma <= 0.0) throw BadConfig("gamma must be positive");
  for (double& v : img.pixels) v = std::pow(std::clamp(v, 0.0, 1.0), op.gamma);
}

}  // namespace

Image preprocess_image(const Image& image, const std::vector<ImageOp>& ops) {
  if (image.pixels.empty()) throw EmptyInput("preprocess_image: empty image");
  Image out = image;
  for (const ImageOp& op : ops) {
    std::visit([&](const auto& o) { apply(out, o); }, op);
    for (double& v : out.pixels) v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
  std::ostringstream os;
  os << "P2\n" << image.width << ' ' << image.height << "\n255\n";
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const long v = std::lround(std::clamp(image.at(x, y), 0.0, 1.0) * 255.0);
      os << v << (x + 1 == image.width ? '\n' : ' ');
    }
  }
  write_text_file(path, os.str());
}

}  // namespace scanplan
