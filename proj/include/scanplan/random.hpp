#pragma once

#include <cstdint>
#include <random>

#include "scanplan/geometry.hpp"

namespace scanplan {

// All stochastic code takes an explicit engine so a seed fixes every stream.
using Rng = std::mt19937_64;

// Derives an independent stream from a base seed and a stream tag.
inline Rng make_stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

inline Vec3 gaussian_vec(Rng& rng, double sigma) {
  if (sigma <= 0.0) return Vec3::Zero();
  std::normal_distribution<double> n(0.0, sigma);
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return {x, y, z};
}

inline Vec3 unit_vector(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const double x = n(rng);
    const double y = n(rng);
    const double z = n(rng);
    const Vec3 v(x, y, z);
    const double len = v.norm();
    if (len > 1e-12) return v / len;
  }
}

// Uniformly distributed rotation (normalized Gaussian quaternion).
inline Mat3 random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const double w = n(rng);
    const double x = n(rng);
    const double y = n(rng);
    const double z = n(rng);
    Eigen::Quaterniond q(w, x, y, z);
    if (q.norm() > 1e-12) return q.normalized().toRotationMatrix();
  }
}

}  // namespace scanplan
