// Brute-force reference computations shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "graspkit/geometry.hpp"
#include "graspkit/synthesis.hpp"

namespace oracle {

using graspkit::Mask;
using graspkit::Vec3;

// Distance from each in-mask pixel to the nearest background pixel, where the
// ring just outside the image is background.
inline graspkit::Image<double> edge_distance(const Mask& m) {
  const int w = m.width();
  const int h = m.height();
  graspkit::Image<double> out(w, h, 0.0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!m(u, v)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int y = -1; y <= h; ++y) {
        for (int x = -1; x <= w; ++x) {
          const bool inside = x >= 0 && y >= 0 && x < w && y < h;
          if (inside && m(x, y)) continue;
          best = std::min(best, std::hypot(double(x - u), double(y - v)));
        }
      }
      out(u, v) = best;
    }
  }
  return out;
}

inline Vec3 mean(const std::vector<Vec3>& pts) {
  double x = 0, y = 0, z = 0;
  for (const auto& p : pts) {
    x += p.x();
    y += p.y();
    z += p.z();
  }
  const double n = static_cast<double>(pts.size());
  return Vec3(x / n, y / n, z / n);
}

// Rotation about a random axis, from a fixed generator.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline double angle(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
}

// Axis-aligned angle ignoring sign.
inline double axis_angle(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0));
}

}  // namespace oracle
