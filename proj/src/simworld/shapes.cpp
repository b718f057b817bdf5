#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "graspkit/error.hpp"
#include "graspkit/simworld.hpp"

namespace graspkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> parse_dims(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('x', start);
    const std::string part(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "bad " + std::string(what) + " dimension '" + part + "'");
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Shape parse_shape(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::kParseError, "shape must be <kind>:<dims>");
  const std::string_view kind = text.substr(0, colon);
  const auto dims = parse_dims(text.substr(colon + 1), kind);
  auto expect = [&](std::size_t n) {
    if (dims.size() != n) {
      throw Error(ErrorCode::kParseError,
                  std::string(kind) + " takes " + std::to_string(n) + " dimensions, got " + std::to_string(dims.size()));
    }
    for (double d : dims) {
      if (!(d > 0.0)) throw Error(ErrorCode::kInvariantViolation, "shape dimensions must be positive");
    }
  };
  if (kind == "box") {
    expect(3);
    return Box{dims[0], dims[1], dims[2]};
  }
  if (kind == "cylinder") {
    expect(2);
    return Cylinder{dims[0], dims[1]};
  }
  if (kind == "sphere") {
    expect(1);
    return Sphere{dims[0]};
  }
  throw Error(ErrorCode::kParseError, "unknown shape kind '" + std::string(kind) + "'");
}

std::string format_shape(const Shape& shape) {
  char buf[160];
  std::visit(overloaded{
                 [&](const Box& b) { std::snprintf(buf, sizeof buf, "box:%.17gx%.17gx%.17g", b.w, b.d, b.h); },
                 [&](const Cylinder& c) { std::snprintf(buf, sizeof buf, "cylinder:%.17gx%.17g", c.r, c.h); },
                 [&](const Sphere& s) { std::snprintf(buf, sizeof buf, "sphere:%.17g", s.r); },
             },
             shape);
  return buf;
}

Aabb bounds(const SimObject& object) {
  const Eigen::Matrix3d R = object.pose.linear();
  const Vec3 c = object.pose.translation();
  Vec3 half = std::visit(
      overloaded{
          [&](const Box& b) -> Vec3 { return R.cwiseAbs() * Vec3(b.w / 2, b.d / 2, b.h / 2); },
          [&](const Cylinder& cyl) -> Vec3 {
            const Vec3 axis = R.col(2);
            Vec3 h;
            for (int i = 0; i < 3; ++i) {
              h[i] = std::abs(axis[i]) * cyl.h / 2 + cyl.r * std::sqrt(std::max(0.0, 1.0 - axis[i] * axis[i]));
            }
            return h;
          },
          [&](const Sphere& s) -> Vec3 { return Vec3::Constant(s.r); },
      },
      object.shape);
  return {c - half, c + half};
}

namespace {

// Smallest positive root pair handling for a*t^2 + 2*b*t + c = 0.
bool solve_quadratic(double a, double b, double c, double& t0, double& t1) {
  if (a <= 0.0) return false;
  const double disc = b * b - a * c;
  if (disc < 0.0) return false;
  const double s = std::sqrt(disc);
  t0 = (-b - s) / a;
  t1 = (-b + s) / a;
  return true;
}

constexpr double kMinT = 1e-9;

}  // namespace

std::optional<RayHit> raycast(const SimObject& object, const Vec3& origin, const Vec3& dir) {
  const Eigen::Matrix3d R = object.pose.linear();
  const Vec3 o = R.transpose() * (origin - object.pose.translation());
  const Vec3 d = R.transpose() * dir;

  double best_t = std::numeric_limits<double>::infinity();
  Vec3 best_n = Vec3::Zero();
  auto consider = [&](double t, const Vec3& n) {
    if (t > kMinT && t < best_t) {
      best_t = t;
      best_n = n;
    }
  };

  std::visit(overloaded{
                 [&](const Box& b) {
                   const Vec3 half(b.w / 2, b.d / 2, b.h / 2);
                   double t_near = -std::numeric_limits<double>::infinity();
                   double t_far = std::numeric_limits<double>::infinity();
                   int axis = -1;
                   for (int i = 0; i < 3; ++i) {
                     if (d[i] == 0.0) {
                       if (std::abs(o[i]) > half[i]) return;
                       continue;
                     }
                     double t0 = (-half[i] - o[i]) / d[i];
                     double t1 = (half[i] - o[i]) / d[i];
                     if (t0 > t1) std::swap(t0, t1);
                     if (t0 > t_near) {
                       t_near = t0;
                       axis = i;
                     }
                     t_far = std::min(t_far, t1);
                   }
                   if (axis < 0 || t_near > t_far) return;
                   Vec3 n = Vec3::Zero();
                   n[axis] = d[axis] > 0.0 ? -1.0 : 1.0;
                   consider(t_near, n);
                 },
                 [&](const Cylinder& c) {
                   double t0 = 0.0;
                   double t1 = 0.0;
                   const double a = d.x() * d.x() + d.y() * d.y();
                   const double bq = o.x() * d.x() + o.y() * d.y();
                   const double cq = o.x() * o.x() + o.y() * o.y() - c.r * c.r;
                   if (solve_quadratic(a, bq, cq, t0, t1)) {
                     const Vec3 p = o + t0 * d;
                     if (std::abs(p.z()) <= c.h / 2) consider(t0, Vec3(p.x(), p.y(), 0.0).normalized());
                   }
                   if (d.z() != 0.0) {
                     for (double zc : {-c.h / 2, c.h / 2}) {
                       const double t = (zc - o.z()) / d.z();
                       const Vec3 p = o + t * d;
                       // Only the cap facing the ray is an entry face.
                       if (p.x() * p.x() + p.y() * p.y() <= c.r * c.r && d.z() * zc < 0.0) {
                         consider(t, Vec3(0, 0, zc > 0 ? 1.0 : -1.0));
                       }
                     }
                   }
                 },
                 [&](const Sphere& s) {
                   double t0 = 0.0;
                   double t1 = 0.0;
                   if (solve_quadratic(d.dot(d), o.dot(d), o.dot(o) - s.r * s.r, t0, t1)) {
                     consider(t0, (o + t0 * d).normalized());
                   }
                 },
             },
             object.shape);

  if (!std::isfinite(best_t)) return std::nullopt;
  RayHit hit;
  hit.t = best_t;
  hit.point = origin + best_t * dir;
  hit.normal = R * best_n;
  hit.label = object.label;
  return hit;
}

std::optional<RayHit> raycast(const SceneSpec& scene, const Vec3& origin, const Vec3& dir) {
  std::optional<RayHit> best;
  for (const auto& obj : scene.objects) {
    auto hit = raycast(obj, origin, dir);
    if (hit && (!best || hit->t < best->t)) best = hit;
  }
  const double floor_z = scene.container.min.z();
  if (dir.z() != 0.0) {
    const double t = (floor_z - origin.z()) / dir.z();
    if (t > kMinT && (!best || t < best->t)) {
      const Vec3 p = origin + t * dir;
      const auto& c = scene.container;
      if (p.x() >= c.min.x() && p.x() <= c.max.x() && p.y() >= c.min.y() && p.y() <= c.max.y()) {
        best = RayHit{t, p, Vec3::UnitZ(), 0};
      }
    }
  }
  return best;
}

SurfacePatch surface_patch(const SimObject& object, const Vec3& point, double cup_sag) {
  const Eigen::Matrix3d R = object.pose.linear();
  const Vec3 p = R.transpose() * (point - object.pose.translation());
  SurfacePatch patch;
  patch.point = point;
  Vec3 n = Vec3::UnitZ();
  std::visit(overloaded{
                 [&](const Box& b) {
                   const Vec3 half(b.w / 2, b.d / 2, b.h / 2);
                   int face = 0;
                   double gap = std::numeric_limits<double>::infinity();
                   for (int i = 0; i < 3; ++i) {
                     const double g = std::abs(half[i] - std::abs(p[i]));
                     if (g < gap) {
                       gap = g;
                       face = i;
                     }
                   }
                   n = Vec3::Zero();
                   n[face] = p[face] >= 0.0 ? 1.0 : -1.0;
                   double r = std::numeric_limits<double>::infinity();
                   for (int j = 0; j < 3; ++j) {
                     if (j != face) r = std::min(r, half[j] - std::abs(p[j]));
                   }
                   patch.flat_radius = std::max(0.0, r);
                 },
                 [&](const Cylinder& c) {
                   const double radial = std::hypot(p.x(), p.y());
                   const double cap_gap = std::abs(std::abs(p.z()) - c.h / 2);
                   const double side_gap = std::abs(radial - c.r);
                   if (cap_gap < side_gap) {
                     n = Vec3(0, 0, p.z() >= 0.0 ? 1.0 : -1.0);
                     patch.flat_radius = std::max(0.0, c.r - radial);
                   } else {
                     n = radial > 0.0 ? Vec3(p.x() / radial, p.y() / radial, 0.0) : Vec3::UnitX();
                     const double follow = std::sqrt(2.0 * c.r * cup_sag);
                     patch.flat_radius = std::max(0.0, std::min(follow, c.h / 2 - std::abs(p.z())));
                   }
                 },
                 [&](const Sphere& s) {
                   n = p.norm() > 0.0 ? Vec3(p.normalized()) : Vec3::UnitZ();
                   patch.flat_radius = std::min(s.r, std::sqrt(2.0 * s.r * cup_sag));
                 },
             },
             object.shape);
  patch.normal = R * n;
  return patch;
}

double extent_along(const SimObject& object, const Vec3& direction) {
  const Vec3 d = object.pose.linear().transpose() * direction.normalized();
  return std::visit(overloaded{
                        [&](const Box& b) { return std::abs(d.x()) * b.w + std::abs(d.y()) * b.d + std::abs(d.z()) * b.h; },
                        [&](const Cylinder& c) {
                          const double along = std::abs(d.z());
                          return along * c.h + 2.0 * c.r * std::sqrt(std::max(0.0, 1.0 - along * along));
                        },
                        [&](const Sphere& s) { return 2.0 * s.r; },
                    },
                    object.shape);
}

}  // namespace graspkit
