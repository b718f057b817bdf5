#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "graspkit/image.hpp"

namespace graspkit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Pose = Eigen::Isometry3d;

/// Depth value that marks a pixel without a measurement.
inline constexpr double kInvalidDepth = std::numeric_limits<double>::quiet_NaN();

/// Non-finite or non-positive depths carry no measurement.
inline bool is_valid_depth(double d) { return std::isfinite(d) && d > 0.0; }

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws kInvalidArgument if focal lengths or principal point are out of range.
  void validate() const;
};

struct RGBDFrame {
  Image<Rgb> color;
  Image<double> depth;  // meters, kInvalidDepth where unmeasured
  Image<LabelId> labels;  // 0 = background
  CameraIntrinsics intrinsics;
  Pose pose = Pose::Identity();  // camera -> world

  int width() const { return intrinsics.width; }
  int height() const { return intrinsics.height; }

  /// Checks plane dimensions and intrinsics.
  void validate() const;

  /// Camera center in world coordinates.
  Vec3 camera_origin() const { return pose.translation(); }
};

struct Segment {
  LabelId label = 0;
  Mask mask;
  std::vector<Vec3> points;        // world frame, valid-depth mask pixels only
  std::vector<Pixel> pixel_index;  // source pixel of each point
  std::vector<Pixel> mask_pixels;  // every mask pixel, row-major
  std::vector<Rgb> colors;         // color of each mask pixel, aligned with mask_pixels
  double depth_coverage = 0.0;
};

struct PrincipalFrame {
  Vec3 centroid = Vec3::Zero();
  std::array<Vec3, 3> axes{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  Vec3 variances = Vec3::Zero();  // descending
  /// Top two variances within the isotropy tolerance; the major axis is not
  /// a meaningful orientation.
  bool degenerate_orientation = false;
};

/// Relative gap below which the two leading variances count as equal.
inline constexpr double kIsotropyTolerance = 0.05;

/// Deproject a single pixel at the given camera-frame depth into world coordinates.
Vec3 deproject_pixel(const CameraIntrinsics& intr, const Pose& pose, double u, double v, double depth);

/// Project a world point into continuous pixel coordinates. Returns nullopt
/// when the point is at or behind the camera plane.
std::optional<Vec2> project_point(const CameraIntrinsics& intr, const Pose& pose, const Vec3& world);

/// Per-pixel world points; NaN components where the depth is invalid.
Image<Vec3> deproject(const RGBDFrame& frame);

inline bool is_valid_point(const Vec3& p) { return p.allFinite(); }

Segment extract_segment(const RGBDFrame& frame, LabelId label);

/// Unit normal per point, or nullopt where the k-neighborhood is collinear.
using NormalField = std::vector<std::optional<Vec3>>;

/// k-NN covariance normals, each oriented toward `view_origin`.
NormalField estimate_normals(std::span<const Vec3> points, std::size_t k, const Vec3& view_origin);

/// Exact Euclidean distance from each in-mask pixel to the nearest out-of-mask
/// pixel. Everything outside the image counts as out-of-mask.
Image<double> edge_distance(const Mask& mask);

Vec3 centroid3d(const Segment& segment);
Vec3 centroid3d(std::span<const Vec3> points);

/// Mean (u, v) of in-mask pixels.
Vec2 centroid2d(const Mask& mask);

PrincipalFrame principal_axes(std::span<const Vec3> points);

}  // namespace graspkit
