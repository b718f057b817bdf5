#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "graspkit/synthesis.hpp"

namespace graspkit {

struct GraspingClass {
  Method method = Method::kSurfaceNormals;
  Tool tool = Tool::kSuction;

  friend bool operator==(const GraspingClass&, const GraspingClass&) = default;
};

/// The five (method, tool) pairs the system uses. Surface normals are only
/// ever paired with suction.
inline constexpr GraspingClass kGraspingClasses[] = {
    {Method::kSurfaceNormals, Tool::kSuction}, {Method::kRgbdCentroid, Tool::kSuction},
    {Method::kRgbdCentroid, Tool::kGrip},      {Method::kRgbCentroid, Tool::kSuction},
    {Method::kRgbCentroid, Tool::kGrip},
};

bool is_valid_class(const GraspingClass& c);
std::string to_string(const GraspingClass& c);

struct ItemProfile {
  std::string name;
  GraspingClass primary_class;
  std::vector<GraspingClass> fallback_classes;
  double mass = 0.3;  // kg
  bool porous = false;
  bool needs_grip = false;
  bool depth_recoverable = true;
  bool deformable = false;
  /// Simulation stand-in shape ("box:WxDxH", "cylinder:RxH", "sphere:R", meters).
  /// Opaque to planning.
  std::string shape;

  friend bool operator==(const ItemProfile&, const ItemProfile&) = default;

  /// Throws kInvariantViolation naming the item and the broken rule.
  void validate() const;
};

/// Fallbacks implied by a primary class: later methods in
/// surface_normals -> rgbd_centroid -> rgb_centroid, same tool.
std::vector<GraspingClass> default_fallbacks(const GraspingClass& primary);

/// Surface normals with suction, falling back toward the RGB centroid.
ItemProfile default_profile(std::string name);

/// Fraction of depth usable for planning; replaceable for noise-aware metrics.
using DepthQualityMetric = std::function<double(const Segment&)>;

double depth_coverage_metric(const Segment& segment);

inline constexpr double kDefaultQualityThreshold = 0.5;

GraspingClass select_class(const ItemProfile& profile, const Segment& segment,
                           double quality_threshold = kDefaultQualityThreshold,
                           const DepthQualityMetric& metric = depth_coverage_metric);

struct GraspPlan {
  std::string item;
  GraspingClass class_used;
  std::vector<GraspCandidate> candidates;
  Tool tool = Tool::kSuction;
  double depth_quality = 0.0;
};

struct PlanOptions {
  double quality_threshold = kDefaultQualityThreshold;
  DepthQualityMetric metric = depth_coverage_metric;
};

GraspPlan plan_grasp(const RGBDFrame& frame, LabelId label, const ItemProfile& profile,
                     const SynthesisParams& params, const PlanOptions& options = {});

using ItemRegistry = std::map<std::string, ItemProfile, std::less<>>;

/// Parses the line-oriented registry format:
///
///   # comment
///   <name>: <method>, <tool>[, key=value ...]
///
/// Keys: mass, porous, needs_grip, depth_recoverable, deformable, shape, and
/// fallback=<method>/<tool>[|<method>/<tool> ...] ("fallback=none" for an
/// empty list). Omitted fallbacks follow `default_fallbacks`.
ItemRegistry load_item_registry(std::string_view text);
ItemRegistry load_item_registry_file(const std::string& path);

/// Inverse of `load_item_registry`; every field is written explicitly.
std::string serialize_registry(const ItemRegistry& registry);

}  // namespace graspkit
