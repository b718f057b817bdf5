#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "graspkit/geometry.hpp"
#include "graspkit/planner.hpp"
#include "graspkit/synthesis.hpp"

namespace graspkit {

// Shapes are centered on the object origin. Box extents run along local
// x, y, z; the cylinder axis is local z.
struct Box {
  double w = 0.0;
  double d = 0.0;
  double h = 0.0;
};
struct Cylinder {
  double r = 0.0;
  double h = 0.0;
};
struct Sphere {
  double r = 0.0;
};
using Shape = std::variant<Box, Cylinder, Sphere>;

/// "box:WxDxH", "cylinder:RxH", "sphere:R" (meters).
Shape parse_shape(std::string_view text);
std::string format_shape(const Shape& shape);

struct SimObject {
  std::string name;
  LabelId label = 0;
  Shape shape;
  Pose pose = Pose::Identity();
  double mass = 0.1;  // kg
  bool porous = false;
  bool depth_absorbing = false;
  bool deformable = false;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Aabb& other, double slack = 1e-9) const {
    return (other.min.array() >= min.array() - slack).all() && (other.max.array() <= max.array() + slack).all();
  }
};

Aabb bounds(const SimObject& object);

enum class RelationKind { kSupports, kOccludes };

/// `upper` rests on (supports) or hides part of (occludes) `lower`.
struct ClutterRelation {
  RelationKind kind = RelationKind::kSupports;
  LabelId upper = 0;
  LabelId lower = 0;
};

struct DepthNoise {
  double sigma = 0.0;    // m
  double dropout = 0.0;  // probability a valid pixel loses its depth
};

struct CameraRig {
  CameraIntrinsics intrinsics;
  Pose pose = Pose::Identity();  // camera -> world
};

/// Pinhole camera `height` above the container floor center, looking down
/// (camera x = world x, camera y = world -y).
CameraRig overhead_camera(const Aabb& container, double height, int width = 640, int image_height = 480,
                          double focal = 600.0);

struct SceneSpec {
  std::vector<SimObject> objects;
  Aabb container{Vec3(-0.3, -0.2, 0.0), Vec3(0.3, 0.2, 0.35)};
  std::vector<ClutterRelation> clutter;
  DepthNoise noise;
  std::uint64_t seed = 0;
  CameraRig camera = overhead_camera(Aabb{Vec3(-0.3, -0.2, 0.0), Vec3(0.3, 0.2, 0.35)}, 1.0);

  /// Positive dimensions and masses, unique nonzero labels, objects inside
  /// the container, acyclic clutter relations.
  void validate() const;

  const SimObject* find(LabelId label) const;
  const SimObject* find(std::string_view name) const;

  /// Mass bearing down on `label` through support relations, including its own.
  double load_on(LabelId label, double coupling) const;
};

SceneSpec parse_scene(std::string_view text);
SceneSpec load_scene_file(const std::string& path);
std::string format_scene(const SceneSpec& scene);

struct RayHit {
  double t = 0.0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  LabelId label = 0;  // 0 = container floor
};

std::optional<RayHit> raycast(const SimObject& object, const Vec3& origin, const Vec3& dir);

/// Nearest hit among all objects and the container floor.
std::optional<RayHit> raycast(const SceneSpec& scene, const Vec3& origin, const Vec3& dir);

/// Ray-cast color, depth and labels for `scene` through `scene.camera`.
/// Gaussian depth noise then dropout are drawn from `scene.seed`.
RGBDFrame render(const SceneSpec& scene);

/// Deterministic, platform-independent random source.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::uint64_t state_;
};

/// Stateless seed mixing.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

enum class FlowState { kOpen, kSealed };

struct SensorRig {
  std::vector<double> scale_reading{0.0};  // kg per bin
  FlowState flow = FlowState::kOpen;
  double contact_delta_kg = 0.02;
  double seal_threshold = 0.5;  // fraction of free flow below which the line reads sealed

  void validate() const;
};

struct WristState {
  Tool active_tool = Tool::kSuction;
  int flip_count = 0;
};

/// Rotates the wrist half a turn when `tool` is not already active.
WristState flip_tool(WristState state, Tool tool);

/// Local surface description at a contact point.
struct SurfacePatch {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  /// Radius of the flat disc around `point` that stays on the face.
  double flat_radius = 0.0;
};

/// `cup_sag` is the depth a compliant cup lip can follow on a curved face.
SurfacePatch surface_patch(const SimObject& object, const Vec3& point, double cup_sag);

struct AttachParams {
  double cup_radius = 0.012;
  double cup_sag = 0.004;
  double suction_capacity_kg = 1.0;
  double suction_base = 0.97;
  double heavy_knee = 0.5;   // fraction of capacity where the rate starts to fall
  double heavy_floor = 0.6;  // fraction of the base rate left at capacity
  double seal_angle = 25.0 * std::numbers::pi / 180.0;

  double jaw_span = 0.07;
  double grip_base = 0.95;
  double grip_alignment_tolerance = 20.0 * std::numbers::pi / 180.0;
  double finger_depth = 0.03;  // how far the fingers reach below the contact

  double lift_drop_rate = 0.02;
  double deformable_drop_factor = 2.0;
  double clutter_mass_coupling = 0.5;

  double press_force_kg = 0.05;
  double descent_step = 0.005;
  double safety_limit = 0.5;
  double standoff = 0.15;
  double depth_overshoot = 0.01;

  /// All stochastic failure disabled.
  static AttachParams failure_free();
};

struct SuctionContact {
  SurfacePatch patch;
  Vec3 approach = kDown;
  double load_kg = 0.0;
};

double attach_model_suction(const SuctionContact& contact, const SimObject& object, const AttachParams& params);

struct GripContact {
  Vec3 point = Vec3::Zero();
  Vec3 approach = kDown;
};

/// Width of `object` along `direction`.
double extent_along(const SimObject& object, const Vec3& direction);

double attach_model_grip(const GripContact& contact, const SimObject& object, double jaw_span, double yaw,
                         const AttachParams& params);

enum class AttachOutcome { kAttached, kMiss, kDropDuringLift, kSensorTimeout };
enum class StopCause { kFlowSeal, kScaleContact, kDepthReached, kTimeout };

std::string_view to_string(AttachOutcome o);
std::string_view to_string(StopCause s);

struct AttachResult {
  AttachOutcome outcome = AttachOutcome::kMiss;
  std::size_t candidate_used = 0;
  StopCause descent_stop_cause = StopCause::kTimeout;
  LabelId contacted = 0;
};

/// Executes the plan's candidates in order against the target named
/// `plan.item` until one attaches or all are spent.
AttachResult descend_and_attach(const GraspPlan& plan, const SceneSpec& scene, SensorRig& rig,
                                const WristState& wrist, const AttachParams& params, std::uint64_t seed);

enum class Regime { kUncluttered, kCluttered };
std::string_view to_string(Regime r);

struct SceneGenParams {
  Aabb container{Vec3(-0.3, -0.2, 0.0), Vec3(0.3, 0.2, 0.35)};
  double camera_height = 1.0;
  DepthNoise noise{0.0005, 0.02};
  int clutter_min = 3;
  int clutter_max = 6;
  double cover_probability = 0.5;  // a companion rests on the target
  double target_on_top_probability = 0.3;
  double max_tilt = 25.0 * std::numbers::pi / 180.0;
};

SimObject sim_object_from_profile(const ItemProfile& profile, LabelId label);

/// Builds a scene around `catalog[target]`. The uncluttered regime holds
/// the target alone; the cluttered regime adds companions that cover it,
/// support it, or sit beside it. Orientation and placement vary with `seed`.
SceneSpec generate_scene(const std::vector<SimObject>& catalog, std::size_t target, Regime regime,
                         std::uint64_t seed, const SceneGenParams& params);

}  // namespace graspkit
