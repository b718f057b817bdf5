#pragma once

#include <iosfwd>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "graspkit/geometry.hpp"

namespace graspkit {

enum class Method { kSurfaceNormals, kRgbdCentroid, kRgbCentroid };
enum class Tool { kSuction, kGrip };

std::string_view to_string(Method m);
std::string_view to_string(Tool t);
std::optional<Method> parse_method(std::string_view s);
std::optional<Tool> parse_tool(std::string_view s);

/// Whether a method reads depth at the grasp point.
inline bool needs_depth(Method m) { return m != Method::kRgbCentroid; }

/// World "down"; vertical approaches point along it.
inline const Vec3 kDown{0.0, 0.0, -1.0};

struct GraspCandidate {
  Vec3 position = Vec3::Zero();
  Vec3 approach = kDown;  // from the tool into the surface
  double yaw = 0.0;       // about -approach, from projected world +x
  double score = 0.0;
  Method method = Method::kSurfaceNormals;
  bool depth_assumed = false;
  Pixel pixel;  // source pixel in the planning frame
};

struct SynthesisParams {
  std::size_t k_neighbors = 16;
  double min_edge_distance = 10.0;  // px
  double max_angle_from_vertical = 40.0 * std::numbers::pi / 180.0;
  double min_candidate_separation = 0.04;  // m
  double assumed_depth = 0.9;  // m, camera-frame depth used by the RGB path
  std::size_t max_candidates = 10;
  // Surface-normal score weights.
  double edge_weight = 0.5;
  double angle_weight = 0.5;
  double edge_reference = 20.0;  // px at which the edge term saturates

  void validate() const;
};

/// Angle between `approach` and straight down.
double angle_from_vertical(const Vec3& approach);

/// Monotone score in edge distance and verticality; in [0, 1] for unpruned normals.
double surface_normal_score(double edge_dist_px, double angle, const SynthesisParams& params);

std::vector<GraspCandidate> synth_surface_normals(const Segment& segment, const RGBDFrame& frame,
                                                  const SynthesisParams& params);

/// Greedy spatially-diverse ordering. The result is a permutation of the input.
std::vector<GraspCandidate> diversity_reorder(std::vector<GraspCandidate> candidates, double min_sep);

GraspCandidate synth_rgbd_centroid(const Segment& segment);

GraspCandidate synth_rgb_centroid(const Segment& segment, const RGBDFrame& frame, const SynthesisParams& params);

/// Signed angle of `direction` about `-approach`, measured from world +x
/// projected onto the plane normal to the approach (world +y when the approach
/// is along x). Returns nullopt if `direction` is parallel to the approach.
std::optional<double> yaw_of(const Vec3& direction, const Vec3& approach);

/// World direction that has yaw `yaw` about `-approach`.
Vec3 direction_at_yaw(double yaw, const Vec3& approach);

/// Wrap into [0, pi).
double wrap_half_turn(double angle);

/// Sets yaw from the segment's major axis. Gripper yaw is the jaw-opening
/// axis (across the major axis); suction yaw records the major axis itself.
GraspCandidate align_yaw(GraspCandidate candidate, const Segment& segment, Tool tool);
GraspCandidate align_yaw(GraspCandidate candidate, std::span<const Vec3> cloud, Tool tool);

/// Versioned one-line-per-candidate text record.
inline constexpr std::string_view kCandidateSchema = "graspkit-candidates v1";

void write_candidates(std::ostream& out, const std::vector<GraspCandidate>& candidates);
std::vector<GraspCandidate> read_candidates(std::istream& in);

}  // namespace graspkit
