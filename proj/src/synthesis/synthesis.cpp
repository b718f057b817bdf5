#include "graspkit/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "graspkit/error.hpp"

namespace graspkit {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kSurfaceNormals: return "surface_normals";
    case Method::kRgbdCentroid: return "rgbd_centroid";
    case Method::kRgbCentroid: return "rgb_centroid";
  }
  return "?";
}

std::string_view to_string(Tool t) { return t == Tool::kSuction ? "suction" : "grip"; }

std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::kSurfaceNormals, Method::kRgbdCentroid, Method::kRgbCentroid}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Tool> parse_tool(std::string_view s) {
  if (s == "suction") return Tool::kSuction;
  if (s == "grip") return Tool::kGrip;
  return std::nullopt;
}

void SynthesisParams::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (k_neighbors < 3) fail("k_neighbors must be at least 3");
  if (!(min_edge_distance > 0.0)) fail("min_edge_distance must be positive");
  if (!(max_angle_from_vertical > 0.0) || !(max_angle_from_vertical < std::numbers::pi / 2)) {
    fail("max_angle_from_vertical must lie in (0, pi/2)");
  }
  if (!(min_candidate_separation > 0.0)) fail("min_candidate_separation must be positive");
  if (!(assumed_depth > 0.0)) fail("assumed_depth must be positive");
  if (max_candidates == 0) fail("max_candidates must be positive");
  if (!(edge_reference > 0.0)) fail("edge_reference must be positive");
  if (edge_weight < 0.0 || angle_weight < 0.0 || std::abs(edge_weight + angle_weight - 1.0) > 1e-9) {
    fail("score weights must be non-negative and sum to 1");
  }
}

double angle_from_vertical(const Vec3& approach) {
  return std::acos(std::clamp(approach.normalized().dot(kDown), -1.0, 1.0));
}

double surface_normal_score(double edge_dist_px, double angle, const SynthesisParams& params) {
  const double edge_term = std::clamp(edge_dist_px / params.edge_reference, 0.0, 1.0);
  const double angle_term = std::clamp(1.0 - angle / params.max_angle_from_vertical, 0.0, 1.0);
  return std::clamp(params.edge_weight * edge_term + params.angle_weight * angle_term, 0.0, 1.0);
}

std::vector<GraspCandidate> synth_surface_normals(const Segment& segment, const RGBDFrame& frame,
                                                  const SynthesisParams& params) {
  if (segment.points.empty()) throw Error(ErrorCode::kNoValidDepth, "segment has no valid depth points");
  if (segment.points.size() < 3) return {};

  const std::size_t k = std::min(params.k_neighbors, segment.points.size());
  const NormalField normals = estimate_normals(segment.points, k, frame.camera_origin());
  const Image<double> edges = edge_distance(segment.mask);

  std::vector<GraspCandidate> survivors;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!normals[i]) continue;
    const Pixel px = segment.pixel_index[i];
    const double edge = edges(px.u, px.v);
    if (edge < params.min_edge_distance) continue;
    const Vec3 approach = -*normals[i];
    const double angle = angle_from_vertical(approach);
    if (angle > params.max_angle_from_vertical) continue;

    GraspCandidate c;
    c.position = segment.points[i];
    c.approach = approach;
    c.score = surface_normal_score(edge, angle, params);
    c.method = Method::kSurfaceNormals;
    c.pixel = px;
    survivors.push_back(c);
  }
  auto ordered = diversity_reorder(std::move(survivors), params.min_candidate_separation);
  if (ordered.size() > params.max_candidates) ordered.resize(params.max_candidates);
  return ordered;
}

std::vector<GraspCandidate> diversity_reorder(std::vector<GraspCandidate> candidates, double min_sep) {
  const std::size_t n = candidates.size();
  if (n < 2) return candidates;

  std::vector<std::size_t> by_score(n);
  std::iota(by_score.begin(), by_score.end(), 0);
  std::stable_sort(by_score.begin(), by_score.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].score > candidates[b].score; });

  const double sep2 = min_sep * min_sep;
  std::vector<double> nearest2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::vector<GraspCandidate> out;
  out.reserve(n);

  while (true) {
    std::size_t pick = n;
    for (std::size_t idx : by_score) {
      if (!taken[idx] && nearest2[idx] >= sep2) {
        pick = idx;
        break;
      }
    }
    if (pick == n) break;
    taken[pick] = true;
    out.push_back(candidates[pick]);
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      nearest2[j] = std::min(nearest2[j], (candidates[j].position - candidates[pick].position).squaredNorm());
    }
  }
  for (std::size_t idx : by_score) {
    if (!taken[idx]) out.push_back(candidates[idx]);
  }
  return out;
}

GraspCandidate synth_rgbd_centroid(const Segment& segment) {
  if (segment.points.empty()) throw Error(ErrorCode::kNoValidDepth, "segment has no valid depth points");
  const Vec2 c = centroid2d(segment.mask);

  // The centroid pixel itself is the nearest lattice point when it carries depth.
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segment.pixel_index.size(); ++i) {
    const double du = segment.pixel_index[i].u - c.x();
    const double dv = segment.pixel_index[i].v - c.y();
    const double d2 = du * du + dv * dv;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  GraspCandidate out;
  out.position = segment.points[best];
  out.approach = kDown;
  out.score = 1.0;
  out.method = Method::kRgbdCentroid;
  out.pixel = segment.pixel_index[best];
  return out;
}

GraspCandidate synth_rgb_centroid(const Segment& segment, const RGBDFrame& frame, const SynthesisParams& params) {
  const Vec2 c = centroid2d(segment.mask);
  GraspCandidate out;
  out.position = deproject_pixel(frame.intrinsics, frame.pose, c.x(), c.y(), params.assumed_depth);
  out.approach = kDown;
  out.score = 1.0;
  out.method = Method::kRgbCentroid;
  out.depth_assumed = true;
  out.pixel = {static_cast<int>(std::lround(c.x())), static_cast<int>(std::lround(c.y()))};
  return out;
}

namespace {

Vec3 yaw_reference(const Vec3& a) {
  Vec3 ref = Vec3::UnitX() - Vec3::UnitX().dot(a) * a;
  if (ref.norm() < 1e-9) ref = Vec3::UnitY() - Vec3::UnitY().dot(a) * a;
  return ref.normalized();
}

}  // namespace

std::optional<double> yaw_of(const Vec3& direction, const Vec3& approach) {
  const Vec3 a = approach.normalized();
  const Vec3 d = direction - direction.dot(a) * a;
  if (d.norm() < 1e-9) return std::nullopt;
  const Vec3 ref = yaw_reference(a);
  return std::atan2(ref.cross(d).dot(-a), ref.dot(d));
}

Vec3 direction_at_yaw(double yaw, const Vec3& approach) {
  const Vec3 a = approach.normalized();
  return Eigen::AngleAxisd(yaw, -a) * yaw_reference(a);
}

double wrap_half_turn(double angle) {
  double w = std::fmod(angle, std::numbers::pi);
  if (w < 0.0) w += std::numbers::pi;
  if (w >= std::numbers::pi) w = 0.0;
  return w;
}

GraspCandidate align_yaw(GraspCandidate candidate, const Segment& segment, Tool tool) {
  return align_yaw(std::move(candidate), std::span<const Vec3>(segment.points), tool);
}

GraspCandidate align_yaw(GraspCandidate candidate, std::span<const Vec3> cloud, Tool tool) {
  candidate.yaw = 0.0;
  if (cloud.size() < 3) return candidate;
  PrincipalFrame frame;
  try {
    frame = principal_axes(cloud);
  } catch (const Error&) {
    return candidate;
  }
  if (frame.degenerate_orientation) return candidate;
  const auto major = yaw_of(frame.axes[0], candidate.approach);
  if (!major) return candidate;
  candidate.yaw = wrap_half_turn(tool == Tool::kGrip ? *major + std::numbers::pi / 2 : *major);
  return candidate;
}

void write_candidates(std::ostream& out, const std::vector<GraspCandidate>& candidates) {
  out << "# " << kCandidateSchema << "\n";
  out << "# method x y z approach_x approach_y approach_z yaw score depth_assumed\n";
  char buf[512];
  for (const auto& c : candidates) {
    std::snprintf(buf, sizeof buf, "%s %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d\n",
                  std::string(to_string(c.method)).c_str(), c.position.x(), c.position.y(), c.position.z(),
                  c.approach.x(), c.approach.y(), c.approach.z(), c.yaw, c.score, c.depth_assumed ? 1 : 0);
    out << buf;
  }
}

std::vector<GraspCandidate> read_candidates(std::istream& in) {
  std::vector<GraspCandidate> out;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find(kCandidateSchema) != std::string::npos) saw_header = true;
      continue;
    }
    if (!saw_header) throw Error(ErrorCode::kParseError, "candidate file lacks schema header");
    std::istringstream ss(line);
    std::string method;
    GraspCandidate c;
    int assumed = 0;
    ss >> method >> c.position.x() >> c.position.y() >> c.position.z() >> c.approach.x() >> c.approach.y() >>
        c.approach.z() >> c.yaw >> c.score >> assumed;
    const auto m = parse_method(method);
    if (!ss || !m) throw Error(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": malformed candidate");
    c.method = *m;
    c.depth_assumed = assumed != 0;
    out.push_back(c);
  }
  return out;
}

}  // namespace graspkit
