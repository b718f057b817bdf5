#include <algorithm>
#include <cmath>
#include <cstdio>

#include "graspkit/error.hpp"
#include "graspkit/harness.hpp"

namespace graspkit {

namespace {

constexpr double kMaxArrowPx = 60.0;

// Image-plane direction an arrow is drawn from; the candidate sits at its tip.
Vec2 arrow_direction(const RGBDFrame& frame, const GraspCandidate& c, const Vec2& tip) {
  const auto back = project_point(frame.intrinsics, frame.pose, c.position - 0.05 * c.approach.normalized());
  if (back) {
    const Vec2 d = *back - tip;
    if (d.norm() > 1.0) return d.normalized();
  }
  // Approach seen end-on: draw along the candidate's yaw instead.
  const auto side = project_point(frame.intrinsics, frame.pose, c.position + 0.05 * direction_at_yaw(c.yaw, c.approach));
  if (side && (*side - tip).norm() > 1e-9) return (*side - tip).normalized();
  return Vec2(0.0, -1.0);
}

}  // namespace

std::string overlay_svg(const RGBDFrame& frame, LabelId label, const std::vector<GraspCandidate>& candidates) {
  frame.validate();
  const int w = frame.width();
  const int h = frame.height();
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n", w, h, w,
                h);
  out += buf;
  out += "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" "
         "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"context-stroke\"/></marker></defs>\n";
  std::snprintf(buf, sizeof buf, "<rect width=\"%d\" height=\"%d\" fill=\"#202020\"/>\n", w, h);
  out += buf;

  // Silhouette as one path of horizontal runs.
  out += "<path class=\"silhouette\" fill=\"#b0b0b0\" d=\"";
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w;) {
      if (frame.labels(u, v) != label) {
        ++u;
        continue;
      }
      const int start = u;
      while (u < w && frame.labels(u, v) == label) ++u;
      std::snprintf(buf, sizeof buf, "M%d %dh%dv1h%dz", start, v, u - start, start - u);
      out += buf;
    }
  }
  out += "\"/>\n";

  double top = 0.0;
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (best == candidates.size() || candidates[i].score > top) {
      top = candidates[i].score;
      best = i;
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto tip = project_point(frame.intrinsics, frame.pose, c.position);
    if (!tip) continue;
    const double len = top > 0.0 ? kMaxArrowPx * std::max(0.0, c.score) / top : 0.0;
    const Vec2 tail = *tip + len * arrow_direction(frame, c, *tip);
    const bool is_best = i == best;
    std::snprintf(buf, sizeof buf,
                  "<line class=\"%s\" data-score=\"%.17g\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
                  "stroke=\"%s\" stroke-width=\"%d\" marker-end=\"url(#head)\"/>\n",
                  is_best ? "best" : "candidate", c.score, tail.x(), tail.y(), tip->x(), tip->y(),
                  is_best ? "#1f5fff" : "#2fbf3f", is_best ? 4 : 2);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

void render_overlay(const RGBDFrame& frame, LabelId label, const std::vector<GraspCandidate>& candidates,
                    const std::string& out_path) {
  write_file_atomic(out_path, overlay_svg(frame, label, candidates));
}

}  // namespace graspkit
