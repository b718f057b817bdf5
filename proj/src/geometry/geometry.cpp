#include "graspkit/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "graspkit/error.hpp"
#include "kdtree.hpp"

namespace graspkit {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::kInvalidArgument, "principal point outside the image");
  }
}

void RGBDFrame::validate() const {
  intrinsics.validate();
  const int w = intrinsics.width;
  const int h = intrinsics.height;
  auto same = [&](int pw, int ph) { return pw == w && ph == h; };
  if (!same(color.width(), color.height()) || !same(depth.width(), depth.height()) ||
      !same(labels.width(), labels.height())) {
    throw Error(ErrorCode::kInvalidArgument, "frame planes do not share the intrinsics' dimensions");
  }
}

Vec3 deproject_pixel(const CameraIntrinsics& intr, const Pose& pose, double u, double v, double depth) {
  const Vec3 cam((u - intr.cx) * depth / intr.fx, (v - intr.cy) * depth / intr.fy, depth);
  return pose * cam;
}

std::optional<Vec2> project_point(const CameraIntrinsics& intr, const Pose& pose, const Vec3& world) {
  const Vec3 cam = pose.inverse(Eigen::Isometry) * world;
  if (!(cam.z() > 0.0)) return std::nullopt;
  return Vec2(intr.fx * cam.x() / cam.z() + intr.cx, intr.fy * cam.y() / cam.z() + intr.cy);
}

Image<Vec3> deproject(const RGBDFrame& frame) {
  const Vec3 invalid = Vec3::Constant(kInvalidDepth);
  Image<Vec3> out(frame.width(), frame.height(), invalid);
  for (int v = 0; v < frame.height(); ++v) {
    for (int u = 0; u < frame.width(); ++u) {
      const double d = frame.depth(u, v);
      if (is_valid_depth(d)) out(u, v) = deproject_pixel(frame.intrinsics, frame.pose, u, v, d);
    }
  }
  return out;
}

Segment extract_segment(const RGBDFrame& frame, LabelId label) {
  Segment seg;
  seg.label = label;
  seg.mask = Mask(frame.width(), frame.height(), 0);
  for (int v = 0; v < frame.height(); ++v) {
    for (int u = 0; u < frame.width(); ++u) {
      if (frame.labels(u, v) != label) continue;
      seg.mask(u, v) = 1;
      seg.mask_pixels.push_back({u, v});
      seg.colors.push_back(frame.color(u, v));
      const double d = frame.depth(u, v);
      if (is_valid_depth(d)) {
        seg.points.push_back(deproject_pixel(frame.intrinsics, frame.pose, u, v, d));
        seg.pixel_index.push_back({u, v});
      }
    }
  }
  if (label == 0 || seg.mask_pixels.empty()) {
    throw Error(ErrorCode::kUnknownLabel, "label " + std::to_string(label) + " not present in frame");
  }
  seg.depth_coverage = static_cast<double>(seg.points.size()) / static_cast<double>(seg.mask_pixels.size());
  return seg;
}

NormalField estimate_normals(std::span<const Vec3> points, std::size_t k, const Vec3& view_origin) {
  if (k < 3) throw Error(ErrorCode::kInvalidArgument, "normal estimation needs k >= 3");
  if (points.size() < k) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(points.size()) + " points is fewer than k=" + std::to_string(k));
  }
  const detail::KdTree tree(points);
  NormalField normals(points.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nbrs = tree.knn(points[i], k);
    Vec3 mean = Vec3::Zero();
    for (auto j : nbrs) mean += points[j];
    mean /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (auto j : nbrs) {
      const Vec3 d = points[j] - mean;
      cov.noalias() += d * d.transpose();
    }
    solver.compute(cov);
    const Vec3& ev = solver.eigenvalues();  // ascending
    // Collinear neighborhood: only one direction carries spread.
    if (!(ev[2] > 0.0) || ev[1] <= 1e-10 * ev[2]) continue;
    Vec3 n = solver.eigenvectors().col(0).normalized();
    if (n.dot(view_origin - points[i]) < 0.0) n = -n;
    normals[i] = n;
  }
  return normals;
}

namespace {

// One-dimensional squared distance transform of a sampled function: lower
// envelope of parabolas rooted at the finite samples. At least one sample
// must be finite.
void squared_dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                   std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s = -kInf;
    while (k >= 0) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s > z[k]) break;
      --k;
    }
    if (k < 0) s = -kInf;
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    d[q] = (double(q) - p) * (double(q) - p) + f[p];
  }
}

}  // namespace

Image<double> edge_distance(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  if (std::none_of(mask.data().begin(), mask.data().end(), [](auto m) { return m != 0; })) {
    throw Error(ErrorCode::kEmptyMask, "edge distance of an empty mask");
  }
  // Pad by one background ring so the image border counts as an edge.
  const int pw = w + 2;
  const int ph = h + 2;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Image<double> grid(pw, ph, 0.0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (mask(u, v)) grid(u + 1, v + 1) = kInf;

  const int n = std::max(pw, ph);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> vtx(n);
  for (int u = 0; u < pw; ++u) {
    f.resize(ph);
    d.resize(ph);
    for (int v = 0; v < ph; ++v) f[v] = grid(u, v);
    squared_dt_1d(f, d, vtx, z);
    for (int v = 0; v < ph; ++v) grid(u, v) = d[v];
  }
  for (int v = 0; v < ph; ++v) {
    f.resize(pw);
    d.resize(pw);
    for (int u = 0; u < pw; ++u) f[u] = grid(u, v);
    squared_dt_1d(f, d, vtx, z);
    for (int u = 0; u < pw; ++u) grid(u, v) = d[u];
  }

  Image<double> out(w, h, 0.0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (mask(u, v)) out(u, v) = std::sqrt(grid(u + 1, v + 1));
  return out;
}

Vec3 centroid3d(std::span<const Vec3> points) {
  if (points.empty()) throw Error(ErrorCode::kNoValidDepth, "centroid of an empty point set");
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

Vec3 centroid3d(const Segment& segment) { return centroid3d(std::span<const Vec3>(segment.points)); }

Vec2 centroid2d(const Mask& mask) {
  double su = 0.0;
  double sv = 0.0;
  std::size_t count = 0;
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask(u, v)) continue;
      su += u;
      sv += v;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::kEmptyMask, "centroid of an empty mask");
  return {su / static_cast<double>(count), sv / static_cast<double>(count)};
}

namespace {

// Largest-magnitude component positive; near-ties go to the earliest coordinate.
Vec3 canonical_sign(const Vec3& a) {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(a[i]) > std::abs(a[best]) + 1e-12) best = i;
  }
  return a[best] < 0.0 ? Vec3(-a) : a;
}

}  // namespace

PrincipalFrame principal_axes(std::span<const Vec3> points) {
  if (points.size() < 3) throw Error(ErrorCode::kTooFewPoints, "principal axes need at least 3 points");
  PrincipalFrame frame;
  frame.centroid = centroid3d(points);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - frame.centroid;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  const double scale = std::max(1.0, frame.centroid.squaredNorm());
  if (cov.trace() <= 1e-24 * scale) throw Error(ErrorCode::kDegenerateCloud, "all points coincide");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  for (int i = 0; i < 3; ++i) {
    frame.variances[i] = std::max(0.0, solver.eigenvalues()[2 - i]);
    frame.axes[i] = canonical_sign(solver.eigenvectors().col(2 - i).normalized());
  }
  if (frame.axes[0].cross(frame.axes[1]).dot(frame.axes[2]) < 0.0) frame.axes[2] = -frame.axes[2];
  frame.degenerate_orientation =
      frame.variances[0] - frame.variances[1] < kIsotropyTolerance * frame.variances[0];
  return frame;
}

}  // namespace graspkit
