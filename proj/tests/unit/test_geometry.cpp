#include <doctest.h>

#include <random>

#include "graspkit/error.hpp"
#include "graspkit/geometry.hpp"
#include "oracles.hpp"

using namespace graspkit;

namespace {

CameraIntrinsics test_intrinsics(int w = 64, int h = 48) { return {500.0, 520.0, w / 2.0 - 0.5, h / 2.0 + 0.25, w, h}; }

RGBDFrame blank_frame(int w, int h) {
  RGBDFrame f;
  f.intrinsics = test_intrinsics(w, h);
  f.color = Image<Rgb>(w, h);
  f.depth = Image<double>(w, h, kInvalidDepth);
  f.labels = Image<LabelId>(w, h, 0);
  return f;
}

}  // namespace

TEST_CASE("deprojection inverts projection") {
  const auto intr = test_intrinsics();
  Pose pose = Pose::Identity();
  pose.linear() = Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  pose.translation() = Vec3(0.1, -0.2, 1.5);
  for (double u : {0.0, 13.5, 63.0}) {
    for (double v : {0.0, 20.25, 47.0}) {
      const Vec3 p = deproject_pixel(intr, pose, u, v, 0.8);
      const auto uv = project_point(intr, pose, p);
      REQUIRE(uv);
      CHECK(uv->x() == doctest::Approx(u).epsilon(1e-12));
      CHECK(uv->y() == doctest::Approx(v).epsilon(1e-12));
      // Camera-frame z of the point is the depth.
      CHECK((pose.inverse() * p).z() == doctest::Approx(0.8));
    }
  }
  CHECK_FALSE(project_point(intr, pose, pose * Vec3(0, 0, -1)));
}

TEST_CASE("deprojection matches the pinhole formula") {
  const auto intr = test_intrinsics();
  const Vec3 p = deproject_pixel(intr, Pose::Identity(), 40.0, 10.0, 2.0);
  CHECK(p.x() == doctest::Approx((40.0 - intr.cx) * 2.0 / intr.fx));
  CHECK(p.y() == doctest::Approx((10.0 - intr.cy) * 2.0 / intr.fy));
  CHECK(p.z() == doctest::Approx(2.0));
}

TEST_CASE("intrinsics validation") {
  CameraIntrinsics k = test_intrinsics();
  CHECK_NOTHROW(k.validate());
  k.fx = 0;
  CHECK_THROWS_AS(k.validate(), Error);
  k = test_intrinsics();
  k.width = 0;
  CHECK_THROWS_AS(k.validate(), Error);
}

TEST_CASE("deproject marks invalid pixels as NaN") {
  auto f = blank_frame(4, 3);
  f.depth(1, 1) = 1.0;
  f.depth(2, 2) = -1.0;
  f.depth(0, 0) = 0.0;
  const auto pts = deproject(f);
  CHECK(is_valid_point(pts(1, 1)));
  CHECK_FALSE(is_valid_point(pts(2, 2)));
  CHECK_FALSE(is_valid_point(pts(0, 0)));
  CHECK_FALSE(is_valid_point(pts(3, 0)));
}

TEST_CASE("segment extraction keeps pixels, colors and coverage aligned") {
  auto f = blank_frame(8, 6);
  int labelled = 0, with_depth = 0;
  for (int v = 1; v < 5; ++v) {
    for (int u = 2; u < 7; ++u) {
      f.labels(u, v) = 7;
      f.color(u, v) = Rgb{static_cast<uint8_t>(u), static_cast<uint8_t>(v), 9};
      ++labelled;
      if ((u + v) % 3) {
        f.depth(u, v) = 1.0 + 0.01 * u;
        ++with_depth;
      }
    }
  }
  const Segment s = extract_segment(f, 7);
  CHECK(s.mask_pixels.size() == static_cast<size_t>(labelled));
  CHECK(s.points.size() == static_cast<size_t>(with_depth));
  CHECK(s.depth_coverage == doctest::Approx(double(with_depth) / labelled));
  for (size_t i = 0; i < s.mask_pixels.size(); ++i) {
    CHECK(s.colors[i][0] == s.mask_pixels[i].u);
    CHECK(s.colors[i][1] == s.mask_pixels[i].v);
  }
  for (size_t i = 0; i < s.points.size(); ++i) {
    const Pixel px = s.pixel_index[i];
    const Vec3 expect = deproject_pixel(f.intrinsics, f.pose, px.u, px.v, f.depth(px.u, px.v));
    CHECK((s.points[i] - expect).norm() < 1e-12);
  }
  CHECK_THROWS_AS(extract_segment(f, 3), Error);
  try {
    extract_segment(f, 3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownLabel);
  }
}

TEST_CASE("normals on a sampled plane are exact") {
  const Vec3 n_true = Vec3(0.2, -0.3, 1.0).normalized();
  const Vec3 u = n_true.unitOrthogonal();
  const Vec3 v = n_true.cross(u);
  std::vector<Vec3> pts;
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) pts.push_back(Vec3(0.1, 0.2, 0.3) + 0.01 * i * u + 0.013 * j * v);
  const Vec3 view = Vec3(0.1, 0.2, 0.3) + 2.0 * n_true;
  const auto normals = estimate_normals(pts, 16, view);
  for (const auto& n : normals) {
    REQUIRE(n);
    CHECK(oracle::angle(*n, n_true) < 1e-6);
  }
}

TEST_CASE("normals face the view origin") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) pts.push_back(Vec3(0.01 * i, 0.01 * j, 0.0));
  for (double side : {1.0, -1.0}) {
    const auto normals = estimate_normals(pts, 8, Vec3(0.05, 0.05, side));
    for (const auto& n : normals) CHECK(n->z() == doctest::Approx(side));
  }
}

TEST_CASE("collinear neighborhoods have no normal") {
  std::vector<Vec3> line;
  for (int i = 0; i < 20; ++i) line.push_back(Vec3(0.01 * i, 0.0, 0.0));
  for (const auto& n : estimate_normals(line, 5, Vec3(0, 0, 1))) CHECK_FALSE(n);
  CHECK_THROWS_AS(estimate_normals(line, 2, Vec3::Zero()), Error);
  CHECK_THROWS_AS(estimate_normals(std::span(line).first(4), 5, Vec3::Zero()), Error);
}

TEST_CASE("normals on a 10k-point sphere stay within two degrees") {
  const int n = 10000;
  const Vec3 c(0.3, -0.1, 0.5);
  const double r = 0.2;
  std::vector<Vec3> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double rho = std::sqrt(1.0 - z * z);
    pts.push_back(c + r * Vec3(rho * std::cos(golden * i), rho * std::sin(golden * i), z));
  }
  const Vec3 view = c + Vec3(0, 0, 3.0);
  const auto normals = estimate_normals(pts, 16, view);
  // Accuracy as an unsigned line angle; orientation checked on its own, since
  // on the silhouette rim the view direction is tangent and either sign is fine.
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    REQUIRE(normals[i]);
    worst = std::max(worst, oracle::axis_angle(*normals[i], pts[i] - c));
    CHECK(normals[i]->dot(view - pts[i]) >= 0.0);
  }
  CHECK(worst < 2.0 * std::numbers::pi / 180.0);
}

TEST_CASE("edge distance equals brute force on every small mask") {
  for (int w = 1; w <= 4; ++w) {
    for (int h = 1; h <= 4; ++h) {
      const int cells = w * h;
      for (int bits = 1; bits < (1 << cells); ++bits) {
        Mask m(w, h, 0);
        for (int i = 0; i < cells; ++i) m[i] = (bits >> i) & 1;
        const auto got = edge_distance(m);
        const auto want = oracle::edge_distance(m);
        for (size_t i = 0; i < m.size(); ++i) REQUIRE(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("edge distance equals brute force on random masks up to 32x32") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 32);
    const int h = 1 + static_cast<int>(rng() % 32);
    const double fill = 0.3 + 0.65 * (rng() % 1000) / 1000.0;
    Mask m(w, h, 0);
    for (auto& px : m.data()) px = (rng() % 1000) / 1000.0 < fill;
    m(static_cast<int>(rng() % w), static_cast<int>(rng() % h)) = 1;
    const auto got = edge_distance(m);
    const auto want = oracle::edge_distance(m);
    for (size_t i = 0; i < m.size(); ++i) REQUIRE(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
  Mask empty(5, 5, 0);
  CHECK_THROWS_AS(edge_distance(empty), Error);
}

TEST_CASE("centroids match the naive mean") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 257; ++i) pts.push_back(Vec3(U(rng), U(rng), U(rng)));
  CHECK((centroid3d(pts) - oracle::mean(pts)).norm() < 1e-12);
  CHECK_THROWS_AS(centroid3d(std::span<const Vec3>()), Error);

  Mask m(5, 4, 0);
  m(1, 1) = m(3, 1) = m(3, 2) = 1;
  const Vec2 c = centroid2d(m);
  CHECK(c.x() == doctest::Approx(7.0 / 3));
  CHECK(c.y() == doctest::Approx(4.0 / 3));
}

TEST_CASE("principal axes of a 100x20x20 mm box sample") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3d R = oracle::random_rotation(rng);
    std::vector<Vec3> pts;
    for (int i = 0; i < 5000; ++i) pts.push_back(R * Vec3(0.1 * U(rng), 0.02 * U(rng), 0.02 * U(rng)) + Vec3(1, 2, 3));
    const PrincipalFrame f = principal_axes(pts);
    CHECK(oracle::axis_angle(f.axes[0], R.col(0)) < std::numbers::pi / 180.0);
    CHECK_FALSE(f.degenerate_orientation);
    CHECK(f.axes[0].cross(f.axes[1]).dot(f.axes[2]) == doctest::Approx(1.0));
    CHECK(f.variances[0] >= f.variances[1]);
    CHECK(f.variances[1] >= f.variances[2]);
  }
}

TEST_CASE("principal axes flag isotropic footprints and reject degenerate input") {
  std::vector<Vec3> square;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) square.push_back(Vec3(0.01 * i, 0.01 * j, 0.0));
  CHECK(principal_axes(square).degenerate_orientation);

  std::vector<Vec3> same(10, Vec3(1, 1, 1));
  CHECK_THROWS_AS(principal_axes(same), Error);
  std::vector<Vec3> two{Vec3::Zero(), Vec3::UnitX()};
  CHECK_THROWS_AS(principal_axes(two), Error);
}

TEST_CASE("principal axes sign convention is deterministic") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(Vec3(0.01 * i, 0.002 * (i % 5), 0.001 * (i % 3)));
  auto flipped = pts;
  std::reverse(flipped.begin(), flipped.end());
  const auto a = principal_axes(pts);
  const auto b = principal_axes(flipped);
  for (int k = 0; k < 3; ++k) CHECK((a.axes[k] - b.axes[k]).norm() < 1e-9);
  CHECK(a.axes[0].x() > 0);
}
