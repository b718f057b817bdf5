#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "graspkit/error.hpp"
#include "graspkit/simworld.hpp"

namespace graspkit {

CameraRig overhead_camera(const Aabb& container, double height, int width, int image_height, double focal) {
  CameraRig rig;
  rig.intrinsics = {focal, focal, (width - 1) / 2.0, (image_height - 1) / 2.0, width, image_height};
  Eigen::Matrix3d R;
  R << 1, 0, 0,  //
      0, -1, 0,  //
      0, 0, -1;
  rig.pose.linear() = R;
  const Vec3 center = (container.min + container.max) / 2;
  rig.pose.translation() = Vec3(center.x(), center.y(), container.min.z() + height);
  return rig;
}

void SceneSpec::validate() const {
  auto violation = [](const std::string& msg) { throw Error(ErrorCode::kInvariantViolation, msg); };
  if (!((container.max - container.min).array() > 0.0).all()) violation("container bounds are empty");
  std::set<LabelId> labels;
  for (const auto& obj : objects) {
    const std::string who = "object '" + obj.name + "' (label " + std::to_string(obj.label) + ")";
    if (obj.label == 0) violation(who + ": label 0 is reserved for background");
    if (!labels.insert(obj.label).second) violation(who + ": duplicate label");
    if (!(obj.mass > 0.0)) violation(who + ": mass must be positive");
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          bool ok = true;
          if constexpr (std::is_same_v<S, Box>) ok = s.w > 0 && s.d > 0 && s.h > 0;
          if constexpr (std::is_same_v<S, Cylinder>) ok = s.r > 0 && s.h > 0;
          if constexpr (std::is_same_v<S, Sphere>) ok = s.r > 0;
          if (!ok) violation(who + ": dimensions must be positive");
        },
        obj.shape);
    if (!container.contains(bounds(obj), 1e-6)) violation(who + ": outside the container");
  }
  std::map<LabelId, std::vector<LabelId>> edges;
  for (const auto& rel : clutter) {
    if (!labels.count(rel.upper) || !labels.count(rel.lower)) violation("clutter relation names an unknown label");
    if (rel.upper == rel.lower) violation("clutter relation on a single object");
    edges[rel.upper].push_back(rel.lower);
  }
  // Depth-first cycle check over upper -> lower edges.
  std::map<LabelId, int> state;
  std::function<void(LabelId)> visit = [&](LabelId n) {
    state[n] = 1;
    for (LabelId m : edges[n]) {
      if (state[m] == 1) violation("clutter relations contain a cycle");
      if (state[m] == 0) visit(m);
    }
    state[n] = 2;
  };
  for (LabelId l : labels) {
    if (state[l] == 0) visit(l);
  }
  if (noise.sigma < 0.0 || noise.dropout < 0.0 || noise.dropout > 1.0) violation("noise out of range");
  camera.intrinsics.validate();
}

const SimObject* SceneSpec::find(LabelId label) const {
  for (const auto& obj : objects) {
    if (obj.label == label) return &obj;
  }
  return nullptr;
}

const SimObject* SceneSpec::find(std::string_view name) const {
  for (const auto& obj : objects) {
    if (obj.name == name) return &obj;
  }
  return nullptr;
}

double SceneSpec::load_on(LabelId label, double coupling) const {
  const SimObject* self = find(label);
  if (!self) return 0.0;
  double load = self->mass;
  std::set<LabelId> seen{label};
  std::vector<LabelId> frontier{label};
  while (!frontier.empty()) {
    const LabelId lower = frontier.back();
    frontier.pop_back();
    for (const auto& rel : clutter) {
      if (rel.kind != RelationKind::kSupports || rel.lower != lower || !seen.insert(rel.upper).second) continue;
      if (const SimObject* upper = find(rel.upper)) load += coupling * upper->mass;
      frontier.push_back(rel.upper);
    }
  }
  return load;
}

namespace {

[[noreturn]] void scene_error(int line, const std::string& msg) {
  throw Error(ErrorCode::kParseError, "scene line " + std::to_string(line) + ": " + msg);
}

Pose read_pose(std::istream& in, int line) {
  double m[12];
  for (double& x : m) {
    if (!(in >> x)) scene_error(line, "expected 12 pose numbers (row-major 3x4)");
  }
  Pose p = Pose::Identity();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.linear()(r, c) = m[r * 4 + c];
    p.translation()[r] = m[r * 4 + 3];
  }
  if (!(p.linear().transpose() * p.linear()).isApprox(Eigen::Matrix3d::Identity(), 1e-6) ||
      p.linear().determinant() < 0.0) {
    scene_error(line, "pose rotation is not orthonormal and right-handed");
  }
  return p;
}

void write_pose(std::ostream& out, const Pose& p) {
  char buf[64];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof buf, " %.17g", c < 3 ? p.linear()(r, c) : p.translation()[r]);
      out << buf;
    }
  }
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SceneSpec parse_scene(std::string_view text) {
  SceneSpec scene;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  bool header = false;
  bool custom_camera = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::istringstream ls(raw.substr(0, hash));
    std::string key;
    if (!(ls >> key)) continue;
    if (!header) {
      std::string version;
      if (key != "graspkit-scene" || !(ls >> version) || version != "v1") {
        scene_error(lineno, "expected header 'graspkit-scene v1'");
      }
      header = true;
      continue;
    }
    if (key == "container") {
      Aabb& c = scene.container;
      if (!(ls >> c.min.x() >> c.min.y() >> c.min.z() >> c.max.x() >> c.max.y() >> c.max.z())) {
        scene_error(lineno, "container takes 6 numbers");
      }
    } else if (key == "noise") {
      if (!(ls >> scene.noise.sigma >> scene.noise.dropout)) scene_error(lineno, "noise takes <sigma> <dropout>");
    } else if (key == "seed") {
      if (!(ls >> scene.seed)) scene_error(lineno, "seed takes an unsigned integer");
    } else if (key == "camera") {
      auto& k = scene.camera.intrinsics;
      if (!(ls >> k.fx >> k.fy >> k.cx >> k.cy >> k.width >> k.height)) {
        scene_error(lineno, "camera takes fx fy cx cy width height");
      }
      custom_camera = true;
    } else if (key == "camera_pose") {
      scene.camera.pose = read_pose(ls, lineno);
      custom_camera = true;
    } else if (key == "object") {
      SimObject obj;
      std::string shape;
      std::string tag;
      if (!(ls >> obj.label >> obj.name >> shape >> tag) || tag != "pose") {
        scene_error(lineno, "expected 'object <label> <name> <shape> pose <12 numbers> mass <kg> [flags]'");
      }
      obj.shape = parse_shape(shape);
      obj.pose = read_pose(ls, lineno);
      if (!(ls >> tag) || tag != "mass" || !(ls >> obj.mass)) scene_error(lineno, "expected 'mass <kg>'");
      while (ls >> tag) {
        if (tag == "porous") obj.porous = true;
        else if (tag == "depth_absorbing") obj.depth_absorbing = true;
        else if (tag == "deformable") obj.deformable = true;
        else scene_error(lineno, "unknown object flag '" + tag + "'");
      }
      scene.objects.push_back(std::move(obj));
    } else if (key == "relation") {
      std::string kind;
      ClutterRelation rel;
      if (!(ls >> kind >> rel.upper >> rel.lower)) scene_error(lineno, "expected 'relation <kind> <upper> <lower>'");
      if (kind == "supports") rel.kind = RelationKind::kSupports;
      else if (kind == "occludes") rel.kind = RelationKind::kOccludes;
      else scene_error(lineno, "unknown relation '" + kind + "'");
      scene.clutter.push_back(rel);
    } else {
      scene_error(lineno, "unknown directive '" + key + "'");
    }
  }
  if (!header) throw Error(ErrorCode::kParseError, "empty scene file");
  if (!custom_camera) scene.camera = overhead_camera(scene.container, 1.0);
  scene.validate();
  return scene;
}

SceneSpec load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open scene '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

std::string format_scene(const SceneSpec& scene) {
  std::ostringstream out;
  out << "graspkit-scene v1\n";
  const auto& c = scene.container;
  out << "container " << num(c.min.x()) << " " << num(c.min.y()) << " " << num(c.min.z()) << " " << num(c.max.x())
      << " " << num(c.max.y()) << " " << num(c.max.z()) << "\n";
  out << "noise " << num(scene.noise.sigma) << " " << num(scene.noise.dropout) << "\n";
  out << "seed " << scene.seed << "\n";
  const auto& k = scene.camera.intrinsics;
  out << "camera " << num(k.fx) << " " << num(k.fy) << " " << num(k.cx) << " " << num(k.cy) << " " << k.width << " "
      << k.height << "\n";
  out << "camera_pose";
  write_pose(out, scene.camera.pose);
  out << "\n";
  for (const auto& obj : scene.objects) {
    out << "object " << obj.label << " " << obj.name << " " << format_shape(obj.shape) << " pose";
    write_pose(out, obj.pose);
    out << " mass " << num(obj.mass);
    if (obj.porous) out << " porous";
    if (obj.depth_absorbing) out << " depth_absorbing";
    if (obj.deformable) out << " deformable";
    out << "\n";
  }
  for (const auto& rel : scene.clutter) {
    out << "relation " << (rel.kind == RelationKind::kSupports ? "supports" : "occludes") << " " << rel.upper << " "
        << rel.lower << "\n";
  }
  return out.str();
}

std::uint64_t Rng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // Box-Muller, one variate per call keeps the stream position predictable.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (b * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  return r.next();
}

namespace {

Rgb label_color(LabelId label) {
  static constexpr Rgb kPalette[] = {{230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
                                     {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230},
                                     {210, 245, 60}, {250, 190, 190}, {0, 128, 128}, {170, 110, 40}};
  return kPalette[(label - 1) % std::size(kPalette)];
}

}  // namespace

RGBDFrame render(const SceneSpec& scene) {
  const CameraIntrinsics& k = scene.camera.intrinsics;
  k.validate();
  RGBDFrame frame;
  frame.intrinsics = k;
  frame.pose = scene.camera.pose;
  frame.color = Image<Rgb>(k.width, k.height, Rgb{0, 0, 0});
  frame.depth = Image<double>(k.width, k.height, kInvalidDepth);
  frame.labels = Image<LabelId>(k.width, k.height, 0);

  const Vec3 origin = scene.camera.pose.translation();
  const Eigen::Matrix3d R = scene.camera.pose.linear();
  const Vec3 light = Vec3(0.3, 0.2, 1.0).normalized();
  Rng rng(scene.seed);

  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      // Camera-frame z of the direction is 1, so the hit parameter is the depth.
      const Vec3 dir = R * Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      // Both draws happen for every pixel so the stream stays aligned across
      // noise settings.
      const double n = rng.normal();
      const double drop = rng.uniform();

      const auto hit = raycast(scene, origin, dir);
      if (!hit) continue;
      const SimObject* obj = hit->label ? scene.find(hit->label) : nullptr;
      frame.labels(u, v) = hit->label;

      const Rgb base = obj ? label_color(hit->label) : Rgb{128, 128, 128};
      const double shade = 0.35 + 0.65 * std::max(0.0, hit->normal.dot(light));
      for (int ch = 0; ch < 3; ++ch) frame.color(u, v)[ch] = static_cast<std::uint8_t>(std::lround(base[ch] * shade));

      if (obj && obj->depth_absorbing) continue;
      double depth = hit->t + scene.noise.sigma * n;
      if (drop < scene.noise.dropout) depth = kInvalidDepth;
      frame.depth(u, v) = is_valid_depth(depth) ? depth : kInvalidDepth;
    }
  }
  return frame;
}

}  // namespace graspkit
