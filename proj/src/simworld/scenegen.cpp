#include <algorithm>
#include <cmath>
#include <numeric>

#include "graspkit/error.hpp"
#include "graspkit/simworld.hpp"

namespace graspkit {

std::string_view to_string(Regime r) { return r == Regime::kUncluttered ? "uncluttered" : "cluttered"; }

SimObject sim_object_from_profile(const ItemProfile& profile, LabelId label) {
  if (profile.shape.empty()) {
    throw Error(ErrorCode::kConfigError, "item '" + profile.name + "' has no shape for simulation");
  }
  SimObject obj;
  obj.name = profile.name;
  obj.label = label;
  obj.shape = parse_shape(profile.shape);
  obj.mass = profile.mass;
  obj.porous = profile.porous;
  obj.depth_absorbing = !profile.depth_recoverable;
  obj.deformable = profile.deformable;
  return obj;
}

namespace {

using Eigen::AngleAxisd;
using Eigen::Matrix3d;

// Gap kept between companions standing on the floor.
constexpr double kFloorClearance = 0.03;

// Rotation that rests the object on a stable face with a random heading.
Matrix3d resting_rotation(const Shape& shape, Rng& rng) {
  Matrix3d rest = Matrix3d::Identity();
  if (const auto* b = std::get_if<Box>(&shape)) {
    // Larger faces are proportionally more likely to end up underneath.
    // Faces that would leave the box standing tall on a narrow base tip over.
    const double dims[3] = {b->w, b->d, b->h};
    double areas[3];
    for (int i = 0; i < 3; ++i) {
      const double base_a = dims[(i + 1) % 3];
      const double base_b = dims[(i + 2) % 3];
      const bool stable = dims[i] <= 1.5 * std::min(base_a, base_b);
      areas[i] = stable ? base_a * base_b : 0.0;
    }
    if (areas[0] + areas[1] + areas[2] == 0.0) areas[2] = 1.0;
    const double pick = rng.uniform() * (areas[0] + areas[1] + areas[2]);
    if (pick < areas[0]) {
      rest = AngleAxisd(std::numbers::pi / 2, Vec3::UnitY()).toRotationMatrix();
    } else if (pick < areas[0] + areas[1]) {
      rest = AngleAxisd(std::numbers::pi / 2, Vec3::UnitX()).toRotationMatrix();
    }
  } else if (const auto* c = std::get_if<Cylinder>(&shape)) {
    const bool upright = c->h < 2.0 * c->r || (c->h < 6.0 * c->r && rng.uniform() < 0.5);
    if (!upright) rest = AngleAxisd(std::numbers::pi / 2, Vec3::UnitX()).toRotationMatrix();
  }
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return AngleAxisd(heading, Vec3::UnitZ()).toRotationMatrix() * rest;
}

Matrix3d random_tilt(double max_tilt, Rng& rng) {
  const double axis_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double tilt = rng.uniform(0.4 * max_tilt, max_tilt);
  return AngleAxisd(tilt, Vec3(std::cos(axis_angle), std::sin(axis_angle), 0.0)).toRotationMatrix();
}

// Moves `obj` so its lowest point sits at `floor_z` and its footprint stays
// within the container.
void settle(SimObject& obj, double floor_z, const Aabb& container) {
  Aabb box = bounds(obj);
  Vec3 shift(0.0, 0.0, floor_z - box.min.z());
  for (int i = 0; i < 2; ++i) {
    if (box.min[i] < container.min[i]) shift[i] = container.min[i] - box.min[i];
    if (box.max[i] > container.max[i]) shift[i] = container.max[i] - box.max[i];
  }
  obj.pose.translation() += shift;
}

double footprint_radius(const SimObject& obj) {
  const Aabb box = bounds(obj);
  return 0.5 * std::hypot(box.max.x() - box.min.x(), box.max.y() - box.min.y());
}

Vec3 random_floor_point(const SimObject& obj, const Aabb& container, Rng& rng) {
  const Aabb box = bounds(obj);
  const Vec3 half = (box.max - box.min) / 2;
  const double margin = 0.02;
  Vec3 p;
  for (int i = 0; i < 2; ++i) {
    const double lo = container.min[i] + half[i] + margin;
    const double hi = container.max[i] - half[i] - margin;
    p[i] = lo < hi ? rng.uniform(lo, hi) : (container.min[i] + container.max[i]) / 2;
  }
  p.z() = 0.0;
  return p;
}

SimObject place_on_floor(SimObject obj, const Aabb& container, Rng& rng) {
  obj.pose = Pose::Identity();
  obj.pose.linear() = resting_rotation(obj.shape, rng);
  obj.pose.translation() = random_floor_point(obj, container, rng);
  settle(obj, container.min.z(), container);
  return obj;
}

// Rests `obj`, tilted, on top of `base` near its center.
SimObject place_on(SimObject obj, const SimObject& base, const SceneGenParams& params, Rng& rng) {
  obj.pose = Pose::Identity();
  obj.pose.linear() = random_tilt(params.max_tilt, rng) * resting_rotation(obj.shape, rng);
  const Aabb under = bounds(base);
  const double reach = 0.5 * std::min(under.max.x() - under.min.x(), under.max.y() - under.min.y());
  const Vec3 c = base.pose.translation();
  obj.pose.translation() = Vec3(c.x() + rng.uniform(-reach, reach), c.y() + rng.uniform(-reach, reach), 0.0);
  settle(obj, under.max.z() - 0.005, params.container);
  return obj;
}

// Leans `obj` over one side of `lower`, so `lower` stays partly in view.
SimObject place_across(SimObject obj, const SimObject& lower, const SceneGenParams& params, Rng& rng) {
  obj.pose = Pose::Identity();
  obj.pose.linear() = random_tilt(params.max_tilt, rng) * resting_rotation(obj.shape, rng);
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double offset = rng.uniform(0.6, 1.0) * footprint_radius(lower);
  const Vec3 c = lower.pose.translation();
  obj.pose.translation() = Vec3(c.x() + offset * std::cos(heading), c.y() + offset * std::sin(heading), 0.0);
  settle(obj, bounds(lower).max.z() - 0.005, params.container);
  return obj;
}

}  // namespace

SceneSpec generate_scene(const std::vector<SimObject>& catalog, std::size_t target, Regime regime,
                         std::uint64_t seed, const SceneGenParams& params) {
  if (target >= catalog.size()) throw Error(ErrorCode::kInvalidArgument, "target index outside catalog");
  Rng rng(seed);
  SceneSpec scene;
  scene.container = params.container;
  scene.noise = params.noise;
  scene.seed = mix_seed(seed, 0x5eedULL);
  scene.camera = overhead_camera(params.container, params.camera_height);

  LabelId next_label = 1;
  auto labeled = [&](const SimObject& templ) {
    SimObject obj = templ;
    obj.label = next_label++;
    return obj;
  };

  if (regime == Regime::kUncluttered || catalog.size() == 1) {
    scene.objects.push_back(place_on_floor(labeled(catalog[target]), params.container, rng));
    scene.validate();
    return scene;
  }

  // Companions: a seeded sample of the other catalog items.
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (i != target) others.push_back(i);
  }
  for (std::size_t i = others.size(); i > 1; --i) std::swap(others[i - 1], others[rng.index(i)]);
  const int span = std::max(0, params.clutter_max - params.clutter_min);
  const std::size_t wanted = static_cast<std::size_t>(params.clutter_min + static_cast<int>(rng.index(span + 1)));
  others.resize(std::min(others.size(), wanted));

  std::size_t next_other = 0;
  SimObject target_obj = labeled(catalog[target]);
  if (next_other < others.size() && rng.uniform() < params.target_on_top_probability) {
    SimObject base = place_on_floor(labeled(catalog[others[next_other++]]), params.container, rng);
    target_obj = place_on(target_obj, base, params, rng);
    scene.clutter.push_back({RelationKind::kSupports, target_obj.label, base.label});
    scene.objects.push_back(base);
  } else {
    target_obj = place_on_floor(target_obj, params.container, rng);
  }
  scene.objects.push_back(target_obj);

  bool covered = false;
  for (; next_other < others.size(); ++next_other) {
    SimObject comp = labeled(catalog[others[next_other]]);
    if (!covered && rng.uniform() < params.cover_probability) {
      comp = place_across(comp, target_obj, params, rng);
      scene.clutter.push_back({RelationKind::kSupports, comp.label, target_obj.label});
      scene.clutter.push_back({RelationKind::kOccludes, comp.label, target_obj.label});
      scene.objects.push_back(comp);
      covered = true;
      continue;
    }
    // Beside the pile: reject placements overlapping what is already on the floor.
    bool placed = false;
    for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
      SimObject cand = place_on_floor(comp, params.container, rng);
      const double r = footprint_radius(cand);
      placed = std::all_of(scene.objects.begin(), scene.objects.end(), [&](const SimObject& o) {
        const Vec3 d = o.pose.translation() - cand.pose.translation();
        return std::hypot(d.x(), d.y()) > r + footprint_radius(o) + kFloorClearance;
      });
      if (placed) scene.objects.push_back(cand);
    }
  }
  scene.validate();
  return scene;
}

}  // namespace graspkit
