#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graspkit/error.hpp"
#include "graspkit/harness.hpp"

namespace graspkit {

using nlohmann::json;

void TrialConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfigError, m); };
  if (attempts_per_item < 1) fail("attempts_per_item must be at least 1");
  if (seeds.empty()) fail("seeds must not be empty");
  if (regimes.empty()) fail("regimes must not be empty");
  if (!(label_noise_rate >= 0.0 && label_noise_rate <= 1.0)) fail("label_noise_rate must be in [0, 1]");
  if (workers < 1) fail("workers must be at least 1");
  if (!(quality_threshold >= 0.0 && quality_threshold <= 1.0)) fail("quality_threshold must be in [0, 1]");
  try {
    params.validate();
  } catch (const Error& e) {
    fail(std::string("params: ") + e.what());
  }
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Reads known keys from an object and rejects anything else.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw Error(ErrorCode::kConfigError, where_ + " must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw Error(ErrorCode::kConfigError, where_ + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out, double scale = 1.0) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      if constexpr (std::is_floating_point_v<T>) {
        out = j_.at(key).template get<double>() * scale;
      } else {
        out = j_.at(key).template get<T>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kConfigError, where_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Regime parse_regime(const std::string& s) {
  if (s == "uncluttered") return Regime::kUncluttered;
  if (s == "cluttered") return Regime::kCluttered;
  throw Error(ErrorCode::kConfigError, "unknown regime '" + s + "'");
}

void read_params(const json& j, SynthesisParams& p) {
  Reader r(j, "params");
  r.get("k_neighbors", p.k_neighbors);
  r.get("min_edge_distance_px", p.min_edge_distance);
  r.get("max_angle_from_vertical_deg", p.max_angle_from_vertical, kDeg);
  r.get("min_candidate_separation", p.min_candidate_separation);
  r.get("assumed_depth", p.assumed_depth);
  r.get("max_candidates", p.max_candidates);
  r.get("edge_weight", p.edge_weight);
  r.get("angle_weight", p.angle_weight);
  r.get("edge_reference_px", p.edge_reference);
}

void read_attach(const json& j, AttachParams& a) {
  if (j.is_object() && j.contains("failure_free") && j.at("failure_free").is_boolean() &&
      j.at("failure_free").get<bool>()) {
    a = AttachParams::failure_free();
  }
  Reader r(j, "attach");
  bool ff = false;
  r.get("failure_free", ff);
  r.get("cup_radius", a.cup_radius);
  r.get("cup_sag", a.cup_sag);
  r.get("suction_capacity_kg", a.suction_capacity_kg);
  r.get("suction_base", a.suction_base);
  r.get("heavy_knee", a.heavy_knee);
  r.get("heavy_floor", a.heavy_floor);
  r.get("seal_angle_deg", a.seal_angle, kDeg);
  r.get("jaw_span", a.jaw_span);
  r.get("grip_base", a.grip_base);
  r.get("grip_alignment_tolerance_deg", a.grip_alignment_tolerance, kDeg);
  r.get("finger_depth", a.finger_depth);
  r.get("lift_drop_rate", a.lift_drop_rate);
  r.get("deformable_drop_factor", a.deformable_drop_factor);
  r.get("clutter_mass_coupling", a.clutter_mass_coupling);
  r.get("press_force_kg", a.press_force_kg);
  r.get("descent_step", a.descent_step);
  r.get("safety_limit", a.safety_limit);
  r.get("standoff", a.standoff);
  r.get("depth_overshoot", a.depth_overshoot);
}

void read_scene(const json& j, SceneGenParams& s) {
  Reader r(j, "scene");
  std::vector<double> lo, hi;
  r.get("container_min", lo);
  r.get("container_max", hi);
  for (auto* v : {&lo, &hi}) {
    if (!v->empty() && v->size() != 3) throw Error(ErrorCode::kConfigError, "scene container corners need 3 values");
  }
  if (!lo.empty()) s.container.min = Vec3(lo[0], lo[1], lo[2]);
  if (!hi.empty()) s.container.max = Vec3(hi[0], hi[1], hi[2]);
  r.get("camera_height", s.camera_height);
  r.get("depth_noise_sigma", s.noise.sigma);
  r.get("depth_dropout", s.noise.dropout);
  r.get("clutter_min", s.clutter_min);
  r.get("clutter_max", s.clutter_max);
  r.get("cover_probability", s.cover_probability);
  r.get("target_on_top_probability", s.target_on_top_probability);
  r.get("max_tilt_deg", s.max_tilt, kDeg);
  if (s.clutter_min < 0 || s.clutter_max < s.clutter_min) {
    throw Error(ErrorCode::kConfigError, "scene: need 0 <= clutter_min <= clutter_max");
  }
}

}  // namespace

TrialConfig parse_trial_config(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  TrialConfig c;
  // The synthetic camera sits camera_height above the floor, so the floor is
  // the natural guess for items without depth.
  c.params.assumed_depth = c.scene.camera_height;
  {
    Reader r(j, "config");
    r.get("items", c.items_path);
    std::vector<std::string> regimes;
    r.get("regimes", regimes);
    if (!regimes.empty()) {
      c.regimes.clear();
      for (const auto& s : regimes) c.regimes.push_back(parse_regime(s));
    }
    r.get("attempts_per_item", c.attempts_per_item);
    r.get("seeds", c.seeds);
    r.get("quality_threshold", c.quality_threshold);
    r.get("output_dir", c.output_dir);
    r.get("only_items", c.items);
    r.get("label_noise_rate", c.label_noise_rate);
    r.get("workers", c.workers);
    if (const json* s = r.sub("scene")) {
      read_scene(*s, c.scene);
      c.params.assumed_depth = c.scene.camera_height;
    }
    if (const json* p = r.sub("params")) read_params(*p, c.params);
    if (const json* a = r.sub("attach")) read_attach(*a, c.attach);
  }
  if (!c.items_path.empty() && std::filesystem::path(c.items_path).is_relative()) {
    c.items_path = (std::filesystem::path(base_dir) / c.items_path).lexically_normal().string();
  }
  c.validate();
  return c;
}

TrialConfig load_trial_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  try {
    return parse_trial_config(ss.str(), dir.empty() ? "." : dir.string());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string format_trial_config(const TrialConfig& c) {
  json j;
  j["items"] = c.items_path;
  std::vector<std::string> regimes;
  for (Regime r : c.regimes) regimes.emplace_back(to_string(r));
  j["regimes"] = regimes;
  j["attempts_per_item"] = c.attempts_per_item;
  j["seeds"] = c.seeds;
  j["quality_threshold"] = c.quality_threshold;
  j["only_items"] = c.items;
  j["label_noise_rate"] = c.label_noise_rate;
  const auto& p = c.params;
  j["params"] = {{"k_neighbors", p.k_neighbors},
                 {"min_edge_distance_px", p.min_edge_distance},
                 {"max_angle_from_vertical_deg", p.max_angle_from_vertical / kDeg},
                 {"min_candidate_separation", p.min_candidate_separation},
                 {"assumed_depth", p.assumed_depth},
                 {"max_candidates", p.max_candidates},
                 {"edge_weight", p.edge_weight},
                 {"angle_weight", p.angle_weight},
                 {"edge_reference_px", p.edge_reference}};
  const auto& a = c.attach;
  j["attach"] = {{"cup_radius", a.cup_radius},
                 {"cup_sag", a.cup_sag},
                 {"suction_capacity_kg", a.suction_capacity_kg},
                 {"suction_base", a.suction_base},
                 {"heavy_knee", a.heavy_knee},
                 {"heavy_floor", a.heavy_floor},
                 {"seal_angle_deg", a.seal_angle / kDeg},
                 {"jaw_span", a.jaw_span},
                 {"grip_base", a.grip_base},
                 {"grip_alignment_tolerance_deg", a.grip_alignment_tolerance / kDeg},
                 {"finger_depth", a.finger_depth},
                 {"lift_drop_rate", a.lift_drop_rate},
                 {"deformable_drop_factor", a.deformable_drop_factor},
                 {"clutter_mass_coupling", a.clutter_mass_coupling},
                 {"press_force_kg", a.press_force_kg},
                 {"descent_step", a.descent_step},
                 {"safety_limit", a.safety_limit},
                 {"standoff", a.standoff},
                 {"depth_overshoot", a.depth_overshoot}};
  const auto& s = c.scene;
  j["scene"] = {{"container_min", {s.container.min.x(), s.container.min.y(), s.container.min.z()}},
                {"container_max", {s.container.max.x(), s.container.max.y(), s.container.max.z()}},
                {"camera_height", s.camera_height},
                {"depth_noise_sigma", s.noise.sigma},
                {"depth_dropout", s.noise.dropout},
                {"clutter_min", s.clutter_min},
                {"clutter_max", s.clutter_max},
                {"cover_probability", s.cover_probability},
                {"target_on_top_probability", s.target_on_top_probability},
                {"max_tilt_deg", s.max_tilt / kDeg}};
  // Output location and worker count do not affect results and are left out
  // so the echo is identical wherever a run is written.
  return j.dump(2);
}

}  // namespace graspkit
