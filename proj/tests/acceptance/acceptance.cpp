// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <thread>

#include "../unit/oracles.hpp"
#include "graspkit/error.hpp"
#include "graspkit/harness.hpp"
#include "graspkit/planner.hpp"
#include "graspkit/simworld.hpp"
#include "graspkit/synthesis.hpp"

using namespace graspkit;
namespace fs = std::filesystem;

namespace {

const std::string kData = GRASPKIT_DATA_DIR;
const std::string kConfigs = GRASPKIT_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

SimObject on_floor(const std::string& name, LabelId label, const std::string& shape, double x, double y,
                   const Eigen::Matrix3d& R = Eigen::Matrix3d::Identity(), double mass = 0.2) {
  SimObject o;
  o.name = name;
  o.label = label;
  o.shape = parse_shape(shape);
  o.pose.linear() = R;
  o.pose.translation() = Vec3(x, y, 0);
  o.mass = mass;
  o.pose.translation().z() = -bounds(o).min.z();
  return o;
}

SceneSpec scene_with(std::vector<SimObject> objects, int w = 640, int h = 480, double focal = 600) {
  SceneSpec s;
  s.objects = std::move(objects);
  s.camera = overhead_camera(s.container, 1.0, w, h, focal);
  s.validate();
  return s;
}

// --- geometry ---------------------------------------------------------------

Outcome geometry() {
  Outcome o;
  // Plane.
  const Vec3 n_true = Vec3(-0.4, 0.25, 1.0).normalized();
  const Vec3 u = n_true.unitOrthogonal();
  const Vec3 v = n_true.cross(u);
  std::vector<Vec3> plane;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) plane.push_back(Vec3(0.2, -0.1, 0.6) + 0.007 * i * u + 0.009 * j * v);
  double plane_err = 0.0;
  for (const auto& n : estimate_normals(plane, 16, Vec3(0.2, -0.1, 0.6) + n_true)) {
    o.require(n.has_value(), "plane normal missing");
    if (n) plane_err = std::max(plane_err, oracle::angle(*n, n_true));
  }
  o.require(plane_err <= 1e-6, fmt("plane normal error %.3g rad", plane_err));

  // Sphere, Fibonacci sampled.
  const int count = 10000;
  const Vec3 c(0.0, 0.1, 0.4);
  const double r = 0.15;
  std::vector<Vec3> sphere;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double rho = std::sqrt(1.0 - z * z);
    sphere.push_back(c + r * Vec3(rho * std::cos(golden * i), rho * std::sin(golden * i), z));
  }
  const Vec3 view = c + Vec3(0, 0, 2);
  const auto normals = estimate_normals(sphere, 16, view);
  double sphere_err = 0.0;
  for (int i = 0; i < count; ++i) {
    o.require(normals[i].has_value(), "sphere normal missing");
    if (!normals[i]) continue;
    sphere_err = std::max(sphere_err, oracle::axis_angle(*normals[i], sphere[i] - c));
    o.require(normals[i]->dot(view - sphere[i]) >= 0.0, "sphere normal faces away from the view");
  }
  o.require(sphere_err < 2.0 * std::numbers::pi / 180, fmt("sphere normal error %.3f deg", sphere_err * 180 / std::numbers::pi));

  // Edge distance: every mask up to 4x4, then random masks of every size up to 32x32.
  long masks = 0;
  auto compare = [&](const Mask& m) {
    const auto got = edge_distance(m);
    const auto want = oracle::edge_distance(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (std::abs(got[i] - want[i]) > 1e-9) return false;
    }
    ++masks;
    return true;
  };
  for (int w = 1; w <= 4; ++w)
    for (int h = 1; h <= 4; ++h)
      for (int bits = 1; bits < (1 << (w * h)); ++bits) {
        Mask m(w, h, 0);
        for (int i = 0; i < w * h; ++i) m[i] = (bits >> i) & 1;
        o.require(compare(m), "edge distance differs on a small mask");
      }
  std::mt19937_64 rng(2017);
  for (int w = 1; w <= 32; ++w)
    for (int h = 1; h <= 32; ++h)
      for (int rep = 0; rep < 2; ++rep) {
        Mask m(w, h, 0);
        const double fill = 0.3 + 0.69 * (rng() % 1000) / 1000.0;
        for (auto& px : m.data()) px = (rng() % 1000) / 1000.0 < fill;
        m(static_cast<int>(rng() % w), static_cast<int>(rng() % h)) = 1;
        o.require(compare(m), fmt("edge distance differs on a %gx%g mask", w, h));
      }

  // Principal axes of a 100x20x20 mm box sample.
  double axis_err = 0.0;
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3d R = oracle::random_rotation(rng);
    std::vector<Vec3> pts;
    for (int i = 0; i < 4000; ++i) pts.push_back(R * Vec3(0.1 * U(rng), 0.02 * U(rng), 0.02 * U(rng)));
    axis_err = std::max(axis_err, oracle::axis_angle(principal_axes(pts).axes[0], R.col(0)));
  }
  o.require(axis_err < std::numbers::pi / 180, fmt("major axis error %.3f deg", axis_err * 180 / std::numbers::pi));

  if (o.pass) {
    o.detail = fmt("plane %.1e rad, sphere %.2f deg, %g masks exact, box axis %.3f deg", plane_err,
                   sphere_err * 180 / std::numbers::pi, static_cast<double>(masks), axis_err * 180 / std::numbers::pi);
  }
  return o;
}

// --- synthesis --------------------------------------------------------------

Outcome synthesis() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-0.1, 0.1);
  const char* shapes[] = {"box:0.12x0.08x0.05", "cylinder:0.04x0.1", "sphere:0.05", "box:0.2x0.1x0.04"};
  SynthesisParams params;
  params.max_candidates = 1000000;
  long survivors = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const Eigen::Matrix3d R =
        (Eigen::AngleAxisd(U(rng) * 30, Vec3::UnitZ()) * Eigen::AngleAxisd(0.5 * (rng() % 100) / 100.0, Vec3::UnitX()))
            .toRotationMatrix();
    SceneSpec scene = scene_with({on_floor("item", 1, shapes[trial % 4], U(rng), U(rng), R)}, 160, 120, 150);
    scene.noise = {0.0005, 0.05};
    scene.seed = static_cast<std::uint64_t>(trial);
    const RGBDFrame f = render(scene);
    const Segment seg = extract_segment(f, 1);
    const auto edges = oracle::edge_distance(seg.mask);
    params.min_edge_distance = 2.0 + trial % 3;
    for (const auto& c : synth_surface_normals(seg, f, params)) {
      o.require(edges(c.pixel.u, c.pixel.v) >= params.min_edge_distance, "candidate too close to the mask edge");
      o.require(oracle::angle(c.approach, kDown) <= params.max_angle_from_vertical + 1e-12, "candidate too steep");
      ++survivors;
    }
  }
  o.require(survivors > 100, "too few surviving candidates to judge");

  // Diversity reorder.
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng() % 40;
    const double sep = 0.02 + 0.1 * (rng() % 100) / 100.0;
    std::vector<GraspCandidate> in(n);
    for (auto& c : in) {
      c.position = Vec3((rng() % 1000) * 3e-4, (rng() % 1000) * 3e-4, (rng() % 1000) * 3e-5);
      c.score = static_cast<double>(rng() % 10) / 10.0;
    }
    const auto out = diversity_reorder(in, sep);
    auto key = [](const GraspCandidate& c) { return std::tuple(c.score, c.position.x(), c.position.y(), c.position.z()); };
    std::vector<std::tuple<double, double, double, double>> a, b;
    for (const auto& c : in) a.push_back(key(c));
    for (const auto& c : out) b.push_back(key(c));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    o.require(a == b, "diversity reorder is not a permutation");
    if (n == 0) continue;
    auto clear = [&](const GraspCandidate& c, std::size_t upto) {
      for (std::size_t j = 0; j < upto; ++j)
        if ((out[j].position - c.position).norm() < sep) return false;
      return true;
    };
    std::size_t prefix = 0;
    while (prefix < n && clear(out[prefix], prefix)) ++prefix;
    for (std::size_t i = 0; i < prefix; ++i)
      for (std::size_t j = i; j < n; ++j)
        if (clear(out[j], i)) o.require(out[i].score >= out[j].score, "prefix pick is not the best separated");
    for (std::size_t j = prefix; j < n; ++j) {
      o.require(!clear(out[j], prefix), "a separated candidate was left out of the prefix");
      if (j > prefix) o.require(out[j - 1].score >= out[j].score, "remainder is not sorted by score");
    }
  }

  // rgbd centroid against exhaustive search.
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 40);
    const int h = 8 + static_cast<int>(rng() % 40);
    RGBDFrame f;
    f.intrinsics = {120, 120, w / 2.0, h / 2.0, w, h};
    f.color = Image<Rgb>(w, h);
    f.depth = Image<double>(w, h, kInvalidDepth);
    f.labels = Image<LabelId>(w, h, 0);
    const double p_label = 0.2 + 0.7 * (rng() % 100) / 100.0;
    const double p_depth = 0.05 + 0.9 * (rng() % 100) / 100.0;
    f.labels(w / 2, h / 2) = 5;
    f.depth(w / 2, h / 2) = 0.8;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if ((rng() % 1000) / 1000.0 >= p_label) continue;
        f.labels(x, y) = 5;
        f.depth(x, y) = (rng() % 1000) / 1000.0 < p_depth ? 0.5 + (rng() % 100) / 100.0 : kInvalidDepth;
      }
    double cu = 0, cv = 0, k = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (f.labels(x, y) == 5) cu += x, cv += y, k += 1;
    cu /= k, cv /= k;
    double best = std::numeric_limits<double>::infinity();
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (f.labels(x, y) == 5 && is_valid_depth(f.depth(x, y))) best = std::min(best, std::hypot(x - cu, y - cv));
    const GraspCandidate c = synth_rgbd_centroid(extract_segment(f, 5));
    o.require(std::abs(std::hypot(c.pixel.u - cu, c.pixel.v - cv) - best) < 1e-9, "rgbd centroid is not the nearest valid pixel");
  }
  if (o.pass) o.detail = fmt("%g surviving candidates checked, 1000 diversity sets, 200 rgbd segments", double(survivors));
  return o;
}

// --- class routing ----------------------------------------------------------

Outcome routing() {
  Outcome o;
  ItemProfile plain = default_profile("plain");
  ItemProfile grip;
  grip.name = "grip";
  grip.primary_class = {Method::kRgbdCentroid, Tool::kGrip};
  grip.fallback_classes = default_fallbacks(grip.primary_class);
  grip.needs_grip = true;
  ItemProfile dark;
  dark.name = "dark";
  dark.primary_class = {Method::kRgbCentroid, Tool::kSuction};
  dark.fallback_classes = default_fallbacks(dark.primary_class);
  dark.depth_recoverable = false;
  struct Cell {
    const ItemProfile* profile;
    double coverage;
    GraspingClass expect;
  };
  const Cell table[] = {
      {&plain, 0.0, {Method::kRgbCentroid, Tool::kSuction}},  {&plain, 0.3, {Method::kRgbCentroid, Tool::kSuction}},
      {&plain, 0.9, {Method::kSurfaceNormals, Tool::kSuction}}, {&grip, 0.0, {Method::kRgbCentroid, Tool::kGrip}},
      {&grip, 0.3, {Method::kRgbCentroid, Tool::kGrip}},      {&grip, 0.9, {Method::kRgbdCentroid, Tool::kGrip}},
      {&dark, 0.0, {Method::kRgbCentroid, Tool::kSuction}},   {&dark, 0.3, {Method::kRgbCentroid, Tool::kSuction}},
      {&dark, 0.9, {Method::kRgbCentroid, Tool::kSuction}},
  };
  int cells = 0;
  for (const auto& cell : table) {
    Segment s;
    s.depth_coverage = cell.coverage;
    const GraspingClass got = select_class(*cell.profile, s);
    o.require(got == cell.expect, cell.profile->name + " at coverage " + fmt("%.1f", cell.coverage) + " routed to " +
                                      to_string(got));
    ++cells;
  }
  if (o.pass) o.detail = fmt("%g of 9 cells exact", cells);
  return o;
}

// --- determinism ------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  TrialConfig c = load_trial_config(kConfigs + "/default.json");
  c.attempts_per_item = 2;
  c.seeds = {1, 2};
  const fs::path base = fs::temp_directory_path() / "graspkit_acceptance_det";
  fs::remove_all(base);
  c.workers = 1;
  const TrialReport a = run_trials(c);
  write_report(a, (base / "a").string());
  c.workers = std::max(4, workers());
  const TrialReport b = run_trials(c);
  write_report(b, (base / "b").string());
  const std::string csv_a = slurp(base / "a" / "trials.csv");
  const std::string csv_b = slurp(base / "b" / "trials.csv");
  o.require(!csv_a.empty(), "no CSV written");
  o.require(csv_a == csv_b, "trial CSVs differ between runs");
  o.require(slurp(base / "a" / "summary.txt") == slurp(base / "b" / "summary.txt"), "summaries differ between runs");
  o.require(tally(parse_trials_csv(csv_a)) == a.stats, "statistics do not recompute from the CSV");
  if (o.pass) o.detail = fmt("%g rows byte-identical across two runs (1 and %g workers)", double(a.records.size()), c.workers);
  return o;
}

// --- directional replication ------------------------------------------------

constexpr double kZ95 = 1.6448536269514722;  // one-sided 95%

double wilson_lower(int k, int n) {
  const double p = static_cast<double>(k) / n;
  const double z2 = kZ95 * kZ95;
  return (p + z2 / (2 * n) - kZ95 * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n))) / (1 + z2 / n);
}

Outcome failure_free() {
  Outcome o;
  TrialConfig c = load_trial_config(kConfigs + "/failure_free.json");
  c.workers = workers();
  const TrialReport r = run_trials(c);
  const Tally t = r.stats.aggregate.count(Regime::kUncluttered) ? r.stats.aggregate.at(Regime::kUncluttered) : Tally{};
  o.require(t.attempts >= 100, fmt("only %g trials", t.attempts));
  o.require(t.successes == t.attempts, fmt("%g of %g attached", t.successes, t.attempts));
  if (o.pass) o.detail = fmt("uncluttered %g/%g attached with failure-free attach models", t.successes, t.attempts);
  return o;
}

Outcome default_params() {
  Outcome o;
  TrialConfig c = load_trial_config(kConfigs + "/default.json");
  c.seeds.clear();
  for (std::uint64_t s = 1; s <= 30; ++s) c.seeds.push_back(s);
  c.attempts_per_item = 1;
  c.workers = workers();
  const TrialReport r = run_trials(c);
  const Tally u = r.stats.aggregate.at(Regime::kUncluttered);
  const Tally k = r.stats.aggregate.at(Regime::kCluttered);
  const double pu = u.fraction();
  const double pc = k.fraction();
  const double lo_u = wilson_lower(u.successes, u.attempts);
  const double gap = pu - pc;
  const double gap_lo = gap - kZ95 * std::sqrt(pu * (1 - pu) / u.attempts + pc * (1 - pc) / k.attempts);
  o.require(u.attempts >= 500 && k.attempts >= 500, fmt("only %g/%g trials", u.attempts, k.attempts));
  o.require(lo_u >= 0.85, fmt("uncluttered %.4f, lower bound %.4f < 0.85", pu, lo_u));
  o.require(gap_lo >= 0.03, fmt("gap %.4f, lower bound %.4f < 0.03", gap, gap_lo));
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "uncluttered %d/%d = %.4f (95%% lower %.4f), cluttered %d/%d = %.4f, gap %.4f (95%% lower %.4f)",
                u.successes, u.attempts, pu, lo_u, k.successes, k.attempts, pc, gap, gap_lo);
  if (o.pass) o.detail = buf;
  else o.detail += std::string("; ") + buf;
  return o;
}

// --- failure modes ----------------------------------------------------------

Outcome failure_modes() {
  Outcome o;
  const AttachParams ff = AttachParams::failure_free();

  SimObject sponge = on_floor("sponge", 1, "box:0.1x0.07x0.04", 0, 0);
  sponge.porous = true;
  const SuctionContact on_sponge{surface_patch(sponge, Vec3(0, 0, 0.04), ff.cup_sag), kDown, sponge.mass};
  o.require(attach_model_suction(on_sponge, sponge, AttachParams{}) == 0.0, "porous suction is not zero");
  o.require(attach_model_suction(on_sponge, sponge, ff) == 0.0, "porous suction is not zero without failures");

  const SimObject dumbbell = on_floor("dumbbell", 2, "box:0.1x0.1x0.05", 0, 0, Eigen::Matrix3d::Identity(), 1.4);
  const SuctionContact heavy{surface_patch(dumbbell, Vec3(0, 0, 0.05), ff.cup_sag), kDown, dumbbell.mass};
  o.require(attach_model_suction(heavy, dumbbell, AttachParams{}) == 0.0, "suction holds more than 1 kg");
  o.require(attach_model_suction(heavy, dumbbell, ff) == 0.0, "suction holds more than 1 kg without failures");

  SimObject dark = on_floor("black_tray", 1, "box:0.16x0.12x0.03", 0.03, -0.02);
  dark.depth_absorbing = true;
  const SceneSpec dark_scene = scene_with({dark});
  ItemProfile dark_profile;
  dark_profile.name = "black_tray";
  dark_profile.primary_class = {Method::kRgbCentroid, Tool::kSuction};
  dark_profile.depth_recoverable = false;
  SynthesisParams sp;
  sp.assumed_depth = 1.0;
  const GraspPlan plan = plan_grasp(render(dark_scene), 1, dark_profile, sp);
  o.require(plan.class_used.method == Method::kRgbCentroid, "zero-depth item not routed to rgb_centroid");
  SensorRig rig;
  const AttachResult res = descend_and_attach(plan, dark_scene, rig, WristState{}, ff, 3);
  o.require(res.descent_stop_cause == StopCause::kScaleContact,
            "zero-depth descent stopped on " + std::string(to_string(res.descent_stop_cause)));

  const SimObject rod = on_floor("flashlight", 1, "cylinder:0.02x0.2", 0, 0,
                                 Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitY()).toRotationMatrix());
  const GripContact top{Vec3(0, 0, 0.04), kDown};
  const double parallel = *yaw_of(Vec3::UnitX(), kDown);
  const double perpendicular = *yaw_of(Vec3::UnitY(), kDown);
  o.require(attach_model_grip(top, rod, ff.jaw_span, parallel, ff) == 0.0, "long cylinder grips at parallel yaw");
  o.require(attach_model_grip(top, rod, ff.jaw_span, perpendicular, ff) > 0.0, "long cylinder fails at perpendicular yaw");
  if (o.pass) o.detail = "porous suction 0, 1.4 kg suction 0, zero-depth rgb_centroid stops on scale_contact, rod yaw parallel 0 / perpendicular 1";
  return o;
}

// --- overlay ----------------------------------------------------------------

Outcome overlay() {
  Outcome o;
  const SceneSpec scene = load_scene_file(kData + "/scenes/spray_bottle.scene");
  const RGBDFrame frame = render(scene);
  const ItemRegistry reg = load_item_registry_file(kData + "/benchmark17.reg");
  const auto it = reg.find("spray_bottle");
  const ItemProfile profile = it != reg.end() ? it->second : default_profile("spray_bottle");
  const LabelId label = scene.find("spray_bottle")->label;
  const GraspPlan plan = plan_grasp(frame, label, profile, SynthesisParams{});
  const fs::path out = fs::temp_directory_path() / "graspkit_acceptance_overlay.svg";
  render_overlay(frame, label, plan.candidates, out.string());
  const std::string svg = slurp(out);
  o.require(svg.find("<path class=\"silhouette\"") != std::string::npos, "no silhouette");

  static const std::regex re(
      R"re(<line class="(best|candidate)" data-score="([^"]+)" x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" y2="([^"]+)")re");
  std::vector<std::pair<double, double>> arrows;
  int best = 0;
  for (auto m = std::sregex_iterator(svg.begin(), svg.end(), re); m != std::sregex_iterator(); ++m) {
    best += (*m)[1] == "best";
    const double len = std::hypot(std::stod((*m)[5]) - std::stod((*m)[3]), std::stod((*m)[6]) - std::stod((*m)[4]));
    arrows.emplace_back(std::stod((*m)[2]), len);
  }
  o.require(arrows.size() >= 2, fmt("only %g arrows", double(arrows.size())));
  o.require(best == 1, fmt("%g best markers", best));
  for (const auto& a : arrows)
    for (const auto& b : arrows)
      if (a.first < b.first) o.require(a.second < b.second, "arrow lengths are not monotone in score");
  if (o.pass) o.detail = fmt("%g arrows, lengths monotone in score, one best marker", double(arrows.size()));
  return o;
}

// --- endurance --------------------------------------------------------------

Outcome endurance() {
  Outcome o;
  TrialConfig c = load_trial_config(kConfigs + "/default.json");
  c.seeds = {1};
  c.workers = workers();
  c.label_noise_rate = 0.05;
  const TrialReport r = endurance_run(c, 4);
  const std::size_t items = load_item_registry_file(c.items_path).size();
  o.require(r.records.size() == items * 2 * 4, "endurance did not attempt every item every cycle");
  int flagged = 0;
  for (const auto& rec : r.records) flagged += rec.misclassified;
  o.require(r.stats.excluded == flagged, "misclassified attempts leaked into statistics");
  o.require(r.stats.per_item.size() == items * 2, "per-item statistics missing");
  if (o.pass) {
    o.detail = fmt("%g items x 4 cycles, %g transfers, %g excluded as misclassified", double(items), r.transfers, flagged);
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"geometry_oracles", geometry},
      {"synthesis_properties", synthesis},
      {"class_routing", routing},
      {"pipeline_determinism", determinism},
      {"directional_failure_free", failure_free},
      {"directional_default_params", default_params},
      {"failure_modes", failure_modes},
      {"overlay_spray_bottle", overlay},
      {"endurance_17_items", endurance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
