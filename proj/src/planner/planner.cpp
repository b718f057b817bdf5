#include "graspkit/planner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "graspkit/error.hpp"

namespace graspkit {

bool is_valid_class(const GraspingClass& c) {
  return std::find(std::begin(kGraspingClasses), std::end(kGraspingClasses), c) != std::end(kGraspingClasses);
}

std::string to_string(const GraspingClass& c) {
  return std::string(to_string(c.method)) + "/" + std::string(to_string(c.tool));
}

void ItemProfile::validate() const {
  auto violation = [&](const std::string& rule) {
    throw Error(ErrorCode::kInvariantViolation, "item '" + name + "': " + rule);
  };
  if (name.empty()) violation("name must be nonempty");
  if (!is_valid_class(primary_class)) violation(to_string(primary_class) + " is not a grasping class");
  for (const auto& c : fallback_classes) {
    if (!is_valid_class(c)) violation("fallback " + to_string(c) + " is not a grasping class");
  }
  if (std::find(fallback_classes.begin(), fallback_classes.end(), primary_class) != fallback_classes.end()) {
    violation("primary class repeated among fallbacks");
  }
  if (needs_grip && primary_class.tool != Tool::kGrip) violation("needs_grip requires a grip primary class");
  if (!depth_recoverable && primary_class.method != Method::kRgbCentroid) {
    violation("depth_recoverable=false requires an rgb_centroid primary class");
  }
  if (!(mass > 0.0)) violation("mass must be positive");
}

std::vector<GraspingClass> default_fallbacks(const GraspingClass& primary) {
  std::vector<GraspingClass> out;
  for (Method m : {Method::kSurfaceNormals, Method::kRgbdCentroid, Method::kRgbCentroid}) {
    if (m <= primary.method) continue;
    const GraspingClass c{m, primary.tool};
    if (is_valid_class(c)) out.push_back(c);
  }
  return out;
}

ItemProfile default_profile(std::string name) {
  ItemProfile p;
  p.name = std::move(name);
  p.primary_class = {Method::kSurfaceNormals, Tool::kSuction};
  p.fallback_classes = default_fallbacks(p.primary_class);
  return p;
}

double depth_coverage_metric(const Segment& segment) { return segment.depth_coverage; }

GraspingClass select_class(const ItemProfile& profile, const Segment& segment, double quality_threshold,
                           const DepthQualityMetric& metric) {
  const bool depth_ok = metric(segment) >= quality_threshold;
  auto usable = [&](const GraspingClass& c) { return depth_ok || !needs_depth(c.method); };
  if (usable(profile.primary_class)) return profile.primary_class;
  for (const auto& c : profile.fallback_classes) {
    if (usable(c)) return c;
  }
  throw Error(ErrorCode::kNoViableClass, "item '" + profile.name + "': no class usable at depth quality " +
                                             std::to_string(metric(segment)));
}

namespace {

std::vector<GraspCandidate> synthesize(Method method, const Segment& segment, const RGBDFrame& frame,
                                       const SynthesisParams& params) {
  switch (method) {
    case Method::kSurfaceNormals:
      if (segment.points.empty()) return {};
      return synth_surface_normals(segment, frame, params);
    case Method::kRgbdCentroid:
      if (segment.points.empty()) return {};
      return {synth_rgbd_centroid(segment)};
    case Method::kRgbCentroid: return {synth_rgb_centroid(segment, frame, params)};
  }
  return {};
}

}  // namespace

GraspPlan plan_grasp(const RGBDFrame& frame, LabelId label, const ItemProfile& profile,
                     const SynthesisParams& params, const PlanOptions& options) {
  const Segment segment = extract_segment(frame, label);
  GraspingClass cls = select_class(profile, segment, options.quality_threshold, options.metric);

  std::vector<GraspCandidate> candidates = synthesize(cls.method, segment, frame, params);
  // Demote toward methods needing less information, keeping the tool.
  while (candidates.empty() && cls.method != Method::kRgbCentroid) {
    cls.method = cls.method == Method::kSurfaceNormals ? Method::kRgbdCentroid : Method::kRgbCentroid;
    candidates = synthesize(cls.method, segment, frame, params);
  }
  // Without depth, the footprint on the assumed-depth plane stands in for the cloud.
  std::vector<Vec3> footprint;
  if (segment.points.size() < 3) {
    for (const Pixel& px : segment.mask_pixels) {
      footprint.push_back(deproject_pixel(frame.intrinsics, frame.pose, px.u, px.v, params.assumed_depth));
    }
  }
  const std::span<const Vec3> cloud = footprint.empty() ? std::span<const Vec3>(segment.points) : footprint;
  for (auto& c : candidates) c = align_yaw(c, cloud, cls.tool);

  GraspPlan plan;
  plan.item = profile.name;
  plan.class_used = cls;
  plan.candidates = std::move(candidates);
  plan.tool = cls.tool;
  plan.depth_quality = options.metric(segment);
  return plan;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + msg);
}

bool parse_bool(int line, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  parse_error(line, "'" + key + "' expects a boolean, got '" + v + "'");
}

GraspingClass parse_class(int line, const std::string& method, const std::string& tool) {
  const auto m = parse_method(method);
  if (!m) parse_error(line, "unknown method '" + method + "'");
  const auto t = parse_tool(tool);
  if (!t) parse_error(line, "unknown tool '" + tool + "'");
  return {*m, *t};
}

}  // namespace

ItemRegistry load_item_registry(std::string_view text) {
  ItemRegistry table;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string::npos) parse_error(lineno, "expected '<name>: <method>, <tool>'");
    ItemProfile p;
    p.name = trim(std::string_view(line).substr(0, colon));
    if (p.name.empty()) parse_error(lineno, "empty item name");
    const auto fields = split(std::string_view(line).substr(colon + 1), ',');
    if (fields.size() < 2) parse_error(lineno, "expected '<method>, <tool>' after the item name");
    p.primary_class = parse_class(lineno, fields[0], fields[1]);

    bool explicit_fallbacks = false;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const auto eq = fields[i].find('=');
      if (eq == std::string::npos) parse_error(lineno, "expected key=value, got '" + fields[i] + "'");
      const std::string key = trim(std::string_view(fields[i]).substr(0, eq));
      const std::string value = trim(std::string_view(fields[i]).substr(eq + 1));
      if (key == "mass") {
        try {
          std::size_t used = 0;
          p.mass = std::stod(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          parse_error(lineno, "'mass' expects a number, got '" + value + "'");
        }
      } else if (key == "porous") {
        p.porous = parse_bool(lineno, key, value);
      } else if (key == "needs_grip") {
        p.needs_grip = parse_bool(lineno, key, value);
      } else if (key == "depth_recoverable") {
        p.depth_recoverable = parse_bool(lineno, key, value);
      } else if (key == "deformable") {
        p.deformable = parse_bool(lineno, key, value);
      } else if (key == "shape") {
        p.shape = value;
      } else if (key == "fallback") {
        explicit_fallbacks = true;
        if (value == "none") continue;
        for (const auto& entry : split(value, '|')) {
          const auto slash = entry.find('/');
          if (slash == std::string::npos) parse_error(lineno, "fallback entries are <method>/<tool>");
          p.fallback_classes.push_back(parse_class(lineno, trim(std::string_view(entry).substr(0, slash)),
                                                   trim(std::string_view(entry).substr(slash + 1))));
        }
      } else {
        parse_error(lineno, "unknown key '" + key + "'");
      }
    }
    if (!explicit_fallbacks) p.fallback_classes = default_fallbacks(p.primary_class);
    if (table.count(p.name)) parse_error(lineno, "duplicate item '" + p.name + "'");
    p.validate();
    table.emplace(p.name, std::move(p));
  }
  return table;
}

ItemRegistry load_item_registry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open item registry '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_item_registry(ss.str());
}

std::string serialize_registry(const ItemRegistry& registry) {
  std::ostringstream out;
  char mass[64];
  for (const auto& [name, p] : registry) {
    std::snprintf(mass, sizeof mass, "%.17g", p.mass);
    out << name << ": " << to_string(p.primary_class.method) << ", " << to_string(p.primary_class.tool)
        << ", mass=" << mass << ", porous=" << (p.porous ? "true" : "false")
        << ", needs_grip=" << (p.needs_grip ? "true" : "false")
        << ", depth_recoverable=" << (p.depth_recoverable ? "true" : "false")
        << ", deformable=" << (p.deformable ? "true" : "false") << ", fallback=";
    if (p.fallback_classes.empty()) out << "none";
    for (std::size_t i = 0; i < p.fallback_classes.size(); ++i) {
      out << (i ? "|" : "") << to_string(p.fallback_classes[i]);
    }
    if (!p.shape.empty()) out << ", shape=" << p.shape;
    out << "\n";
  }
  return out.str();
}

}  // namespace graspkit
