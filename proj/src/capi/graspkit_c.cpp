#include "graspkit/graspkit.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "graspkit/error.hpp"
#include "graspkit/frame_io.hpp"
#include "graspkit/harness.hpp"

using namespace graspkit;

struct gk_frame {
  LabeledFrame lf;
};
struct gk_scene {
  SceneSpec spec;
};
struct gk_registry {
  ItemRegistry items;
};
struct gk_plan {
  GraspPlan plan;
  LabelId label = 0;
};
struct gk_report {
  TrialReport report;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

gk_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument: return GK_INVALID_ARGUMENT;
    case ErrorCode::kUnknownLabel: return GK_UNKNOWN_LABEL;
    case ErrorCode::kNoValidDepth: return GK_NO_VALID_DEPTH;
    case ErrorCode::kEmptyMask: return GK_EMPTY_MASK;
    case ErrorCode::kTooFewPoints: return GK_TOO_FEW_POINTS;
    case ErrorCode::kDegenerateCloud: return GK_DEGENERATE_CLOUD;
    case ErrorCode::kParseError: return GK_PARSE_ERROR;
    case ErrorCode::kInvariantViolation: return GK_INVARIANT_VIOLATION;
    case ErrorCode::kNoViableClass: return GK_NO_VIABLE_CLASS;
    case ErrorCode::kToolMismatch: return GK_TOOL_MISMATCH;
    case ErrorCode::kIoError: return GK_IO_ERROR;
    case ErrorCode::kConfigError: return GK_CONFIG_ERROR;
  }
  return GK_INTERNAL_ERROR;
}

template <typename F>
gk_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return GK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GK_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown failure";
    return GK_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

SynthesisParams from_c(const gk_synthesis_params& p) {
  SynthesisParams s;
  s.k_neighbors = p.k_neighbors;
  s.min_edge_distance = p.min_edge_distance_px;
  s.max_angle_from_vertical = p.max_angle_from_vertical_rad;
  s.min_candidate_separation = p.min_candidate_separation;
  s.assumed_depth = p.assumed_depth;
  s.max_candidates = p.max_candidates;
  s.edge_weight = p.edge_weight;
  s.angle_weight = p.angle_weight;
  s.edge_reference = p.edge_reference_px;
  return s;
}

TrialConfig config_with_overrides(const char* config_path, const char* items_path, const char* out_dir) {
  TrialConfig c;
  if (config_path) {
    c = load_trial_config(config_path);
  } else {
    c.params.assumed_depth = c.scene.camera_height;
  }
  if (items_path) c.items_path = items_path;
  if (out_dir) c.output_dir = out_dir;
  return c;
}

}  // namespace

extern "C" {

const char* gk_version(void) { return "0.1.0"; }

const char* gk_status_string(gk_status s) {
  switch (s) {
    case GK_OK: return "Ok";
    case GK_INTERNAL_ERROR: return "InternalError";
    default:
      if (s > GK_OK && s < GK_INTERNAL_ERROR) return to_string(static_cast<ErrorCode>(s - 1));
  }
  return "UnknownStatus";
}

const char* gk_last_error(void) { return g_last_error.c_str(); }

gk_synthesis_params gk_synthesis_params_default(void) {
  const SynthesisParams s;
  return {s.k_neighbors,     s.min_edge_distance, s.max_angle_from_vertical, s.min_candidate_separation,
          s.assumed_depth,   s.max_candidates,    s.edge_weight,             s.angle_weight,
          s.edge_reference};
}

gk_status gk_frame_load(const char* dir, gk_frame** out) {
  return guarded([&] {
    require(dir && out, "null argument");
    *out = new gk_frame{load_frame(dir)};
  });
}

gk_status gk_frame_save(const gk_frame* frame, const char* dir) {
  return guarded([&] {
    require(frame && dir, "null argument");
    save_frame(frame->lf, dir);
  });
}

gk_status gk_frame_size(const gk_frame* frame, int* width, int* height) {
  return guarded([&] {
    require(frame && width && height, "null argument");
    *width = frame->lf.frame.width();
    *height = frame->lf.frame.height();
  });
}

gk_status gk_frame_label_for_name(const gk_frame* frame, const char* name, uint16_t* label) {
  return guarded([&] {
    require(frame && name && label, "null argument");
    *label = frame->lf.label_for(name);
    if (!*label) throw Error(ErrorCode::kUnknownLabel, std::string("no label named '") + name + "' in frame");
  });
}

void gk_frame_free(gk_frame* frame) { delete frame; }

gk_status gk_scene_load(const char* path, gk_scene** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new gk_scene{load_scene_file(path)};
  });
}

gk_status gk_scene_render(const gk_scene* scene, gk_frame** out) {
  return guarded([&] {
    require(scene && out, "null argument");
    auto f = std::make_unique<gk_frame>();
    f->lf.frame = render(scene->spec);
    for (const auto& o : scene->spec.objects) f->lf.names[o.label] = o.name;
    *out = f.release();
  });
}

void gk_scene_free(gk_scene* scene) { delete scene; }

gk_status gk_registry_load(const char* path, gk_registry** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new gk_registry{load_item_registry_file(path)};
  });
}

gk_status gk_registry_size(const gk_registry* registry, size_t* count) {
  return guarded([&] {
    require(registry && count, "null argument");
    *count = registry->items.size();
  });
}

void gk_registry_free(gk_registry* registry) { delete registry; }

gk_status gk_plan_grasp(const gk_frame* frame, const gk_registry* registry, const char* item,
                        const gk_synthesis_params* params, gk_plan** out) {
  return guarded([&] {
    require(frame && item && out, "null argument");
    const LabelId label = frame->lf.label_for(item);
    if (!label) throw Error(ErrorCode::kUnknownLabel, std::string("no label named '") + item + "' in frame");
    ItemProfile profile = default_profile(item);
    if (registry) {
      const auto it = registry->items.find(std::string_view(item));
      if (it != registry->items.end()) profile = it->second;
    }
    const SynthesisParams sp = params ? from_c(*params) : SynthesisParams{};
    *out = new gk_plan{plan_grasp(frame->lf.frame, label, profile, sp), label};
  });
}

gk_status gk_plan_candidate_count(const gk_plan* plan, size_t* count) {
  return guarded([&] {
    require(plan && count, "null argument");
    *count = plan->plan.candidates.size();
  });
}

gk_status gk_plan_candidate(const gk_plan* plan, size_t index, gk_candidate* out) {
  return guarded([&] {
    require(plan && out, "null argument");
    require(index < plan->plan.candidates.size(), "candidate index out of range");
    const GraspCandidate& c = plan->plan.candidates[index];
    for (int i = 0; i < 3; ++i) {
      out->position[i] = c.position[i];
      out->approach[i] = c.approach[i];
    }
    out->yaw = c.yaw;
    out->score = c.score;
    out->method = static_cast<int>(c.method);
    out->depth_assumed = c.depth_assumed ? 1 : 0;
    out->pixel_u = c.pixel.u;
    out->pixel_v = c.pixel.v;
  });
}

gk_status gk_plan_class(const gk_plan* plan, char* buf, size_t cap) {
  return guarded([&] {
    require(plan && buf && cap > 0, "null argument");
    const std::string s = to_string(plan->plan.class_used);
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  });
}

gk_status gk_plan_write_candidates(const gk_plan* plan, const char* path) {
  return guarded([&] {
    require(plan && path, "null argument");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::kIoError, std::string("cannot write ") + path);
    write_candidates(out, plan->plan.candidates);
    if (!out) throw Error(ErrorCode::kIoError, std::string("write failed for ") + path);
  });
}

gk_status gk_plan_overlay(const gk_plan* plan, const gk_frame* frame, const char* out_path) {
  return guarded([&] {
    require(plan && frame && out_path, "null argument");
    render_overlay(frame->lf.frame, plan->label, plan->plan.candidates, out_path);
  });
}

void gk_plan_free(gk_plan* plan) { delete plan; }

gk_status gk_run_trials(const char* config_path, const char* items_path, const char* out_dir, gk_report** out) {
  return guarded([&] {
    require(out, "null argument");
    const TrialConfig c = config_with_overrides(config_path, items_path, out_dir);
    auto r = std::make_unique<gk_report>();
    r->report = run_trials(c);
    r->summary = summary_text(r->report);
    write_report(r->report, c.output_dir);
    *out = r.release();
  });
}

gk_status gk_endurance_run(const char* config_path, const char* items_path, const char* out_dir, int cycles,
                           gk_report** out) {
  return guarded([&] {
    require(out, "null argument");
    const TrialConfig c = config_with_overrides(config_path, items_path, out_dir);
    auto r = std::make_unique<gk_report>();
    r->report = endurance_run(c, cycles);
    r->summary = summary_text(r->report);
    write_report(r->report, c.output_dir);
    *out = r.release();
  });
}

const char* gk_report_summary(const gk_report* report) { return report ? report->summary.c_str() : ""; }

gk_status gk_report_aggregate(const gk_report* report, int regime, int* successes, int* attempts) {
  return guarded([&] {
    require(report && successes && attempts, "null argument");
    require(regime == 0 || regime == 1, "regime must be 0 or 1");
    const auto& agg = report->report.stats.aggregate;
    const auto it = agg.find(regime == 0 ? Regime::kUncluttered : Regime::kCluttered);
    *successes = it == agg.end() ? 0 : it->second.successes;
    *attempts = it == agg.end() ? 0 : it->second.attempts;
  });
}

void gk_report_free(gk_report* report) { delete report; }

}  // extern "C"
