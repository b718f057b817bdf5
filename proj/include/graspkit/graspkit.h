/* C interface to graspkit. Every call returns a gk_status; on failure the
   message is available from gk_last_error() on the same thread. */
#ifndef GRASPKIT_H
#define GRASPKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GK_API __declspec(dllexport)
#else
#define GK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gk_status {
  GK_OK = 0,
  GK_INVALID_ARGUMENT,
  GK_UNKNOWN_LABEL,
  GK_NO_VALID_DEPTH,
  GK_EMPTY_MASK,
  GK_TOO_FEW_POINTS,
  GK_DEGENERATE_CLOUD,
  GK_PARSE_ERROR,
  GK_INVARIANT_VIOLATION,
  GK_NO_VIABLE_CLASS,
  GK_TOOL_MISMATCH,
  GK_IO_ERROR,
  GK_CONFIG_ERROR,
  GK_INTERNAL_ERROR
} gk_status;

typedef struct gk_frame gk_frame;
typedef struct gk_scene gk_scene;
typedef struct gk_registry gk_registry;
typedef struct gk_plan gk_plan;
typedef struct gk_report gk_report;

typedef struct gk_candidate {
  double position[3];
  double approach[3];
  double yaw;
  double score;
  int method; /* 0 surface_normals, 1 rgbd_centroid, 2 rgb_centroid */
  int depth_assumed;
  int pixel_u;
  int pixel_v;
} gk_candidate;

typedef struct gk_synthesis_params {
  size_t k_neighbors;
  double min_edge_distance_px;
  double max_angle_from_vertical_rad;
  double min_candidate_separation;
  double assumed_depth;
  size_t max_candidates;
  double edge_weight;
  double angle_weight;
  double edge_reference_px;
} gk_synthesis_params;

GK_API const char* gk_version(void);
GK_API const char* gk_status_string(gk_status status);
GK_API const char* gk_last_error(void);

GK_API gk_synthesis_params gk_synthesis_params_default(void);

/* Frames: directory with color.ppm, depth.pgm, labels.pgm and meta.txt. */
GK_API gk_status gk_frame_load(const char* dir, gk_frame** out);
GK_API gk_status gk_frame_save(const gk_frame* frame, const char* dir);
GK_API gk_status gk_frame_size(const gk_frame* frame, int* width, int* height);
GK_API gk_status gk_frame_label_for_name(const gk_frame* frame, const char* name, uint16_t* label);
GK_API void gk_frame_free(gk_frame* frame);

GK_API gk_status gk_scene_load(const char* path, gk_scene** out);
GK_API gk_status gk_scene_render(const gk_scene* scene, gk_frame** out);
GK_API void gk_scene_free(gk_scene* scene);

GK_API gk_status gk_registry_load(const char* path, gk_registry** out);
GK_API gk_status gk_registry_size(const gk_registry* registry, size_t* count);
GK_API void gk_registry_free(gk_registry* registry);

/* Plans a grasp on the item `item` in `frame`. An item missing from the
   registry gets the default profile. `params` may be NULL for defaults. */
GK_API gk_status gk_plan_grasp(const gk_frame* frame, const gk_registry* registry, const char* item,
                               const gk_synthesis_params* params, gk_plan** out);
GK_API gk_status gk_plan_candidate_count(const gk_plan* plan, size_t* count);
GK_API gk_status gk_plan_candidate(const gk_plan* plan, size_t index, gk_candidate* out);
/* Writes "method/tool" into buf, truncating to cap bytes including the terminator. */
GK_API gk_status gk_plan_class(const gk_plan* plan, char* buf, size_t cap);
GK_API gk_status gk_plan_write_candidates(const gk_plan* plan, const char* path);
GK_API gk_status gk_plan_overlay(const gk_plan* plan, const gk_frame* frame, const char* out_path);
GK_API void gk_plan_free(gk_plan* plan);

/* Trials from a JSON config, or built-in defaults when `config_path` is NULL.
   `items_path` and `out_dir` override the config when non-NULL. */
GK_API gk_status gk_run_trials(const char* config_path, const char* items_path, const char* out_dir,
                               gk_report** out);
GK_API gk_status gk_endurance_run(const char* config_path, const char* items_path, const char* out_dir, int cycles,
                                  gk_report** out);
/* Summary text; valid until the report is freed. */
GK_API const char* gk_report_summary(const gk_report* report);
/* regime: 0 uncluttered, 1 cluttered. */
GK_API gk_status gk_report_aggregate(const gk_report* report, int regime, int* successes, int* attempts);
GK_API void gk_report_free(gk_report* report);

#ifdef __cplusplus
}
#endif

#endif
