// Command-line front end; talks to the library only through graspkit.h.
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "graspkit/graspkit.h"

#ifndef GRASPKIT_DATA_DIR
#define GRASPKIT_DATA_DIR "data"
#endif

namespace {

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using FramePtr = std::unique_ptr<gk_frame, Deleter<gk_frame, gk_frame_free>>;
using ScenePtr = std::unique_ptr<gk_scene, Deleter<gk_scene, gk_scene_free>>;
using RegistryPtr = std::unique_ptr<gk_registry, Deleter<gk_registry, gk_registry_free>>;
using PlanPtr = std::unique_ptr<gk_plan, Deleter<gk_plan, gk_plan_free>>;
using ReportPtr = std::unique_ptr<gk_report, Deleter<gk_report, gk_report_free>>;

struct Failure {
  gk_status status;
};

void check(gk_status s) {
  if (s != GK_OK) throw Failure{s};
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

int exit_code(gk_status s) {
  switch (s) {
    case GK_CONFIG_ERROR:
    case GK_PARSE_ERROR: return 2;
    case GK_IO_ERROR: return 3;
    default: return 1;
  }
}

RegistryPtr maybe_registry(const std::string& path) {
  if (path.empty()) return {};
  gk_registry* r = nullptr;
  check(gk_registry_load(path.c_str(), &r));
  return RegistryPtr(r);
}

void print_report(gk_report* report) {
  std::fputs(gk_report_summary(report), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grasp synthesis and simulated pick trials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gk_version()));

  std::string config, items, out;
  auto* run = app.add_subcommand("run", "run the trial protocol from a JSON config");
  run->add_option("--config", config, "trial config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--items", items, "item registry, overrides the config");
  run->add_option("--out", out, "output directory, overrides the config");

  int cycles = 1;
  auto* endurance = app.add_subcommand("endurance", "repeated tote-to-bin transfers of the item set");
  endurance->add_option("--cycles", cycles, "transfer cycles")->required();
  endurance->add_option("--config", config, "trial config (JSON); built-in defaults if omitted");
  endurance->add_option("--items", items, "item registry");
  endurance->add_option("--out", out, "output directory");

  std::string frame_dir, item, registry_path;
  auto* overlay = app.add_subcommand("overlay", "plan an item in a frame and draw the candidates as SVG");
  overlay->add_option("--frame", frame_dir, "frame directory")->required();
  overlay->add_option("--item", item, "item name in the frame")->required();
  overlay->add_option("--out", out, "SVG output file")->required();
  overlay->add_option("--items", registry_path, "item registry for the item's profile");

  std::string candidates_out;
  auto* plan = app.add_subcommand("plan", "plan an item in a frame and write its candidates");
  plan->add_option("--frame", frame_dir, "frame directory")->required();
  plan->add_option("--item", item, "item name in the frame")->required();
  plan->add_option("--out", candidates_out, "candidate file")->required();
  plan->add_option("--items", registry_path, "item registry for the item's profile");

  std::string scene_path;
  auto* render = app.add_subcommand("render", "render a scene file to a frame directory");
  render->add_option("--scene", scene_path, "scene file")->required()->check(CLI::ExistingFile);
  render->add_option("--out", out, "frame directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      gk_report* r = nullptr;
      check(gk_run_trials(config.c_str(), opt(items), opt(out), &r));
      ReportPtr report(r);
      print_report(report.get());
    } else if (endurance->parsed()) {
      if (config.empty() && items.empty()) items = GRASPKIT_DATA_DIR "/benchmark17.reg";
      if (config.empty() && out.empty()) out = "endurance";
      gk_report* r = nullptr;
      check(gk_endurance_run(opt(config), opt(items), opt(out), cycles, &r));
      ReportPtr report(r);
      print_report(report.get());
    } else if (overlay->parsed() || plan->parsed()) {
      gk_frame* f = nullptr;
      check(gk_frame_load(frame_dir.c_str(), &f));
      FramePtr frame(f);
      const RegistryPtr registry = maybe_registry(registry_path);
      gk_plan* p = nullptr;
      check(gk_plan_grasp(frame.get(), registry.get(), item.c_str(), nullptr, &p));
      PlanPtr planned(p);
      char cls[64];
      check(gk_plan_class(planned.get(), cls, sizeof cls));
      size_t n = 0;
      check(gk_plan_candidate_count(planned.get(), &n));
      if (overlay->parsed()) {
        check(gk_plan_overlay(planned.get(), frame.get(), out.c_str()));
        std::printf("%s: %zu candidates via %s -> %s\n", item.c_str(), n, cls, out.c_str());
      } else {
        check(gk_plan_write_candidates(planned.get(), candidates_out.c_str()));
        std::printf("%s: %zu candidates via %s -> %s\n", item.c_str(), n, cls, candidates_out.c_str());
      }
    } else if (render->parsed()) {
      gk_scene* s = nullptr;
      check(gk_scene_load(scene_path.c_str(), &s));
      ScenePtr scene(s);
      gk_frame* f = nullptr;
      check(gk_scene_render(scene.get(), &f));
      FramePtr frame(f);
      check(gk_frame_save(frame.get(), out.c_str()));
      std::printf("rendered %s -> %s\n", scene_path.c_str(), out.c_str());
    }
  } catch (const Failure& e) {
    std::fprintf(stderr, "graspkit: %s: %s\n", gk_status_string(e.status), gk_last_error());
    return exit_code(e.status);
  }
  return 0;
}
