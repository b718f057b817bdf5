#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "graspkit/error.hpp"
#include "graspkit/harness.hpp"

namespace graspkit {

namespace {

// FNV-1a; keeps per-item seeds stable when the item subset changes.
std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct TrialKey {
  std::size_t item;  // index into the catalog
  Regime regime;
  std::uint64_t seed;
  int attempt;
};

struct World {
  std::vector<const ItemProfile*> profiles;
  std::vector<SimObject> catalog;
};

World build_world(const ItemRegistry& registry) {
  World w;
  for (const auto& [name, profile] : registry) {
    w.profiles.push_back(&profile);
    w.catalog.push_back(sim_object_from_profile(profile, 0));
  }
  if (w.catalog.empty()) throw Error(ErrorCode::kConfigError, "item registry is empty");
  return w;
}

std::vector<std::size_t> selected_items(const TrialConfig& config, const World& world) {
  std::vector<std::size_t> out;
  if (config.items.empty()) {
    for (std::size_t i = 0; i < world.catalog.size(); ++i) out.push_back(i);
    return out;
  }
  for (const auto& name : config.items) {
    const auto it = std::find_if(world.catalog.begin(), world.catalog.end(),
                                 [&](const SimObject& o) { return o.name == name; });
    if (it == world.catalog.end()) throw Error(ErrorCode::kConfigError, "only_items names unknown item '" + name + "'");
    out.push_back(static_cast<std::size_t>(it - world.catalog.begin()));
  }
  return out;
}

std::uint64_t trial_seed(const TrialKey& k, const World& w) {
  std::uint64_t s = mix_seed(k.seed, name_hash(w.catalog[k.item].name));
  s = mix_seed(s, static_cast<std::uint64_t>(k.regime) + 1);
  return mix_seed(s, static_cast<std::uint64_t>(k.attempt));
}

TrialRecord run_one(const TrialKey& key, const World& world, const TrialConfig& config) {
  const SimObject& templ = world.catalog[key.item];
  const ItemProfile& profile = *world.profiles[key.item];
  TrialRecord rec;
  rec.item = templ.name;
  rec.regime = key.regime;
  rec.seed = key.seed;
  rec.attempt = key.attempt;
  rec.class_used = "-";
  rec.tool = "-";
  try {
    const std::uint64_t seed = trial_seed(key, world);
    const SceneSpec scene = generate_scene(world.catalog, key.item, key.regime, seed, config.scene);
    const RGBDFrame frame = render(scene);
    const SimObject* target = scene.find(std::string_view(templ.name));
    LabelId planning_label = target->label;

    if (config.label_noise_rate > 0.0) {
      Rng rng(mix_seed(seed, 0x1abe1ULL));
      if (rng.uniform() < config.label_noise_rate) {
        std::set<LabelId> visible(frame.labels.data().begin(), frame.labels.data().end());
        visible.erase(0);
        visible.erase(target->label);
        if (!visible.empty()) {
          planning_label = *std::next(visible.begin(), static_cast<long>(rng.index(visible.size())));
          rec.misclassified = true;
        }
      }
    }

    const GraspPlan plan =
        plan_grasp(frame, planning_label, profile, config.params, PlanOptions{config.quality_threshold, depth_coverage_metric});
    rec.class_used = std::string(to_string(plan.class_used.method));
    rec.tool = std::string(to_string(plan.tool));
    const WristState wrist = flip_tool(WristState{}, plan.tool);
    SensorRig rig;
    const AttachResult res = descend_and_attach(plan, scene, rig, wrist, config.attach, mix_seed(seed, 0xa77acULL));
    rec.candidate_index = static_cast<int>(res.candidate_used);
    rec.outcome = std::string(to_string(res.outcome));
    rec.stop_cause = std::string(to_string(res.descent_stop_cause));
  } catch (const Error& e) {
    rec.outcome = "error";
    rec.stop_cause = to_string(e.code());
  }
  return rec;
}

std::vector<TrialRecord> run_keys(const std::vector<TrialKey>& keys, const World& world, const TrialConfig& config) {
  std::vector<TrialRecord> out(keys.size());
  const int workers = std::min<int>(config.workers, static_cast<int>(std::max<std::size_t>(1, keys.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < keys.size();) out[i] = run_one(keys[i], world, config);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

ItemRegistry load_registry(const TrialConfig& config) {
  if (config.items_path.empty()) throw Error(ErrorCode::kConfigError, "config names no item registry");
  try {
    return load_item_registry_file(config.items_path);
  } catch (const Error& e) {
    throw Error(e.code(), config.items_path + ": " + e.what());
  }
}

}  // namespace

TrialStats tally(const std::vector<TrialRecord>& records) {
  TrialStats s;
  for (const auto& r : records) {
    if (r.misclassified) {
      ++s.excluded;
      continue;
    }
    for (Tally* t : {&s.per_item[{r.item, r.regime}], &s.aggregate[r.regime]}) {
      ++t->attempts;
      t->successes += r.success() ? 1 : 0;
    }
    ++s.outcomes[{r.regime, r.outcome}];
  }
  return s;
}

TrialReport run_trials(const TrialConfig& config, const ItemRegistry& registry) {
  config.validate();
  const World world = build_world(registry);
  std::vector<TrialKey> keys;
  for (std::uint64_t seed : config.seeds) {
    for (std::size_t item : selected_items(config, world)) {
      for (Regime regime : config.regimes) {
        for (int a = 0; a < config.attempts_per_item; ++a) keys.push_back({item, regime, seed, a});
      }
    }
  }
  TrialReport report;
  report.records = run_keys(keys, world, config);
  report.stats = tally(report.records);
  report.config_echo = format_trial_config(config);
  report.seeds = config.seeds;
  return report;
}

TrialReport run_trials(const TrialConfig& config) {
  config.validate();
  return run_trials(config, load_registry(config));
}

TrialReport endurance_run(const TrialConfig& config, const ItemRegistry& registry, int cycles) {
  config.validate();
  if (cycles < 1) throw Error(ErrorCode::kConfigError, "cycles must be at least 1");
  const World world = build_world(registry);
  const auto items = selected_items(config, world);

  TrialReport report;
  report.cycles = cycles;
  // Container 0 is the stow tote, 1 the storage bin; every item starts in the
  // tote and each successful transfer moves it to the other side.
  std::vector<int> where(world.catalog.size(), 0);
  for (int c = 0; c < cycles; ++c) {
    std::vector<TrialKey> keys;
    for (std::uint64_t seed : config.seeds) {
      for (std::size_t item : items) {
        for (Regime regime : config.regimes) keys.push_back({item, regime, seed, c});
      }
    }
    auto rows = run_keys(keys, world, config);
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const TrialKey& key = keys[k];
      // Cluttered picks are the ones that empty a real tote.
      const bool moving = key.regime == Regime::kCluttered || config.regimes.size() == 1;
      if (moving && key.seed == config.seeds.front() && rows[k].success()) {
        where[key.item] ^= 1;
        ++report.transfers;
      }
    }
    for (auto& r : rows) report.records.push_back(std::move(r));
  }
  const int final_side = cycles % 2;
  for (std::size_t item : items) report.stranded += where[item] != final_side ? 1 : 0;
  report.stats = tally(report.records);
  report.config_echo = format_trial_config(config);
  report.seeds = config.seeds;
  return report;
}

TrialReport endurance_run(const TrialConfig& config, int cycles) {
  config.validate();
  return endurance_run(config, load_registry(config), cycles);
}

}  // namespace graspkit
