#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graspkit/planner.hpp"
#include "graspkit/simworld.hpp"

namespace graspkit {

struct TrialConfig {
  std::string items_path;
  std::vector<Regime> regimes{Regime::kUncluttered, Regime::kCluttered};
  int attempts_per_item = 10;
  std::vector<std::uint64_t> seeds{1};
  SynthesisParams params;
  AttachParams attach;
  SceneGenParams scene;
  double quality_threshold = kDefaultQualityThreshold;
  std::string output_dir = "results";
  /// Only these items are attempted; empty means the whole registry.
  std::vector<std::string> items;
  /// Probability that recognition hands the planner a companion's segment.
  double label_noise_rate = 0.0;
  int workers = 1;

  void validate() const;
};

/// Reads a JSON config. Relative `items` paths resolve against the config's
/// directory. Unknown keys are rejected.
TrialConfig load_trial_config(const std::string& path);
TrialConfig parse_trial_config(std::string_view json_text, const std::string& base_dir = ".");
std::string format_trial_config(const TrialConfig& config);

struct TrialRecord {
  std::string item;
  Regime regime = Regime::kUncluttered;
  std::uint64_t seed = 0;
  int attempt = 0;
  std::string class_used;  // "-" when planning failed
  std::string tool;
  int candidate_index = -1;
  std::string outcome;  // attach outcome, or "error"
  std::string stop_cause;  // stop cause, or the error code
  bool misclassified = false;

  bool success() const { return outcome == "attached"; }
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct Tally {
  int attempts = 0;
  int successes = 0;

  double fraction() const { return attempts ? static_cast<double>(successes) / attempts : 0.0; }
  friend bool operator==(const Tally&, const Tally&) = default;
};

/// Statistics derived from rows. Misclassified rows are left out.
struct TrialStats {
  std::map<std::pair<std::string, Regime>, Tally> per_item;
  std::map<Regime, Tally> aggregate;
  std::map<std::pair<Regime, std::string>, int> outcomes;
  int excluded = 0;

  friend bool operator==(const TrialStats&, const TrialStats&) = default;
};

TrialStats tally(const std::vector<TrialRecord>& records);

struct TrialReport {
  std::vector<TrialRecord> records;
  TrialStats stats;
  std::string config_echo;
  std::vector<std::uint64_t> seeds;
  // Endurance bookkeeping; zero for plain runs.
  int cycles = 0;
  int transfers = 0;
  int stranded = 0;
};

TrialReport run_trials(const TrialConfig& config);
TrialReport run_trials(const TrialConfig& config, const ItemRegistry& registry);

/// Moves the item set back and forth between two containers `cycles` times.
/// Each cycle attempts every item once per regime and seed; an item is
/// transferred when its cluttered pick under the first seed attaches and
/// stays behind otherwise.
TrialReport endurance_run(const TrialConfig& config, int cycles);
TrialReport endurance_run(const TrialConfig& config, const ItemRegistry& registry, int cycles);

inline constexpr std::string_view kCsvHeader =
    "item,regime,seed,attempt,class_used,tool,candidate_index,outcome,stop_cause,misclassified";

std::string trials_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_trials_csv(std::string_view text);
std::string summary_text(const TrialReport& report);

/// Writes trials.csv and summary.txt under `dir`, each via rename.
void write_report(const TrialReport& report, const std::string& dir);

/// Writes `content` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

/// SVG with the silhouette of `label`, one arrow per projectable candidate
/// with length proportional to score, and the top-scoring arrow drawn as the
/// single "best" element.
std::string overlay_svg(const RGBDFrame& frame, LabelId label, const std::vector<GraspCandidate>& candidates);
void render_overlay(const RGBDFrame& frame, LabelId label, const std::vector<GraspCandidate>& candidates,
                    const std::string& out_path);

}  // namespace graspkit
