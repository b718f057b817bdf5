#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graspkit/error.hpp"
#include "graspkit/harness.hpp"

namespace graspkit {

namespace fs = std::filesystem;

std::string trials_csv(const std::vector<TrialRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.item + ',' + std::string(to_string(r.regime)) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.attempt) + ',' + r.class_used + ',' + r.tool + ',' + std::to_string(r.candidate_index) +
           ',' + r.outcome + ',' + r.stop_cause + ',' + (r.misclassified ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<TrialRecord> parse_trials_csv(std::string_view text) {
  std::vector<TrialRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(ErrorCode::kParseError, "unexpected CSV header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 10) {
      throw Error(ErrorCode::kParseError, "CSV line " + std::to_string(lineno) + ": expected 10 fields");
    }
    TrialRecord r;
    try {
      r.item = f[0];
      if (f[1] == "uncluttered") {
        r.regime = Regime::kUncluttered;
      } else if (f[1] == "cluttered") {
        r.regime = Regime::kCluttered;
      } else {
        throw std::invalid_argument(f[1]);
      }
      r.seed = std::stoull(f[2]);
      r.attempt = std::stoi(f[3]);
      r.class_used = f[4];
      r.tool = f[5];
      r.candidate_index = std::stoi(f[6]);
      r.outcome = f[7];
      r.stop_cause = f[8];
      r.misclassified = f[9] == "1";
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "CSV line " + std::to_string(lineno) + ": bad field");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_text(const TrialReport& report) {
  const TrialStats& s = report.stats;
  std::string out;
  char buf[256];
  std::vector<Regime> regimes;
  for (const auto& [r, _] : s.aggregate) regimes.push_back(r);

  out += "graspkit trial summary\n\n";
  std::snprintf(buf, sizeof buf, "%-28s", "item");
  out += buf;
  for (Regime r : regimes) {
    std::snprintf(buf, sizeof buf, " %18s", std::string(to_string(r)).c_str());
    out += buf;
  }
  out += '\n';
  std::string last;
  for (const auto& [key, _] : s.per_item) {
    if (key.first == last) continue;
    last = key.first;
    std::snprintf(buf, sizeof buf, "%-28s", last.c_str());
    out += buf;
    for (Regime r : regimes) {
      const auto it = s.per_item.find({last, r});
      if (it == s.per_item.end()) {
        std::snprintf(buf, sizeof buf, " %18s", "-");
      } else {
        std::snprintf(buf, sizeof buf, " %6.3f (%4d/%4d)", it->second.fraction(), it->second.successes,
                      it->second.attempts);
      }
      out += buf;
    }
    out += '\n';
  }
  out += '\n';
  for (Regime r : regimes) {
    const Tally& t = s.aggregate.at(r);
    std::snprintf(buf, sizeof buf, "aggregate %-12s %.4f (%d/%d)\n", std::string(to_string(r)).c_str(), t.fraction(),
                  t.successes, t.attempts);
    out += buf;
  }
  out += "\noutcomes\n";
  for (const auto& [key, n] : s.outcomes) {
    std::snprintf(buf, sizeof buf, "  %-12s %-18s %d\n", std::string(to_string(key.first)).c_str(),
                  key.second.c_str(), n);
    out += buf;
  }
  if (s.excluded) {
    std::snprintf(buf, sizeof buf, "\nexcluded as misclassified: %d\n", s.excluded);
    out += buf;
  }
  if (report.cycles) {
    std::snprintf(buf, sizeof buf, "\nendurance cycles %d, transfers %d, items left behind %d\n", report.cycles,
                  report.transfers, report.stranded);
    out += buf;
  }
  out += "\nseeds:";
  for (auto seed : report.seeds) out += ' ' + std::to_string(seed);
  out += "\n\nconfig:\n" + report.config_echo + '\n';
  return out;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + target.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIoError, "cannot move output into " + path);
  }
}

void write_report(const TrialReport& report, const std::string& dir) {
  const fs::path root(dir);
  write_file_atomic((root / "trials.csv").string(), trials_csv(report.records));
  write_file_atomic((root / "summary.txt").string(), summary_text(report));
}

}  // namespace graspkit
