#pragma once

// Suite orchestration: configuration, trials on a worker pool, empirical
// constants against a stored baseline, and JSON reports.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ev {

using Json = nlohmann::ordered_json;

/// Raised for unreadable or malformed configuration and baseline files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SuiteConfig {
  std::string suite;
  std::uint64_t seed = 1;
  std::int64_t trials = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  std::filesystem::path baseline;
  std::map<std::string, std::string> params;  // the suite's own section

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  Json to_json() const;
};

/// Reads `key = value` lines with `[section]` headers. [general] holds seed,
/// trials, threads and baseline (relative paths resolve against the file's
/// directory); the section named after the suite overrides and extends it.
SuiteConfig load_config(const std::filesystem::path& path, const std::string& suite);

struct Baseline {
  std::map<std::string, double> constants;
  std::string fingerprint;
};

Baseline read_baseline(const std::filesystem::path& path);
void write_baseline(const std::filesystem::path& path, const Baseline& baseline);

struct TrialRecord {
  std::string id;
  Json values = Json::object();
  std::map<std::string, double> constants;
  bool pass = true;
  std::vector<std::string> failures;
  Json replay;  // enough to rerun this trial alone

  void check(bool ok, const std::string& what);
};

struct TrialReport {
  std::string suite;
  std::uint64_t seed = 0;
  Json config;
  std::vector<TrialRecord> trials;
  std::map<std::string, double> max_constants;
  std::vector<std::string> failures;  // suite-level, including baseline checks
  double wall_seconds = 0.0;

  bool pass() const;
  /// Report body; wall time only with `timing`.
  Json to_json(bool timing = true) const;
};

struct RunOptions {
  std::optional<Baseline> baseline;
  std::optional<std::filesystem::path> dump_fields;
  std::optional<Json> replay;  // a single trial to rerun
};

struct SuiteInfo {
  std::string name;
  std::string checks;
  std::vector<std::string> constants;
};

/// The fixed suite registry in run order.
const std::vector<SuiteInfo>& suite_registry();
bool is_registered(const std::string& name);

/// Runs one suite. Throws ConfigError for an unknown suite name.
TrialReport run_suite(const SuiteConfig& config, const RunOptions& options = {});

/// Writes a replay file per failing trial next to `report_path`; returns the paths.
std::vector<std::filesystem::path> write_replays(const TrialReport& report,
                                                 const std::filesystem::path& report_path);

/// Constant-tracking suites at seed + 1 and four times the trial count; the
/// baseline keeps the maximum of every tracked constant.
Baseline calibrate_baselines(const std::filesystem::path& config_path);

/// FNV-1a digest of the configuration file contents, as hex.
std::string config_fingerprint(const std::filesystem::path& config_path);

}  // namespace ev
