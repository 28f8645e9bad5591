#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace focklab::cli {

/// Raised for configuration problems; the runner maps it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;
inline constexpr int kExitPass = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitChecksFailed = 2;

struct SuiteInfo {
  std::string name;
  std::string description;
  /// Formula strings naming the identities or estimates a suite checks.
  std::vector<std::string> anchors;
};

/// The thirteen suites, in execution order for "full".
const std::vector<SuiteInfo>& suite_catalog();

struct Config {
  std::string suite = "full";
  std::uint64_t seed = 1;
  double toleranceScale = 1.0;
  double t = 1.0;
  int n = 1;
  int N = 24;
  /// Empty: each suite uses its default symbol set.
  nlohmann::json symbols = nlohmann::json::array();
  nlohmann::json quadrature = nlohmann::json::object();
  std::string outDir = "focklab-out";
  std::string wienerCacheDir;
  /// Per-suite parameters with defaults filled in.
  nlohmann::json suites = nlohmann::json::object();
};

/// Default parameter table of every suite.
nlohmann::json suite_defaults();

/// Converts parsed YAML text to JSON (scalars become numbers, booleans or strings).
nlohmann::json yaml_text_to_json(const std::string& text);

/// Validates a configuration document. Unknown keys, wrong types and
/// out-of-range parameters raise ConfigError.
Config parse_config(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

/// Echo of the effective configuration as written to the report.
nlohmann::json config_to_json(const Config& c);

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct SuiteResult {
  std::string suite;
  /// {name, anchor, values, tolerance, passed}
  nlohmann::json checks = nlohmann::json::array();
  std::vector<Table> tables;
  double seconds = 0.0;
  bool passed() const;
};

struct RunOutcome {
  std::vector<SuiteResult> suites;
  nlohmann::json report;
  nlohmann::json timings;
  bool allPassed = false;
};

/// Runs the configured suite ("full" runs all). Suites are independent and
/// run on up to `jobs` threads; results are assembled in catalog order.
RunOutcome run(const Config& config, int jobs = 1);

/// report.json (with a timestamp), timings.json and the CSV tables.
void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir);

/// The report without its timestamp, for determinism comparisons.
nlohmann::json strip_timestamp(nlohmann::json report);

}  // namespace focklab::cli
