#include <cstdlib>
#include <fstream>
#include <sstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "runner.hpp"

using focklab::cli::ConfigError;

namespace {

void print_config_error(const std::string& message) {
  const nlohmann::json diag{{"error", "config"}, {"message", message}};
  std::cerr << diag.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = focklab::cli;
  CLI::App app{"focklab: numerical checks for Toeplitz operators on Fock spaces"};
  std::string configPath, suite, outDir;
  std::uint64_t seed = 0;
  double toleranceScale = 0.0;
  int jobs = 1;
  bool listSuites = false;
  app.add_option("--config", configPath, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--suite", suite, "suite name or 'full' (overrides the config)");
  app.add_option("--out", outDir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--tolerance-scale", toleranceScale, "multiplies every tolerance")->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "suites run in parallel (0: hardware threads)")->check(CLI::NonNegativeNumber);
  app.add_flag("--list-suites", listSuites, "print the suite catalog and exit");
  CLI11_PARSE(app, argc, argv);

  if (listSuites) {
    for (const cli::SuiteInfo& s : cli::suite_catalog()) {
      std::cout << s.name << "\t" << s.description << '\n';
      for (const std::string& a : s.anchors) std::cout << "    " << a << '\n';
    }
    return cli::kExitPass;
  }

  cli::Config config;
  try {
    nlohmann::json doc = configPath.empty() ? nlohmann::json{{"schema", cli::kSchemaVersion}}
                                            : cli::yaml_text_to_json([&] {
                                                std::ifstream in(configPath);
                                                std::stringstream ss;
                                                ss << in.rdbuf();
                                                return ss.str();
                                              }());
    if (doc.is_object()) {
      if (!suite.empty()) doc["suite"] = suite;
      if (app.count("--seed")) doc["seed"] = seed;
      if (app.count("--tolerance-scale")) doc["tolerance_scale"] = toleranceScale;
    }
    config = cli::parse_config(doc);
    if (!outDir.empty()) config.outDir = outDir;
  } catch (const ConfigError& e) {
    print_config_error(e.what());
    return cli::kExitInternal;
  }

  if (jobs == 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  try {
    const cli::RunOutcome outcome = cli::run(config, jobs);
    cli::write_outputs(outcome, config.outDir);
    for (const cli::SuiteResult& r : outcome.suites) {
      int failed = 0;
      for (const auto& c : r.checks)
        if (!c.at("passed").get<bool>()) ++failed;
      std::cout << (r.passed() ? "PASS " : "FAIL ") << r.suite << "  (" << r.checks.size() - failed << "/"
                << r.checks.size() << " checks, " << r.seconds << " s)\n";
      for (const auto& c : r.checks)
        if (!c.at("passed").get<bool>()) std::cout << "  failed: " << c.at("name").get<std::string>() << '\n';
    }
    const auto& summary = outcome.report.at("summary");
    std::cout << "report: " << (std::filesystem::path(config.outDir) / "report.json").string() << '\n';
    if (summary.at("internal_error").get<bool>()) return cli::kExitInternal;
    return outcome.allPassed ? cli::kExitPass : cli::kExitChecksFailed;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kExitInternal;
  }
}
