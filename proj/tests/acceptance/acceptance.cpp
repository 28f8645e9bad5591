#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "focklab/approximation.hpp"
#include "focklab/fock_core.hpp"
#include "focklab/limits.hpp"
#include "runner.hpp"

using namespace focklab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

const cli::SuiteResult& suite(const cli::RunOutcome& out, const std::string& name) {
  for (const cli::SuiteResult& r : out.suites)
    if (r.suite == name) return r;
  throw std::runtime_error("suite missing from run: " + name);
}

void require_suite(Criterion& c, const cli::RunOutcome& out, const std::string& name) {
  const cli::SuiteResult& r = suite(out, name);
  for (const auto& check : r.checks)
    if (!check.at("passed").get<bool>()) c.require(false, name + ": " + check.at("name").get<std::string>());
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// report.json with the generated_at line removed, plus every CSV, as bytes.
std::map<std::string, std::string> output_bytes(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == "timings.json") continue;
    std::string bytes = read_bytes(entry.path());
    if (name == "report.json") {
      std::istringstream lines(bytes);
      std::string line, kept;
      while (std::getline(lines, line))
        if (line.find("\"generated_at\"") == std::string::npos) kept += line + '\n';
      bytes = kept;
    }
    files[name] = bytes;
  }
  return files;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "focklab-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  cli::Config config = cli::parse_config(nlohmann::json{{"schema", cli::kSchemaVersion}, {"suite", "full"}, {"seed", 1}});
  config.wienerCacheDir = (work / "cache").string();

  const auto start = Clock::now();
  const cli::RunOutcome first = cli::run(config);
  const double firstSeconds = std::chrono::duration<double>(Clock::now() - start).count();
  cli::write_outputs(first, work / "run1");

  std::vector<std::pair<std::string, std::function<Criterion()>>> criteria;

  criteria.emplace_back("basis norms", [&] {
    Criterion c;
    require_suite(c, first, "basis-norms");
    const double seconds = suite(first, "basis-norms").seconds;
    c.require(seconds < 10.0, "runtime " + fmt(seconds) + " s");
    const double product = basis_norm_1d(NormExponent::One, 60) * basis_norm_1d(NormExponent::Infinity, 60);
    c.require(std::abs(product - 1.0 / std::sqrt(2.0)) <= 1e-3, "product at k = 60 is " + fmt(product));
    return c;
  });

  criteria.emplace_back("Weyl algebra", [&] {
    Criterion c;
    require_suite(c, first, "kernels-weyl");
    return c;
  });

  criteria.emplace_back("Toeplitz assembly", [&] {
    Criterion c;
    require_suite(c, first, "toeplitz-assembly");
    const BasisPtr basis = MultiIndexBasis::make(1.0, 1, 32);
    const OperatorMatrix m = toeplitz_matrix(Symbol::gaussian(1.0), basis);
    double worst = 0.0;
    for (int k = 0; k <= 30; ++k) {
      const double d = std::pow(2.0, -(k + 1));
      worst = std::max(worst, std::abs(m.entries()(k, k).real() - d) / d);
    }
    c.require(worst <= 1e-10, "diagonal relative error " + fmt(worst));
    return c;
  });

  criteria.emplace_back("correspondence identity", [&] {
    Criterion c;
    require_suite(c, first, "correspondence");
    return c;
  });

  criteria.emplace_back("Wiener scheme and reconstruction", [&] {
    Criterion c;
    require_suite(c, first, "wiener");
    const double seconds = suite(first, "wiener").seconds;
    c.require(seconds < 300.0, "runtime " + fmt(seconds) + " s");
    WienerSearchParams params;
    params.cacheDir = config.wienerCacheDir;
    for (int N : {1, 2, 4}) {
      const WienerApproximant w = wiener_coefficients(1.0, N, params);
      c.require(w.certified && w.l1Error <= 1.0 / N, "N = " + std::to_string(N) + " error " + fmt(w.l1Error));
      if (N > 1) c.require(w.fromCache, "N = " + std::to_string(N) + " not cached");
    }
    return c;
  });

  criteria.emplace_back("trace identity", [&] {
    Criterion c;
    require_suite(c, first, "trace-identity");
    const BasisPtr basis = MultiIndexBasis::make(1.0, 1, 60);
    const TraceIdentity one = trace_heat_identity(Symbol::constant(1.0), 0.6, Point{Complex(1.0)}, basis);
    c.require(std::abs(one.rhs - 1.0) <= 1e-8, "f = 1 gives " + fmt(one.rhs.real()));
    return c;
  });

  criteria.emplace_back("Berger-Coburn brackets", [&] {
    Criterion c;
    require_suite(c, first, "berger-coburn");
    return c;
  });

  criteria.emplace_back("dilation", [&] {
    Criterion c;
    require_suite(c, first, "dilation");
    return c;
  });

  criteria.emplace_back("limits and Fredholm witness", [&] {
    Criterion c;
    require_suite(c, first, "spectrum");
    const EssentialSpectrum es = essential_spectrum_vo(Symbol::angular({{1, 1.0}}, 1.0), angle_grid(16));
    c.require(es.ok(), "status " + es.status);
    for (const Complex& v : es.samples) c.require(std::abs(std::abs(v) - 1.0) <= 1e-6, "off the circle: " + fmt(std::abs(v)));
    return c;
  });

  criteria.emplace_back("compactness probes", [&] {
    Criterion c;
    require_suite(c, first, "compactness");
    require_suite(c, first, "esscen");
    return c;
  });

  criteria.emplace_back("determinism and runtime", [&] {
    Criterion c;
    const cli::RunOutcome second = cli::run(config);
    cli::write_outputs(second, work / "run2");
    c.require(cli::strip_timestamp(first.report) == cli::strip_timestamp(second.report), "reports differ");
    c.require(output_bytes(work / "run1") == output_bytes(work / "run2"), "output files differ");
    c.require(first.allPassed, "full suite has failing checks");
    c.require(firstSeconds < 900.0, "runtime " + fmt(firstSeconds) + " s");
    c.detail += (c.detail.empty() ? "" : "; ") + std::string("full suite ") + fmt(firstSeconds) + " s";
    return c;
  });

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("error: ") + e.what();
    }
    if (!c.passed) ++failed;
    std::cout << (c.passed ? "PASS" : "FAIL") << "  criterion " << (i + 1) << ": " << criteria[i].first
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << std::endl;
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
