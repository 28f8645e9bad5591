#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "runner.hpp"

using namespace focklab::cli;
using nlohmann::json;

namespace {

json base() { return json{{"schema", kSchemaVersion}}; }

std::string config_error(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsFillEverySuite) {
  const Config c = parse_config(base());
  EXPECT_EQ(c.suite, "full");
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.t, 1.0);
  for (const SuiteInfo& s : suite_catalog()) EXPECT_TRUE(c.suites.contains(s.name)) << s.name;
  EXPECT_EQ(c.suites.at("spectrum"), suite_defaults().at("spectrum"));
}

TEST(Config, OverridesMergeIntoDefaults) {
  json doc = base();
  doc["suites"] = {{"limits", {{"directions", 4}}}};
  const Config c = parse_config(doc);
  EXPECT_EQ(c.suites.at("limits").at("directions"), 4);
  EXPECT_EQ(c.suites.at("limits").at("operator_N"), suite_defaults().at("limits").at("operator_N"));
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  json unknown = base();
  unknown["colour"] = "blue";
  EXPECT_NE(config_error(unknown).find("colour"), std::string::npos);

  json nested = base();
  nested["suites"] = {{"heat", {{"radius", 3.0}, {"bandwidth", 2}}}};
  EXPECT_NE(config_error(nested).find("bandwidth"), std::string::npos);

  json badType = base();
  badType["fock"] = {{"t", "one"}};
  EXPECT_FALSE(config_error(badType).empty());

  json badList = base();
  badList["suites"] = {{"correspondence", {{"N", 24}}}};
  EXPECT_FALSE(config_error(badList).empty());

  EXPECT_FALSE(config_error(json::array()).empty());
  json noSuite = base();
  noSuite["suite"] = "everything";
  EXPECT_FALSE(config_error(noSuite).empty());
}

TEST(Config, SchemaVersionIsChecked) {
  EXPECT_FALSE(config_error(json::object()).empty());
  EXPECT_FALSE(config_error(json{{"schema", kSchemaVersion + 1}}).empty());
}

TEST(Config, DivergentTraceScaleNamesTheSeries) {
  json doc = base();
  doc["suites"] = {{"trace-identity", {{"s", {0.4, 0.75}}}}};
  const std::string msg = config_error(doc);
  EXPECT_NE(msg.find("diverge"), std::string::npos) << msg;
  EXPECT_NE(msg.find("0.4"), std::string::npos) << msg;
  doc["suites"] = {{"trace-identity", {{"s", {0.6, 1.0}}}}};
  EXPECT_TRUE(config_error(doc).empty());
  doc["suites"] = {{"trace-identity", {{"s", {1.2}}}}};
  EXPECT_FALSE(config_error(doc).empty());
}

TEST(Config, NormComparisonScaleRanges) {
  json doc = base();
  doc["suites"] = {{"berger-coburn", {{"forward_s", 0.6}}}};
  EXPECT_FALSE(config_error(doc).empty());
  doc["suites"] = {{"berger-coburn", {{"reverse_s", {0.4}}}}};
  EXPECT_FALSE(config_error(doc).empty());
  doc["suites"] = {{"berger-coburn", {{"reverse_s", {2.5}}}}};
  EXPECT_FALSE(config_error(doc).empty());
  doc["suites"] = {{"berger-coburn", {{"N", {24}}}}};
  EXPECT_FALSE(config_error(doc).empty());
}

TEST(Config, HigherDimensionOnlyForDimensionAwareSuites) {
  json doc = base();
  doc["fock"] = {{"n", 2}};
  doc["suite"] = "toeplitz-assembly";
  EXPECT_TRUE(config_error(doc).empty());
  doc["suite"] = "wiener";
  EXPECT_FALSE(config_error(doc).empty());
  doc["suite"] = "full";
  EXPECT_FALSE(config_error(doc).empty());
}

TEST(Config, ToleranceScaleAndSeedValidated) {
  json doc = base();
  doc["tolerance_scale"] = -1.0;
  EXPECT_FALSE(config_error(doc).empty());
  doc["tolerance_scale"] = 2.0;
  doc["seed"] = 42;
  const Config c = parse_config(doc);
  EXPECT_EQ(c.toleranceScale, 2.0);
  EXPECT_EQ(c.seed, 42u);
}

TEST(Yaml, ScalarsAndNesting) {
  const json j = yaml_text_to_json("a: 1\nb: 2.5\nc: true\nd: text\ne: [1, 2.0]\nf: {g: 1.0e-8}\n");
  EXPECT_TRUE(j.at("a").is_number_integer());
  EXPECT_EQ(j.at("a"), 1);
  EXPECT_TRUE(j.at("b").is_number_float());
  EXPECT_EQ(j.at("c"), true);
  EXPECT_EQ(j.at("d"), "text");
  EXPECT_EQ(j.at("e").size(), 2u);
  EXPECT_DOUBLE_EQ(j.at("f").at("g").get<double>(), 1e-8);
  EXPECT_THROW(yaml_text_to_json("a: [1, 2"), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"full.yaml", "basis-norms.yaml", "toeplitz-n2.yaml"})
    EXPECT_NO_THROW(load_config(std::filesystem::path(FOCKLAB_CONFIG_DIR) / name)) << name;
  EXPECT_THROW(load_config(std::filesystem::path(FOCKLAB_CONFIG_DIR) / "trace-identity-invalid.yaml"), ConfigError);
}

TEST(Catalog, ThirteenSuitesWithAnchors) {
  const auto& cat = suite_catalog();
  ASSERT_EQ(cat.size(), 13u);
  std::set<std::string> names;
  for (const SuiteInfo& s : cat) {
    names.insert(s.name);
    EXPECT_FALSE(s.anchors.empty()) << s.name;
    EXPECT_FALSE(s.description.empty()) << s.name;
    EXPECT_TRUE(suite_defaults().contains(s.name)) << s.name;
  }
  EXPECT_EQ(names.size(), 13u);
}

TEST(Report, StructureMatchesGolden) {
  json doc = base();
  doc["suite"] = "basis-norms";
  const RunOutcome out = run(parse_config(doc));
  std::ifstream in(std::filesystem::path(FOCKLAB_GOLDEN_DIR) / "basis-norms-structure.json");
  const json golden = json::parse(in);

  std::vector<std::string> keys;
  for (const auto& [k, v] : out.report.items()) keys.push_back(k);
  EXPECT_EQ(json(keys), golden.at("report_keys"));
  keys.clear();
  for (const auto& [k, v] : out.report.at("summary").items()) keys.push_back(k);
  EXPECT_EQ(json(keys), golden.at("summary_keys"));

  ASSERT_EQ(out.report.at("suites").size(), golden.at("suites").size());
  for (std::size_t i = 0; i < golden.at("suites").size(); ++i) {
    const json& s = out.report.at("suites")[i];
    EXPECT_EQ(s.at("name"), golden.at("suites")[i].at("name"));
    json names = json::array();
    for (const json& c : s.at("checks")) {
      keys.clear();
      for (const auto& [k, v] : c.items()) keys.push_back(k);
      EXPECT_EQ(json(keys), golden.at("check_keys"));
      names.push_back(c.at("name"));
    }
    EXPECT_EQ(names, golden.at("suites")[i].at("checks"));
  }
  EXPECT_EQ(out.report.at("schema"), "focklab-report/1");
  EXPECT_EQ(out.report.at("summary").at("status"), "pass");
  EXPECT_TRUE(out.allPassed);
}

TEST(Report, DeterministicModuloTimestamp) {
  json doc = base();
  doc["suite"] = "basis-norms";
  const Config c = parse_config(doc);
  const RunOutcome a = run(c), b = run(c);
  EXPECT_TRUE(a.report.contains("generated_at"));
  EXPECT_FALSE(strip_timestamp(a.report).contains("generated_at"));
  EXPECT_EQ(strip_timestamp(a.report).dump(), strip_timestamp(b.report).dump());
}

TEST(Report, TinyToleranceScaleFailsChecks) {
  json doc = base();
  doc["suite"] = "basis-norms";
  doc["tolerance_scale"] = 1e-30;
  const RunOutcome out = run(parse_config(doc));
  EXPECT_FALSE(out.allPassed);
  EXPECT_EQ(out.report.at("summary").at("status"), "fail");
  EXPECT_FALSE(out.report.at("summary").at("internal_error").get<bool>());
}

TEST(Report, OutputsWritten) {
  json doc = base();
  doc["suite"] = "basis-norms";
  const RunOutcome out = run(parse_config(doc));
  const auto dir = std::filesystem::temp_directory_path() / "focklab-cli-test";
  std::filesystem::remove_all(dir);
  write_outputs(out, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "timings.json"));
  std::ifstream in(dir / "report.json");
  EXPECT_EQ(strip_timestamp(json::parse(in)), strip_timestamp(out.report));
  std::filesystem::remove_all(dir);
}
