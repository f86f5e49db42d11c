#include "speedlab/scenario.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

namespace speedlab {
namespace {

namespace fs = std::filesystem;

const fs::path kScenarios = fs::path(SPEEDLAB_SOURCE_DIR) / "scenarios";

ScenarioOutcome run(const char* text) { return run_scenario(Json::parse(text)); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST(Scenario, InlineRatioTrace) {
  auto out = run(R"({"name": "r", "operation": "ratio_trace", "horizon": 6,
                     "inputs": {"approximation": "geometric-quarter", "order": "successor"},
                     "expect": {"summary": {"liminf_upper_bound": "1/4"}}})");
  EXPECT_EQ(out.exit_code, exit_ok) << (out.messages.empty() ? "" : out.messages[0]);
  EXPECT_EQ(out.trace.records.size(), 7u);
}

TEST(Scenario, GoldenMismatchIsAssertionFailure) {
  auto out = run(R"({"operation": "ratio_trace", "horizon": 6,
                     "inputs": {"approximation": "geometric-quarter", "order": "successor"},
                     "expect": {"summary": {"liminf_upper_bound": "1/3", "no_such_key": "1"}}})");
  EXPECT_EQ(out.exit_code, exit_assertion);
  EXPECT_EQ(out.messages.size(), 2u);
}

TEST(Scenario, MalformedInputs) {
  EXPECT_EQ(run(R"({"operation": "no_such_op"})").exit_code, exit_malformed);
  EXPECT_EQ(run(R"({"inputs": {}})").exit_code, exit_malformed);
  EXPECT_EQ(run(R"([1])").exit_code, exit_malformed);
  EXPECT_EQ(run(R"({"operation": "verify_class", "inputs": {"approximation": "no-such-real"}})").exit_code,
            exit_malformed);
  EXPECT_EQ(run(R"({"operation": "verify_class",
                    "inputs": {"approximation": {"class_tag": "Left", "prefix": ["0"]}}})").exit_code,
            exit_malformed);
  EXPECT_EQ(run(R"({"operation": "ratio_trace", "inputs": {"approximation": "series-squares"}})").exit_code,
            exit_malformed);
  EXPECT_EQ(run(R"({"operation": "ratio_trace", "horizon": "ten",
                    "inputs": {"approximation": "geometric-half"}})").exit_code,
            exit_malformed);
}

TEST(Scenario, VerifyClassExpectations) {
  auto ok = run(R"({"operation": "verify_class", "horizon": 3,
                    "inputs": {"approximation": {"class_tag": "LeftCE", "prefix": ["0", "1/4", "1/4", "1/2"]}}})");
  EXPECT_EQ(ok.exit_code, exit_ok);
  auto bad = run(R"({"operation": "verify_class", "horizon": 2,
                     "inputs": {"approximation": {"class_tag": "LeftCE", "prefix": ["0", "1/2", "1/4"]}}})");
  EXPECT_EQ(bad.exit_code, exit_assertion);
}

TEST(Scenario, ModifiersAndOrders) {
  auto out = run(R"({"operation": "compose_order", "horizon": 5,
                     "inputs": {"approximation": {"corpus": "geometric-half", "normalize": true},
                                "order": {"table": [0, 2, 4]}}})");
  EXPECT_EQ(out.exit_code, exit_ok) << (out.messages.empty() ? "" : out.messages[0]);
  auto bad = run(R"({"operation": "compose_order", "horizon": 5,
                     "inputs": {"approximation": "geometric-half", "order": {"spiral": 1}}})");
  EXPECT_EQ(bad.exit_code, exit_malformed);
}

TEST(Scenario, OperationsAreAllShipped) {
  std::set<std::string> covered;
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    covered.insert(Json::parse(in).at("operation").get<std::string>());
    ++count;
  }
  EXPECT_GE(count, 12u);
  for (const auto& op : scenario_operations()) EXPECT_TRUE(covered.count(op)) << op;
}

TEST(Scenario, FileRunWritesArtifacts) {
  fs::path dir = fs::temp_directory_path() / "speedlab-scenario-test";
  fs::remove_all(dir);
  auto out = run_scenario_file(kScenarios / "ratio-geometric-successor.json", dir);
  EXPECT_EQ(out.exit_code, exit_ok);
  ASSERT_TRUE(fs::exists(out.trace_path));
  ASSERT_TRUE(fs::exists(out.summary_path));
  EXPECT_EQ(out.summary_path.filename(), "ratio-geometric-successor.summary.csv");
  std::string summary = slurp(out.summary_path);
  EXPECT_EQ(summary.rfind("kind,name,value,relation,bound,holds\n", 0), 0u);
  EXPECT_NE(summary.find("summary,liminf_upper_bound,1/4"), std::string::npos);
  auto again = run_scenario_file(kScenarios / "ratio-geometric-successor.json", dir);
  EXPECT_EQ(slurp(again.summary_path), summary);
  fs::remove_all(dir);
}

TEST(Scenario, InvalidDirectory) {
  fs::path dir = fs::temp_directory_path() / "speedlab-scenario-invalid";
  EXPECT_EQ(run_scenario_file(kScenarios / "invalid" / "broken-class-tag.json", dir).exit_code, exit_malformed);
  EXPECT_EQ(run_scenario_file(kScenarios / "invalid" / "golden-mismatch.json", dir).exit_code, exit_assertion);
  EXPECT_EQ(run_scenario_file(kScenarios / "invalid" / "missing-limit.json", dir).exit_code, exit_malformed);
  EXPECT_EQ(run_scenario_file(kScenarios / "missing.json", dir).exit_code, exit_malformed);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace speedlab
