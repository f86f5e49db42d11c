#pragma once

// Scenario files: one operation, its inputs, a horizon and optional golden
// summary values.
//
//   {
//     "name": "nonrandce-third",
//     "operation": "speedup_from_ml",
//     "horizon": 40,
//     "inputs": {...},
//     "expect": {"summary": {"delta_sum": "..."}},
//     "outputs": {"trace": "x.trace.jsonl", "summary": "x.summary.csv"}
//   }

#include <filesystem>
#include <string>
#include <vector>

#include "speedlab/constructions.hpp"
#include "speedlab/io.hpp"

namespace speedlab {

enum ExitCode : int { exit_ok = 0, exit_assertion = 1, exit_malformed = 2 };

struct ScenarioOutcome {
  std::string name;
  StageTrace trace;
  int exit_code = exit_ok;
  std::vector<std::string> messages;  // failures and golden mismatches
  std::filesystem::path trace_path;
  std::filesystem::path summary_path;
};

/// Names accepted in "operation".
std::vector<std::string> scenario_operations();

/// Runs the operation and compares goldens; nothing is written.
ScenarioOutcome run_scenario(const Json& doc);

/// Reads, runs and writes the trace JSONL and summary CSV under `out_dir`.
/// Malformed input (unreadable file, bad JSON, unknown operation or family,
/// bad class tag) gives exit code 2.
ScenarioOutcome run_scenario_file(const std::filesystem::path& file, const std::filesystem::path& out_dir);

}  // namespace speedlab
