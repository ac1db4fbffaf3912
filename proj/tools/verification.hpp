#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace nws::app {

enum class Relation { less, less_equal, greater_equal, equal, within };
std::string_view to_string(Relation r);

/// One measured quantity against an explicit tolerance.
struct CheckRecord {
  std::string group;
  std::string name;
  nlohmann::json inputs;
  double measured = 0.0;
  Relation relation = Relation::less;
  double tolerance = 0.0;
  /// Upper end for Relation::within.
  double tolerance_high = 0.0;
  /// Informational records are reported but never fail a run.
  bool informational = false;
  bool passed = false;
  nlohmann::json to_json() const;
};

/// How an ambiguity in the source formulas was settled, with the evidence.
struct AmbiguityResolution {
  std::string name;
  std::string resolution;
  nlohmann::json evidence;
};

struct GroupSummary {
  std::string group;
  std::string title;
  double wall_clock_seconds = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::string version;
  std::string suite;
  double wall_clock_seconds = 0.0;
  std::vector<CheckRecord> records;
  std::vector<AmbiguityResolution> ambiguities;
  std::vector<GroupSummary> groups;

  bool passed() const;
  bool group_passed(std::string_view group) const;
  nlohmann::json to_json() const;
};

enum class Suite { all, conv, mult, kernels, appendix };
std::string_view to_string(Suite s);
Suite suite_from_string(std::string_view s);

/// Acceptance criteria 1..10 and the kernel group "K".
struct CriterionInfo {
  std::string id;
  std::string title;
  double runtime_budget_seconds;
};
const std::vector<CriterionInfo>& criteria();
std::vector<std::string> criteria_for(Suite s);

/// Runs one group and appends its records, its runtime record and its summary.
void run_criterion(const std::string& id, VerificationReport& report);
VerificationReport run_suite(Suite s);

}  // namespace nws::app
