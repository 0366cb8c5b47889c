#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kanqft/dg.hpp"
#include "kanqft/fincat.hpp"
#include "kanqft/model.hpp"

namespace kanqft {

// Assertions are instances of proven statements and must hold; findings are
// properties of the model that may legitimately fail.
enum class CheckKind { Assertion, Finding };

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckRecord {
  std::string name;
  CheckKind kind = CheckKind::Assertion;
  CheckStatus status = CheckStatus::Pass;
  std::optional<std::pair<int, int>> degrees;
  std::string detail;
};

struct Report {
  std::string command;
  std::string model;
  int max_degree = 4;
  std::string seed_order = "normal";
  std::vector<CheckRecord> checks;
  Json tables = Json::object();

  bool assertions_hold() const;
  std::vector<std::string> failed_findings() const;
};

struct RunOptions {
  int max_degree = 4;
  TieBreak order = TieBreak::Least;
};

const std::vector<std::string>& command_names();
Report run_command(const std::string& command, const ModelSpec& spec, const RunOptions& opts);

Json report_json(const Report& r);
std::string report_markdown(const Report& r);

struct ExpectResult {
  bool matched = true;
  std::vector<std::string> unexpected;  // failed but not expected
  std::vector<std::string> missing;     // expected but did not fail
};

ExpectResult match_expectations(const Report& r, const std::vector<std::string>& expected);

// 0 when every assertion holds and the expectations (if any) match, 1 when an
// assertion fails, 3 when only the expectations disagree.
int exit_code(const Report& r, const std::optional<std::vector<std::string>>& expected);

}  // namespace kanqft
