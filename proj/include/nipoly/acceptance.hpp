#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace nipoly {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  // Failing for a documented mathematical reason; see known_issue_note.
  bool known_issue = false;
  std::string known_issue_note;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct AcceptanceOptions {
  std::set<int> only;      // empty: every criterion
  bool fast_only = false;  // skip the minutes-scale sampling criteria
  unsigned threads = 0;
  std::uint64_t seed = 20240611;
  // Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

struct CriterionInfo {
  int id;
  std::string name;
  double budget_seconds;
  bool slow;
};
const std::vector<CriterionInfo>& acceptance_criteria();

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// "PASS  12 name ... detail (1.02 s / 180 s)".
void print_result(std::ostream& os, const CriterionResult& r);

// True when every result passes or fails only for a documented known issue.
bool acceptance_ok(const std::vector<CriterionResult>& results);

}  // namespace nipoly
