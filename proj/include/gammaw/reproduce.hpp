#pragma once

// The acceptance suite: each criterion runs a pinned experiment, compares
// against an independent reference and reports pass/fail/inconclusive with
// its CSV artifact and a short summary.

#include "gammaw/config.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gammaw {

enum class Status { pass, fail, inconclusive };
const char* to_string(Status s);

struct ReproduceOptions {
  MCConfig mc;
  SearchConfig search;
  VerifyConfig verify;
};

/// Options taken from a run configuration ([mc], [search] and [verify]).
ReproduceOptions reproduce_options(const RunConfig& cfg);

struct CriterionResult {
  std::string id;
  std::string title;
  Status status = Status::fail;
  /// One line explaining the outcome.
  std::string detail;
  std::string csv;
  std::string summary;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  /// Set on a fail whose cause was checked against an independent derivation
  /// (e.g. a published constant that disagrees with its own definition).
  std::string explained;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds = 0.0;
  std::function<CriterionResult(const ReproduceOptions&)> run;
};

const std::vector<Criterion>& criteria();

/// Runs one criterion and times it; exceeding the budget turns a pass into a fail.
CriterionResult run_criterion(const Criterion& c, const ReproduceOptions& opts);

}  // namespace gammaw
