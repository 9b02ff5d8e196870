#pragma once

// Subcommands of the command-line front end. Each returns the process exit
// status:
//   0  success
//   1  a fail verdict or a pointwise violation
//   2  configuration or precondition error
//   3  domain error (singular field, diverging paths)
//   4  more than 20% of cases inconclusive

#include "gammaw/config.hpp"
#include "gammaw/verifier.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gammaw {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitInconclusive = 4;

/// Exit status implied by a report.
int exit_code(const VerificationReport& report);

int cmd_check_curvature(const RunConfig& cfg, std::ostream& out, std::ostream& log);
/// which: commutation | variance | sqrt | degenerate
int cmd_verify(const RunConfig& cfg, std::string_view which, std::ostream& out, std::ostream& log);
int cmd_optimality(const RunConfig& cfg, std::ostream& out, std::ostream& log);
/// Runs every acceptance criterion, writing ACk.csv and ACk.txt into out_dir.
int cmd_reproduce_paper(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

/// Parses arguments (without the program name) and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gammaw
