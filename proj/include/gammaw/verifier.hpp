#pragma once

// Statistical checks of the semigroup inequalities implied by a curvature
// bound Gamma_2^W >= kappa Gamma^W:
//   commutation   Gamma^W(Q_t f) <= e^{-2 kappa t} Q_t(Gamma^W f)
//   variance      Q_t(f^2) - (Q_t f)^2 + 2 int_0^t Q_s(W^2 (Q_{t-s} f)^2) ds
//                   <= (1 - e^{-2 kappa t}) / kappa * Q_t(Gamma^W f)
//   sqrt          sqrt(Gamma(Q_t f)) + W Q_t f <= e^{(c - rho) t} Q_t(sqrt(Gamma f) + W f)
//   degenerate    W^2 <= e^{-2 kappa t} Q_t(W^2)
// Each case is judged with a three-sigma rule on margin = rhs - lhs.

#include "gammaw/field.hpp"
#include "gammaw/gamma.hpp"
#include "gammaw/problem.hpp"
#include "gammaw/semigroup.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gammaw {

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct SideValue {
  double value = 0.0;
  double std_error = 0.0;
  bool usable = true;
};

struct VerificationCase {
  double t = 0.0;
  Point x;
  std::string f_label;
  SideValue lhs;
  SideValue rhs;
  double margin = 0.0;
  double margin_stderr = 0.0;
  Verdict verdict = Verdict::pass;
  // Reproduction data.
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t n_paths = 0;
  double dt = 0.0;
};

struct VerificationReport {
  std::string check_id;
  std::vector<VerificationCase> cases;

  std::size_t count(Verdict v) const;
  bool any_fail() const { return count(Verdict::fail) > 0; }
};

struct TestFunction {
  std::string label;
  Field f;
};

/// exp(a.x) for a = e_1 and a = 0.1 e_1, x0, x0^2, and the bump exp(-2|x|^2).
std::vector<TestFunction> default_battery(int dim);
/// exp(a.x) for a = e_1 and a = 0.1 e_1, x0^2, the bump, and the constant 1.
std::vector<TestFunction> nonnegative_battery(int dim);

struct VerifyConfig {
  MCConfig mc;
  int fk_nodes = 11;
  int quad_order = 32;
  /// Finite-difference step for grad Q_t f when U is not Gaussian.
  double fd_h = 1e-3;
  /// A side is unusable when its standard error exceeds
  /// rel_stderr_cap * |value| + abs_stderr_cap.
  double rel_stderr_cap = 0.05;
  double abs_stderr_cap = 1e-3;
  /// Standard error attributed to deterministic (closed-form or quadrature) values,
  /// relative to max(1, |value|).
  double exact_floor = 1e-10;
};

/// pass iff margin >= -3 margin_stderr and both sides usable; fail iff
/// margin < -3 margin_stderr with both sides usable; inconclusive otherwise.
Verdict classify(double margin, double margin_stderr, bool lhs_usable, bool rhs_usable);

/// (1 - e^{-2 kappa t}) / kappa, with the limit 2t at kappa = 0.
double variance_coefficient(double kappa, double t);

VerificationReport verify_commutation(const ProblemSpec& p, const std::vector<TestFunction>& battery, double kappa,
                                      const std::vector<double>& t_grid, const std::vector<Point>& x_grid,
                                      const VerifyConfig& cfg);

VerificationReport verify_variance(const ProblemSpec& p, const std::vector<TestFunction>& battery, double kappa,
                                   const std::vector<double>& t_grid, const std::vector<Point>& x_grid,
                                   const VerifyConfig& cfg);

/// Requires every battery function to be non-negative at the grid points and
/// at all simulated endpoints; throws Error otherwise.
VerificationReport verify_sqrt_commutation(const ProblemSpec& p, const std::vector<TestFunction>& battery, double rho,
                                           double c, const std::vector<double>& t_grid,
                                           const std::vector<Point>& x_grid, const VerifyConfig& cfg);

VerificationReport degenerate_w_check(const ProblemSpec& p, double kappa, const std::vector<double>& t_grid,
                                      const std::vector<Point>& x_grid, const VerifyConfig& cfg);

/// Classical Gaussian Poincare inequality Var_mu(f) <= (1/rho) E_mu |grad f|^2,
/// by direct sampling from mu = N(0, I). Requires Gaussian U and W = 0.
VerificationReport verify_poincare_classical(const ProblemSpec& p, const std::vector<TestFunction>& battery,
                                             double rho, const VerifyConfig& cfg);

struct OptimalityRow {
  std::vector<double> a;
  double radius = 0.0;
  double ratio = 0.0;  // Gamma_2^W(f_a) / Gamma^W(f_a) at radius * direction
  double limit = 0.0;  // -1 + |a|^2
};

struct OptimalityTable {
  std::vector<OptimalityRow> rows;
  /// Smallest ratio over all rows: an upper bound for any admissible kappa.
  double best_kappa = 0.0;
};

/// Ratios along x = radius * direction (default e_1) for f_a = exp(a.x).
/// Requires Gaussian U and dim >= 2.
OptimalityTable optimality_study(const ProblemSpec& p, const std::vector<std::vector<double>>& a_list,
                                 const std::vector<double>& radius_list, const std::vector<double>& direction = {});

/// CSV columns: check_id,t,x0..x{n-1},f_label,lhs,lhs_se,rhs,rhs_se,margin,verdict
void write_csv(std::ostream& out, const VerificationReport& report, bool header = true);
void write_summary(std::ostream& out, const VerificationReport& report);
void write_csv(std::ostream& out, const OptimalityTable& table);

}  // namespace gammaw
