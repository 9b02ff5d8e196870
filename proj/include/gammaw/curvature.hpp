#pragma once

// Numerical infima/suprema behind the curvature constants:
//   rho   = inf_x lambda_min(Hess U(x))
//   gamma = inf_{W != 0} (Laplacian W / W - 3 |grad W|^2 / W^2 - grad U . grad W / W)
//   c     = max(2 sup |grad W|, sup_{W != 0} (LW / W - rho)_-)
// over an increasing schedule of boxes [-R, R]^n.

#include "gammaw/field.hpp"
#include "gammaw/problem.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gammaw {

struct SearchConfig {
  /// Used only when radii_schedule is empty.
  double box_radius = 10.0;
  std::vector<double> radii_schedule{10.0, 100.0, 1000.0};
  /// Grid resolution for n <= 2.
  int grid_per_axis = 64;
  /// Random starts for n >= 3, in addition to the 3^n structured starts.
  int multistart_count = 32;
  /// Nelder-Mead iterations per local refinement.
  int local_steps = 400;
  std::uint64_t seed = 20200101;
  double tol = 1e-9;

  std::vector<double> radii() const;
  void validate() const;
};

struct BoundEstimate {
  /// Finite value, or -inf/+inf as a verdict (+inf for an empty infimum).
  double value = 0.0;
  Point witness;
  bool diverging = false;
  /// Extremum found inside each box of the schedule.
  std::vector<double> trace;
  /// Points skipped because W vanished there.
  std::size_t skipped = 0;
};

/// Divergence verdict for a per-radius trace of infima: every consecutive
/// decrease exceeds tol and the last decrease exceeds the first.
bool infimum_diverges(std::span<const double> trace, double tol);

/// Per-radius minimum of `objective` (nullopt = point excluded) with grid or
/// multistart search and Nelder-Mead refinement. Exposed for reuse in tests.
BoundEstimate search_infimum(int dim, const std::function<std::optional<double>(const Point&)>& objective,
                             const SearchConfig& s);

BoundEstimate estimate_rho(const ProblemSpec& p, const SearchConfig& s);
BoundEstimate estimate_gamma(const ProblemSpec& p, const SearchConfig& s);
BoundEstimate estimate_c(const ProblemSpec& p, double rho, const SearchConfig& s);

/// c-objective at a point: max(2 |grad W|, (LW/W - rho)_-), the second branch
/// dropped where W vanishes.
double c_integrand(const ProblemSpec& p, double rho, const Point& x);

struct ViolationReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t domain_errors = 0;
  /// Smallest margin Gamma_2^W - kappa Gamma^W seen, with its location.
  double worst_margin = std::numeric_limits<double>::infinity();
  Point worst_point;
  std::size_t worst_sample = 0;
};

/// margin = Gamma_2^W(f) - kappa Gamma^W(f) at each point (flat batch); a
/// violation is margin < -tol * (|Gamma_2^W| + |kappa| Gamma^W). Domain
/// errors are counted, not thrown.
ViolationReport check_pointwise_cd(const ProblemSpec& p, const Field& f, double kappa, std::span<const double> points,
                                   double tol = 1e-9);

/// Same check over paired samples: fields[k] at point k of the flat batch.
ViolationReport check_pointwise_cd(const ProblemSpec& p, std::span<const Field> fields, double kappa,
                                   std::span<const double> points, double tol = 1e-9);

}  // namespace gammaw
