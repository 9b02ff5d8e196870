#pragma once

// Run configurations: a flat key = value text file with [section] headers.
//
//   [problem]  dim, U, W
//   [search]   box_radius, radii, grid_per_axis, multistart_count, local_steps, seed, tol
//   [mc]       n_paths, dt, seed, antithetic
//   [grids]    t, x, a, radii
//   [verify]   kappa, rho, c, fk_nodes, quad_order, fd_h, rel_stderr_cap,
//              abs_stderr_cap, battery, check_samples, check_radius
//   [output]   path, format
//
// Lists are comma separated; point lists are "(x0, x1); (y0, y1)".
// U accepts gaussian | pq_potential(p) | expression text, W accepts
// zero | sqrt1sq | pq_weight(q) | expression text.

#include "gammaw/curvature.hpp"
#include "gammaw/problem.hpp"
#include "gammaw/semigroup.hpp"
#include "gammaw/verifier.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gammaw {

struct ProblemConfig {
  int dim = 2;
  std::string U = "gaussian";
  std::string W = "sqrt1sq";
};

struct GridConfig {
  std::vector<double> t_values{0.1, 0.5, 1.0};
  /// Empty means the origin and (1, ..., 1).
  std::vector<std::vector<double>> x_points;
  /// Exponents for the optimality table; empty means the default list.
  std::vector<std::vector<double>> a_vectors;
  std::vector<double> radii{10.0, 100.0, 1000.0};
};

struct VerifySettings {
  /// Curvature constants; estimated from the problem when absent.
  std::optional<double> kappa;
  std::optional<double> rho;
  std::optional<double> c;
  int fk_nodes = 11;
  int quad_order = 32;
  double fd_h = 1e-3;
  double rel_stderr_cap = 0.05;
  double abs_stderr_cap = 1e-3;
  /// default | nonnegative; sqrt always uses the nonnegative battery.
  std::string battery = "default";
  /// Random field/point samples for the pointwise check in check-curvature.
  int check_samples = 2000;
  double check_radius = 3.0;
};

struct OutputConfig {
  /// "-" for standard output.
  std::string path = "-";
  /// csv | pretty
  std::string format = "csv";
};

struct RunConfig {
  ProblemConfig problem;
  SearchConfig search;
  MCConfig mc;
  GridConfig grids;
  VerifySettings verify;
  OutputConfig output;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Parses configuration text and applies "section.key=value" overrides on
/// top of it. Unknown sections or keys are errors. Throws ConfigError.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Effective configuration in the same format; parse_config(serialize(c))
/// reproduces c exactly.
std::string serialize(const RunConfig& cfg);

/// Builds the problem from the [problem] section. Throws ConfigError for bad
/// builtin arguments and ParseError/IndexError for bad expressions.
ProblemSpec build_problem(const ProblemConfig& cfg);

std::vector<Point> to_points(const std::vector<std::vector<double>>& pts, int dim);

/// grids.x as points, with the default applied.
std::vector<Point> x_grid(const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace gammaw
