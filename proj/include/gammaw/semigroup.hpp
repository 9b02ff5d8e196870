#pragma once

// The Markov semigroup Q_t = e^{tL} of dX = -grad U(X) ds + sqrt(2) dB:
// Euler-Maruyama Monte Carlo, the Mehler formula for Gaussian U, the
// second-order short-time expansion, and the weighted time integral
// 2 int_0^t Q_s(W^2 (Q_{t-s} f)^2) ds.

#include "gammaw/errors.hpp"
#include "gammaw/field.hpp"
#include "gammaw/problem.hpp"
#include "gammaw/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace gammaw {

struct MCConfig {
  std::size_t n_paths = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 20200101;
  /// Pairs paths (2k, 2k+1) with negated noise.
  bool antithetic = false;
};

struct MCEstimate {
  double mean = 0.0;
  /// Sample standard deviation / sqrt(number of independent samples).
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double dt = 0.0;
  std::size_t failed_paths = 0;
};

inline constexpr double kOverflowGuard = 1e8;
/// Largest tolerated fraction of failed paths before an estimate is refused.
inline constexpr double kMaxFailedFraction = 0.01;

/// -grad U, with a fast path for Gaussian U.
class Drift {
 public:
  explicit Drift(const ProblemSpec& p) : p_(&p) {}
  void operator()(std::span<const double> x, std::span<double> out) const {
    if (p_->gaussian_U) {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
      return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = -p_->grad_U[i](x);
  }

 private:
  const ProblemSpec* p_;
};

/// Advances x in place over `duration` with steps of dt and a final partial
/// step of (duration mod dt). Returns false if |X| leaves the overflow guard.
template <class Noise>
bool em_advance(const Drift& drift, std::span<double> x, std::span<double> scratch, double duration, double dt,
                Noise& noise) {
  if (duration <= 0.0) return true;
  auto step = [&](double h) {
    drift(x, scratch);
    const double amplitude = std::sqrt(2.0 * h);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += scratch[i] * h + amplitude * noise();
      norm2 += x[i] * x[i];
    }
    return std::isfinite(norm2) && norm2 <= kOverflowGuard * kOverflowGuard;
  };
  const auto full = static_cast<std::size_t>(std::floor(duration / dt));
  for (std::size_t k = 0; k < full; ++k)
    if (!step(dt)) return false;
  const double rest = duration - static_cast<double>(full) * dt;
  if (rest > 1e-12 * dt) return step(rest);
  return true;
}

/// Euler-Maruyama endpoint at time t. Throws PathFailure on blow-up.
template <class Noise>
Point em_path(const ProblemSpec& p, const Point& x0, double t, const MCConfig& cfg, Noise&& noise) {
  if (t < 0.0) throw Error("negative time");
  if (!(cfg.dt > 0.0)) throw Error("dt must be positive");
  Point x = x0;
  std::vector<double> scratch(x.size());
  const Drift drift(p);
  if (!em_advance(drift, std::span<double>(x.data(), x.size()), scratch, t, cfg.dt, noise))
    throw PathFailure("Euler-Maruyama path left the overflow guard");
  return x;
}

/// Endpoints of cfg.n_paths independent paths started at x0 (flat, n per path).
struct Ensemble {
  int dim = 1;
  std::vector<double> points;
  std::vector<std::uint8_t> ok;
  std::size_t failed = 0;

  std::size_t size() const { return ok.size(); }
  std::span<const double> point(std::size_t k) const {
    return {points.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

Ensemble simulate(const ProblemSpec& p, const Point& x0, double t, const MCConfig& cfg, std::uint64_t stream = 0);

/// Mean and standard error of per-path values (antithetic pairs averaged
/// first). Paths with ok == 0 are excluded; throws PathFailure when more than
/// 1% of paths failed.
MCEstimate summarize(std::span<const double> values, std::span<const std::uint8_t> ok, const MCConfig& cfg);

/// Q_t f(x) by Euler-Maruyama.
MCEstimate estimate_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t, const MCConfig& cfg,
                       std::uint64_t stream = 0);

/// Q_t f(x) = E f(e^{-t} x + sqrt(1 - e^{-2t}) Z) for Gaussian U, by tensor
/// Gauss-Hermite quadrature; c * exp(a . x) is integrated in closed form.
double mehler_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t, int quad_order = 32);

/// f(x) + t Lf(x) + t^2/2 L(Lf)(x)
double taylor_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t);

/// 2 int_0^t Q_s(W^2 (Q_{t-s} f)^2)(x) ds by composite Simpson over
/// `time_nodes` (odd, >= 3) nodes. The square is estimated without bias as
/// f(X_t) f(Z'), where X_t ends the outer path and Z' is an independent
/// continuation from the node position.
MCEstimate estimate_fk_term(const ProblemSpec& p, const Field& f, const Point& x, double t, int time_nodes,
                            const MCConfig& cfg, std::uint64_t stream = 0);

/// Per-path by-products of estimate_fk_terms.
struct FkPaths {
  /// X_t, the end of each outer path.
  Ensemble endpoint;
  /// The continuation started at s = 0: a copy of X_t independent of `endpoint`.
  Ensemble fresh;
  /// Per-path integral estimates, one vector per function.
  std::vector<std::vector<double>> values;
};

/// Same estimator for several functions sharing one set of paths.
std::vector<MCEstimate> estimate_fk_terms(const ProblemSpec& p, std::span<const Field> fs, const Point& x, double t,
                                          int time_nodes, const MCConfig& cfg, std::uint64_t stream = 0,
                                          FkPaths* paths = nullptr);

enum class GradRoute { automatic, finite_difference };

struct GradEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
  bool usable = true;
};

/// grad Q_t f(x). Gaussian U (automatic route): e^{-t} Q_t(grad f) via Mehler,
/// zero standard error. Otherwise central differences of estimate_Qt at
/// x +- h e_i with common random numbers. `usable` is false when any
/// component's standard error exceeds `stderr_cap`.
GradEstimate estimate_grad_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t, const MCConfig& cfg,
                              double h, std::uint64_t stream = 0, GradRoute route = GradRoute::automatic,
                              double stderr_cap = std::numeric_limits<double>::infinity());

/// Probabilists' Gauss-Hermite rule: nodes and weights summing to one.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussHermite& gauss_hermite(int order);

/// E[(alpha + beta |Y|^2) exp(b . Y)] for Y ~ N(m, s2 I).
double gaussian_expquad_expectation(const Point& m, double s2, const Point& b, double alpha, double beta);

/// Ornstein-Uhlenbeck Q_t[(alpha + beta |y|^2) exp(b . y)](x), exact.
double ou_expquad_Qt(const Point& x, double t, const Point& b, double alpha, double beta);

}  // namespace gammaw
