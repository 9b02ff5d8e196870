#pragma once

// Pointwise carre du champ calculus for L = Laplacian - grad U . grad with a
// multiplicative weight W:
//   Gamma(f,g)   = grad f . grad g
//   Gamma^W(f,g) = Gamma(f,g) + W^2 f g            (= |Df|^2, Df = (grad f, W f))
//   Gamma_2^W(f) = 1/2 (L Gamma^W(f) - 2 Gamma^W(f, Lf))

#include "gammaw/field.hpp"
#include "gammaw/problem.hpp"

#include <span>
#include <vector>

namespace gammaw {

/// Lf(x) = trace Hess f(x) - grad U(x) . grad f(x)
double apply_L(const ProblemSpec& p, const Field& f, const Point& x);

/// Lf as a field; composable, so apply twice for L(Lf).
Field apply_L_symbolic(const ProblemSpec& p, const Field& f);

double gamma(const ProblemSpec& p, const Field& f, const Field& g, const Point& x);

/// sum_ij (d_ij f)^2 + grad f^T Hess U grad f
double gamma2(const ProblemSpec& p, const Field& f, const Point& x);

double gamma_w(const ProblemSpec& p, const Field& f, const Field& g, const Point& x);

/// Expanded form; needs only second-order jets of f, U and W.
double gamma2_w(const ProblemSpec& p, const Field& f, const Point& x);

/// Direct evaluation of 1/2 L Gamma^W(f) - Gamma^W(Lf, f) through symbolic
/// fields. Independent of the expanded form; slower.
double gamma2_w_definitional(const ProblemSpec& p, const Field& f, const Point& x);

/// Gamma^W(f, g) as a symbolic field.
Field gamma_w_field(const ProblemSpec& p, const Field& f, const Field& g);

/// Laplacian W / W - 3 |grad W|^2 / W^2 - grad U . grad W / W.
/// Throws WeightVanishes when |W(x)| < 1e-12.
double gamma_integrand(const ProblemSpec& p, const Point& x);

inline constexpr double kWeightVanishes = 1e-12;

/// The two-component operator Df = (grad f, W f).
struct DValue {
  Eigen::VectorXd gradient;
  double weighted = 0.0;
  double norm_squared() const { return gradient.squaredNorm() + weighted * weighted; }
};
DValue apply_D(const ProblemSpec& p, const Field& f, const Point& x);

/// lhs = g (LW - rho W) + 2 grad W . grad g, bound = -c (|grad g| + W g).
struct SqrtDefect {
  double lhs = 0.0;
  double bound = 0.0;
};
SqrtDefect sqrt_defect(const ProblemSpec& p, const Field& g, const Point& x, double rho, double c);

struct GammaPointReport {
  Point x;
  double gamma = 0.0;
  double gamma2 = 0.0;
  double gamma_w = 0.0;
  double gamma2_w = 0.0;
  double lf = 0.0;
};
GammaPointReport gamma_report(const ProblemSpec& p, const Field& f, const Point& x);

/// Reports for a flat batch of points (n consecutive doubles per point).
std::vector<GammaPointReport> gamma_reports(const ProblemSpec& p, const Field& f, std::span<const double> points);

/// Jet-level kernels shared by the pointwise checks. U needs order >= 2 for
/// gamma2/gamma2_w; W needs order >= 2.
namespace kernel {
double gamma2(const Jet& f, const Jet& U);
double gamma_w(const Jet& f, const Jet& W);
double gamma2_w(const Jet& f, const Jet& U, const Jet& W);
double integrand(const Jet& U, const Jet& W);
}  // namespace kernel

}  // namespace gammaw
