#include "gammaw/gamma.hpp"

#include "gammaw/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace gammaw {

namespace kernel {

double gamma2(const Jet& f, const Jet& U) {
  return f.hessian.squaredNorm() + f.gradient.dot(U.hessian * f.gradient);
}

double gamma_w(const Jet& f, const Jet& W) {
  return f.gradient.squaredNorm() + W.value * W.value * f.value * f.value;
}

double gamma2_w(const Jet& f, const Jet& U, const Jet& W) {
  const double w = W.value;
  const double zeroth = w * W.laplacian() + W.gradient.squaredNorm() - w * W.gradient.dot(U.gradient);
  return gamma2(f, U) + f.value * f.value * zeroth + w * w * f.gradient.squaredNorm() +
         4.0 * f.value * w * W.gradient.dot(f.gradient);
}

double integrand(const Jet& U, const Jet& W) {
  const double w = W.value;
  if (std::abs(w) < kWeightVanishes) throw WeightVanishes(fmt::format("W = {} vanishes", w));
  return W.laplacian() / w - 3.0 * W.gradient.squaredNorm() / (w * w) - U.gradient.dot(W.gradient) / w;
}

}  // namespace kernel

double apply_L(const ProblemSpec& p, const Field& f, const Point& x) {
  const Jet jf = eval_jet(f, x, 2);
  const Jet ju = eval_jet(p.U, x, 1);
  return jf.laplacian() - ju.gradient.dot(jf.gradient);
}

Field apply_L_symbolic(const ProblemSpec& p, const Field& f) {
  Field result = Field::constant(f.dim(), 0.0);
  for (int i = 0; i < f.dim(); ++i) {
    const Field di = differentiate(f, i);
    result = result + differentiate(di, i) - p.grad_U[i] * di;
  }
  return result;
}

double gamma(const ProblemSpec&, const Field& f, const Field& g, const Point& x) {
  return eval_jet(f, x, 1).gradient.dot(eval_jet(g, x, 1).gradient);
}

double gamma2(const ProblemSpec& p, const Field& f, const Point& x) {
  return kernel::gamma2(eval_jet(f, x, 2), eval_jet(p.U, x, 2));
}

double gamma_w(const ProblemSpec& p, const Field& f, const Field& g, const Point& x) {
  const Jet jf = eval_jet(f, x, 1), jg = eval_jet(g, x, 1);
  const double w = p.W(x);
  return jf.gradient.dot(jg.gradient) + w * w * jf.value * jg.value;
}

double gamma2_w(const ProblemSpec& p, const Field& f, const Point& x) {
  return kernel::gamma2_w(eval_jet(f, x, 2), eval_jet(p.U, x, 2), eval_jet(p.W, x, 2));
}

Field gamma_w_field(const ProblemSpec& p, const Field& f, const Field& g) {
  Field result = p.W * p.W * f * g;
  for (int i = 0; i < f.dim(); ++i) result = result + differentiate(f, i) * differentiate(g, i);
  return result;
}

double gamma2_w_definitional(const ProblemSpec& p, const Field& f, const Point& x) {
  const Field lf = apply_L_symbolic(p, f);
  const Field l_gamma = apply_L_symbolic(p, gamma_w_field(p, f, f));
  return 0.5 * l_gamma(x) - gamma_w_field(p, lf, f)(x);
}

double gamma_integrand(const ProblemSpec& p, const Point& x) {
  return kernel::integrand(eval_jet(p.U, x, 1), eval_jet(p.W, x, 2));
}

DValue apply_D(const ProblemSpec& p, const Field& f, const Point& x) {
  const Jet jf = eval_jet(f, x, 1);
  return {jf.gradient, p.W(x) * jf.value};
}

SqrtDefect sqrt_defect(const ProblemSpec& p, const Field& g, const Point& x, double rho, double c) {
  const Jet jg = eval_jet(g, x, 1);
  const Jet jw = eval_jet(p.W, x, 2);
  const Jet ju = eval_jet(p.U, x, 1);
  const double lw = jw.laplacian() - ju.gradient.dot(jw.gradient);
  SqrtDefect d;
  d.lhs = jg.value * (lw - rho * jw.value) + 2.0 * jw.gradient.dot(jg.gradient);
  d.bound = -c * (jg.gradient.norm() + jw.value * jg.value);
  return d;
}

GammaPointReport gamma_report(const ProblemSpec& p, const Field& f, const Point& x) {
  const Jet jf = eval_jet(f, x, 2);
  const Jet ju = eval_jet(p.U, x, 2);
  const Jet jw = eval_jet(p.W, x, 2);
  GammaPointReport r;
  r.x = x;
  r.gamma = jf.gradient.squaredNorm();
  r.gamma2 = kernel::gamma2(jf, ju);
  r.gamma_w = r.gamma + jw.value * jw.value * jf.value * jf.value;
  r.gamma2_w = kernel::gamma2_w(jf, ju, jw);
  r.lf = jf.laplacian() - ju.gradient.dot(jf.gradient);
  return r;
}

std::vector<GammaPointReport> gamma_reports(const ProblemSpec& p, const Field& f, std::span<const double> points) {
  const auto n = static_cast<std::size_t>(p.dim);
  if (points.size() % n != 0) throw IndexError("point batch length is not a multiple of the dimension");
  std::vector<GammaPointReport> out;
  out.reserve(points.size() / n);
  for (std::size_t k = 0; k < points.size(); k += n)
    out.push_back(gamma_report(p, f, Eigen::Map<const Eigen::VectorXd>(points.data() + k, static_cast<Eigen::Index>(n))));
  return out;
}

}  // namespace gammaw
