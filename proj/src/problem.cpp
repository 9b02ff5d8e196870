#include "gammaw/problem.hpp"

#include "gammaw/errors.hpp"

#include <fmt/format.h>

namespace gammaw {

namespace {

bool is_normsq_over_two(const Field& f) {
  using Op = Field::Op;
  auto is_half = [](const Field& c) { return c.constant_value() && *c.constant_value() == 0.5; };
  auto is_two = [](const Field& c) { return c.constant_value() && *c.constant_value() == 2.0; };
  switch (f.op()) {
    case Op::Mul:
      return (is_half(f.lhs()) && f.rhs().op() == Op::NormSq) || (f.lhs().op() == Op::NormSq && is_half(f.rhs()));
    case Op::Div:
      return f.lhs().op() == Op::NormSq && is_two(f.rhs());
    default:
      return false;
  }
}

}  // namespace

bool is_half_normsq(const Field& U) {
  using Op = Field::Op;
  if (is_normsq_over_two(U)) return true;
  if (U.op() == Op::Add || U.op() == Op::Sub) {
    const Field a = U.lhs(), b = U.rhs();
    if (b.constant_value()) return is_normsq_over_two(a);
    if (a.constant_value() && U.op() == Op::Add) return is_normsq_over_two(b);
  }
  return false;
}

ProblemSpec ProblemSpec::make(Field U, Field W) {
  if (U.dim() != W.dim())
    throw IndexError(fmt::format("U has dimension {} but W has dimension {}", U.dim(), W.dim()));
  ProblemSpec p;
  p.dim = U.dim();
  p.gaussian_U = is_half_normsq(U);
  p.grad_U.reserve(p.dim);
  for (int i = 0; i < p.dim; ++i) p.grad_U.push_back(differentiate(U, i));
  p.U = std::move(U);
  p.W = std::move(W);
  return p;
}

namespace builtin {

Field gaussian_potential(int dim) { return 0.5 * Field::normsq(dim); }

Field pq_potential(int dim, double p) { return pow(1.0 + Field::normsq(dim), p / 2.0) / p; }

Field zero_weight(int dim) { return Field::constant(dim, 0.0); }

Field sqrt1sq_weight(int dim) { return sqrt(1.0 + Field::normsq(dim)); }

Field pq_weight(int dim, double q) { return pow(1.0 + Field::normsq(dim), q / 2.0) / q; }

Field exponential(const std::vector<double>& a) { return exp(Field::dot(a)); }

}  // namespace builtin

}  // namespace gammaw
