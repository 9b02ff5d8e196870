#pragma once

#include "gammaw/field.hpp"

#include <string>
#include <vector>

namespace gammaw {

/// Diffusion L = Laplacian - grad U . grad on R^n together with a weight W >= 0.
/// Additive constants in U are irrelevant to every quantity computed here.
struct ProblemSpec {
  int dim = 1;
  Field U = Field::constant(1, 0.0);
  Field W = Field::constant(1, 0.0);
  /// U = |x|^2/2 + const, which enables the Ornstein-Uhlenbeck closed forms.
  bool gaussian_U = false;
  /// Symbolic partial derivatives of U, cached for the SDE drift.
  std::vector<Field> grad_U;

  /// Validates dimensions and detects a Gaussian potential structurally.
  static ProblemSpec make(Field U, Field W);

  bool weight_is_zero() const { return W.is_zero(); }
};

/// True when `U` is structurally |x|^2/2 plus a constant.
bool is_half_normsq(const Field& U);

namespace builtin {
/// |x|^2 / 2
Field gaussian_potential(int dim);
/// (1+|x|^2)^{p/2} / p
Field pq_potential(int dim, double p);
Field zero_weight(int dim);
/// sqrt(1+|x|^2)
Field sqrt1sq_weight(int dim);
/// (1+|x|^2)^{q/2} / q
Field pq_weight(int dim, double q);
/// exp(a . x)
Field exponential(const std::vector<double>& a);
}  // namespace builtin

}  // namespace gammaw
