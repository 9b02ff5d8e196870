#pragma once

// Random smooth fields for property checks. Every generated expression is
// defined and C^infinity on all of R^n: square roots, logarithms and
// denominators only ever see arguments >= 1, and exponentials are applied to
// bounded arguments.

#include "gammaw/field.hpp"

#include <random>

namespace gammaw {

Field random_field(int dim, std::mt19937_64& rng, int depth = 3);

/// |x|^2/2 plus a random smooth perturbation.
Field random_potential(int dim, std::mt19937_64& rng);

/// A strictly positive random smooth weight.
Field random_weight(int dim, std::mt19937_64& rng);

/// Uniform point in [-radius, radius]^n.
Point random_point(int dim, std::mt19937_64& rng, double radius);

}  // namespace gammaw
