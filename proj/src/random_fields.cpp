#include "gammaw/random_fields.hpp"

namespace gammaw {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int pick(std::mt19937_64& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

Field leaf(int dim, std::mt19937_64& rng) {
  switch (pick(rng, 4)) {
    case 0:
      return Field::constant(dim, uniform(rng, -1.0, 1.0));
    case 1:
      return Field::coordinate(dim, pick(rng, dim));
    case 2:
      return uniform(rng, 0.05, 0.3) * Field::normsq(dim);
    default: {
      std::vector<double> c(dim);
      for (double& v : c) v = uniform(rng, -1.0, 1.0);
      return Field::dot(std::move(c));
    }
  }
}

}  // namespace

Field random_field(int dim, std::mt19937_64& rng, int depth) {
  if (depth <= 0) return leaf(dim, rng);
  const Field a = random_field(dim, rng, depth - 1);
  switch (pick(rng, 8)) {
    case 0:
      return a + random_field(dim, rng, depth - 1);
    case 1:
      return a - random_field(dim, rng, depth - 1);
    case 2:
      return a * random_field(dim, rng, depth - 1);
    case 3:
      return exp(uniform(rng, -0.8, 0.8) * a / (1.0 + a * a));
    case 4:
      return sqrt(1.0 + a * a);
    case 5:
      return log(1.0 + a * a);
    case 6:
      return random_field(dim, rng, depth - 1) / (1.0 + a * a);
    default:
      return pow(1.0 + a * a, uniform(rng, -1.0, 1.5));
  }
}

Field random_potential(int dim, std::mt19937_64& rng) {
  return 0.5 * Field::normsq(dim) + uniform(rng, 0.1, 0.5) * random_field(dim, rng, 2);
}

Field random_weight(int dim, std::mt19937_64& rng) {
  const Field g = random_field(dim, rng, 2);
  switch (pick(rng, 4)) {
    case 0:
      return sqrt(1.0 + g * g);
    case 1:
      return exp(0.5 * g / (1.0 + g * g));
    case 2: {
      const double q = uniform(rng, 1.0, 3.0);
      return pow(1.0 + Field::normsq(dim), q / 2.0) / q;
    }
    default:
      return 1.0 + g * g;
  }
}

Point random_point(int dim, std::mt19937_64& rng, double radius) {
  Point x(dim);
  for (int i = 0; i < dim; ++i) x[i] = uniform(rng, -radius, radius);
  return x;
}

}  // namespace gammaw
