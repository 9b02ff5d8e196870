#include "gammaw/errors.hpp"
#include "gammaw/gamma.hpp"
#include "gammaw/random_fields.hpp"

#include <doctest.h>

#include <cmath>

using namespace gammaw;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

ProblemSpec gaussian_sqrt1sq(int n) {
  return ProblemSpec::make(builtin::gaussian_potential(n), builtin::sqrt1sq_weight(n));
}

}  // namespace

TEST_CASE("generator on polynomials under the Gaussian potential") {
  const ProblemSpec p = ProblemSpec::make(builtin::gaussian_potential(2), builtin::zero_weight(2));
  const Point x = pt({0.3, -1.1});
  // L x0^2 = 2 - 2 x0^2, L(x0 x1) = -2 x0 x1
  CHECK(apply_L(p, parse_field("x0^2", 2), x) == doctest::Approx(2 - 2 * 0.09));
  CHECK(apply_L(p, parse_field("x0*x1", 2), x) == doctest::Approx(-2 * 0.3 * -1.1));
  const Field lf = apply_L_symbolic(p, parse_field("x0^2", 2));
  CHECK(lf(x) == doctest::Approx(2 - 2 * 0.09));
  CHECK(p.gaussian_U);
}

TEST_CASE("carre du champ identities") {
  const ProblemSpec p = gaussian_sqrt1sq(2);
  const Field f = parse_field("x0^2 + x1", 2);
  const Field g = parse_field("exp(x0)", 2);
  const Point x = pt({0.5, 2.0});
  CHECK(gamma(p, f, g, x) == doctest::Approx(2 * 0.5 * std::exp(0.5)));
  const double w2 = 1 + 0.25 + 4.0;
  CHECK(gamma_w(p, f, g, x) == doctest::Approx(2 * 0.5 * std::exp(0.5) + w2 * (0.25 + 2.0) * std::exp(0.5)));
  const DValue d = apply_D(p, f, x);
  CHECK(d.norm_squared() == doctest::Approx(gamma_w(p, f, f, x)));
  CHECK(gamma_w_field(p, f, g)(x) == doctest::Approx(gamma_w(p, f, g, x)));
}

TEST_CASE("Gamma_2 for the Gaussian potential is |Hess f|^2 + |grad f|^2") {
  const ProblemSpec p = ProblemSpec::make(builtin::gaussian_potential(2), builtin::zero_weight(2));
  const Field f = parse_field("x0^2 * x1", 2);
  const double a = 0.7, b = -0.4;
  // Hess = [[2b, 2a], [2a, 0]], grad = (2ab, a^2)
  const double hess2 = 4 * b * b + 8 * a * a;
  const double grad2 = 4 * a * a * b * b + a * a * a * a;
  CHECK(gamma2(p, f, pt({a, b})) == doctest::Approx(hess2 + grad2));
  CHECK(gamma2_w(p, f, pt({a, b})) == doctest::Approx(hess2 + grad2));
}

TEST_CASE("Gamma_2^W of exponentials matches the closed form") {
  for (int n : {2, 3}) {
    const ProblemSpec p = gaussian_sqrt1sq(n);
    std::vector<double> a(n, 0.0);
    a[0] = 0.6;
    a[n - 1] = -0.3;
    const Field f = builtin::exponential(a);
    Point x = Point::LinSpaced(n, -0.8, 1.3);
    double a2 = 0, xa = 0;
    for (int i = 0; i < n; ++i) a2 += a[i] * a[i], xa += a[i] * x[i];
    const double f2 = std::exp(2 * xa);
    const double r2 = x.squaredNorm();
    const double expected = f2 * (a2 * a2 + 2 * a2 + n + r2 * (a2 - 1) + 4 * xa);
    CHECK(gamma2_w(p, f, x) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(gamma2_w_definitional(p, f, x) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(gamma_w(p, f, f, x) == doctest::Approx(f2 * (a2 + 1 + r2)).epsilon(1e-12));
  }
}

TEST_CASE("expanded and definitional forms agree on random problems") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 60; ++k) {
    const int n = 1 + k % 3;
    const ProblemSpec p = ProblemSpec::make(random_potential(n, rng), random_weight(n, rng));
    const Field f = random_field(n, rng);
    const Point x = random_point(n, rng, 1.5);
    const double a = gamma2_w(p, f, x), b = gamma2_w_definitional(p, f, x);
    const double scale = std::max({std::abs(a), std::abs(b), gamma_w(p, f, f, x), 1e-300});
    CHECK(std::abs(a - b) / scale < 1e-9);
  }
}

TEST_CASE("gamma integrand in closed form") {
  // For U = |x|^2/2 and W = sqrt(1+|x|^2): (n-3) u + 4 u^2 - 1 with u = 1/(1+|x|^2).
  for (int n : {1, 2, 3}) {
    const ProblemSpec p = gaussian_sqrt1sq(n);
    for (double r : {0.0, 0.5, 1.7, 10.0}) {
      Point x = Point::Zero(n);
      x[0] = r;
      const double u = 1.0 / (1.0 + r * r);
      CHECK(gamma_integrand(p, x) == doctest::Approx((n - 3) * u + 4 * u * u - 1).epsilon(1e-12));
    }
  }
  // p/q family, q = 1: n u - |x|^2 u (4 u + (1+|x|^2)^{(p-2)/2})
  const double pp = 3.0;
  const ProblemSpec p = ProblemSpec::make(builtin::pq_potential(2, pp), builtin::pq_weight(2, 1.0));
  const Point x = pt({1.5, -0.5});
  const double r2 = x.squaredNorm(), u = 1 / (1 + r2);
  CHECK(gamma_integrand(p, x) == doctest::Approx(2 * u - r2 * u * (4 * u + std::pow(1 + r2, (pp - 2) / 2))));
}

TEST_CASE("gamma integrand refuses vanishing weights") {
  const ProblemSpec p = ProblemSpec::make(builtin::gaussian_potential(1), parse_field("x0", 1));
  CHECK_THROWS_AS(gamma_integrand(p, pt({0.0})), WeightVanishes);
  CHECK_NOTHROW(gamma_integrand(p, pt({0.5})));
}

TEST_CASE("square-root defect terms") {
  const ProblemSpec p = gaussian_sqrt1sq(1);
  const Field g = parse_field("exp(x0)", 1);
  const double x = 0.4, w = std::sqrt(1 + x * x);
  // LW = W'' - x W' with W' = x/W, W'' = 1/W^3
  const double lw = 1 / (w * w * w) - x * x / w;
  const SqrtDefect d = sqrt_defect(p, g, pt({x}), 1.0, 2.0);
  CHECK(d.lhs == doctest::Approx(std::exp(x) * (lw - w) + 2 * (x / w) * std::exp(x)));
  CHECK(d.bound == doctest::Approx(-2.0 * (std::exp(x) + w * std::exp(x))));
}

TEST_CASE("batch reports") {
  const ProblemSpec p = gaussian_sqrt1sq(2);
  const Field f = parse_field("x0*x1", 2);
  const std::vector<double> pts{0.1, 0.2, -1.0, 0.5};
  const auto reps = gamma_reports(p, f, pts);
  REQUIRE(reps.size() == 2);
  CHECK(reps[1].gamma2_w == doctest::Approx(gamma2_w(p, f, pt({-1.0, 0.5}))));
  CHECK(reps[0].lf == doctest::Approx(apply_L(p, f, pt({0.1, 0.2}))));
}
