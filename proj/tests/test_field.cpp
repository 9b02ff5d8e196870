#include "gammaw/errors.hpp"
#include "gammaw/field.hpp"
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
}  // namespace

TEST_CASE("parsing and evaluation") {
  const Field f = parse_field("x0^2 + 3*x1 - exp(x0*x1) / 2", 2);
  const double x = 0.7, y = -1.2;
  CHECK(f(pt({x, y})) == doctest::Approx(x * x + 3 * y - std::exp(x * y) / 2).epsilon(1e-14));

  CHECK(parse_field("2^3^2", 1)(pt({0.0})) == doctest::Approx(512.0));
  CHECK(parse_field("-x0^2", 1)(pt({3.0})) == doctest::Approx(-9.0));
  CHECK(parse_field("normsq(x)", 3)(pt({1, 2, 2})) == doctest::Approx(9.0));
  CHECK(parse_field("dot((1, -2), x)", 2)(pt({3, 1})) == doctest::Approx(1.0));

  Bindings b;
  b.scalars["k"] = 0.5;
  b.vectors["a"] = {1.0, 1.0};
  CHECK(parse_field("k * dot(a, x)", 2, b)(pt({2, 4})) == doctest::Approx(3.0));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_field("x0 + * x1", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position == 5);
  }
  CHECK_THROWS_AS(parse_field("x2", 2), IndexError);
  CHECK_THROWS_AS(parse_field("exp(x0", 1), ParseError);
  CHECK_THROWS_AS(parse_field("dot((1, 2, 3), x)", 2), IndexError);
  CHECK_THROWS_AS(parse_field("foo(x0)", 1), ParseError);
}

TEST_CASE("printing round-trips through the parser") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 3;
    const Field f = random_field(n, rng);
    const Field g = parse_field(to_string(f), n);
    const Point x = random_point(n, rng, 1.0);
    CHECK(g(x) == doctest::Approx(f(x)).epsilon(1e-12));
  }
  CHECK(parse_field(to_string(Field::constant(1, -1.5)), 1)(pt({0.0})) == -1.5);
}

TEST_CASE("domain errors at singular points") {
  CHECK_THROWS_AS(parse_field("log(x0)", 1)(pt({0.0})), DomainError);
  CHECK_THROWS_AS(parse_field("sqrt(x0)", 1)(pt({-1.0})), DomainError);
  CHECK_THROWS_AS(parse_field("1 / x0", 1)(pt({0.0})), DomainError);
  CHECK_THROWS_AS(eval_jet(parse_field("sqrt(x0)", 1), pt({0.0}), 2), DomainError);
  CHECK_THROWS_AS(eval_jet(parse_field("log(x0)", 1), pt({-2.0}), 2), DomainError);
}

TEST_CASE("simplifying constructors") {
  const Field x = Field::coordinate(1, 0);
  CHECK((x * 0.0).is_zero());
  CHECK((0.0 + Field::constant(1, 2.0) * 3.0).constant_value() == 6.0);
  CHECK(differentiate(Field::constant(2, 5.0), 0).is_zero());
  CHECK(differentiate(Field::coordinate(2, 1), 0).is_zero());
}

TEST_CASE("symbolic derivatives against hand-derived formulas") {
  // f = x0^3 x1 + sin-free mix of exp/log/sqrt
  const Field f = parse_field("x0^3 * x1 + exp(2*x0) + log(1 + x1^2) + sqrt(1 + normsq(x))", 2);
  const double a = 0.4, b = -0.9, r = std::sqrt(1 + a * a + b * b);
  CHECK(differentiate(f, 0)(pt({a, b})) ==
        doctest::Approx(3 * a * a * b + 2 * std::exp(2 * a) + a / r).epsilon(1e-13));
  CHECK(differentiate(f, 1)(pt({a, b})) ==
        doctest::Approx(a * a * a + 2 * b / (1 + b * b) + b / r).epsilon(1e-13));
  const Field fxx = differentiate(differentiate(f, 0), 0);
  CHECK(fxx(pt({a, b})) ==
        doctest::Approx(6 * a * b + 4 * std::exp(2 * a) + (1 + b * b) / (r * r * r)).epsilon(1e-13));
}

TEST_CASE("jets agree with symbolic derivatives up to fourth order") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 40; ++k) {
    const int n = 1 + k % 3;
    const Field f = random_field(n, rng);
    const Point x = random_point(n, rng, 1.0);
    const Jet j = eval_jet(f, x, 4);
    CHECK(j.value == doctest::Approx(f(x)).epsilon(1e-12));
    for (int i = 0; i < n; ++i) {
      const Field fi = differentiate(f, i);
      CHECK(j.gradient[i] == doctest::Approx(fi(x)).epsilon(1e-10).scale(1.0));
      for (int l = 0; l < n; ++l) {
        const Field fil = differentiate(fi, l);
        CHECK(j.hessian(i, l) == doctest::Approx(fil(x)).epsilon(1e-10).scale(1.0));
        for (int m = 0; m < n; ++m) {
          const Field film = differentiate(fil, m);
          CHECK(j.third_at(i, l, m) == doctest::Approx(film(x)).epsilon(1e-9).scale(1.0));
          const int q = (i + l + m) % n;
          CHECK(j.fourth_at(i, l, m, q) == doctest::Approx(differentiate(film, q)(x)).epsilon(1e-8).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("jets agree with central differences") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 3;
    const Field f = random_field(n, rng);
    const Point x = random_point(n, rng, 1.0);
    const Jet j = eval_jet(f, x, 2);
    const Jet fd = finite_diff_jet(f, x, 1e-4);
    for (int i = 0; i < n; ++i) {
      CHECK(j.gradient[i] == doctest::Approx(fd.gradient[i]).epsilon(1e-6).scale(1.0));
      for (int l = 0; l < n; ++l) CHECK(j.hessian(i, l) == doctest::Approx(fd.hessian(i, l)).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("random fields are finite on their sampling region") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 3;
    const Field w = random_weight(n, rng);
    const Point x = random_point(n, rng, 3.0);
    CHECK(w(x) > 0.0);
    CHECK(std::isfinite(random_potential(n, rng)(x)));
  }
}
