#include "gammaw/errors.hpp"
#include "gammaw/semigroup.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace gammaw;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

ProblemSpec gaussian(int n, bool sqrt_weight = true) {
  return ProblemSpec::make(builtin::gaussian_potential(n),
                           sqrt_weight ? builtin::sqrt1sq_weight(n) : builtin::zero_weight(n));
}

MCConfig small(std::size_t paths = 20000) {
  MCConfig c;
  c.n_paths = paths;
  c.dt = 1e-2;
  return c;
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal streams are reproducible, distinct and standard") {
  NormalStream a(1, 2, 3), b(1, 2, 3), c(1, 2, 4), neg(1, 2, 3, true);
  double sum = 0, sum2 = 0;
  bool differs = false;
  for (int k = 0; k < 100000; ++k) {
    const double va = a();
    CHECK_EQ(va, b());
    CHECK_EQ(-va, neg());
    differs = differs || va != c();
    sum += va;
    sum2 += va * va;
  }
  CHECK(differs);
  CHECK(std::abs(sum / 1e5) < 0.02);
  CHECK(std::abs(sum2 / 1e5 - 1.0) < 0.02);
}

TEST_CASE("Euler-Maruyama without noise follows the drift") {
  const ProblemSpec p = gaussian(2);
  MCConfig c;
  c.dt = 1e-4;
  const Point x = em_path(p, pt({1.0, -2.0}), 1.0, c, ZeroNoise{});
  // (1 - dt)^{1/dt} -> e^{-1}
  CHECK(x[0] == doctest::Approx(std::pow(1 - 1e-4, 1e4)).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-4));
  // a partial final step: t = 0.15 with dt = 0.1 gives (0.9)(0.95)
  c.dt = 0.1;
  CHECK(em_path(p, pt({1.0, 0.0}), 0.15, c, ZeroNoise{})[0] == doctest::Approx(0.9 * 0.95));
  CHECK_THROWS_AS(em_path(p, pt({1.0, 0.0}), -1.0, c, ZeroNoise{}), Error);
}

TEST_CASE("blow-up is reported as a path failure") {
  // U = -x^4: the drift pushes paths to infinity in finite time.
  const ProblemSpec p = ProblemSpec::make(parse_field("-x0^4", 1), builtin::zero_weight(1));
  MCConfig c;
  c.dt = 1e-2;
  CHECK_THROWS_AS(em_path(p, pt({3.0}), 5.0, c, ZeroNoise{}), PathFailure);
  CHECK_THROWS_AS(estimate_Qt(p, parse_field("x0", 1), pt({3.0}), 5.0, small(200)), PathFailure);
}

TEST_CASE("Mehler closed forms") {
  const ProblemSpec p = gaussian(2);
  for (double t : {0.1, 0.5, 2.0}) {
    // Q_t x0^2 (0) = 1 - e^{-2t}
    CHECK(mehler_Qt(p, parse_field("x0^2", 2), pt({0, 0}), t) == doctest::Approx(1 - std::exp(-2 * t)));
    // Q_t x0 (x) = e^{-t} x0
    CHECK(mehler_Qt(p, parse_field("x0", 2), pt({1.5, 0}), t) == doctest::Approx(1.5 * std::exp(-t)));
    // Q_t e^{a.x}(x) = exp(e^{-t} a.x + |a|^2 (1-e^{-2t})/2)
    const double s2 = 1 - std::exp(-2 * t);
    CHECK(mehler_Qt(p, builtin::exponential({1.0, -0.5}), pt({0.3, 1.0}), t) ==
          doctest::Approx(std::exp(std::exp(-t) * (0.3 - 0.5) + 1.25 * s2 / 2)).epsilon(1e-13));
    // Q_t(W^2)(0) = 1 + n (1 - e^{-2t})
    CHECK(mehler_Qt(p, p.W * p.W, pt({0, 0}), t) == doctest::Approx(1 + 2 * s2));
    // the bump: E exp(-2|Y|^2), Y ~ N(0, s2 I) in 2D = 1/(1 + 4 s2). The peak
    // is narrow relative to the Hermite weight, so accuracy grows with the order.
    const Field bump = parse_field("exp(-2*normsq(x))", 2);
    const double exact = 1 / (1 + 4 * s2);
    CHECK(mehler_Qt(p, bump, pt({0, 0}), t) == doctest::Approx(exact).epsilon(1e-5));
    CHECK(mehler_Qt(p, bump, pt({0, 0}), t, 120) == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(mehler_Qt(p, parse_field("x0^2", 2), pt({0.7, 0}), 0.0) == doctest::Approx(0.49));
}

TEST_CASE("Gauss-Hermite rules integrate polynomials exactly") {
  const GaussHermite& g = gauss_hermite(10);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const double z = g.nodes[k], w = g.weights[k];
    m0 += w, m2 += w * z * z, m4 += w * std::pow(z, 4), m6 += w * std::pow(z, 6);
  }
  CHECK(m0 == doctest::Approx(1.0));
  CHECK(m2 == doctest::Approx(1.0));
  CHECK(m4 == doctest::Approx(3.0));
  CHECK(m6 == doctest::Approx(15.0));
}

TEST_CASE("Gaussian exponential-quadratic expectations") {
  // E[(1 + |Y|^2) e^{b.Y}], Y ~ N(m, s2 I), against a two-dimensional Riemann sum.
  const Point m = pt({0.2, -0.4}), b = pt({0.5, 0.3});
  const double s2 = 0.6, sd = std::sqrt(s2);
  double ref = 0.0;
  const int k = 800;
  const double h = 16.0 / k;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double z1 = -8 + (i + 0.5) * h, z2 = -8 + (j + 0.5) * h;
      const double y1 = m[0] + sd * z1, y2 = m[1] + sd * z2;
      ref += std::exp(-(z1 * z1 + z2 * z2) / 2) / (2 * M_PI) * (1 + y1 * y1 + y2 * y2) *
             std::exp(b[0] * y1 + b[1] * y2) * h * h;
    }
  CHECK(gaussian_expquad_expectation(m, s2, b, 1.0, 1.0) == doctest::Approx(ref).epsilon(1e-8));
  const Point x = pt({1.0, 0.5});
  const double t = 0.4;
  CHECK(ou_expquad_Qt(x, t, b, 1.0, 1.0) ==
        doctest::Approx(gaussian_expquad_expectation(std::exp(-t) * x, 1 - std::exp(-2 * t), b, 1.0, 1.0)));
}

TEST_CASE("second-order short-time expansion") {
  const ProblemSpec p = gaussian(1, false);
  const Field f = parse_field("x0^2", 1);
  const double t = 0.1, x = 0.5;
  // f + t(2 - 2x^2) + t^2/2 (-4)(... ) with L^2 x^2 = L(2 - 2x^2) = -4 + 4x^2
  CHECK(taylor_Qt(p, f, pt({x}), t) == doctest::Approx(x * x + t * (2 - 2 * x * x) + t * t / 2 * (-4 + 4 * x * x)));
}

TEST_CASE("Monte Carlo agrees with Mehler and is deterministic") {
  const ProblemSpec p = gaussian(2);
  const Field f = parse_field("x0^2 + x1", 2);
  const Point x = pt({0.5, 1.0});
  const double t = 0.5;
  const MCEstimate a = estimate_Qt(p, f, x, t, small(), 7);
  const MCEstimate b = estimate_Qt(p, f, x, t, small(), 7);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const double ref = mehler_Qt(p, f, x, t);
  CHECK(std::abs(a.mean - ref) < 4 * a.std_error + 2e-2);  // dt = 1e-2 bias allowance
  CHECK(a.std_error > 0);
  // t = 0 and constants are exact
  CHECK(estimate_Qt(p, f, x, 0.0, small()).mean == f(x));
  CHECK(estimate_Qt(p, Field::constant(2, 3.0), x, t, small()).std_error == 0.0);
}

TEST_CASE("antithetic pairs reduce the variance of odd functions") {
  const ProblemSpec p = gaussian(1, false);
  MCConfig plain = small(20000), anti = plain;
  anti.antithetic = true;
  const Field f = parse_field("x0", 1);
  const MCEstimate a = estimate_Qt(p, f, pt({0.0}), 0.5, plain);
  const MCEstimate b = estimate_Qt(p, f, pt({0.0}), 0.5, anti);
  CHECK(b.std_error < 1e-10);
  CHECK(a.std_error > 1e-3);
}

TEST_CASE("std_error scales like one over the square root of n_paths") {
  const ProblemSpec p = gaussian(1, false);
  const Field f = parse_field("x0^2", 1);
  const MCEstimate a = estimate_Qt(p, f, pt({0.0}), 1.0, small(2000), 1);
  const MCEstimate b = estimate_Qt(p, f, pt({0.0}), 1.0, small(200000), 1);
  CHECK(a.std_error / b.std_error == doctest::Approx(10.0).epsilon(0.15));
}

TEST_CASE("Feynman-Kac term for f = 1 at the origin") {
  // 2 int_0^t Q_s(W^2)(0) ds = 6t - 2(1 - e^{-2t}) in two dimensions.
  const ProblemSpec p = gaussian(2);
  const double t = 0.1;
  MCConfig c = small(50000);
  c.dt = 1e-3;
  const MCEstimate e = estimate_fk_term(p, Field::constant(2, 1.0), pt({0, 0}), t, 21, c);
  const double ref = 6 * t - 2 * (1 - std::exp(-2 * t));
  CHECK(ref == doctest::Approx(0.2375).epsilon(1e-3));
  CHECK(std::abs(e.mean - ref) < 4 * e.std_error + 1e-4);
  CHECK_THROWS_AS(estimate_fk_term(p, Field::constant(2, 1.0), pt({0, 0}), t, 4, c), Error);
}

TEST_CASE("Feynman-Kac term for an exponential matches the closed form") {
  const ProblemSpec p = gaussian(1);
  const double t = 0.3;
  const Point x = pt({0.4});
  const Point a = pt({0.5});
  // 2 int_0^t e^{|a|^2 (1 - e^{-2(t-s)})} Q_s[(1+y^2) e^{2 e^{-(t-s)} a y}](x) ds by Simpson.
  const int m = 400;
  double ref = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double s = t * k / m, tau = t - s;
    const double w = (k == 0 || k == m) ? 1 : (k % 2 ? 4 : 2);
    ref += w * std::exp(0.25 * (1 - std::exp(-2 * tau))) * ou_expquad_Qt(x, s, 2 * std::exp(-tau) * a, 1, 1);
  }
  ref *= 2 * t / m / 3;
  MCConfig c = small(60000);
  c.dt = 2e-3;
  const MCEstimate e = estimate_fk_term(p, builtin::exponential({0.5}), x, t, 21, c);
  CHECK(std::abs(e.mean - ref) < 4 * e.std_error + 2e-3 * ref);
}

TEST_CASE("gradient of the semigroup") {
  const ProblemSpec g = gaussian(2);
  const Field f = builtin::exponential({1.0, 0.0});
  const Point x = pt({0.3, 0.0});
  const double t = 0.5;
  const GradEstimate m = estimate_grad_Qt(g, f, x, t, small(), 1e-3);
  // grad Q_t e^{a.x} = e^{-t} a Q_t e^{a.x}
  const double q = std::exp(std::exp(-t) * 0.3 + (1 - std::exp(-2 * t)) / 2);
  CHECK(m.mean[0] == doctest::Approx(std::exp(-t) * q).epsilon(1e-12));
  CHECK(m.mean[1] == doctest::Approx(0.0));
  CHECK(m.usable);

  const GradEstimate fd = estimate_grad_Qt(g, f, x, t, small(), 1e-2, 3, GradRoute::finite_difference);
  CHECK(std::abs(fd.mean[0] - std::exp(-t) * q) < 4 * fd.std_error[0] + 2e-2);
  const GradEstimate capped = estimate_grad_Qt(g, f, x, t, small(200), 1e-2, 3, GradRoute::finite_difference, 1e-9);
  CHECK_FALSE(capped.usable);
}
