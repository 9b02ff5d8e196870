#include "gammaw/errors.hpp"
#include "gammaw/verifier.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

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

VerifyConfig quick(std::size_t paths = 20000) {
  VerifyConfig c;
  c.mc.n_paths = paths;
  c.mc.dt = 5e-3;
  c.fk_nodes = 11;
  return c;
}

std::vector<TestFunction> exp_battery(int n) {
  std::vector<double> a(n, 0.0);
  a[0] = 1.0;
  return {{"exp_a1", builtin::exponential(a)}};
}

}  // namespace

TEST_CASE("three-sigma classification") {
  CHECK(classify(0.1, 0.01, true, true) == Verdict::pass);
  CHECK(classify(-0.029, 0.01, true, true) == Verdict::pass);
  CHECK(classify(-0.031, 0.01, true, true) == Verdict::fail);
  CHECK(classify(-1.0, 0.01, false, true) == Verdict::inconclusive);
  CHECK(classify(1.0, 0.01, true, false) == Verdict::inconclusive);
  CHECK(std::string(to_string(Verdict::inconclusive)) == "inconclusive");
}

TEST_CASE("variance coefficient") {
  CHECK(variance_coefficient(0.0, 0.3) == doctest::Approx(0.6));
  CHECK(variance_coefficient(-1.0, 0.1) == doctest::Approx(std::exp(0.2) - 1.0));
  CHECK(variance_coefficient(1.0, 0.1) == doctest::Approx(1.0 - std::exp(-0.2)));
  CHECK(variance_coefficient(1e-12, 0.3) == doctest::Approx(0.6));
}

TEST_CASE("batteries") {
  CHECK(default_battery(2).size() == 5);
  for (const auto& tf : nonnegative_battery(3)) {
    CHECK(tf.f.dim() == 3);
    CHECK(tf.f(pt({-1.0, 0.5, 2.0})) >= 0.0);
  }
}

TEST_CASE("commutation for the weighted Gaussian problem with kappa = -1") {
  const VerificationReport r =
      verify_commutation(gaussian(2), exp_battery(2), -1.0, {0.0, 0.1, 0.5, 1.0}, {pt({0, 0})}, quick());
  REQUIRE(r.cases.size() == 4);
  CHECK_FALSE(r.any_fail());
  // With 2e4 paths the t = 1 right side of exp(x0) is too noisy to be usable.
  CHECK(r.count(Verdict::pass) >= 3);
  CHECK(r.cases[0].margin == doctest::Approx(0.0));
  // lhs for Gaussian U is closed form: |grad Q_t f|^2 + W^2 (Q_t f)^2 at 0 = (e^{-2t} + 1) e^{1 - e^{-2t}}
  const double t = 0.5;
  CHECK(r.cases[2].lhs.value == doctest::Approx((std::exp(-2 * t) + 1) * std::exp(1 - std::exp(-2 * t))));
}

TEST_CASE("classical commutation with W = 0 and kappa = 1") {
  const VerificationReport r =
      verify_commutation(gaussian(2, false), exp_battery(2), 1.0, {0.1, 1.0}, {pt({0.5, 0.5})}, quick());
  CHECK_FALSE(r.any_fail());
}

TEST_CASE("kappa above the optimal constant is rejected far out") {
  const VerificationReport r = verify_commutation(gaussian(2), {{"exp_a0.1", builtin::exponential({0.1, 0.0})}},
                                                  -0.5, {1.0}, {pt({3, 3})}, quick(50000));
  CHECK(r.any_fail());
}

TEST_CASE("monotonicity in kappa") {
  const auto run = [](double kappa) {
    return verify_commutation(gaussian(2), exp_battery(2), kappa, {0.5}, {pt({1, 1})}, quick());
  };
  const VerificationReport a = run(-1.0), b = run(-2.0);
  CHECK(b.cases[0].margin > a.cases[0].margin);
}

TEST_CASE("variance equality case with W = 0") {
  // f = x0 in one dimension: lhs = rhs = 1 - e^{-2t} at the origin.
  const VerificationReport r =
      verify_variance(gaussian(1, false), {{"x0", parse_field("x0", 1)}}, 1.0, {0.0, 0.5}, {pt({0.0})}, quick());
  REQUIRE(r.cases.size() == 2);
  CHECK(r.cases[0].margin == 0.0);
  const double ref = 1 - std::exp(-1.0);
  CHECK(std::abs(r.cases[1].lhs.value - ref) < 4 * r.cases[1].lhs.std_error + 1e-2);
  CHECK(std::abs(r.cases[1].rhs.value - ref) < 4 * r.cases[1].rhs.std_error + 1e-2);
  CHECK_FALSE(r.any_fail());
}

TEST_CASE("variance closed form for f = 1") {
  const double t = 0.1;
  const VerificationReport r =
      verify_variance(gaussian(2), {{"one", Field::constant(2, 1.0)}}, -1.0, {t}, {pt({0, 0})}, quick(40000));
  const auto& c = r.cases.at(0);
  const double lhs = 6 * t - 2 * (1 - std::exp(-2 * t));
  const double rhs = (std::exp(2 * t) - 1) * (3 - 2 * std::exp(-2 * t));
  CHECK(lhs == doctest::Approx(0.2375).epsilon(1e-3));
  CHECK(rhs == doctest::Approx(0.3017).epsilon(1e-3));
  CHECK(std::abs(c.lhs.value - lhs) < 4 * c.lhs.std_error + 1e-4);
  CHECK(std::abs(c.rhs.value - rhs) < 4 * c.rhs.std_error + 1e-3);
  CHECK(c.verdict == Verdict::pass);
}

TEST_CASE("square-root commutation") {
  const VerificationReport r = verify_sqrt_commutation(gaussian(2), exp_battery(2), 1.0, 2.0, {0.0, 0.1, 1.0},
                                                       {pt({0, 0}), pt({2, 0})}, quick());
  CHECK_FALSE(r.any_fail());
  CHECK(r.cases[0].margin == doctest::Approx(0.0));
  // W = 0, c = 0: the classical strong gradient bound.
  const VerificationReport z =
      verify_sqrt_commutation(gaussian(2, false), exp_battery(2), 1.0, 0.0, {0.5}, {pt({0, 0})}, quick());
  CHECK_FALSE(z.any_fail());
  CHECK_THROWS_AS(verify_sqrt_commutation(gaussian(2), {{"x0", parse_field("x0", 2)}}, 1.0, 2.0, {0.5},
                                          {pt({-1, 0})}, quick()),
                  Error);
  CHECK_THROWS_AS(verify_sqrt_commutation(gaussian(2), exp_battery(2), 1.0, INFINITY, {0.5}, {pt({0, 0})}, quick()),
                  Error);
}

TEST_CASE("degenerate weight inequality") {
  const VerificationReport r = degenerate_w_check(gaussian(2), -1.0, {0.0, 0.5}, {pt({0, 0})}, quick());
  REQUIRE(r.cases.size() == 2);
  CHECK(r.cases[0].margin == doctest::Approx(0.0));
  const double rhs = std::exp(1.0) * (3 - 2 * std::exp(-1.0));
  CHECK(rhs == doctest::Approx(6.15).epsilon(1e-2));
  CHECK(r.cases[1].lhs.value == 1.0);
  CHECK(std::abs(r.cases[1].rhs.value - rhs) < 4 * r.cases[1].rhs.std_error + 1e-2);
  const VerificationReport z = degenerate_w_check(gaussian(2, false), 1.0, {0.5}, {pt({0, 0})}, quick());
  CHECK(z.cases[0].lhs.value == 0.0);
  CHECK(z.cases[0].rhs.value == 0.0);
}

TEST_CASE("classical Poincare inequality") {
  const VerificationReport r = verify_poincare_classical(gaussian(2, false), default_battery(2), 1.0, quick());
  CHECK_FALSE(r.any_fail());
  CHECK_THROWS_AS(verify_poincare_classical(gaussian(2), default_battery(2), 1.0, quick()), Error);
}

TEST_CASE("optimality table") {
  const OptimalityTable t = optimality_study(gaussian(2), {{0.1, 0.0}, {1.0, 0.0}, {0.0, 0.0}}, {10.0, 1000.0});
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[1].ratio == doctest::Approx(-0.99).epsilon(1e-2));
  CHECK(t.rows[3].ratio == doctest::Approx(0.0).epsilon(1e-2));
  // a = 0: (n - r^2)/(1 + r^2)
  CHECK(t.rows[4].ratio == doctest::Approx((2 - 100.0) / 101.0));
  CHECK(t.best_kappa == doctest::Approx(-1.0).epsilon(1e-2));
  CHECK_THROWS_AS(optimality_study(gaussian(1), {{0.1}}, {10.0}), Error);
}

TEST_CASE("reports are deterministic and serialize to CSV") {
  const auto run = [] {
    return verify_variance(gaussian(2), exp_battery(2), -1.0, {0.1}, {pt({0, 0}), pt({1, 1})}, quick(2000));
  };
  std::ostringstream a, b;
  write_csv(a, run());
  write_csv(b, run());
  CHECK(a.str() == b.str());
  const std::string header = a.str().substr(0, a.str().find('\n'));
  CHECK(header == "check_id,t,x0,x1,f_label,lhs,lhs_se,rhs,rhs_se,margin,verdict");
  std::ostringstream s;
  write_summary(s, run());
  CHECK(s.str().find("cases: 2") != std::string::npos);
}
