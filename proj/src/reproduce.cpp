#include "gammaw/reproduce.hpp"

#include "gammaw/curvature.hpp"
#include "gammaw/errors.hpp"
#include "gammaw/gamma.hpp"
#include "gammaw/random_fields.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace gammaw {

namespace {

// Reference computations used by the criteria. They are written directly
// from closed forms and do not call the routines under test.
namespace oracle {

/// inf over u in (0, 1] of b u + a u^2 - 1 by a dense scan refined with golden sections.
double quadratic_infimum(double b, double a) {
  auto g = [&](double u) { return b * u + a * u * u - 1.0; };
  const int m = 200000;
  double best = g(1.0), best_u = 1.0;
  for (int k = 1; k <= m; ++k) {
    const double u = static_cast<double>(k) / m;
    if (g(u) < best) best = g(u), best_u = u;
  }
  double lo = std::max(best_u - 1.0 / m, 0.0), hi = std::min(best_u + 1.0 / m, 1.0);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double u1 = hi - phi * (hi - lo), u2 = lo + phi * (hi - lo);
    if (g(u1) < g(u2)) hi = u2;
    else lo = u1;
  }
  best = std::min(best, g(0.5 * (lo + hi)));
  // The endpoint u -> 0 is excluded but approached.
  return std::min(best, g(0.0));
}

/// gamma for U = |x|^2/2, W = sqrt(1+|x|^2) from the definition:
/// Laplacian W / W = n u - u + u^2, |grad W|^2/W^2 = u - u^2, x.grad W/W = 1 - u.
double gaussian_sqrt1sq_gamma(int n) { return quadratic_infimum(n - 3.0, 4.0); }

/// The same quantity from the displayed formula (n-2) u + 3 u^2 - 1.
double displayed_gamma(int n) { return quadratic_infimum(n - 2.0, 3.0); }

/// Gamma_2^W(f_a) / Gamma^W(f_a) for the Gaussian/sqrt1sq problem.
double exponential_ratio(double a2, double x2, double xa, int n) {
  return (a2 * a2 + 2.0 * a2 + n + x2 * (a2 - 1.0) + 4.0 * xa) / (a2 + 1.0 + x2);
}

/// max(2|grad W|, (LW/W - rho)_-) along the radius for the Gaussian/sqrt1sq problem.
double radial_c(int n, double rho, double r_max) {
  double best = 0.0;
  const int m = 400000;
  for (int k = 0; k <= m; ++k) {
    const double r = r_max * std::pow(static_cast<double>(k) / m, 0.5);
    const double u = 1.0 / (1.0 + r * r);
    const double lw = n * u + u * u - 1.0;
    best = std::max({best, 2.0 * r / std::sqrt(1.0 + r * r), std::max(0.0, -(lw - rho))});
  }
  return best;
}

/// Composite Simpson rule with `panels` (even) panels.
template <class G>
double simpson(G&& g, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = g(a) + g(b);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * g(a + k * h);
  return s * h / 3.0;
}

/// For f = 1, x = 0, Gaussian U in dimension n, W^2 = 1 + |x|^2:
/// Q_s(W^2)(0) = 1 + n (1 - e^{-2s}) as a second moment of N(0, (1-e^{-2s}) I).
double q_w2_origin(int n, double s) { return 1.0 + n * (1.0 - std::exp(-2.0 * s)); }

}  // namespace oracle

using Clock = std::chrono::steady_clock;

ProblemSpec gaussian_sqrt1sq(int n) {
  return ProblemSpec::make(builtin::gaussian_potential(n), builtin::sqrt1sq_weight(n));
}

std::vector<double> axis(int n, double s) {
  std::vector<double> a(n, 0.0);
  a[0] = s;
  return a;
}

Point point(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}


std::string report_text(const VerificationReport& r) {
  std::ostringstream out;
  write_summary(out, r);
  return out.str();
}

std::string report_csv(const VerificationReport& r, bool header = true) {
  std::ostringstream out;
  write_csv(out, r, header);
  return out.str();
}

double inconclusive_share(const VerificationReport& r) {
  return r.cases.empty() ? 0.0 : static_cast<double>(r.count(Verdict::inconclusive)) / r.cases.size();
}

/// pass / fail / inconclusive for a report that is expected to hold.
Status holds(const VerificationReport& r) {
  if (r.any_fail()) return Status::fail;
  return inconclusive_share(r) > 0.2 ? Status::inconclusive : Status::pass;
}

CriterionResult ac1(const ReproduceOptions& o) {
  CriterionResult r;
  r.csv = "n,estimate,definition_oracle,displayed_oracle,published,diverging\n";
  bool matches_published = true, matches_definition = true;
  std::string detail;
  for (int n = 1; n <= 3; ++n) {
    const BoundEstimate g = estimate_gamma(gaussian_sqrt1sq(n), o.search);
    const double def = oracle::gaussian_sqrt1sq_gamma(n);
    const double shown = oracle::displayed_gamma(n);
    const double published = n == 1 ? -13.0 / 12.0 : -1.0;
    r.csv += fmt::format("{},{},{},{},{},{}\n", n, g.value, def, shown, published, g.diverging);
    matches_published = matches_published && !g.diverging && std::abs(g.value - published) <= 1e-6;
    matches_definition = matches_definition && !g.diverging && std::abs(g.value - def) <= 1e-6;
    detail += fmt::format("{}n={}: {:.9f} (published {:.9f}, definition {:.9f})", n > 1 ? "; " : "", n, g.value,
                          published, def);
  }
  r.status = matches_published ? Status::pass : Status::fail;
  r.detail = detail;
  if (!matches_published && matches_definition)
    r.explained =
        "estimates agree with the definition of gamma within 1e-6; the published constants follow from a displayed "
        "formula that is inconsistent with that definition";
  r.summary = "gamma for U = |x|^2/2, W = sqrt(1+|x|^2), n = 1, 2, 3\n" + detail + "\n";
  return r;
}

CriterionResult ac2(const ReproduceOptions& o) {
  CriterionResult r;
  SearchConfig s = o.search;
  s.radii_schedule = {10.0, 100.0, 1000.0};
  r.csv = "n,p,trace_r10,trace_r100,trace_r1000,value,diverging,expected_diverging\n";
  bool ok = true;
  std::string bad;
  for (int n = 1; n <= 2; ++n) {
    for (double p : {1.0, 2.0, 2.5, 3.0}) {
      const ProblemSpec prob = ProblemSpec::make(builtin::pq_potential(n, p), builtin::pq_weight(n, 1.0));
      const BoundEstimate g = estimate_gamma(prob, s);
      const bool expected = p > 2.0;
      const bool good = g.diverging == expected && (expected || std::isfinite(g.value));
      ok = ok && good;
      if (!good) bad += fmt::format(" n={} p={}", n, p);
      r.csv += fmt::format("{},{},{},{},{},{},{},{}\n", n, p, g.trace.size() > 0 ? g.trace[0] : NAN,
                           g.trace.size() > 1 ? g.trace[1] : NAN, g.trace.size() > 2 ? g.trace[2] : NAN, g.value,
                           g.diverging, expected);
    }
  }
  r.status = ok ? Status::pass : Status::fail;
  r.detail = ok ? "finite for p in {1, 2}, diverging for p in {2.5, 3} (n = 1, 2)" : "wrong verdict for" + bad;
  r.summary = r.detail + "\n";
  return r;
}

CriterionResult ac3(const ReproduceOptions& o) {
  CriterionResult r;
  std::mt19937_64 rng(o.search.seed);
  r.csv = "instance,dim,expanded,definitional,scale,rel_error\n";
  double worst = 0.0;
  std::size_t domain = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 3;
    const ProblemSpec p = ProblemSpec::make(random_potential(n, rng), random_weight(n, rng));
    const Field f = random_field(n, rng);
    const Point x = random_point(n, rng, 1.5);
    try {
      const double a = gamma2_w(p, f, x);
      const double b = gamma2_w_definitional(p, f, x);
      // Relative to the size of the terms, so that cancellation to ~0 is not penalized.
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(gamma2(p, f, x)), gamma_w(p, f, f, x)});
      const double rel = scale > 0.0 ? std::abs(a - b) / scale : std::abs(a - b);
      worst = std::max(worst, rel);
      r.csv += fmt::format("{},{},{},{},{},{}\n", k, n, a, b, scale, rel);
    } catch (const DomainError&) {
      ++domain;
    }
  }
  r.status = worst <= 1e-8 && domain == 0 ? Status::pass : Status::fail;
  r.detail = fmt::format("200 instances, worst relative difference {:.3g}, domain errors {}", worst, domain);
  r.summary = r.detail + "\n";
  return r;
}

CriterionResult ac4(const ReproduceOptions& o) {
  CriterionResult r;
  r.csv = "problem,kappa,samples,violations,domain_errors,worst_margin\n";
  bool ok = true;
  std::string detail;
  auto run = [&](const std::string& label, const ProblemSpec& p, double kappa, bool counts) {
    std::mt19937_64 rng(o.search.seed + 4);
    const std::size_t m = 10000;
    std::vector<Field> fields;
    std::vector<double> points;
    for (std::size_t k = 0; k < m; ++k) {
      fields.push_back(random_field(p.dim, rng));
      const Point x = random_point(p.dim, rng, 3.0);
      points.insert(points.end(), x.data(), x.data() + x.size());
    }
    const ViolationReport v = check_pointwise_cd(p, fields, kappa, points);
    r.csv += fmt::format("{},{},{},{},{},{}\n", label, kappa, v.checked, v.violations, v.domain_errors, v.worst_margin);
    if (counts) ok = ok && v.violations == 0 && v.checked == m;
    detail += fmt::format("{}{}: kappa={:.6g} violations={}", detail.empty() ? "" : "; ", label, kappa, v.violations);
  };
  const ProblemSpec a = gaussian_sqrt1sq(2);
  const double ka = std::min(estimate_rho(a, o.search).value, estimate_gamma(a, o.search).value);
  run("gaussian_sqrt1sq", a, ka, true);
  run("gaussian_sqrt1sq_kappa_-1", a, -1.0, false);
  const ProblemSpec b = ProblemSpec::make(builtin::gaussian_potential(2), builtin::zero_weight(2));
  const double kb = std::min(estimate_rho(b, o.search).value, estimate_gamma(b, o.search).value);
  run("gaussian_zero", b, kb, true);
  r.status = ok ? Status::pass : Status::fail;
  r.detail = detail;
  r.summary = detail + "\n";
  return r;
}

CriterionResult ac5(const ReproduceOptions&) {
  CriterionResult r;
  const int n = 2;
  const ProblemSpec p = gaussian_sqrt1sq(n);
  std::vector<std::vector<double>> as;
  for (double s : {0.0, 0.1, 0.5, 1.0}) as.push_back(axis(n, s));
  const OptimalityTable t = optimality_study(p, as, {10.0, 100.0, 1000.0});
  r.csv = "a,radius,ratio,oracle_ratio,limit\n";
  bool ok = true;
  for (const auto& row : t.rows) {
    const double a2 = row.a[0] * row.a[0] + row.a[1] * row.a[1];
    const double ref = oracle::exponential_ratio(a2, row.radius * row.radius, row.radius * row.a[0], n);
    r.csv += fmt::format("({} {}),{},{},{},{}\n", row.a[0], row.a[1], row.radius, row.ratio, ref, row.limit);
    ok = ok && std::abs(row.ratio - ref) <= 1e-9 * std::max(1.0, std::abs(ref));
    if (row.radius == 1000.0) ok = ok && std::abs(row.ratio - (-1.0 + a2)) <= 1e-2;
  }
  ok = ok && std::abs(t.best_kappa + 1.0) <= 1e-2;
  r.status = ok ? Status::pass : Status::fail;
  r.detail = fmt::format("best kappa {:.6f}", t.best_kappa);
  r.summary = r.detail + "\n";
  return r;
}

CriterionResult ac6(const ReproduceOptions& o) {
  CriterionResult r;
  const ProblemSpec p = gaussian_sqrt1sq(2);
  const VerificationReport main = verify_commutation(p, default_battery(2), -1.0, {0.1, 0.5, 1.0},
                                                     {point({0, 0}), point({1, 1})}, o.verify);
  // kappa = -0.5 exceeds the optimal constant; exp(a.x) with small |a| far
  // from the origin exposes it.
  VerificationReport strong = verify_commutation(p, {{"exp_a0.1", builtin::exponential(axis(2, 0.1))}}, -0.5, {1.0},
                                                 {point({3, 3})}, o.verify);
  strong.check_id = "commutation_kappa_-0.5";
  r.csv = report_csv(main) + report_csv(strong, false);
  r.summary = report_text(main) + report_text(strong);
  const Status s = holds(main);
  const bool rejected = strong.any_fail();
  r.status = s != Status::pass ? s : (rejected ? Status::pass : Status::fail);
  r.detail = fmt::format("kappa=-1: {} pass, {} fail, {} inconclusive; kappa=-0.5 rerun {}", main.count(Verdict::pass),
                         main.count(Verdict::fail), main.count(Verdict::inconclusive),
                         rejected ? "fails as expected" : "did not fail");
  return r;
}

CriterionResult ac7(const ReproduceOptions& o) {
  CriterionResult r;
  const ProblemSpec p = gaussian_sqrt1sq(2);
  const VerificationReport main = verify_variance(p, default_battery(2), -1.0, {0.1, 0.5, 1.0},
                                                  {point({0, 0}), point({1, 1})}, o.verify);
  VerificationReport one = verify_variance(p, {{"one", Field::constant(2, 1.0)}}, -1.0, {0.1}, {point({0, 0})}, o.verify);
  one.check_id = "variance_constant";
  const VerificationCase& c = one.cases.at(0);

  const double t = 0.1;
  const double lhs_ref = 2.0 * oracle::simpson([](double s) { return oracle::q_w2_origin(2, s); }, 0.0, t, 200);
  const double rhs_ref = std::expm1(2.0 * t) * oracle::q_w2_origin(2, t);
  const double lhs_shown = 6.0 * t - 2.0 * (1.0 - std::exp(-2.0 * t));
  const double rhs_shown = (std::exp(2.0 * t) - 1.0) * (3.0 - 2.0 * std::exp(-2.0 * t));
  const bool lhs_ok = std::abs(c.lhs.value - lhs_ref) <= 3.0 * c.lhs.std_error;
  const bool rhs_ok = std::abs(c.rhs.value - rhs_ref) <= 3.0 * c.rhs.std_error;
  const bool refs_ok = std::abs(lhs_ref - lhs_shown) <= 1e-10 && std::abs(rhs_ref - rhs_shown) <= 1e-10;

  r.csv = report_csv(main) + report_csv(one, false);
  r.csv += fmt::format("reference,{},0,0,one,{},0,{},0,{},reference\n", t, lhs_ref, rhs_ref, rhs_ref - lhs_ref);
  r.summary = report_text(main) + report_text(one) +
              fmt::format("f=1 x=0 t=0.1: lhs {} (se {}) vs {}; rhs {} (se {}) vs {}\n", c.lhs.value,
                          c.lhs.std_error, lhs_ref, c.rhs.value, c.rhs.std_error, rhs_ref);
  const Status s = holds(main);
  r.status = s != Status::pass ? s : (lhs_ok && rhs_ok && refs_ok ? Status::pass : Status::fail);
  r.detail = fmt::format("{} pass, {} fail, {} inconclusive; constant case lhs {:.5f}/{:.5f} rhs {:.5f}/{:.5f}",
                         main.count(Verdict::pass), main.count(Verdict::fail), main.count(Verdict::inconclusive),
                         c.lhs.value, lhs_ref, c.rhs.value, rhs_ref);
  return r;
}

CriterionResult ac8(const ReproduceOptions& o) {
  CriterionResult r;
  const int n = 2;
  const ProblemSpec p = gaussian_sqrt1sq(n);
  const BoundEstimate c = estimate_c(p, 1.0, o.search);
  const double r_max = o.search.radii().back() * std::sqrt(static_cast<double>(n));
  const double ref = oracle::radial_c(n, 1.0, r_max);
  const bool c_ok = !c.diverging && std::abs(c.value - 2.0) <= 1e-4 && std::abs(c.value - ref) <= 1e-4;
  const VerificationReport rep = verify_sqrt_commutation(p, nonnegative_battery(n), 1.0, c.value, {0.1, 1.0},
                                                         {point({0, 0}), point({2, 0})}, o.verify);
  r.csv = report_csv(rep) + fmt::format("constant_c,,,,c,{},0,{},0,{},{}\n", c.value, ref, ref - c.value,
                                        c_ok ? "pass" : "fail");
  r.summary = fmt::format("c = {} (radial reference {})\n", c.value, ref) + report_text(rep);
  const Status s = holds(rep);
  r.status = !c_ok ? Status::fail : s;
  r.detail = fmt::format("c {:.8f} (radial {:.8f}); {} pass, {} fail, {} inconclusive", c.value, ref,
                         rep.count(Verdict::pass), rep.count(Verdict::fail), rep.count(Verdict::inconclusive));
  return r;
}

CriterionResult ac9(const ReproduceOptions& o) {
  CriterionResult r;
  const ProblemSpec p = gaussian_sqrt1sq(2);
  const auto battery = default_battery(2);
  r.csv = "kind,f,x0,x1,t,value,std_error,reference,score\n";
  std::size_t agree = 0, total = 0, ratio_ok = 0, ratio_total = 0;
  const std::vector<Point> xs{point({0, 0}), point({1, 1})};
  const std::vector<double> ts{0.25, 1.0};
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    for (std::size_t it = 0; it < ts.size(); ++it) {
      const Ensemble e = simulate(p, xs[ix], ts[it], o.mc, combine_stream(0xA9, ix * 8 + it));
      for (const auto& tf : battery) {
        std::vector<double> v(e.size(), 0.0);
        for (std::size_t k = 0; k < e.size(); ++k)
          if (e.ok[k]) v[k] = tf.f(e.point(k));
        const MCEstimate m = summarize(v, e.ok, o.mc);
        const double ref = mehler_Qt(p, tf.f, xs[ix], ts[it]);
        const double z = std::abs(m.mean - ref) / m.std_error;
        agree += z <= 3.0 ? 1 : 0;
        ++total;
        r.csv += fmt::format("em_vs_mehler,{},{},{},{},{},{},{},{}\n", tf.label, xs[ix][0], xs[ix][1], ts[it], m.mean,
                             m.std_error, ref, z);
      }
    }
  }
  for (const Point& x : {point({0.5, -0.3}), point({0.8, 0.6})}) {
    for (const auto& tf : battery) {
      const double t = 0.1;
      const double e1 = std::abs(taylor_Qt(p, tf.f, x, t) - mehler_Qt(p, tf.f, x, t));
      const double e2 = std::abs(taylor_Qt(p, tf.f, x, t / 2) - mehler_Qt(p, tf.f, x, t / 2));
      const double ratio = e1 / e2;
      ratio_ok += ratio >= 4.0 && ratio <= 16.0 ? 1 : 0;
      ++ratio_total;
      r.csv += fmt::format("taylor_ratio,{},{},{},{},{},{},{},{}\n", tf.label, x[0], x[1], t, e1, e2, ratio, ratio);
    }
  }
  r.status = agree == total && ratio_ok == ratio_total ? Status::pass : Status::fail;
  r.detail = fmt::format("Euler-Maruyama within 3 stderr on {}/{} cases; Taylor ratio in [4, 16] on {}/{}", agree,
                         total, ratio_ok, ratio_total);
  r.summary = r.detail + "\n";
  return r;
}

CriterionResult ac10(const ReproduceOptions&) {
  CriterionResult r;
  const int n = 2;
  const double kappa = -1.0;
  const ProblemSpec p = gaussian_sqrt1sq(n);
  r.csv = "f,x0,x1,t,scaled_gap,target,reference_target,rel_error\n";
  bool ok = true;
  double worst = 0.0, worst_ratio = 0.0;
  const std::vector<std::vector<double>> as{{1.0, 0.0}, {0.1, 0.0}, {0.5, -0.5}};
  for (const auto& av : as) {
    const Point a = Eigen::Map<const Point>(av.data(), n);
    const double a2 = a.squaredNorm();
    const Field f = builtin::exponential(av);
    for (const Point& x : {point({0, 0}), point({1, 1})}) {
      const double target = 2.0 * (gamma2_w(p, f, x) - kappa * gamma_w(p, f, f, x));
      const double fa2 = std::exp(2.0 * a.dot(x));
      const double g2w = fa2 * (a2 * a2 + 2.0 * a2 + n + x.squaredNorm() * (a2 - 1.0) + 4.0 * x.dot(a));
      const double gw = fa2 * (a2 + 1.0 + x.squaredNorm());
      const double reference = 2.0 * (g2w - kappa * gw);
      ok = ok && std::abs(target - reference) <= 1e-10 * std::max(1.0, std::abs(reference));
      double err[2];
      const double ts[2] = {1e-2, 1e-3};
      for (int k = 0; k < 2; ++k) {
        const double t = ts[k];
        const double qf = ou_expquad_Qt(x, t, a, 1.0, 0.0);
        const double qf2 = ou_expquad_Qt(x, t, 2.0 * a, 1.0, 0.0);
        auto integrand = [&](double s) {
          const double tau = t - s;
          return std::exp(a2 * -std::expm1(-2.0 * tau)) * ou_expquad_Qt(x, s, 2.0 * std::exp(-tau) * a, 1.0, 1.0);
        };
        const double fk = 2.0 * oracle::simpson(integrand, 0.0, t, 64);
        const double lhs = qf2 - qf * qf + fk;
        const double rhs = variance_coefficient(kappa, t) * ou_expquad_Qt(x, t, 2.0 * a, a2 + 1.0, 1.0);
        const double gap = (rhs - lhs) / (t * t);
        err[k] = std::abs(gap - target) / std::max(1.0, std::abs(target));
        r.csv += fmt::format("exp_a({} {}),{},{},{},{},{},{},{}\n", av[0], av[1], x[0], x[1], t, gap, target, reference,
                             err[k]);
      }
      const double ratio = err[1] / err[0];
      worst = std::max(worst, err[1]);
      worst_ratio = std::max(worst_ratio, ratio);
      ok = ok && err[1] <= 1e-2 && ratio <= 0.2;
    }
  }
  r.status = ok ? Status::pass : Status::fail;
  r.detail = fmt::format("worst relative error at t=1e-3: {:.3g}; worst error ratio err(1e-3)/err(1e-2): {:.3g}",
                         worst, worst_ratio);
  r.summary = r.detail + "\n";
  return r;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "PASS";
    case Status::fail:
      return "FAIL";
    case Status::inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

ReproduceOptions reproduce_options(const RunConfig& cfg) {
  ReproduceOptions o;
  o.mc = cfg.mc;
  o.search = cfg.search;
  o.verify.mc = cfg.mc;
  o.verify.fk_nodes = cfg.verify.fk_nodes;
  o.verify.quad_order = cfg.verify.quad_order;
  o.verify.fd_h = cfg.verify.fd_h;
  o.verify.rel_stderr_cap = cfg.verify.rel_stderr_cap;
  o.verify.abs_stderr_cap = cfg.verify.abs_stderr_cap;
  return o;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"AC1", "gamma constants for the Gaussian potential with W = sqrt(1+|x|^2)", 10.0, ac1},
      {"AC2", "gamma is finite exactly for p <= 2", 30.0, ac2},
      {"AC3", "expanded and definitional Gamma_2^W agree", 10.0, ac3},
      {"AC4", "pointwise curvature bound with kappa = min(rho, gamma)", 30.0, ac4},
      {"AC5", "optimality limit -1 + |a|^2", 5.0, ac5},
      {"AC6", "gradient commutation with exp(2t)", 300.0, ac6},
      {"AC7", "variance inequality", 300.0, ac7},
      {"AC8", "square-root commutation with c = 2", 300.0, ac8},
      {"AC9", "Euler-Maruyama, Mehler and Taylor agree", 120.0, ac9},
      {"AC10", "short-time expansion of the variance inequality", 60.0, ac10},
  };
  return list;
}

CriterionResult run_criterion(const Criterion& c, const ReproduceOptions& opts) {
  const auto start = Clock::now();
  CriterionResult r;
  try {
    r = c.run(opts);
  } catch (const Error& e) {
    r.status = Status::fail;
    r.detail = std::string("error: ") + e.what();
    r.summary = r.detail + "\n";
  }
  r.id = c.id;
  r.title = c.title;
  r.budget_seconds = c.budget_seconds;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.seconds > r.budget_seconds && r.status == Status::pass) {
    r.status = Status::fail;
    r.detail += fmt::format("; runtime {:.1f} s exceeds {:.0f} s", r.seconds, r.budget_seconds);
  }
  r.summary = fmt::format("{}: {}\n", r.id, r.title) + r.summary +
              fmt::format("runtime: {:.2f} s (budget {:.0f} s)\n", r.seconds, r.budget_seconds);
  return r;
}

}  // namespace gammaw
