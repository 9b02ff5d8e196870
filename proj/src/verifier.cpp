#include "gammaw/verifier.hpp"

#include "gammaw/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <ostream>

namespace gammaw {

namespace {

constexpr std::uint64_t kCommutation = 0xC0;
constexpr std::uint64_t kVariance = 0xC1;
constexpr std::uint64_t kSqrt = 0xC2;
constexpr std::uint64_t kDegenerate = 0xC3;
constexpr std::uint64_t kPoincare = 0xC4;

std::uint64_t case_stream(std::uint64_t check, std::size_t ix, std::size_t it) {
  return combine_stream(combine_stream(check, ix), it);
}

struct Prepared {
  const TestFunction* tf;
  Field gamma_w;            // Gamma^W(f) as a field
  std::vector<Field> grad;  // partial derivatives
};

std::vector<Prepared> prepare(const ProblemSpec& p, const std::vector<TestFunction>& battery) {
  std::vector<Prepared> out;
  for (const auto& tf : battery) {
    if (tf.f.dim() != p.dim) throw IndexError(fmt::format("test function '{}' has the wrong dimension", tf.label));
    Prepared pr{&tf, gamma_w_field(p, tf.f, tf.f), {}};
    for (int i = 0; i < p.dim; ++i) pr.grad.push_back(differentiate(tf.f, i));
    out.push_back(std::move(pr));
  }
  return out;
}

SideValue exact_side(double v, const VerifyConfig& cfg) { return {v, cfg.exact_floor * std::max(1.0, std::abs(v)), true}; }

SideValue mc_side(double value, double se, const VerifyConfig& cfg) {
  return {value, se, se <= cfg.rel_stderr_cap * std::abs(value) + cfg.abs_stderr_cap};
}

VerificationCase make_case(double t, const Point& x, const std::string& label, SideValue lhs, SideValue rhs,
                           const VerifyConfig& cfg, std::uint64_t stream) {
  VerificationCase c;
  c.t = t;
  c.x = x;
  c.f_label = label;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs.value - lhs.value;
  c.margin_stderr = std::hypot(lhs.std_error, rhs.std_error);
  c.verdict = classify(c.margin, c.margin_stderr, lhs.usable, rhs.usable);
  c.seed = cfg.mc.seed;
  c.stream = stream;
  c.n_paths = cfg.mc.n_paths;
  c.dt = cfg.mc.dt;
  return c;
}

/// Summarizes g(endpoint) over an ensemble.
template <class G>
MCEstimate ensemble_mean(const Ensemble& e, const MCConfig& mc, G&& g) {
  std::vector<double> values(e.size(), 0.0);
  for (std::size_t k = 0; k < e.size(); ++k)
    if (e.ok[k]) values[k] = g(e.point(k));
  return summarize(values, e.ok, mc);
}

struct GradAndValue {
  Eigen::VectorXd grad, grad_se;
  double value = 0.0, value_se = 0.0;
  bool exact = false;
};

/// grad Q_t f(x) and Q_t f(x): Mehler for Gaussian U, otherwise one Monte Carlo replica.
GradAndValue semigroup_at(const ProblemSpec& p, const Prepared& pr, const Point& x, double t, const VerifyConfig& cfg,
                          std::uint64_t stream) {
  GradAndValue out;
  if (p.gaussian_U) {
    out.exact = true;
    out.value = mehler_Qt(p, pr.tf->f, x, t, cfg.quad_order);
    out.grad = Eigen::VectorXd(p.dim);
    for (int i = 0; i < p.dim; ++i) out.grad[i] = std::exp(-t) * mehler_Qt(p, pr.grad[i], x, t, cfg.quad_order);
    out.grad_se = Eigen::VectorXd::Zero(p.dim);
    return out;
  }
  const GradEstimate g =
      estimate_grad_Qt(p, pr.tf->f, x, t, cfg.mc, cfg.fd_h, combine_stream(stream, 1), GradRoute::finite_difference);
  const MCEstimate q = estimate_Qt(p, pr.tf->f, x, t, cfg.mc, combine_stream(stream, 2));
  out.grad = g.mean;
  out.grad_se = g.std_error;
  out.value = q.mean;
  out.value_se = q.std_error;
  return out;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::size_t VerificationReport::count(Verdict v) const {
  std::size_t n = 0;
  for (const auto& c : cases) n += c.verdict == v ? 1 : 0;
  return n;
}

Verdict classify(double margin, double margin_stderr, bool lhs_usable, bool rhs_usable) {
  if (!(lhs_usable && rhs_usable)) return Verdict::inconclusive;
  return margin >= -3.0 * margin_stderr ? Verdict::pass : Verdict::fail;
}

double variance_coefficient(double kappa, double t) {
  if (kappa == 0.0) return 2.0 * t;
  return -std::expm1(-2.0 * kappa * t) / kappa;
}

std::vector<TestFunction> default_battery(int dim) {
  std::vector<double> e1(dim, 0.0), small(dim, 0.0);
  e1[0] = 1.0;
  small[0] = 0.1;
  return {
      {"exp_a1", builtin::exponential(e1)},
      {"exp_a0.1", builtin::exponential(small)},
      {"x0", Field::coordinate(dim, 0)},
      {"x0^2", pow(Field::coordinate(dim, 0), 2.0)},
      {"bump", exp(-2.0 * Field::normsq(dim))},
  };
}

std::vector<TestFunction> nonnegative_battery(int dim) {
  std::vector<double> e1(dim, 0.0), small(dim, 0.0);
  e1[0] = 1.0;
  small[0] = 0.1;
  return {
      {"exp_a1", builtin::exponential(e1)},
      {"exp_a0.1", builtin::exponential(small)},
      {"x0^2", pow(Field::coordinate(dim, 0), 2.0)},
      {"bump", exp(-2.0 * Field::normsq(dim))},
      {"one", Field::constant(dim, 1.0)},
  };
}

VerificationReport verify_commutation(const ProblemSpec& p, const std::vector<TestFunction>& battery, double kappa,
                                      const std::vector<double>& t_grid, const std::vector<Point>& x_grid,
                                      const VerifyConfig& cfg) {
  const auto prepared = prepare(p, battery);
  VerificationReport report{"commutation", {}};
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    const Point& x = x_grid[ix];
    const double w2 = std::pow(p.W(x), 2);
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
      const double t = t_grid[it];
      const std::uint64_t stream = case_stream(kCommutation, ix, it);
      if (t == 0.0) {
        for (const auto& pr : prepared) {
          const double v = pr.gamma_w(x);
          report.cases.push_back(make_case(t, x, pr.tf->label, exact_side(v, cfg), exact_side(v, cfg), cfg, stream));
        }
        continue;
      }
      const Ensemble rhs_paths = simulate(p, x, t, cfg.mc, combine_stream(stream, 0));
      const double factor = std::exp(-2.0 * kappa * t);
      for (std::size_t j = 0; j < prepared.size(); ++j) {
        const Prepared& pr = prepared[j];
        const MCEstimate q = ensemble_mean(rhs_paths, cfg.mc, [&](std::span<const double> y) { return pr.gamma_w(y); });
        const SideValue rhs = mc_side(factor * q.mean, factor * q.std_error, cfg);

        SideValue lhs;
        const std::uint64_t fs = combine_stream(stream, 100 + j);
        if (p.gaussian_U) {
          const GradAndValue g = semigroup_at(p, pr, x, t, cfg, fs);
          lhs = exact_side(g.grad.squaredNorm() + w2 * g.value * g.value, cfg);
        } else {
          // Two independent replicas so that products estimate squares without bias.
          const GradAndValue a = semigroup_at(p, pr, x, t, cfg, combine_stream(fs, 1));
          const GradAndValue b = semigroup_at(p, pr, x, t, cfg, combine_stream(fs, 2));
          const double value = a.grad.dot(b.grad) + w2 * a.value * b.value;
          double var = 0.0;
          for (int i = 0; i < p.dim; ++i)
            var += std::pow(b.grad[i] * a.grad_se[i], 2) + std::pow(a.grad[i] * b.grad_se[i], 2);
          var += w2 * w2 * (std::pow(b.value * a.value_se, 2) + std::pow(a.value * b.value_se, 2));
          lhs = mc_side(value, std::sqrt(var), cfg);
        }
        report.cases.push_back(make_case(t, x, pr.tf->label, lhs, rhs, cfg, stream));
      }
    }
  }
  return report;
}

VerificationReport verify_variance(const ProblemSpec& p, const std::vector<TestFunction>& battery, double kappa,
                                   const std::vector<double>& t_grid, const std::vector<Point>& x_grid,
                                   const VerifyConfig& cfg) {
  const auto prepared = prepare(p, battery);
  std::vector<Field> fields;
  for (const auto& tf : battery) fields.push_back(tf.f);
  VerificationReport report{"variance", {}};
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    const Point& x = x_grid[ix];
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
      const double t = t_grid[it];
      const std::uint64_t stream = case_stream(kVariance, ix, it);
      if (t == 0.0) {
        for (const auto& pr : prepared)
          report.cases.push_back(make_case(t, x, pr.tf->label, exact_side(0.0, cfg), exact_side(0.0, cfg), cfg, stream));
        continue;
      }
      // One simulation provides everything: X_t (A), an independent copy of
      // X_t (B, the continuation from s = 0) and the per-path time integral.
      FkPaths paths;
      estimate_fk_terms(p, fields, x, t, cfg.fk_nodes, cfg.mc, combine_stream(stream, 4), &paths);
      const Ensemble& a = paths.endpoint;
      const Ensemble& b = paths.fresh;
      const double coeff = variance_coefficient(kappa, t);
      const bool no_weight = p.weight_is_zero();

      for (std::size_t j = 0; j < prepared.size(); ++j) {
        const Field& f = prepared[j].tf->f;
        // f(A)^2 - f(A) f(B) has mean Q_t(f^2) - (Q_t f)^2; the right side
        // uses A as well, so margins are formed per path.
        std::vector<double> lhs_v(a.size(), 0.0), rhs_v(a.size(), 0.0), margin_v(a.size(), 0.0);
        for (std::size_t k = 0; k < a.size(); ++k) {
          if (!a.ok[k]) continue;
          const double fa = f(a.point(k));
          lhs_v[k] = fa * fa - fa * f(b.point(k)) + (no_weight ? 0.0 : paths.values[j][k]);
          rhs_v[k] = coeff * prepared[j].gamma_w(a.point(k));
          margin_v[k] = rhs_v[k] - lhs_v[k];
        }
        const MCEstimate l = summarize(lhs_v, a.ok, cfg.mc);
        const MCEstimate r = summarize(rhs_v, a.ok, cfg.mc);
        const MCEstimate m = summarize(margin_v, a.ok, cfg.mc);
        VerificationCase c = make_case(t, x, prepared[j].tf->label, mc_side(l.mean, l.std_error, cfg),
                                       mc_side(r.mean, r.std_error, cfg), cfg, stream);
        c.margin_stderr = m.std_error;
        c.verdict = classify(c.margin, c.margin_stderr, c.lhs.usable, c.rhs.usable);
        report.cases.push_back(std::move(c));
      }
    }
  }
  return report;
}

VerificationReport verify_sqrt_commutation(const ProblemSpec& p, const std::vector<TestFunction>& battery, double rho,
                                           double c, const std::vector<double>& t_grid,
                                           const std::vector<Point>& x_grid, const VerifyConfig& cfg) {
  if (!std::isfinite(c)) throw Error("the constant c must be finite");
  const auto prepared = prepare(p, battery);
  std::vector<Field> integrands;
  for (const auto& pr : prepared) {
    Field g2 = Field::constant(p.dim, 0.0);
    for (const auto& gi : pr.grad) g2 = g2 + gi * gi;
    integrands.push_back(sqrt(g2) + p.W * pr.tf->f);
  }
  auto require_nonnegative = [](const TestFunction& tf, double v) {
    if (v < 0.0) throw Error(fmt::format("test function '{}' takes the negative value {}", tf.label, v));
  };

  VerificationReport report{"sqrt", {}};
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    const Point& x = x_grid[ix];
    const double w = p.W(x);
    for (const auto& pr : prepared) require_nonnegative(*pr.tf, pr.tf->f(x));
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
      const double t = t_grid[it];
      const std::uint64_t stream = case_stream(kSqrt, ix, it);
      if (t == 0.0) {
        for (std::size_t j = 0; j < prepared.size(); ++j) {
          const double v = integrands[j](x);
          report.cases.push_back(make_case(t, x, prepared[j].tf->label, exact_side(v, cfg), exact_side(v, cfg), cfg, stream));
        }
        continue;
      }
      const Ensemble paths = simulate(p, x, t, cfg.mc, combine_stream(stream, 0));
      const double factor = std::exp((c - rho) * t);
      for (std::size_t j = 0; j < prepared.size(); ++j) {
        const Prepared& pr = prepared[j];
        const MCEstimate q = ensemble_mean(paths, cfg.mc, [&](std::span<const double> y) {
          require_nonnegative(*pr.tf, pr.tf->f(y));
          return integrands[j](y);
        });
        const SideValue rhs = mc_side(factor * q.mean, factor * q.std_error, cfg);
        const GradAndValue g = semigroup_at(p, pr, x, t, cfg, combine_stream(stream, 100 + j));
        const double gnorm = g.grad.norm();
        SideValue lhs;
        if (g.exact) {
          lhs = exact_side(gnorm + w * g.value, cfg);
        } else {
          double var = std::pow(w * g.value_se, 2);
          if (gnorm > 0.0)
            for (int i = 0; i < p.dim; ++i) var += std::pow(g.grad[i] / gnorm * g.grad_se[i], 2);
          lhs = mc_side(gnorm + w * g.value, std::sqrt(var), cfg);
        }
        report.cases.push_back(make_case(t, x, pr.tf->label, lhs, rhs, cfg, stream));
      }
    }
  }
  return report;
}

VerificationReport degenerate_w_check(const ProblemSpec& p, double kappa, const std::vector<double>& t_grid,
                                      const std::vector<Point>& x_grid, const VerifyConfig& cfg) {
  const Field w2 = p.W * p.W;
  VerificationReport report{"degenerate", {}};
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    const Point& x = x_grid[ix];
    const double lhs = w2(x);
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
      const double t = t_grid[it];
      const std::uint64_t stream = case_stream(kDegenerate, ix, it);
      SideValue rhs;
      if (t == 0.0) {
        rhs = exact_side(lhs, cfg);
      } else {
        const double factor = std::exp(-2.0 * kappa * t);
        const MCEstimate q = estimate_Qt(p, w2, x, t, cfg.mc, stream);
        rhs = q.std_error == 0.0 ? exact_side(factor * q.mean, cfg) : mc_side(factor * q.mean, factor * q.std_error, cfg);
      }
      report.cases.push_back(make_case(t, x, "W^2", exact_side(lhs, cfg), rhs, cfg, stream));
    }
  }
  return report;
}

VerificationReport verify_poincare_classical(const ProblemSpec& p, const std::vector<TestFunction>& battery,
                                             double rho, const VerifyConfig& cfg) {
  if (!p.gaussian_U || !p.weight_is_zero()) throw Error("the classical Poincare check needs Gaussian U and W = 0");
  if (!(rho > 0.0)) throw Error("rho must be positive");
  const auto prepared = prepare(p, battery);
  const auto n = static_cast<std::size_t>(p.dim);
  const std::size_t paths = cfg.mc.n_paths;
  const std::uint64_t stream = case_stream(kPoincare, 0, 0);
  const Point origin = Point::Zero(p.dim);

  std::vector<double> z(paths * n), zp(paths * n), zg(paths * n);
  for (std::size_t k = 0; k < paths; ++k) {
    NormalStream s1(cfg.mc.seed, combine_stream(stream, 1), k), s2(cfg.mc.seed, combine_stream(stream, 2), k),
        s3(cfg.mc.seed, combine_stream(stream, 3), k);
    for (std::size_t i = 0; i < n; ++i) {
      z[k * n + i] = s1();
      zp[k * n + i] = s2();
      zg[k * n + i] = s3();
    }
  }
  const std::vector<std::uint8_t> ok(paths, 1);
  MCConfig plain = cfg.mc;
  plain.antithetic = false;

  VerificationReport report{"poincare", {}};
  for (const auto& pr : prepared) {
    std::vector<double> var(paths), grad(paths);
    for (std::size_t k = 0; k < paths; ++k) {
      const std::span<const double> a(z.data() + k * n, n), b(zp.data() + k * n, n), g(zg.data() + k * n, n);
      const double fa = pr.tf->f(a);
      var[k] = fa * fa - fa * pr.tf->f(b);
      grad[k] = pr.gamma_w(g) / rho;
    }
    const MCEstimate lhs = summarize(var, ok, plain);
    const MCEstimate rhs = summarize(grad, ok, plain);
    report.cases.push_back(make_case(std::numeric_limits<double>::infinity(), origin, pr.tf->label,
                                     mc_side(lhs.mean, lhs.std_error, cfg), mc_side(rhs.mean, rhs.std_error, cfg), cfg,
                                     stream));
  }
  return report;
}

OptimalityTable optimality_study(const ProblemSpec& p, const std::vector<std::vector<double>>& a_list,
                                 const std::vector<double>& radius_list, const std::vector<double>& direction) {
  if (!p.gaussian_U) throw Error("the optimality study needs U = |x|^2/2");
  if (p.dim < 2) throw Error("the optimality study needs dimension >= 2");
  Point dir = Point::Zero(p.dim);
  if (direction.empty()) {
    dir[0] = 1.0;
  } else {
    if (static_cast<int>(direction.size()) != p.dim) throw IndexError("direction has the wrong dimension");
    for (int i = 0; i < p.dim; ++i) dir[i] = direction[i];
    dir.normalize();
  }
  OptimalityTable table;
  table.best_kappa = std::numeric_limits<double>::infinity();
  for (const auto& a : a_list) {
    if (static_cast<int>(a.size()) != p.dim) throw IndexError("vector a has the wrong dimension");
    const Point av = Eigen::Map<const Eigen::VectorXd>(a.data(), p.dim);
    for (const double r : radius_list) {
      const Point x = r * dir;
      // The ratio is invariant under f -> const * f; rescaling by e^{-a.x}
      // keeps f_a finite far from the origin.
      const Field f = exp(Field::dot(a) - av.dot(x));
      OptimalityRow row{a, r, gamma2_w(p, f, x) / gamma_w(p, f, f, x), -1.0 + av.squaredNorm()};
      table.best_kappa = std::min(table.best_kappa, row.ratio);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_csv(std::ostream& out, const VerificationReport& report, bool header) {
  const int n = report.cases.empty() ? 0 : static_cast<int>(report.cases.front().x.size());
  if (header) {
    out << "check_id,t";
    for (int i = 0; i < n; ++i) out << ",x" << i;
    out << ",f_label,lhs,lhs_se,rhs,rhs_se,margin,verdict\n";
  }
  for (const auto& c : report.cases) {
    out << report.check_id << ',' << fmt::format("{}", c.t);
    for (Eigen::Index i = 0; i < c.x.size(); ++i) out << ',' << fmt::format("{}", c.x[i]);
    out << ',' << c.f_label << ',' << fmt::format("{},{},{},{},{}", c.lhs.value, c.lhs.std_error, c.rhs.value,
                                                  c.rhs.std_error, c.margin)
        << ',' << to_string(c.verdict) << '\n';
  }
}

void write_summary(std::ostream& out, const VerificationReport& report) {
  out << fmt::format("check: {}\ncases: {}  pass: {}  fail: {}  inconclusive: {}\n", report.check_id,
                     report.cases.size(), report.count(Verdict::pass), report.count(Verdict::fail),
                     report.count(Verdict::inconclusive));
  if (report.cases.empty()) return;
  const auto& first = report.cases.front();
  out << fmt::format("seed: {}  n_paths: {}  dt: {}\n", first.seed, first.n_paths, first.dt);
  const VerificationCase* worst = &first;
  for (const auto& c : report.cases) {
    const double z = c.margin_stderr > 0.0 ? c.margin / c.margin_stderr : c.margin;
    const double wz = worst->margin_stderr > 0.0 ? worst->margin / worst->margin_stderr : worst->margin;
    if (z < wz) worst = &c;
  }
  out << fmt::format("tightest case: t={} f={} margin={} (stderr {})\n", worst->t, worst->f_label, worst->margin,
                     worst->margin_stderr);
}

void write_csv(std::ostream& out, const OptimalityTable& table) {
  out << "a,radius,ratio,limit\n";
  for (const auto& row : table.rows) {
    std::string a;
    for (std::size_t i = 0; i < row.a.size(); ++i) a += (i ? " " : "") + fmt::format("{}", row.a[i]);
    out << fmt::format("({}),{},{},{}\n", a, row.radius, row.ratio, row.limit);
  }
}

}  // namespace gammaw
