#include "gammaw/semigroup.hpp"

#include "gammaw/gamma.hpp"

#include <fmt/format.h>

#include <map>
#include <memory>
#include <mutex>
#include <optional>

namespace gammaw {

namespace {

NormalStream path_noise(const MCConfig& cfg, std::uint64_t stream, std::size_t path) {
  if (cfg.antithetic) return NormalStream(cfg.seed, stream, path / 2, path % 2 == 1);
  return NormalStream(cfg.seed, stream, path);
}

void validate(const MCConfig& cfg, double t) {
  if (t < 0.0) throw Error("negative time");
  if (!(cfg.dt > 0.0)) throw Error("dt must be positive");
  if (cfg.n_paths < 2) throw Error("at least two paths are required");
  if (cfg.antithetic && cfg.n_paths % 2 != 0) throw Error("antithetic sampling needs an even number of paths");
}

struct ScaledExponential {
  double scale = 1.0;
  std::vector<double> a;
};

/// Recognizes c, exp(a . x), and constant multiples of them.
std::optional<ScaledExponential> match_scaled_exponential(const Field& f) {
  using Op = Field::Op;
  const int n = f.dim();
  if (const auto c = f.constant_value()) return ScaledExponential{*c, std::vector<double>(n, 0.0)};
  switch (f.op()) {
    case Op::Exp: {
      const Field arg = f.lhs();
      if (arg.op() == Op::Dot) return ScaledExponential{1.0, arg.node().coeffs};
      return std::nullopt;
    }
    case Op::Mul: {
      if (const auto c = f.lhs().constant_value())
        if (auto inner = match_scaled_exponential(f.rhs())) return inner->scale *= *c, inner;
      if (const auto c = f.rhs().constant_value())
        if (auto inner = match_scaled_exponential(f.lhs())) return inner->scale *= *c, inner;
      return std::nullopt;
    }
    case Op::Div: {
      if (const auto c = f.rhs().constant_value())
        if (auto inner = match_scaled_exponential(f.lhs())) return inner->scale /= *c, inner;
      return std::nullopt;
    }
    case Op::Neg:
      if (auto inner = match_scaled_exponential(f.lhs())) return inner->scale = -inner->scale, inner;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace

Ensemble simulate(const ProblemSpec& p, const Point& x0, double t, const MCConfig& cfg, std::uint64_t stream) {
  validate(cfg, t);
  const auto n = static_cast<std::size_t>(p.dim);
  if (static_cast<std::size_t>(x0.size()) != n) throw IndexError("starting point has the wrong dimension");
  Ensemble e;
  e.dim = p.dim;
  e.points.resize(cfg.n_paths * n);
  e.ok.assign(cfg.n_paths, 1);
  const Drift drift(p);
  std::vector<double> scratch(n);
  for (std::size_t k = 0; k < cfg.n_paths; ++k) {
    std::span<double> x(e.points.data() + k * n, n);
    for (std::size_t i = 0; i < n; ++i) x[i] = x0[static_cast<Eigen::Index>(i)];
    NormalStream noise = path_noise(cfg, stream, k);
    if (!em_advance(drift, x, scratch, t, cfg.dt, noise)) {
      e.ok[k] = 0;
      ++e.failed;
    }
  }
  return e;
}

MCEstimate summarize(std::span<const double> values, std::span<const std::uint8_t> ok, const MCConfig& cfg) {
  std::size_t failed = 0;
  for (auto v : ok) failed += v ? 0 : 1;
  if (static_cast<double>(failed) > kMaxFailedFraction * static_cast<double>(ok.size()))
    throw PathFailure(fmt::format("{} of {} paths failed", failed, ok.size()));

  std::vector<double> samples;
  samples.reserve(values.size());
  if (cfg.antithetic) {
    for (std::size_t k = 0; k + 1 < values.size(); k += 2)
      if (ok[k] && ok[k + 1]) samples.push_back(0.5 * (values[k] + values[k + 1]));
  } else {
    for (std::size_t k = 0; k < values.size(); ++k)
      if (ok[k]) samples.push_back(values[k]);
  }
  if (samples.size() < 2) throw PathFailure("fewer than two usable samples");

  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double m = static_cast<double>(samples.size());

  MCEstimate est;
  est.mean = mean;
  est.std_error = std::sqrt(ss / (m - 1.0) / m);
  est.n_paths = values.size() - failed;
  est.dt = cfg.dt;
  est.failed_paths = failed;
  return est;
}

MCEstimate estimate_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t, const MCConfig& cfg,
                       std::uint64_t stream) {
  validate(cfg, t);
  if (t == 0.0) return {f(x), 0.0, cfg.n_paths, cfg.dt, 0};
  if (const auto c = f.constant_value()) return {*c, 0.0, cfg.n_paths, cfg.dt, 0};
  const Ensemble e = simulate(p, x, t, cfg, stream);
  std::vector<double> values(e.size(), 0.0);
  for (std::size_t k = 0; k < e.size(); ++k)
    if (e.ok[k]) values[k] = f(e.point(k));
  return summarize(values, e.ok, cfg);
}

const GaussHermite& gauss_hermite(int order) {
  if (order < 1 || order > 200) throw Error(fmt::format("Gauss-Hermite order {} out of range", order));
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermite>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) {
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    slot = std::make_unique<GaussHermite>();
    double total = 0.0;
    for (int k = 0; k < order; ++k) {
      slot->nodes.push_back(solver.eigenvalues()[k]);
      const double v = solver.eigenvectors()(0, k);
      slot->weights.push_back(v * v);
      total += v * v;
    }
    for (double& w : slot->weights) w /= total;
  }
  return *slot;
}

double gaussian_expquad_expectation(const Point& m, double s2, const Point& b, double alpha, double beta) {
  const double n = static_cast<double>(m.size());
  const Point tilted_mean = m + s2 * b;
  const double mgf = std::exp(b.dot(m) + 0.5 * s2 * b.squaredNorm());
  return mgf * (alpha + beta * (tilted_mean.squaredNorm() + n * s2));
}

double ou_expquad_Qt(const Point& x, double t, const Point& b, double alpha, double beta) {
  return gaussian_expquad_expectation(std::exp(-t) * x, -std::expm1(-2.0 * t), b, alpha, beta);
}

double mehler_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t, int quad_order) {
  if (!p.gaussian_U) throw Error("the Mehler formula requires U = |x|^2/2");
  if (t < 0.0) throw Error("negative time");
  if (t == 0.0) return f(x);
  if (const auto se = match_scaled_exponential(f)) {
    const Point a = Eigen::Map<const Eigen::VectorXd>(se->a.data(), static_cast<Eigen::Index>(se->a.size()));
    return ou_expquad_Qt(x, t, a, se->scale, 0.0);
  }
  const GaussHermite& gh = gauss_hermite(quad_order);
  const int n = p.dim;
  const Point mean = std::exp(-t) * x;
  const double sigma = std::sqrt(-std::expm1(-2.0 * t));
  std::vector<int> idx(n, 0);
  Point y(n);
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      y[i] = mean[i] + sigma * gh.nodes[idx[i]];
      w *= gh.weights[idx[i]];
    }
    total += w * f(y);
    int i = 0;
    while (i < n && ++idx[i] == quad_order) idx[i++] = 0;
    if (i == n) break;
  }
  return total;
}

double taylor_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t) {
  const Field lf = apply_L_symbolic(p, f);
  const Field llf = apply_L_symbolic(p, lf);
  return f(x) + t * lf(x) + 0.5 * t * t * llf(x);
}

std::vector<MCEstimate> estimate_fk_terms(const ProblemSpec& p, std::span<const Field> fs, const Point& x, double t,
                                          int time_nodes, const MCConfig& cfg, std::uint64_t stream,
                                          FkPaths* paths) {
  validate(cfg, t);
  if (time_nodes < 3 || time_nodes % 2 == 0) throw Error("Simpson quadrature needs an odd number (>= 3) of time nodes");
  const std::size_t nf = fs.size();
  const bool trivial = t == 0.0 || p.weight_is_zero();
  if (trivial && !paths) return std::vector<MCEstimate>(nf, MCEstimate{0.0, 0.0, cfg.n_paths, cfg.dt, 0});

  const auto n = static_cast<std::size_t>(p.dim);
  const auto m = static_cast<std::size_t>(time_nodes);
  const double h = t / static_cast<double>(m - 1);
  std::vector<double> weights(m);
  for (std::size_t k = 0; k < m; ++k) weights[k] = h / 3.0 * ((k == 0 || k == m - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0));

  const Drift drift(p);
  std::vector<double> nodes(m * n), scratch(n), z(n), fresh(n), w2(m), fz(m * nf), ft(nf);
  std::vector<std::vector<double>> values(nf, std::vector<double>(cfg.n_paths, 0.0));
  std::vector<std::uint8_t> ok(cfg.n_paths, 1);
  if (paths) {
    for (Ensemble* e : {&paths->endpoint, &paths->fresh}) {
      e->dim = p.dim;
      e->points.assign(cfg.n_paths * n, 0.0);
      e->ok.assign(cfg.n_paths, 1);
      e->failed = 0;
    }
  }

  for (std::size_t path = 0; path < cfg.n_paths; ++path) {
    NormalStream outer = path_noise(cfg, stream, path);
    std::vector<double> xs(x.data(), x.data() + n);
    bool alive = true;
    for (std::size_t k = 0; k < m && alive; ++k) {
      if (k > 0) alive = em_advance(drift, std::span<double>(xs), scratch, h, cfg.dt, outer);
      std::copy(xs.begin(), xs.end(), nodes.begin() + static_cast<std::ptrdiff_t>(k * n));
    }
    // Fresh continuation Z'_k from each node to time t; the last node is X_t itself.
    for (std::size_t k = 0; k + 1 < m && alive; ++k) {
      std::copy(nodes.begin() + static_cast<std::ptrdiff_t>(k * n), nodes.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                z.begin());
      NormalStream inner = path_noise(cfg, combine_stream(stream, k + 1), path);
      alive = em_advance(drift, std::span<double>(z), scratch, t - static_cast<double>(k) * h, cfg.dt, inner);
      if (k == 0) fresh = z;
      if (alive && !trivial)
        for (std::size_t j = 0; j < nf; ++j) fz[k * nf + j] = fs[j](std::span<const double>(z));
    }
    if (!alive) {
      ok[path] = 0;
      if (paths) {
        paths->endpoint.ok[path] = paths->fresh.ok[path] = 0;
        ++paths->endpoint.failed;
        ++paths->fresh.failed;
      }
      continue;
    }
    const std::span<const double> xt(nodes.data() + (m - 1) * n, n);
    if (paths) {
      std::copy(xt.begin(), xt.end(), paths->endpoint.points.begin() + static_cast<std::ptrdiff_t>(path * n));
      std::copy(fresh.begin(), fresh.end(), paths->fresh.points.begin() + static_cast<std::ptrdiff_t>(path * n));
      if (trivial) continue;
    }
    for (std::size_t j = 0; j < nf; ++j) {
      ft[j] = fs[j](xt);
      fz[(m - 1) * nf + j] = ft[j];
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double wk = p.W(std::span<const double>(nodes.data() + k * n, n));
      w2[k] = wk * wk;
    }
    for (std::size_t j = 0; j < nf; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += weights[k] * w2[k] * ft[j] * fz[k * nf + j];
      values[j][path] = 2.0 * acc;
    }
  }

  std::vector<MCEstimate> out;
  out.reserve(nf);
  for (std::size_t j = 0; j < nf; ++j)
    out.push_back(trivial ? MCEstimate{0.0, 0.0, cfg.n_paths, cfg.dt, 0} : summarize(values[j], ok, cfg));
  if (paths) paths->values = std::move(values);
  return out;
}

MCEstimate estimate_fk_term(const ProblemSpec& p, const Field& f, const Point& x, double t, int time_nodes,
                            const MCConfig& cfg, std::uint64_t stream) {
  return estimate_fk_terms(p, std::span<const Field>(&f, 1), x, t, time_nodes, cfg, stream).front();
}

GradEstimate estimate_grad_Qt(const ProblemSpec& p, const Field& f, const Point& x, double t, const MCConfig& cfg,
                              double h, std::uint64_t stream, GradRoute route, double stderr_cap) {
  validate(cfg, t);
  const int n = p.dim;
  GradEstimate g;
  g.mean = Eigen::VectorXd::Zero(n);
  g.std_error = Eigen::VectorXd::Zero(n);

  if (route == GradRoute::automatic && p.gaussian_U) {
    // grad Q_t = e^{-t} Q_t grad for the Ornstein-Uhlenbeck semigroup.
    for (int i = 0; i < n; ++i) g.mean[i] = std::exp(-t) * mehler_Qt(p, differentiate(f, i), x, t);
    return g;
  }
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  for (int i = 0; i < n; ++i) {
    Point xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    if (t == 0.0 || f.constant_value()) {
      g.mean[i] = (f(xp) - f(xm)) / (2.0 * h);
      continue;
    }
    const Ensemble ep = simulate(p, xp, t, cfg, stream);
    const Ensemble em = simulate(p, xm, t, cfg, stream);
    std::vector<double> values(cfg.n_paths, 0.0);
    std::vector<std::uint8_t> ok(cfg.n_paths, 0);
    for (std::size_t k = 0; k < cfg.n_paths; ++k) {
      ok[k] = ep.ok[k] && em.ok[k];
      if (ok[k]) values[k] = (f(ep.point(k)) - f(em.point(k))) / (2.0 * h);
    }
    const MCEstimate est = summarize(values, ok, cfg);
    g.mean[i] = est.mean;
    g.std_error[i] = est.std_error;
  }
  g.usable = (g.std_error.array() <= stderr_cap).all();
  return g;
}

}  // namespace gammaw
