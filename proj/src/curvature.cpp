#include "gammaw/curvature.hpp"

#include "gammaw/errors.hpp"
#include "gammaw/gamma.hpp"
#include "gammaw/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gammaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  double value;
  Point x;
};

double clamp_eval(const std::function<std::optional<double>(const Point&)>& objective, Point& x, double R) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], -R, R);
  const auto v = objective(x);
  return v ? *v : kInf;
}

/// Nelder-Mead restricted to the box by clamping trial points.
Candidate nelder_mead(const std::function<std::optional<double>(const Point&)>& objective, Candidate start,
                      double step, double R, int iterations) {
  const auto n = start.x.size();
  std::vector<Candidate> simplex;
  simplex.push_back(start);
  for (Eigen::Index i = 0; i < n; ++i) {
    Point y = start.x;
    y[i] += (y[i] + step <= R) ? step : -step;
    const double v = clamp_eval(objective, y, R);
    simplex.push_back({v, y});
  }
  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  };
  for (int it = 0; it < iterations; ++it) {
    order();
    const double spread = simplex.back().value - simplex.front().value;
    if (std::isfinite(spread) && spread <= 1e-15 * (1.0 + std::abs(simplex.front().value))) {
      double size = 0.0;
      for (const auto& c : simplex) size = std::max(size, (c.x - simplex.front().x).lpNorm<Eigen::Infinity>());
      if (size <= 1e-12 * (1.0 + R)) break;
    }
    Point centroid = Point::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) centroid += simplex[k].x;
    centroid /= static_cast<double>(n);
    Candidate& worst = simplex.back();

    Point xr = centroid + (centroid - worst.x);
    const double fr = clamp_eval(objective, xr, R);
    if (fr < simplex.front().value) {
      Point xe = centroid + 2.0 * (centroid - worst.x);
      const double fe = clamp_eval(objective, xe, R);
      worst = fe < fr ? Candidate{fe, xe} : Candidate{fr, xr};
      continue;
    }
    if (fr < simplex[n - 1].value) {
      worst = {fr, xr};
      continue;
    }
    Point xc = fr < worst.value ? Point(centroid + 0.5 * (xr - centroid)) : Point(centroid + 0.5 * (worst.x - centroid));
    const double fc = clamp_eval(objective, xc, R);
    if (fc < std::min(fr, worst.value)) {
      worst = {fc, xc};
      continue;
    }
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      Point y = simplex.front().x + 0.5 * (simplex[k].x - simplex.front().x);
      simplex[k] = {clamp_eval(objective, y, R), y};
    }
  }
  order();
  return simplex.front();
}

void keep_best(std::vector<Candidate>& best, const Candidate& c, std::size_t k) {
  if (!std::isfinite(c.value)) return;
  auto pos = std::upper_bound(best.begin(), best.end(), c.value, [](double v, const Candidate& b) { return v < b.value; });
  if (static_cast<std::size_t>(pos - best.begin()) >= k) return;
  best.insert(pos, c);
  if (best.size() > k) best.pop_back();
}

}  // namespace

std::vector<double> SearchConfig::radii() const {
  if (radii_schedule.empty()) return {box_radius};
  return radii_schedule;
}

void SearchConfig::validate() const {
  const auto r = radii();
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(r[k] > 0.0)) throw ConfigError("search radii must be positive");
    if (k > 0 && !(r[k] > r[k - 1])) throw ConfigError("radii_schedule must be strictly increasing");
  }
  if (!(tol > 0.0)) throw ConfigError("search tol must be positive");
  if (grid_per_axis < 2) throw ConfigError("grid_per_axis must be at least 2");
  if (multistart_count < 0 || local_steps < 0) throw ConfigError("multistart_count and local_steps must be non-negative");
}

bool infimum_diverges(std::span<const double> trace, double tol) {
  if (trace.size() < 3) return false;
  for (double v : trace)
    if (!std::isfinite(v)) return false;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k)
    if (!(trace[k] - trace[k + 1] > tol)) return false;
  const double first = trace[0] - trace[1];
  const double last = trace[trace.size() - 2] - trace.back();
  return last > first;
}

BoundEstimate search_infimum(int dim, const std::function<std::optional<double>(const Point&)>& objective,
                             const SearchConfig& s) {
  s.validate();
  BoundEstimate est;
  est.value = kInf;
  est.witness = Point::Zero(dim);
  std::size_t radius_index = 0;
  for (const double R : s.radii()) {
    std::vector<Candidate> top;
    const std::size_t keep = dim <= 2 ? 4 : 8;
    auto consider = [&](const Point& x) {
      const auto v = objective(x);
      if (!v) {
        ++est.skipped;
        return;
      }
      keep_best(top, {*v, x}, keep);
    };

    double step = R / 4.0;
    if (dim <= 2) {
      const int g = s.grid_per_axis;
      step = 2.0 * R / (g - 1);
      std::vector<int> idx(dim, 0);
      Point x(dim);
      for (;;) {
        for (int i = 0; i < dim; ++i) x[i] = -R + step * idx[i];
        consider(x);
        int i = 0;
        while (i < dim && ++idx[i] == g) idx[i++] = 0;
        if (i == dim) break;
      }
    } else {
      std::vector<int> idx(dim, 0);
      Point x(dim);
      for (;;) {
        for (int i = 0; i < dim; ++i) x[i] = (idx[i] - 1) * R;
        consider(x);
        int i = 0;
        while (i < dim && ++idx[i] == 3) idx[i++] = 0;
        if (i == dim) break;
      }
      std::mt19937_64 rng(combine_stream(s.seed, radius_index));
      std::uniform_real_distribution<double> unif(-R, R);
      for (int k = 0; k < s.multistart_count; ++k) {
        for (int i = 0; i < dim; ++i) x[i] = unif(rng);
        consider(x);
      }
    }
    if (std::isfinite(est.value)) keep_best(top, {est.value, est.witness}, keep + 1);

    for (const Candidate& c : top) {
      const Candidate refined = nelder_mead(objective, c, step, R, s.local_steps);
      if (refined.value < est.value) {
        est.value = refined.value;
        est.witness = refined.x;
      }
    }
    est.trace.push_back(est.value);
    ++radius_index;
  }
  est.diverging = infimum_diverges(est.trace, s.tol);
  if (est.diverging) est.value = -kInf;
  return est;
}

BoundEstimate estimate_rho(const ProblemSpec& p, const SearchConfig& s) {
  if (p.gaussian_U) {
    s.validate();
    BoundEstimate est;
    est.value = 1.0;
    est.witness = Point::Zero(p.dim);
    est.trace.assign(s.radii().size(), 1.0);
    return est;
  }
  auto objective = [&](const Point& x) -> std::optional<double> {
    const Jet ju = eval_jet(p.U, x, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ju.hessian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[0];
  };
  return search_infimum(p.dim, objective, s);
}

BoundEstimate estimate_gamma(const ProblemSpec& p, const SearchConfig& s) {
  auto objective = [&](const Point& x) -> std::optional<double> {
    const Jet jw = eval_jet(p.W, x, 2);
    if (std::abs(jw.value) < kWeightVanishes) return std::nullopt;
    return kernel::integrand(eval_jet(p.U, x, 1), jw);
  };
  return search_infimum(p.dim, objective, s);
}

double c_integrand(const ProblemSpec& p, double rho, const Point& x) {
  const Jet jw = eval_jet(p.W, x, 2);
  double v = 2.0 * jw.gradient.norm();
  if (std::abs(jw.value) >= kWeightVanishes) {
    const Jet ju = eval_jet(p.U, x, 1);
    const double lw = jw.laplacian() - ju.gradient.dot(jw.gradient);
    v = std::max(v, std::max(0.0, -(lw / jw.value - rho)));
  }
  return v;
}

BoundEstimate estimate_c(const ProblemSpec& p, double rho, const SearchConfig& s) {
  auto objective = [&](const Point& x) -> std::optional<double> { return -c_integrand(p, rho, x); };
  BoundEstimate est = search_infimum(p.dim, objective, s);
  for (double& v : est.trace) v = -v;
  est.value = est.diverging ? kInf : -est.value;
  return est;
}

ViolationReport check_pointwise_cd(const ProblemSpec& p, std::span<const Field> fields, double kappa,
                                   std::span<const double> points, double tol) {
  const auto n = static_cast<std::size_t>(p.dim);
  if (points.size() % n != 0) throw IndexError("point batch length is not a multiple of the dimension");
  const std::size_t count = points.size() / n;
  if (fields.size() != 1 && fields.size() != count) throw Error("need one field, or one field per point");
  ViolationReport r;
  r.worst_point = Point::Zero(p.dim);
  for (std::size_t k = 0; k < count; ++k) {
    const Point x = Eigen::Map<const Eigen::VectorXd>(points.data() + k * n, static_cast<Eigen::Index>(n));
    const Field& f = fields.size() == 1 ? fields[0] : fields[k];
    try {
      const Jet jf = eval_jet(f, x, 2);
      const Jet ju = eval_jet(p.U, x, 2);
      const Jet jw = eval_jet(p.W, x, 2);
      const double g2w = kernel::gamma2_w(jf, ju, jw);
      const double gw = kernel::gamma_w(jf, jw);
      const double margin = g2w - kappa * gw;
      ++r.checked;
      if (margin < r.worst_margin) {
        r.worst_margin = margin;
        r.worst_point = x;
        r.worst_sample = k;
      }
      if (margin < -tol * (std::abs(g2w) + std::abs(kappa) * gw)) ++r.violations;
    } catch (const DomainError&) {
      ++r.domain_errors;
    }
  }
  return r;
}

ViolationReport check_pointwise_cd(const ProblemSpec& p, const Field& f, double kappa, std::span<const double> points,
                                   double tol) {
  return check_pointwise_cd(p, std::span<const Field>(&f, 1), kappa, points, tol);
}

}  // namespace gammaw
