#include "gammaw/commands.hpp"

#include "gammaw/curvature.hpp"
#include "gammaw/errors.hpp"
#include "gammaw/random_fields.hpp"
#include "gammaw/reproduce.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace gammaw {

namespace {

constexpr double kInconclusiveShare = 0.2;

VerifyConfig verify_config(const RunConfig& cfg) {
  VerifyConfig v;
  v.mc = cfg.mc;
  v.fk_nodes = cfg.verify.fk_nodes;
  v.quad_order = cfg.verify.quad_order;
  v.fd_h = cfg.verify.fd_h;
  v.rel_stderr_cap = cfg.verify.rel_stderr_cap;
  v.abs_stderr_cap = cfg.verify.abs_stderr_cap;
  return v;
}

std::string describe(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return format_double(v);
}

/// Writes to the configured path, or to `fallback` for "-".
template <class Fn>
void emit(const RunConfig& cfg, std::ostream& fallback, Fn&& write) {
  if (cfg.output.path.empty() || cfg.output.path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(cfg.output.path);
  if (!file) throw ConfigError(fmt::format("cannot write '{}'", cfg.output.path));
  write(file);
}

/// Runs `body`, mapping exceptions to exit codes.
template <class Fn>
int guarded(std::ostream& log, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    log << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IndexError& e) {
    log << "index error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    log << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const PathFailure& e) {
    log << "path failure: " << e.what() << '\n';
    return kExitDomain;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

struct Curvature {
  BoundEstimate rho;
  BoundEstimate gamma;
  double kappa = 0.0;
};

Curvature curvature(const ProblemSpec& p, const RunConfig& cfg) {
  Curvature c;
  c.rho = estimate_rho(p, cfg.search);
  c.gamma = estimate_gamma(p, cfg.search);
  c.kappa = std::min(c.rho.value, c.gamma.value);
  return c;
}

double resolve_kappa(const ProblemSpec& p, const RunConfig& cfg, std::ostream& log) {
  if (cfg.verify.kappa) return *cfg.verify.kappa;
  const Curvature c = curvature(p, cfg);
  if (!std::isfinite(c.kappa))
    throw ConfigError(fmt::format("min(rho, gamma) = {} is not finite; set verify.kappa", describe(c.kappa)));
  log << fmt::format("kappa = min(rho, gamma) = {}\n", format_double(c.kappa));
  return c.kappa;
}

double resolve_rho(const ProblemSpec& p, const RunConfig& cfg) {
  if (cfg.verify.rho) return *cfg.verify.rho;
  const BoundEstimate r = estimate_rho(p, cfg.search);
  if (!std::isfinite(r.value)) throw ConfigError("rho is not finite; set verify.rho");
  return r.value;
}

void write_pretty(std::ostream& out, const VerificationReport& report) {
  write_summary(out, report);
  out << fmt::format("{:>6}  {:<24} {:<10} {:>14} {:>14} {:>14} {:>12}  {}\n", "t", "x", "f", "lhs", "rhs",
                     "margin", "stderr", "verdict");
  for (const auto& c : report.cases) {
    std::string x = "(";
    for (Eigen::Index i = 0; i < c.x.size(); ++i) x += (i ? ", " : "") + format_double(c.x[i]);
    x += ")";
    out << fmt::format("{:>6}  {:<24} {:<10} {:>14.6g} {:>14.6g} {:>14.6g} {:>12.3g}  {}\n", c.t, x, c.f_label,
                       c.lhs.value, c.rhs.value, c.margin, c.margin_stderr, to_string(c.verdict));
  }
}

}  // namespace

int exit_code(const VerificationReport& report) {
  if (report.any_fail()) return kExitFail;
  const auto n = report.cases.size();
  if (n > 0 && static_cast<double>(report.count(Verdict::inconclusive)) > kInconclusiveShare * static_cast<double>(n))
    return kExitInconclusive;
  return kExitOk;
}

int cmd_check_curvature(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    const ProblemSpec p = build_problem(cfg.problem);
    const Curvature cv = curvature(p, cfg);
    std::ostringstream text;
    text << fmt::format("problem: dim={} U={} W={}\n", p.dim, to_string(p.U), to_string(p.W));
    text << fmt::format("rho: {}{}\n", describe(cv.rho.value), cv.rho.diverging ? " (diverging)" : "");
    if (std::isinf(cv.gamma.value) && cv.gamma.value > 0)
      text << "gamma: +inf (W vanishes everywhere)\n";
    else if (cv.gamma.diverging)
      text << "gamma: DIVERGENT (-inf); weighted bound min(rho, gamma) not applicable\n";
    else
      text << fmt::format("gamma: {}\n", describe(cv.gamma.value));
    text << fmt::format("min(rho, gamma): {}\n", describe(cv.kappa));

    double rho_for_c = std::isfinite(cv.rho.value) ? cv.rho.value : 0.0;
    const BoundEstimate c = estimate_c(p, rho_for_c, cfg.search);
    text << fmt::format("c: {}{}\n", describe(c.value), c.diverging ? " (diverging)" : "");

    const double kappa = cfg.verify.kappa.value_or(cv.kappa);
    std::size_t violations = 0;
    if (!std::isfinite(kappa)) {
      text << "pointwise check: skipped (kappa is not finite)\n";
    } else {
      std::mt19937_64 rng(cfg.search.seed);
      const auto m = static_cast<std::size_t>(cfg.verify.check_samples);
      std::vector<Field> fields;
      std::vector<double> points;
      fields.reserve(m);
      points.reserve(m * static_cast<std::size_t>(p.dim));
      for (std::size_t k = 0; k < m; ++k) {
        fields.push_back(random_field(p.dim, rng));
        const Point x = random_point(p.dim, rng, cfg.verify.check_radius);
        points.insert(points.end(), x.data(), x.data() + x.size());
      }
      const ViolationReport r = check_pointwise_cd(p, fields, kappa, points);
      violations = r.violations;
      text << fmt::format("pointwise check: kappa={} samples={} violations={} domain_errors={} worst_margin={}\n",
                          format_double(kappa), r.checked, r.violations, r.domain_errors, describe(r.worst_margin));
    }
    emit(cfg, out, [&](std::ostream& o) { o << text.str(); });
    return violations == 0 && !cv.rho.diverging ? kExitOk : kExitFail;
  });
}

int cmd_verify(const RunConfig& cfg, std::string_view which, std::ostream& out, std::ostream& log) {
  return guarded(log, [&]() -> int {
    cfg.validate();
    const ProblemSpec p = build_problem(cfg.problem);
    const VerifyConfig vc = verify_config(cfg);
    const std::vector<Point> xs = x_grid(cfg);
    const auto& ts = cfg.grids.t_values;
    const auto battery =
        cfg.verify.battery == "nonnegative" ? nonnegative_battery(p.dim) : default_battery(p.dim);
    VerificationReport report;
    if (which == "commutation") {
      report = verify_commutation(p, battery, resolve_kappa(p, cfg, log), ts, xs, vc);
    } else if (which == "variance") {
      report = verify_variance(p, battery, resolve_kappa(p, cfg, log), ts, xs, vc);
    } else if (which == "sqrt") {
      const double rho = resolve_rho(p, cfg);
      double c = 0.0;
      if (cfg.verify.c) {
        c = *cfg.verify.c;
      } else {
        c = estimate_c(p, rho, cfg.search).value;
        log << fmt::format("rho = {}, c = {}\n", format_double(rho), describe(c));
      }
      if (!std::isfinite(c)) throw ConfigError("c is not finite; the sqrt check does not apply");
      report = verify_sqrt_commutation(p, nonnegative_battery(p.dim), rho, c, ts, xs, vc);
    } else if (which == "degenerate") {
      report = degenerate_w_check(p, resolve_kappa(p, cfg, log), ts, xs, vc);
    } else {
      throw ConfigError(fmt::format("unknown check '{}'", which));
    }
    emit(cfg, out, [&](std::ostream& o) {
      if (cfg.output.format == "pretty")
        write_pretty(o, report);
      else
        write_csv(o, report);
    });
    if (cfg.output.format != "pretty") write_summary(log, report);
    return exit_code(report);
  });
}

int cmd_optimality(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    const ProblemSpec p = build_problem(cfg.problem);
    std::vector<std::vector<double>> as = cfg.grids.a_vectors;
    if (as.empty()) {
      for (double s : {0.0, 0.1, 0.5, 1.0}) {
        std::vector<double> a(p.dim, 0.0);
        a[0] = s;
        as.push_back(std::move(a));
      }
    }
    const OptimalityTable table = optimality_study(p, as, cfg.grids.radii);
    emit(cfg, out, [&](std::ostream& o) { write_csv(o, table); });
    log << fmt::format("best kappa over the table: {}\n", format_double(table.best_kappa));
    return kExitOk;
  });
}

int cmd_reproduce_paper(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    const ReproduceOptions opts = reproduce_options(cfg);
    {
      std::ofstream effective(std::filesystem::path(out_dir) / "effective.ini");
      effective << serialize(cfg);
    }
    int code = kExitOk;
    for (const auto& criterion : criteria()) {
      const CriterionResult r = run_criterion(criterion, opts);
      const auto base = std::filesystem::path(out_dir) / r.id;
      std::ofstream(base.string() + ".csv") << r.csv;
      std::ofstream(base.string() + ".txt") << r.summary << "status: " << to_string(r.status) << '\n'
                                            << "detail: " << r.detail << '\n';
      log << fmt::format("{} {} {} ({:.1f} s)\n", r.id, to_string(r.status), r.detail, r.seconds);
      if (code == kExitOk && r.status != Status::pass)
        code = r.status == Status::fail ? kExitFail : kExitInconclusive;
    }
    return code;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Gamma-calculus curvature bounds and semigroup inequality checks", "gammaw"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "Run configuration file");
  app.add_option("--seed", seed, "Seed for the Monte Carlo and search streams");
  app.add_option("--out", out_path, "Output file (output directory for reproduce-paper)");
  app.add_option("--override", overrides, "section.key=value, applied after the config file")->allow_extra_args(false);

  auto* check = app.add_subcommand("check-curvature", "Estimate rho, gamma, c and check the pointwise bound");
  auto* verify = app.add_subcommand("verify", "Run one semigroup inequality check");
  std::string which;
  verify->add_option("which", which, "commutation | variance | sqrt | degenerate")
      ->required()
      ->check(CLI::IsMember({"commutation", "variance", "sqrt", "degenerate"}));
  auto* optimality = app.add_subcommand("optimality", "Ratio table for exponential test functions");
  auto* reproduce = app.add_subcommand("reproduce-paper", "Run the acceptance suite");
  for (auto* sub : {check, verify, optimality, reproduce}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  RunConfig cfg;
  const int loaded = guarded(err, [&] {
    std::vector<std::string> all = overrides;
    if (seed) {
      all.push_back(fmt::format("mc.seed={}", *seed));
      all.push_back(fmt::format("search.seed={}", *seed));
    }
    cfg = config_path.empty() ? parse_config("", all) : load_config(config_path, all);
    return kExitOk;
  });
  if (loaded != kExitOk) return loaded;

  if (*reproduce) return cmd_reproduce_paper(cfg, out_path.empty() ? "reproduce_out" : out_path, err);
  if (!out_path.empty()) cfg.output.path = out_path;
  if (*check) return cmd_check_curvature(cfg, out, err);
  if (*verify) return cmd_verify(cfg, which, out, err);
  return cmd_optimality(cfg, out, err);
}

}  // namespace gammaw
