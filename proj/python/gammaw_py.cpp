#include "gammaw/commands.hpp"
#include "gammaw/config.hpp"
#include "gammaw/curvature.hpp"
#include "gammaw/errors.hpp"
#include "gammaw/gamma.hpp"
#include "gammaw/reproduce.hpp"
#include "gammaw/semigroup.hpp"
#include "gammaw/verifier.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/iostream.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace gammaw;

namespace {

std::vector<TestFunction> to_battery(const py::object& obj, int dim) {
  if (obj.is_none()) return default_battery(dim);
  if (py::isinstance<py::str>(obj)) {
    const auto name = obj.cast<std::string>();
    if (name == "default") return default_battery(dim);
    if (name == "nonnegative") return nonnegative_battery(dim);
    throw ConfigError("battery must be 'default', 'nonnegative' or a dict of label -> Field");
  }
  std::vector<TestFunction> out;
  for (const auto& [label, f] : obj.cast<py::dict>()) out.push_back({label.cast<std::string>(), f.cast<Field>()});
  return out;
}

VerifyConfig verify_config(std::size_t n_paths, double dt, std::uint64_t seed, bool antithetic, int fk_nodes) {
  VerifyConfig v;
  v.mc.n_paths = n_paths;
  v.mc.dt = dt;
  v.mc.seed = seed;
  v.mc.antithetic = antithetic;
  v.fk_nodes = fk_nodes;
  return v;
}

std::string report_csv(const VerificationReport& r) {
  std::ostringstream out;
  write_csv(out, r);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_gammaw, m) {
  m.doc() = "Weighted carre du champ calculus, curvature bounds and semigroup inequality checks";

  // Translators run newest first, so the base class is registered first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IndexError>(m, "IndexError", base.ptr());
  auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<WeightVanishes>(m, "WeightVanishes", domain.ptr());
  py::register_exception<PathFailure>(m, "PathFailure", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Field>(m, "Field")
      .def_static("constant", &Field::constant, py::arg("dim"), py::arg("value"))
      .def_static("coordinate", &Field::coordinate, py::arg("dim"), py::arg("index"))
      .def_static("normsq", &Field::normsq, py::arg("dim"))
      .def_property_readonly("dim", &Field::dim)
      .def("__call__", [](const Field& f, const Point& x) { return f(x); })
      .def("__str__", [](const Field& f) { return to_string(f); })
      .def("__repr__", [](const Field& f) { return "Field('" + to_string(f) + "')"; })
      .def("diff", &differentiate, py::arg("index"))
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__mul__", [](const Field& a, const Field& b) { return a * b; })
      .def("__truediv__", [](const Field& a, const Field& b) { return a / b; })
      .def("__add__", [](const Field& a, double b) { return a + b; })
      .def("__radd__", [](const Field& a, double b) { return b + a; })
      .def("__sub__", [](const Field& a, double b) { return a - b; })
      .def("__rsub__", [](const Field& a, double b) { return b - a; })
      .def("__mul__", [](const Field& a, double b) { return a * b; })
      .def("__rmul__", [](const Field& a, double b) { return b * a; })
      .def("__truediv__", [](const Field& a, double b) { return a / b; })
      .def("__pow__", [](const Field& a, double b) { return pow(a, b); })
      .def("__neg__", [](const Field& a) { return -a; });

  m.def("exp", [](const Field& a) { return exp(a); });
  m.def("log", [](const Field& a) { return log(a); });
  m.def("sqrt", [](const Field& a) { return sqrt(a); });
  m.def("parse_field", [](const std::string& src, int dim) { return parse_field(src, dim); }, py::arg("src"),
        py::arg("dim"));

  py::class_<Jet>(m, "Jet")
      .def_readonly("value", &Jet::value)
      .def_readonly("gradient", &Jet::gradient)
      .def_readonly("hessian", &Jet::hessian)
      .def("laplacian", &Jet::laplacian);
  m.def("eval_jet", &eval_jet, py::arg("f"), py::arg("x"), py::arg("order") = 2);

  py::class_<ProblemSpec>(m, "Problem")
      .def(py::init([](const Field& U, const Field& W) { return ProblemSpec::make(U, W); }), py::arg("U"),
           py::arg("W"))
      .def_static(
          "from_text",
          [](int dim, const std::string& U, const std::string& W) { return build_problem(ProblemConfig{dim, U, W}); },
          py::arg("dim"), py::arg("U") = "gaussian", py::arg("W") = "sqrt1sq",
          "U: gaussian | pq_potential(p) | expression; W: zero | sqrt1sq | pq_weight(q) | expression")
      .def_readonly("dim", &ProblemSpec::dim)
      .def_readonly("U", &ProblemSpec::U)
      .def_readonly("W", &ProblemSpec::W)
      .def_readonly("gaussian_U", &ProblemSpec::gaussian_U);

  m.def("apply_L", &apply_L, py::arg("problem"), py::arg("f"), py::arg("x"));
  m.def("gamma", &gammaw::gamma, py::arg("problem"), py::arg("f"), py::arg("g"), py::arg("x"));
  m.def("gamma2", &gamma2, py::arg("problem"), py::arg("f"), py::arg("x"));
  m.def("gamma_w", &gamma_w, py::arg("problem"), py::arg("f"), py::arg("g"), py::arg("x"));
  m.def("gamma2_w", &gamma2_w, py::arg("problem"), py::arg("f"), py::arg("x"));
  m.def("gamma2_w_definitional", &gamma2_w_definitional, py::arg("problem"), py::arg("f"), py::arg("x"));
  m.def("gamma_integrand", &gamma_integrand, py::arg("problem"), py::arg("x"));

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("radii_schedule", &SearchConfig::radii_schedule)
      .def_readwrite("grid_per_axis", &SearchConfig::grid_per_axis)
      .def_readwrite("multistart_count", &SearchConfig::multistart_count)
      .def_readwrite("local_steps", &SearchConfig::local_steps)
      .def_readwrite("seed", &SearchConfig::seed)
      .def_readwrite("tol", &SearchConfig::tol);

  py::class_<BoundEstimate>(m, "BoundEstimate")
      .def_readonly("value", &BoundEstimate::value)
      .def_readonly("witness", &BoundEstimate::witness)
      .def_readonly("diverging", &BoundEstimate::diverging)
      .def_readonly("trace", &BoundEstimate::trace)
      .def("__repr__", [](const BoundEstimate& b) {
        return "BoundEstimate(value=" + format_double(b.value) + ", diverging=" + (b.diverging ? "True" : "False") +
               ")";
      });
  m.def("estimate_rho", &estimate_rho, py::arg("problem"), py::arg("search") = SearchConfig{});
  m.def("estimate_gamma", &estimate_gamma, py::arg("problem"), py::arg("search") = SearchConfig{});
  m.def("estimate_c", &estimate_c, py::arg("problem"), py::arg("rho"), py::arg("search") = SearchConfig{});

  py::class_<MCEstimate>(m, "MCEstimate")
      .def_readonly("mean", &MCEstimate::mean)
      .def_readonly("std_error", &MCEstimate::std_error)
      .def_readonly("n_paths", &MCEstimate::n_paths);
  m.def(
      "estimate_Qt",
      [](const ProblemSpec& p, const Field& f, const Point& x, double t, std::size_t n_paths, double dt,
         std::uint64_t seed) {
        MCConfig c;
        c.n_paths = n_paths;
        c.dt = dt;
        c.seed = seed;
        return estimate_Qt(p, f, x, t, c);
      },
      py::arg("problem"), py::arg("f"), py::arg("x"), py::arg("t"), py::arg("n_paths") = 100000,
      py::arg("dt") = 1e-3, py::arg("seed") = MCConfig{}.seed);
  m.def("mehler_Qt", &mehler_Qt, py::arg("problem"), py::arg("f"), py::arg("x"), py::arg("t"),
        py::arg("quad_order") = 32);
  m.def("taylor_Qt", &taylor_Qt, py::arg("problem"), py::arg("f"), py::arg("x"), py::arg("t"));

  py::class_<VerificationCase>(m, "VerificationCase")
      .def_readonly("t", &VerificationCase::t)
      .def_readonly("x", &VerificationCase::x)
      .def_readonly("f_label", &VerificationCase::f_label)
      .def_property_readonly("lhs", [](const VerificationCase& c) { return c.lhs.value; })
      .def_property_readonly("rhs", [](const VerificationCase& c) { return c.rhs.value; })
      .def_readonly("margin", &VerificationCase::margin)
      .def_readonly("margin_stderr", &VerificationCase::margin_stderr)
      .def_property_readonly("verdict", [](const VerificationCase& c) { return std::string(to_string(c.verdict)); });
  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("check_id", &VerificationReport::check_id)
      .def_readonly("cases", &VerificationReport::cases)
      .def("count", [](const VerificationReport& r, const std::string& v) {
        if (v == "pass") return r.count(Verdict::pass);
        if (v == "fail") return r.count(Verdict::fail);
        return r.count(Verdict::inconclusive);
      })
      .def("any_fail", &VerificationReport::any_fail)
      .def("to_csv", &report_csv)
      .def_property_readonly("exit_code", [](const VerificationReport& r) { return exit_code(r); });

  m.def(
      "verify_commutation",
      [](const ProblemSpec& p, double kappa, const std::vector<double>& ts, const std::vector<Point>& xs,
         const py::object& battery, std::size_t n_paths, double dt, std::uint64_t seed, bool antithetic, int fk) {
        return verify_commutation(p, to_battery(battery, p.dim), kappa, ts, xs,
                                  verify_config(n_paths, dt, seed, antithetic, fk));
      },
      py::arg("problem"), py::arg("kappa"), py::arg("t_grid"), py::arg("x_grid"), py::arg("battery") = py::none(),
      py::arg("n_paths") = 100000, py::arg("dt") = 1e-3, py::arg("seed") = MCConfig{}.seed,
      py::arg("antithetic") = false, py::arg("fk_nodes") = VerifyConfig{}.fk_nodes);
  m.def(
      "verify_variance",
      [](const ProblemSpec& p, double kappa, const std::vector<double>& ts, const std::vector<Point>& xs,
         const py::object& battery, std::size_t n_paths, double dt, std::uint64_t seed, bool antithetic, int fk) {
        return verify_variance(p, to_battery(battery, p.dim), kappa, ts, xs,
                               verify_config(n_paths, dt, seed, antithetic, fk));
      },
      py::arg("problem"), py::arg("kappa"), py::arg("t_grid"), py::arg("x_grid"), py::arg("battery") = py::none(),
      py::arg("n_paths") = 100000, py::arg("dt") = 1e-3, py::arg("seed") = MCConfig{}.seed,
      py::arg("antithetic") = false, py::arg("fk_nodes") = VerifyConfig{}.fk_nodes);
  m.def(
      "verify_sqrt_commutation",
      [](const ProblemSpec& p, double rho, double c, const std::vector<double>& ts, const std::vector<Point>& xs,
         const py::object& battery, std::size_t n_paths, double dt, std::uint64_t seed, bool antithetic, int fk) {
        return verify_sqrt_commutation(p, to_battery(battery.is_none() ? py::str("nonnegative") : battery, p.dim),
                                       rho, c, ts, xs, verify_config(n_paths, dt, seed, antithetic, fk));
      },
      py::arg("problem"), py::arg("rho"), py::arg("c"), py::arg("t_grid"), py::arg("x_grid"),
      py::arg("battery") = py::none(), py::arg("n_paths") = 100000, py::arg("dt") = 1e-3,
      py::arg("seed") = MCConfig{}.seed, py::arg("antithetic") = false, py::arg("fk_nodes") = VerifyConfig{}.fk_nodes);
  m.def(
      "degenerate_w_check",
      [](const ProblemSpec& p, double kappa, const std::vector<double>& ts, const std::vector<Point>& xs,
         std::size_t n_paths, double dt, std::uint64_t seed) {
        return degenerate_w_check(p, kappa, ts, xs, verify_config(n_paths, dt, seed, false, VerifyConfig{}.fk_nodes));
      },
      py::arg("problem"), py::arg("kappa"), py::arg("t_grid"), py::arg("x_grid"), py::arg("n_paths") = 100000,
      py::arg("dt") = 1e-3, py::arg("seed") = MCConfig{}.seed);

  m.def(
      "optimality_study",
      [](const ProblemSpec& p, const std::vector<std::vector<double>>& as, const std::vector<double>& radii) {
        const OptimalityTable t = optimality_study(p, as, radii);
        py::list rows;
        for (const auto& r : t.rows)
          rows.append(py::dict(py::arg("a") = r.a, py::arg("radius") = r.radius, py::arg("ratio") = r.ratio,
                               py::arg("limit") = r.limit));
        return py::make_tuple(rows, t.best_kappa);
      },
      py::arg("problem"), py::arg("a_list"), py::arg("radii"), "Returns (rows, best_kappa).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line front end; returns (exit_code, stdout, stderr).");
}
