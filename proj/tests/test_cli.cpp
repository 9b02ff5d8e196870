#include "gammaw/commands.hpp"
#include "gammaw/config.hpp"
#include "gammaw/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gammaw;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path.string();
}

const char* kSmall = R"([problem]
dim = 2
U = gaussian
W = sqrt1sq

[mc]
n_paths = 4000
dt = 0.01

[grids]
t = 0.1, 0.5
x = (0, 0); (1, 1)

[verify]
fk_nodes = 5
)";

}  // namespace

TEST_CASE("config parsing, defaults and overrides") {
  const RunConfig d = parse_config("");
  CHECK(d.problem.dim == 2);
  CHECK(d.mc.n_paths == 100000);
  CHECK(x_grid(d).size() == 2);

  const RunConfig c = parse_config(kSmall, {"mc.seed=42", "grids.t=0.25", "verify.kappa=-1"});
  CHECK(c.mc.n_paths == 4000);
  CHECK(c.mc.seed == 42);
  CHECK(c.grids.t_values == std::vector<double>{0.25});
  CHECK(c.grids.x_points.size() == 2);
  CHECK(c.grids.x_points[1] == std::vector<double>{1.0, 1.0});
  CHECK(*c.verify.kappa == -1.0);
}

TEST_CASE("config round-trips exactly") {
  RunConfig c = parse_config(kSmall, {"mc.dt=0.0033333333333333335", "verify.c=2", "grids.a=(0.1, 0); (1, 0)"});
  const std::string text = serialize(c);
  const RunConfig back = parse_config(text);
  CHECK(serialize(back) == text);
  CHECK(back.mc.dt == c.mc.dt);
  CHECK(back.grids.a_vectors == c.grids.a_vectors);
  CHECK(*back.verify.c == 2.0);
  CHECK_FALSE(back.verify.kappa.has_value());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[problem]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mc]\nn_paths = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mc]\ndt = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grids]\nx = (1, 2, 3)\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"mc.n_paths"}), ConfigError);
  CHECK_THROWS_AS(parse_config("[verify]\nfk_nodes = 4\n"), ConfigError);
}

TEST_CASE("problem builtins and expressions") {
  ProblemConfig p;
  p.dim = 2;
  p.U = "pq_potential(3)";
  p.W = "pq_weight(1.5)";
  const ProblemSpec a = build_problem(p);
  CHECK_FALSE(a.gaussian_U);
  Point x(2);
  x << 1.0, 1.0;
  CHECK(a.U(x) == doctest::Approx(std::pow(3.0, 1.5) / 3.0));
  CHECK(a.W(x) == doctest::Approx(std::pow(3.0, 0.75) / 1.5));
  p.U = "0.5 * normsq(x)";
  p.W = "zero";
  const ProblemSpec b = build_problem(p);
  CHECK(b.gaussian_U);
  CHECK(b.weight_is_zero());
  p.U = "x0 +";
  CHECK_THROWS_AS(build_problem(p), ParseError);
  p.U = "pq_potential(-1)";
  CHECK_THROWS_AS(build_problem(p), ConfigError);
}

TEST_CASE("check-curvature") {
  const std::string cfg = temp_file("gammaw_cc.ini", "[problem]\ndim = 2\n[verify]\ncheck_samples = 300\n");
  const Run r = cli({"check-curvature", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(r.out.find("rho: 1") != std::string::npos);
  CHECK(r.out.find("gamma: -1.0625") != std::string::npos);
  CHECK(r.out.find("violations=0") != std::string::npos);

  const Run div = cli({"check-curvature", "--override", "problem.U=pq_potential(3)", "--override",
                       "problem.W=pq_weight(1)", "--override", "verify.check_samples=10"});
  CHECK(div.code == 0);
  CHECK(div.out.find("gamma: DIVERGENT (-inf)") != std::string::npos);

  const Run zero = cli({"check-curvature", "--override", "problem.W=zero", "--override", "verify.check_samples=50"});
  CHECK(zero.code == 0);
  CHECK(zero.out.find("gamma: +inf") != std::string::npos);

  // An explicit kappa that is too strong yields violations.
  const Run strong = cli({"check-curvature", "--override", "verify.kappa=5", "--override", "verify.check_samples=50"});
  CHECK(strong.code == 1);
}

TEST_CASE("verify subcommands and exit codes") {
  const std::string cfg = temp_file("gammaw_small.ini", kSmall);
  const Run ok = cli({"verify", "commutation", "--config", cfg, "--override", "verify.kappa=-1"});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("check_id,t,x0,x1,f_label,lhs,lhs_se,rhs,rhs_se,margin,verdict\n", 0) == 0);

  const Run trivial = cli({"verify", "variance", "--config", cfg, "--override", "grids.t=0"});
  CHECK(trivial.code == 0);

  const Run strong = cli({"verify", "commutation", "--config", cfg, "--override", "verify.kappa=-0.5", "--override",
                          "grids.t=1", "--override", "grids.x=(3, 3)", "--override", "mc.n_paths=20000"});
  CHECK(strong.code == 1);

  const Run noisy = cli({"verify", "variance", "--config", cfg, "--override", "mc.n_paths=40", "--override",
                         "verify.kappa=-1"});
  CHECK(noisy.code == 4);

  const Run sqrt_run = cli({"verify", "sqrt", "--config", cfg});
  CHECK(sqrt_run.code == 0);
  const auto at = sqrt_run.err.find("c = ");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(sqrt_run.err.substr(at + 4)) == doctest::Approx(2.0).epsilon(1e-4));

  const Run degenerate = cli({"verify", "degenerate", "--config", cfg, "--override", "verify.kappa=-1"});
  CHECK(degenerate.code == 0);

  const Run pretty = cli({"verify", "degenerate", "--config", cfg, "--override", "verify.kappa=-1", "--override",
                          "output.format=pretty"});
  CHECK(pretty.out.find("check: degenerate") != std::string::npos);
}

TEST_CASE("seeded runs are reproducible and --out writes files") {
  const std::string cfg = temp_file("gammaw_seed.ini", kSmall);
  const auto out_a = (std::filesystem::temp_directory_path() / "gammaw_a.csv").string();
  const auto out_b = (std::filesystem::temp_directory_path() / "gammaw_b.csv").string();
  const auto seeded = [&](const std::string& out) {
    return cli({"verify", "variance", "--config", cfg, "--seed", "9", "--override", "verify.kappa=-1", "--override",
                "mc.n_paths=20000", "--out", out});
  };
  CHECK(seeded(out_a).code == 0);
  CHECK(seeded(out_b).code == 0);
  std::ifstream a(out_a), b(out_b);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().size() > 100);
}

TEST_CASE("configuration and domain errors map to exit codes") {
  CHECK(cli({"verify", "sideways"}).code == 2);
  CHECK(cli({"check-curvature", "--config", "/nonexistent/file.ini"}).code == 2);
  CHECK(cli({"check-curvature", "--override", "problem.U=x0 +"}).code == 2);
  CHECK(cli({"check-curvature", "--override", "problem.dim=1", "--override", "problem.U=log(x0)"}).code == 3);
  CHECK(cli({"verify", "commutation", "--override", "problem.U=pq_potential(3)", "--override",
             "problem.W=pq_weight(1)"})
            .code == 2);
  CHECK(cli({}).code == 2);
}

TEST_CASE("optimality subcommand") {
  const Run r = cli({"optimality"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("a,radius,ratio,limit\n", 0) == 0);
  CHECK(r.err.find("best kappa") != std::string::npos);
  CHECK(cli({"optimality", "--override", "problem.U=pq_potential(1)"}).code == 2);
}
