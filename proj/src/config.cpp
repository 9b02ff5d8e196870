#include "gammaw/config.hpp"

#include "gammaw/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gammaw {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>, std::less<>>& known_keys() {
  static const std::map<std::string, std::set<std::string>, std::less<>> keys{
      {"problem", {"dim", "U", "W"}},
      {"search", {"box_radius", "radii", "grid_per_axis", "multistart_count", "local_steps", "seed", "tol"}},
      {"mc", {"n_paths", "dt", "seed", "antithetic"}},
      {"grids", {"t", "x", "a", "radii"}},
      {"verify",
       {"kappa", "rho", "c", "fk_nodes", "quad_order", "fd_h", "rel_stderr_cap", "abs_stderr_cap", "battery",
        "check_samples", "check_radius"}},
      {"output", {"path", "format"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text, std::string_view key) {
  const std::string s = trim(text);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last)
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, s));
  return v;
}

std::uint64_t parse_u64(std::string_view text, std::string_view key) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, s));
  return v;
}

int parse_int(std::string_view text, std::string_view key) {
  const std::string s = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, s));
  return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, s));
}

std::vector<double> parse_list(std::string_view text, std::string_view key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item, key));
  return out;
}

std::vector<std::vector<double>> parse_points(std::string_view text, std::string_view key) {
  std::vector<std::vector<double>> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ';')) {
    if (item.size() < 2 || item.front() != '(' || item.back() != ')')
      throw ConfigError(fmt::format("{}: expected a point like (1, 0), got '{}'", key, item));
    out.push_back(parse_list(std::string_view(item).substr(1, item.size() - 2), key));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

std::string join_points(const std::vector<std::vector<double>>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? "; (" : "(") + join(pts[i]) + ")";
  return s;
}

/// Argument of a builtin call such as "pq_weight(1.5)", or nullopt.
std::optional<double> builtin_arg(std::string_view text, std::string_view name) {
  const std::string s = trim(text);
  if (s.size() <= name.size() + 2 || s.compare(0, name.size(), name) != 0 || s[name.size()] != '(' ||
      s.back() != ')')
    return std::nullopt;
  return parse_double(std::string_view(s).substr(name.size() + 1, s.size() - name.size() - 2), name);
}

void apply(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
  const std::string where = section + "." + key;
  if (section == "problem") {
    if (key == "dim") cfg.problem.dim = parse_int(value, where);
    else if (key == "U") cfg.problem.U = trim(value);
    else cfg.problem.W = trim(value);
  } else if (section == "search") {
    auto& s = cfg.search;
    if (key == "box_radius") s.box_radius = parse_double(value, where);
    else if (key == "radii") s.radii_schedule = parse_list(value, where);
    else if (key == "grid_per_axis") s.grid_per_axis = parse_int(value, where);
    else if (key == "multistart_count") s.multistart_count = parse_int(value, where);
    else if (key == "local_steps") s.local_steps = parse_int(value, where);
    else if (key == "seed") s.seed = parse_u64(value, where);
    else s.tol = parse_double(value, where);
  } else if (section == "mc") {
    if (key == "n_paths") cfg.mc.n_paths = parse_u64(value, where);
    else if (key == "dt") cfg.mc.dt = parse_double(value, where);
    else if (key == "seed") cfg.mc.seed = parse_u64(value, where);
    else cfg.mc.antithetic = parse_bool(value, where);
  } else if (section == "grids") {
    if (key == "t") cfg.grids.t_values = parse_list(value, where);
    else if (key == "x") cfg.grids.x_points = parse_points(value, where);
    else if (key == "a") cfg.grids.a_vectors = parse_points(value, where);
    else cfg.grids.radii = parse_list(value, where);
  } else if (section == "verify") {
    auto& v = cfg.verify;
    auto optional_value = [&](std::optional<double>& slot) {
      const std::string s = trim(value);
      if (s.empty() || s == "auto") slot.reset();
      else slot = parse_double(s, where);
    };
    if (key == "kappa") optional_value(v.kappa);
    else if (key == "rho") optional_value(v.rho);
    else if (key == "c") optional_value(v.c);
    else if (key == "fk_nodes") v.fk_nodes = parse_int(value, where);
    else if (key == "quad_order") v.quad_order = parse_int(value, where);
    else if (key == "fd_h") v.fd_h = parse_double(value, where);
    else if (key == "rel_stderr_cap") v.rel_stderr_cap = parse_double(value, where);
    else if (key == "abs_stderr_cap") v.abs_stderr_cap = parse_double(value, where);
    else if (key == "battery") v.battery = trim(value);
    else if (key == "check_samples") v.check_samples = parse_int(value, where);
    else v.check_radius = parse_double(value, where);
  } else {
    if (key == "path") cfg.output.path = trim(value);
    else cfg.output.format = trim(value);
  }
}

void check_known(const std::string& section, const std::string& key) {
  const auto it = known_keys().find(section);
  if (it == known_keys().end()) throw ConfigError(fmt::format("unknown section [{}]", section));
  if (!it->second.contains(key)) throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

void RunConfig::validate() const {
  if (problem.dim < 1) throw ConfigError("problem.dim must be at least 1");
  try {
    search.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("search: ") + e.what());
  }
  if (mc.n_paths < 2) throw ConfigError("mc.n_paths must be at least 2");
  if (mc.antithetic && mc.n_paths % 2 != 0) throw ConfigError("mc.n_paths must be even with antithetic pairs");
  if (!(mc.dt > 0.0)) throw ConfigError("mc.dt must be positive");
  for (double t : grids.t_values)
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("grids.t values must be finite and non-negative");
  for (const auto& x : grids.x_points)
    if (static_cast<int>(x.size()) != problem.dim) throw ConfigError("grids.x points must have dimension problem.dim");
  for (const auto& a : grids.a_vectors)
    if (static_cast<int>(a.size()) != problem.dim) throw ConfigError("grids.a vectors must have dimension problem.dim");
  for (double r : grids.radii)
    if (!(r > 0.0)) throw ConfigError("grids.radii must be positive");
  if (verify.fk_nodes < 3 || verify.fk_nodes % 2 == 0) throw ConfigError("verify.fk_nodes must be odd and >= 3");
  if (verify.quad_order < 1) throw ConfigError("verify.quad_order must be positive");
  if (!(verify.fd_h > 0.0)) throw ConfigError("verify.fd_h must be positive");
  if (verify.battery != "default" && verify.battery != "nonnegative")
    throw ConfigError("verify.battery must be default or nonnegative");
  if (verify.check_samples < 1) throw ConfigError("verify.check_samples must be positive");
  if (!(verify.check_radius > 0.0)) throw ConfigError("verify.check_radius must be positive");
  if (output.format != "csv" && output.format != "pretty") throw ConfigError("output.format must be csv or pretty");
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError(fmt::format("key '{}' outside of a section", section));
    for (const auto& [key, value] : body) {
      check_known(section, key);
      apply(cfg, section, key, value.data());
    }
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", ov));
    const std::string section = trim(std::string_view(ov).substr(0, dot));
    const std::string key = trim(std::string_view(ov).substr(dot + 1, eq - dot - 1));
    check_known(section, key);
    apply(cfg, section, key, ov.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string serialize(const RunConfig& cfg) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  auto optional = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("auto"); };

  out += "[problem]\n";
  line("dim", std::to_string(cfg.problem.dim));
  line("U", cfg.problem.U);
  line("W", cfg.problem.W);

  out += "\n[search]\n";
  line("box_radius", format_double(cfg.search.box_radius));
  line("radii", join(cfg.search.radii_schedule));
  line("grid_per_axis", std::to_string(cfg.search.grid_per_axis));
  line("multistart_count", std::to_string(cfg.search.multistart_count));
  line("local_steps", std::to_string(cfg.search.local_steps));
  line("seed", std::to_string(cfg.search.seed));
  line("tol", format_double(cfg.search.tol));

  out += "\n[mc]\n";
  line("n_paths", std::to_string(cfg.mc.n_paths));
  line("dt", format_double(cfg.mc.dt));
  line("seed", std::to_string(cfg.mc.seed));
  line("antithetic", cfg.mc.antithetic ? "true" : "false");

  out += "\n[grids]\n";
  line("t", join(cfg.grids.t_values));
  line("x", join_points(cfg.grids.x_points));
  line("a", join_points(cfg.grids.a_vectors));
  line("radii", join(cfg.grids.radii));

  out += "\n[verify]\n";
  line("kappa", optional(cfg.verify.kappa));
  line("rho", optional(cfg.verify.rho));
  line("c", optional(cfg.verify.c));
  line("fk_nodes", std::to_string(cfg.verify.fk_nodes));
  line("quad_order", std::to_string(cfg.verify.quad_order));
  line("fd_h", format_double(cfg.verify.fd_h));
  line("rel_stderr_cap", format_double(cfg.verify.rel_stderr_cap));
  line("abs_stderr_cap", format_double(cfg.verify.abs_stderr_cap));
  line("battery", cfg.verify.battery);
  line("check_samples", std::to_string(cfg.verify.check_samples));
  line("check_radius", format_double(cfg.verify.check_radius));

  out += "\n[output]\n";
  line("path", cfg.output.path);
  line("format", cfg.output.format);
  return out;
}

ProblemSpec build_problem(const ProblemConfig& cfg) {
  const int n = cfg.dim;
  if (n < 1) throw ConfigError("problem.dim must be at least 1");
  Field U = Field::constant(n, 0.0);
  const std::string u = trim(cfg.U);
  if (u == "gaussian") {
    U = builtin::gaussian_potential(n);
  } else if (auto p = builtin_arg(u, "pq_potential")) {
    if (!(*p > 0.0)) throw ConfigError("pq_potential(p) needs p > 0");
    U = builtin::pq_potential(n, *p);
  } else {
    U = parse_field(u, n);
  }
  Field W = Field::constant(n, 0.0);
  const std::string w = trim(cfg.W);
  if (w == "zero") {
    W = builtin::zero_weight(n);
  } else if (w == "sqrt1sq") {
    W = builtin::sqrt1sq_weight(n);
  } else if (auto q = builtin_arg(w, "pq_weight")) {
    if (!(*q > 0.0)) throw ConfigError("pq_weight(q) needs q > 0");
    W = builtin::pq_weight(n, *q);
  } else {
    W = parse_field(w, n);
  }
  return ProblemSpec::make(std::move(U), std::move(W));
}

std::vector<Point> to_points(const std::vector<std::vector<double>>& pts, int dim) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (static_cast<int>(p.size()) != dim) throw ConfigError("point dimension does not match problem.dim");
    out.push_back(Eigen::Map<const Point>(p.data(), dim));
  }
  return out;
}

std::vector<Point> x_grid(const RunConfig& cfg) {
  const int n = cfg.problem.dim;
  if (!cfg.grids.x_points.empty()) return to_points(cfg.grids.x_points, n);
  return {Point::Zero(n), Point::Ones(n)};
}

}  // namespace gammaw
