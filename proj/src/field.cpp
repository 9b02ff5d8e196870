#include "gammaw/field.hpp"

#include "gammaw/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numeric>

namespace gammaw {

namespace {

using Op = Field::Op;

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

void require_same_dim(const Field& a, const Field& b) {
  if (a.dim() != b.dim())
    throw IndexError(fmt::format("dimension mismatch: {} vs {}", a.dim(), b.dim()));
}

double checked_pow(double base, double p) {
  if (base < 0.0 && !is_integer(p)) throw DomainError("negative base with non-integer exponent");
  if (base == 0.0 && p < 0.0) throw DomainError("zero raised to a negative power");
  return std::pow(base, p);
}

double eval_node(const Field::Node& n, std::span<const double> x) {
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      return x[n.index];
    case Op::Add:
      return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Op::Sub:
      return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Op::Mul:
      return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Op::Div: {
      const double d = eval_node(*n.rhs, x);
      if (d == 0.0) throw DomainError("division by zero");
      return eval_node(*n.lhs, x) / d;
    }
    case Op::Neg:
      return -eval_node(*n.lhs, x);
    case Op::Pow:
      return checked_pow(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
    case Op::Exp:
      return std::exp(eval_node(*n.lhs, x));
    case Op::Log: {
      const double a = eval_node(*n.lhs, x);
      if (!(a > 0.0)) throw DomainError("log of non-positive argument");
      return std::log(a);
    }
    case Op::Sqrt: {
      const double a = eval_node(*n.lhs, x);
      if (a < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(a);
    }
    case Op::NormSq: {
      double s = 0.0;
      for (double xi : x) s += xi * xi;
      return s;
    }
    case Op::Dot: {
      double s = 0.0;
      for (std::size_t i = 0; i < n.coeffs.size(); ++i) s += n.coeffs[i] * x[i];
      return s;
    }
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Field Field::make(int dim, Node node) { return Field(dim, std::make_shared<const Node>(std::move(node))); }

Field Field::constant(int dim, double c) {
  if (dim <= 0) throw IndexError("field dimension must be positive");
  Node n;
  n.op = Op::Const;
  n.value = c;
  return make(dim, std::move(n));
}

Field Field::coordinate(int dim, int i) {
  if (dim <= 0) throw IndexError("field dimension must be positive");
  if (i < 0 || i >= dim) throw IndexError(fmt::format("coordinate x{} out of range for dimension {}", i, dim));
  Node n;
  n.op = Op::Var;
  n.index = i;
  return make(dim, std::move(n));
}

Field Field::normsq(int dim) {
  if (dim <= 0) throw IndexError("field dimension must be positive");
  Node n;
  n.op = Op::NormSq;
  return make(dim, std::move(n));
}

Field Field::dot(std::vector<double> c) {
  if (c.empty()) throw IndexError("dot with an empty vector");
  const int dim = static_cast<int>(c.size());
  if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) return constant(dim, 0.0);
  Node n;
  n.op = Op::Dot;
  n.coeffs = std::move(c);
  return make(dim, std::move(n));
}

std::optional<double> Field::constant_value() const noexcept {
  if (node_->op == Op::Const) return node_->value;
  return std::nullopt;
}

bool Field::is_zero() const noexcept { return node_->op == Op::Const && node_->value == 0.0; }

double Field::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw IndexError(fmt::format("point has {} coordinates, field dimension is {}", x.size(), dim_));
  return eval_node(*node_, x);
}

namespace {
Field::Node binary(Op op, const Field& a, const Field& b) {
  Field::Node n;
  n.op = op;
  n.lhs = a.node_ptr();
  n.rhs = b.node_ptr();
  return n;
}
Field::Node unary(Op op, const Field& a) {
  Field::Node n;
  n.op = op;
  n.lhs = a.node_ptr();
  return n;
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
  require_same_dim(a, b);
  const auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return Field::constant(a.dim_, *ca + *cb);
  if (ca && *ca == 0.0) return b;
  if (cb && *cb == 0.0) return a;
  return Field::make(a.dim_, binary(Op::Add, a, b));
}

Field operator-(const Field& a, const Field& b) {
  require_same_dim(a, b);
  const auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return Field::constant(a.dim_, *ca - *cb);
  if (cb && *cb == 0.0) return a;
  if (ca && *ca == 0.0) return -b;
  return Field::make(a.dim_, binary(Op::Sub, a, b));
}

Field operator*(const Field& a, const Field& b) {
  require_same_dim(a, b);
  const auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return Field::constant(a.dim_, *ca * *cb);
  if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return Field::constant(a.dim_, 0.0);
  if (ca && *ca == 1.0) return b;
  if (cb && *cb == 1.0) return a;
  return Field::make(a.dim_, binary(Op::Mul, a, b));
}

Field operator/(const Field& a, const Field& b) {
  require_same_dim(a, b);
  const auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb && *cb != 0.0) return Field::constant(a.dim_, *ca / *cb);
  if (ca && *ca == 0.0) return Field::constant(a.dim_, 0.0);
  if (cb && *cb == 1.0) return a;
  return Field::make(a.dim_, binary(Op::Div, a, b));
}

Field operator-(const Field& a) {
  if (const auto ca = a.constant_value()) return Field::constant(a.dim_, -*ca);
  if (a.op() == Op::Neg) return a.lhs();
  return Field::make(a.dim_, unary(Op::Neg, a));
}

Field pow(const Field& base, const Field& exponent) {
  require_same_dim(base, exponent);
  const auto cb = base.constant_value(), ce = exponent.constant_value();
  if (ce && *ce == 0.0) return Field::constant(base.dim_, 1.0);
  if (ce && *ce == 1.0) return base;
  if (cb && ce) {
    const bool valid = !(*cb < 0.0 && !is_integer(*ce)) && !(*cb == 0.0 && *ce < 0.0);
    if (valid) return Field::constant(base.dim_, std::pow(*cb, *ce));
  }
  return Field::make(base.dim_, binary(Op::Pow, base, exponent));
}

Field exp(const Field& a) {
  if (const auto ca = a.constant_value()) return Field::constant(a.dim_, std::exp(*ca));
  return Field::make(a.dim_, unary(Op::Exp, a));
}

Field log(const Field& a) {
  if (const auto ca = a.constant_value(); ca && *ca > 0.0) return Field::constant(a.dim_, std::log(*ca));
  return Field::make(a.dim_, unary(Op::Log, a));
}

Field sqrt(const Field& a) {
  if (const auto ca = a.constant_value(); ca && *ca >= 0.0) return Field::constant(a.dim_, std::sqrt(*ca));
  return Field::make(a.dim_, unary(Op::Sqrt, a));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string number_text(double v) {
  std::string s = fmt::format("{}", v);
  if (v < 0.0 || s.front() == '-') return "(" + s + ")";
  return s;
}

void print(const Field::Node& n, std::string& out) {
  auto bin = [&](const char* op) {
    out += '(';
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print(*n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Const:
      out += number_text(n.value);
      break;
    case Op::Var:
      out += fmt::format("x{}", n.index);
      break;
    case Op::Add:
      bin(" + ");
      break;
    case Op::Sub:
      bin(" - ");
      break;
    case Op::Mul:
      bin(" * ");
      break;
    case Op::Div:
      bin(" / ");
      break;
    case Op::Pow:
      bin(" ^ ");
      break;
    case Op::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      break;
    case Op::Exp:
      fn("exp");
      break;
    case Op::Log:
      fn("log");
      break;
    case Op::Sqrt:
      fn("sqrt");
      break;
    case Op::NormSq:
      out += "normsq(x)";
      break;
    case Op::Dot: {
      out += "dot((";
      for (std::size_t i = 0; i < n.coeffs.size(); ++i) {
        if (i) out += ", ";
        out += fmt::format("{}", n.coeffs[i]);
      }
      out += "), x)";
      break;
    }
  }
}

}  // namespace

std::string to_string(const Field& f) {
  std::string out;
  print(f.node(), out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view src, int dim, const Bindings& b) : src_(src), dim_(dim), bindings_(b) {}

  Field parse() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    Field f = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(fmt::format("unexpected '{}'", src_[pos_]), pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw ParseError(fmt::format("expected '{}' but input ended", c), pos_);
      throw ParseError(fmt::format("expected '{}'", c), pos_);
    }
  }

  Field expr() {
    Field f = term();
    for (;;) {
      if (accept('+'))
        f = f + term();
      else if (accept('-'))
        f = f - term();
      else
        return f;
    }
  }

  Field term() {
    Field f = unary_expr();
    for (;;) {
      if (accept('*'))
        f = f * unary_expr();
      else if (accept('/'))
        f = f / unary_expr();
      else
        return f;
    }
  }

  Field unary_expr() {
    if (accept('-')) return -unary_expr();
    if (accept('+')) return unary_expr();
    return power();
  }

  Field power() {
    Field base = primary();
    if (accept('^')) return pow(base, unary_expr());
    return base;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (ec != std::errc()) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return v;
  }

  double signed_number() {
    skip_ws();
    const std::size_t start = pos_;
    double sign = 1.0;
    if (accept('-')) sign = -1.0;
    else accept('+');
    skip_ws();
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      const std::string name = identifier();
      auto it = bindings_.scalars.find(name);
      if (it == bindings_.scalars.end()) throw ParseError(fmt::format("unknown constant '{}'", name), start);
      return sign * it->second;
    }
    return sign * number();
  }

  void expect_x() {
    skip_ws();
    const std::size_t at = pos_;
    if (identifier() != "x") throw ParseError("expected the coordinate vector 'x'", at);
  }

  std::vector<double> vector_literal() {
    skip_ws();
    const std::size_t at = pos_;
    std::vector<double> c;
    if (accept('(')) {
      c.push_back(signed_number());
      while (accept(',')) c.push_back(signed_number());
      expect(')');
    } else {
      const std::string name = identifier();
      auto it = bindings_.vectors.find(name);
      if (name.empty() || it == bindings_.vectors.end())
        throw ParseError(fmt::format("expected a vector literal or bound vector name"), at);
      c = it->second;
    }
    if (static_cast<int>(c.size()) != dim_)
      throw IndexError(fmt::format("vector at position {} has {} entries, dimension is {}", at, c.size(), dim_));
    return c;
  }

  Field primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Field f = expr();
      expect(')');
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Field::constant(dim_, number());
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) throw ParseError(fmt::format("unexpected '{}'", c), at);

    const std::string name = identifier();
    if (name.size() > 1 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      long idx = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (idx >= dim_) throw IndexError(fmt::format("coordinate {} at position {} out of range for dimension {}", name, at, dim_));
      return Field::coordinate(dim_, static_cast<int>(idx));
    }
    if (name == "exp" || name == "log" || name == "sqrt") {
      expect('(');
      Field a = expr();
      expect(')');
      if (name == "exp") return exp(a);
      if (name == "log") return log(a);
      return sqrt(a);
    }
    if (name == "normsq") {
      expect('(');
      expect_x();
      expect(')');
      return Field::normsq(dim_);
    }
    if (name == "dot") {
      expect('(');
      std::vector<double> coeffs = vector_literal();
      expect(',');
      expect_x();
      expect(')');
      return Field::dot(std::move(coeffs));
    }
    if (auto it = bindings_.scalars.find(name); it != bindings_.scalars.end()) return Field::constant(dim_, it->second);
    if (name == "x") throw ParseError("bare 'x' is only valid inside normsq() or dot()", at);
    throw ParseError(fmt::format("unknown identifier '{}'", name), at);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int dim_;
  const Bindings& bindings_;
};

}  // namespace

Field parse_field(std::string_view src, int dim, const Bindings& bindings) {
  if (dim <= 0) throw IndexError("field dimension must be positive");
  return Parser(src, dim, bindings).parse();
}

// ---------------------------------------------------------------------------
// Symbolic differentiation

Field differentiate(const Field& f, int i) {
  const int n = f.dim();
  if (i < 0 || i >= n) throw IndexError(fmt::format("derivative index {} out of range for dimension {}", i, n));
  const auto& node = f.node();
  switch (node.op) {
    case Op::Const:
      return Field::constant(n, 0.0);
    case Op::Var:
      return Field::constant(n, node.index == i ? 1.0 : 0.0);
    case Op::Add:
      return differentiate(f.lhs(), i) + differentiate(f.rhs(), i);
    case Op::Sub:
      return differentiate(f.lhs(), i) - differentiate(f.rhs(), i);
    case Op::Neg:
      return -differentiate(f.lhs(), i);
    case Op::Mul: {
      const Field a = f.lhs(), b = f.rhs();
      return differentiate(a, i) * b + a * differentiate(b, i);
    }
    case Op::Div: {
      const Field a = f.lhs(), b = f.rhs();
      const Field da = differentiate(a, i), db = differentiate(b, i);
      if (db.is_zero()) return da / b;
      return (da * b - a * db) / (b * b);
    }
    case Op::Pow: {
      const Field a = f.lhs(), e = f.rhs();
      if (const auto p = e.constant_value()) return *p * pow(a, *p - 1.0) * differentiate(a, i);
      return f * (differentiate(e, i) * log(a) + e * differentiate(a, i) / a);
    }
    case Op::Exp:
      return f * differentiate(f.lhs(), i);
    case Op::Log:
      return differentiate(f.lhs(), i) / f.lhs();
    case Op::Sqrt:
      return differentiate(f.lhs(), i) / (2.0 * f);
    case Op::NormSq:
      return 2.0 * Field::coordinate(n, i);
    case Op::Dot:
      return Field::constant(n, node.coeffs[i]);
  }
  return Field::constant(n, 0.0);
}

// ---------------------------------------------------------------------------
// Jets: truncated multivariate Taylor arithmetic

namespace {

/// Monomial basis {x^alpha : |alpha| <= order} with a sparse product table.
struct JetSpace {
  int n = 0;
  int order = 0;
  std::vector<std::vector<int>> monomials;
  std::vector<double> alpha_factorial;
  std::vector<int> unit;                         // index of e_i
  std::vector<std::array<int, 3>> products;      // (a, b, a+b)
  std::map<std::vector<int>, int> lookup;

  JetSpace(int dim, int ord) : n(dim), order(ord) {
    std::vector<int> alpha(n, 0);
    for (int degree = 0; degree <= order; ++degree) enumerate(alpha, 0, degree);
    for (std::size_t k = 0; k < monomials.size(); ++k) lookup.emplace(monomials[k], static_cast<int>(k));
    alpha_factorial.resize(monomials.size());
    for (std::size_t k = 0; k < monomials.size(); ++k) {
      double fac = 1.0;
      for (int a : monomials[k])
        for (int j = 2; j <= a; ++j) fac *= j;
      alpha_factorial[k] = fac;
    }
    unit.resize(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(n, 0);
      e[i] = 1;
      unit[i] = index_of(e);
    }
    std::vector<int> sum(n);
    for (std::size_t a = 0; a < monomials.size(); ++a)
      for (std::size_t b = 0; b < monomials.size(); ++b) {
        int deg = 0;
        for (int i = 0; i < n; ++i) {
          sum[i] = monomials[a][i] + monomials[b][i];
          deg += sum[i];
        }
        if (deg <= order) products.push_back({static_cast<int>(a), static_cast<int>(b), index_of(sum)});
      }
  }

  int size() const { return static_cast<int>(monomials.size()); }
  int index_of(const std::vector<int>& alpha) const { return lookup.at(alpha); }

 private:
  void enumerate(std::vector<int>& alpha, int pos, int remaining) {
    if (pos == n - 1) {
      alpha[pos] = remaining;
      monomials.push_back(alpha);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      alpha[pos] = a;
      enumerate(alpha, pos + 1, remaining - a);
    }
    alpha[pos] = 0;
  }
};

const JetSpace& jet_space(int n, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, order}];
  if (!slot) slot = std::make_unique<JetSpace>(n, order);
  return *slot;
}

struct Taylor {
  const JetSpace* space;
  std::vector<double> c;

  explicit Taylor(const JetSpace& s) : space(&s), c(s.size(), 0.0) {}
  double value() const { return c[0]; }
};

Taylor operator+(Taylor a, const Taylor& b) {
  for (std::size_t k = 0; k < a.c.size(); ++k) a.c[k] += b.c[k];
  return a;
}
Taylor operator-(Taylor a, const Taylor& b) {
  for (std::size_t k = 0; k < a.c.size(); ++k) a.c[k] -= b.c[k];
  return a;
}
Taylor operator*(const Taylor& a, const Taylor& b) {
  Taylor r(*a.space);
  for (const auto& [i, j, k] : a.space->products) r.c[k] += a.c[i] * b.c[j];
  return r;
}
Taylor scaled(Taylor a, double s) {
  for (double& v : a.c) v *= s;
  return a;
}

/// g(u) given g^(m)(u0)/m! for m = 0..order.
Taylor compose(const Taylor& u, const std::vector<double>& taylor_coeffs) {
  Taylor delta = u;
  delta.c[0] = 0.0;
  Taylor result(*u.space);
  result.c[0] = taylor_coeffs[0];
  Taylor power = delta;
  for (int m = 1; m <= u.space->order; ++m) {
    if (m > 1) power = power * delta;
    if (taylor_coeffs[m] != 0.0)
      for (std::size_t k = 0; k < power.c.size(); ++k) result.c[k] += taylor_coeffs[m] * power.c[k];
  }
  return result;
}

std::vector<double> pow_coeffs(double u0, double p, int order) {
  std::vector<double> g(order + 1, 0.0);
  if (u0 < 0.0 && !is_integer(p)) throw DomainError("power of negative base with non-integer exponent");
  if (u0 == 0.0 && !(is_integer(p) && p >= 0.0))
    throw DomainError("power is not differentiable at zero base for this exponent");
  double falling = 1.0, fact = 1.0;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) {
      falling *= (p - (m - 1));
      fact *= m;
    }
    if (falling == 0.0) break;
    g[m] = falling / fact * std::pow(u0, p - m);
  }
  return g;
}

Taylor jet_of(const Field::Node& node, const JetSpace& space, const Point& x) {
  const int order = space.order;
  switch (node.op) {
    case Op::Const: {
      Taylor t(space);
      t.c[0] = node.value;
      return t;
    }
    case Op::Var: {
      Taylor t(space);
      t.c[0] = x[node.index];
      if (order >= 1) t.c[space.unit[node.index]] = 1.0;
      return t;
    }
    case Op::NormSq: {
      Taylor t(space);
      t.c[0] = x.squaredNorm();
      for (int i = 0; i < space.n && order >= 1; ++i) {
        t.c[space.unit[i]] = 2.0 * x[i];
        if (order >= 2) {
          std::vector<int> alpha(space.n, 0);
          alpha[i] = 2;
          t.c[space.index_of(alpha)] = 1.0;
        }
      }
      return t;
    }
    case Op::Dot: {
      Taylor t(space);
      for (int i = 0; i < space.n; ++i) {
        t.c[0] += node.coeffs[i] * x[i];
        if (order >= 1) t.c[space.unit[i]] = node.coeffs[i];
      }
      return t;
    }
    case Op::Add:
      return jet_of(*node.lhs, space, x) + jet_of(*node.rhs, space, x);
    case Op::Sub:
      return jet_of(*node.lhs, space, x) - jet_of(*node.rhs, space, x);
    case Op::Neg:
      return scaled(jet_of(*node.lhs, space, x), -1.0);
    case Op::Mul: {
      if (node.lhs->op == Op::Const) return scaled(jet_of(*node.rhs, space, x), node.lhs->value);
      if (node.rhs->op == Op::Const) return scaled(jet_of(*node.lhs, space, x), node.rhs->value);
      return jet_of(*node.lhs, space, x) * jet_of(*node.rhs, space, x);
    }
    case Op::Div: {
      const Taylor b = jet_of(*node.rhs, space, x);
      if (b.value() == 0.0) throw DomainError("division by zero");
      if (node.rhs->op == Op::Const) return scaled(jet_of(*node.lhs, space, x), 1.0 / node.rhs->value);
      return jet_of(*node.lhs, space, x) * compose(b, pow_coeffs(b.value(), -1.0, order));
    }
    case Op::Pow: {
      const Taylor a = jet_of(*node.lhs, space, x);
      if (node.rhs->op == Op::Const) return compose(a, pow_coeffs(a.value(), node.rhs->value, order));
      if (!(a.value() > 0.0)) throw DomainError("variable exponent requires a positive base");
      std::vector<double> lg(order + 1, 0.0);
      lg[0] = std::log(a.value());
      for (int m = 1; m <= order; ++m) lg[m] = ((m % 2) ? 1.0 : -1.0) / (m * std::pow(a.value(), m));
      const Taylor exponent = jet_of(*node.rhs, space, x) * compose(a, lg);
      std::vector<double> ex(order + 1);
      double fact = 1.0;
      for (int m = 0; m <= order; ++m) {
        if (m > 0) fact *= m;
        ex[m] = std::exp(exponent.value()) / fact;
      }
      return compose(exponent, ex);
    }
    case Op::Exp: {
      const Taylor a = jet_of(*node.lhs, space, x);
      std::vector<double> g(order + 1);
      double fact = 1.0;
      const double e = std::exp(a.value());
      for (int m = 0; m <= order; ++m) {
        if (m > 0) fact *= m;
        g[m] = e / fact;
      }
      return compose(a, g);
    }
    case Op::Log: {
      const Taylor a = jet_of(*node.lhs, space, x);
      if (!(a.value() > 0.0)) throw DomainError("log of non-positive argument");
      std::vector<double> g(order + 1);
      g[0] = std::log(a.value());
      for (int m = 1; m <= order; ++m) g[m] = ((m % 2) ? 1.0 : -1.0) / (m * std::pow(a.value(), m));
      return compose(a, g);
    }
    case Op::Sqrt: {
      const Taylor a = jet_of(*node.lhs, space, x);
      if (!(a.value() > 0.0)) throw DomainError("sqrt is not differentiable at a non-positive argument");
      return compose(a, pow_coeffs(a.value(), 0.5, order));
    }
  }
  return Taylor(space);
}

}  // namespace

double Jet::third_at(int i, int j, int k) const {
  const int n = dim();
  return third.at((static_cast<std::size_t>(i) * n + j) * n + k);
}

double Jet::fourth_at(int i, int j, int k, int l) const {
  const int n = dim();
  return fourth.at(((static_cast<std::size_t>(i) * n + j) * n + k) * n + l);
}

Jet eval_jet(const Field& f, const Point& x, int order) {
  const int n = f.dim();
  if (x.size() != n) throw IndexError(fmt::format("point has {} coordinates, field dimension is {}", x.size(), n));
  if (order < 1 || order > 4) throw Error(fmt::format("jet order {} not in 1..4", order));
  const JetSpace& space = jet_space(n, order);
  const Taylor t = jet_of(f.node(), space, x);

  Jet jet;
  jet.order = order;
  jet.value = t.value();
  jet.gradient = Eigen::VectorXd::Zero(n);
  jet.hessian = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) jet.gradient[i] = t.c[space.unit[i]];

  // d^alpha f = alpha! * c_alpha, scattered over all index tuples with that multiset.
  std::vector<int> alpha(n);
  auto coefficient = [&](std::initializer_list<int> idx) {
    std::fill(alpha.begin(), alpha.end(), 0);
    for (int i : idx) ++alpha[i];
    const int k = space.index_of(alpha);
    return t.c[k] * space.alpha_factorial[k];
  };
  if (order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) jet.hessian(i, j) = coefficient({i, j});
  if (order >= 3) {
    jet.third.resize(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) jet.third[(static_cast<std::size_t>(i) * n + j) * n + k] = coefficient({i, j, k});
  }
  if (order >= 4) {
    jet.fourth.resize(static_cast<std::size_t>(n) * n * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            jet.fourth[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l] = coefficient({i, j, k, l});
  }
  return jet;
}

Jet finite_diff_jet(const Field& f, const Point& x, double h) {
  const int n = f.dim();
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  Jet jet;
  jet.order = 2;
  jet.value = f(x);
  jet.gradient = Eigen::VectorXd::Zero(n);
  jet.hessian = Eigen::MatrixXd::Zero(n, n);
  Point y = x;
  auto at = [&](int i, double si, int j, double sj) {
    y = x;
    y[i] += si * h;
    y[j] += sj * h;
    return f(y);
  };
  for (int i = 0; i < n; ++i) {
    y = x;
    y[i] += h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    jet.gradient[i] = (fp - fm) / (2.0 * h);
    jet.hessian(i, i) = (fp - 2.0 * jet.value + fm) / (h * h);
    for (int j = 0; j < i; ++j) {
      const double v = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4.0 * h * h);
      jet.hessian(i, j) = v;
      jet.hessian(j, i) = v;
    }
  }
  return jet;
}

}  // namespace gammaw
