#pragma once

// Scalar fields on R^n: an immutable expression DAG with a text grammar,
// simplifying constructors, symbolic differentiation and jet evaluation.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gammaw {

using Point = Eigen::VectorXd;

class Field {
 public:
  enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sqrt, NormSq, Dot };

  struct Node {
    Op op = Op::Const;
    double value = 0.0;           // Const
    int index = 0;                // Var
    std::vector<double> coeffs;   // Dot
    std::shared_ptr<const Node> lhs, rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static Field constant(int dim, double c);
  static Field coordinate(int dim, int i);
  /// |x|^2
  static Field normsq(int dim);
  /// c . x, with dim = c.size()
  static Field dot(std::vector<double> c);

  int dim() const noexcept { return dim_; }
  Op op() const noexcept { return node_->op; }
  const Node& node() const noexcept { return *node_; }
  const NodePtr& node_ptr() const noexcept { return node_; }

  /// Left/right operand as fields of the same dimension.
  Field lhs() const { return Field(dim_, node_->lhs); }
  Field rhs() const { return Field(dim_, node_->rhs); }

  std::optional<double> constant_value() const noexcept;
  bool is_zero() const noexcept;

  double operator()(std::span<const double> x) const;
  double operator()(const Point& x) const { return (*this)(std::span<const double>(x.data(), x.size())); }

  friend Field operator+(const Field& a, const Field& b);
  friend Field operator-(const Field& a, const Field& b);
  friend Field operator*(const Field& a, const Field& b);
  friend Field operator/(const Field& a, const Field& b);
  friend Field operator-(const Field& a);
  friend Field pow(const Field& base, const Field& exponent);
  friend Field exp(const Field& a);
  friend Field log(const Field& a);
  friend Field sqrt(const Field& a);

  friend Field operator+(const Field& a, double b) { return a + constant(a.dim_, b); }
  friend Field operator+(double a, const Field& b) { return constant(b.dim_, a) + b; }
  friend Field operator-(const Field& a, double b) { return a - constant(a.dim_, b); }
  friend Field operator-(double a, const Field& b) { return constant(b.dim_, a) - b; }
  friend Field operator*(const Field& a, double b) { return a * constant(a.dim_, b); }
  friend Field operator*(double a, const Field& b) { return constant(b.dim_, a) * b; }
  friend Field operator/(const Field& a, double b) { return a / constant(a.dim_, b); }
  friend Field operator/(double a, const Field& b) { return constant(b.dim_, a) / b; }
  friend Field pow(const Field& base, double p) { return pow(base, constant(base.dim_, p)); }

 private:
  Field(int dim, NodePtr node) : dim_(dim), node_(std::move(node)) {}
  static Field make(int dim, Node node);

  int dim_ = 1;
  NodePtr node_;
};

/// Named constants available to the parser: scalars anywhere a number may
/// appear, vectors as the first argument of dot(., x).
struct Bindings {
  std::map<std::string, double, std::less<>> scalars;
  std::map<std::string, std::vector<double>, std::less<>> vectors;
};

/// Grammar: numbers, x0..x{n-1}, + - * / ^, exp() log() sqrt(), normsq(x),
/// dot(c, x) with c a literal vector (c0,...,c{n-1}) or a bound name.
/// Throws ParseError (with byte position) or IndexError.
Field parse_field(std::string_view src, int dim, const Bindings& bindings = {});

/// Fully parenthesized text accepted by parse_field.
std::string to_string(const Field& f);

/// d f / d x_i, simplified by constant folding and 0/1 identities.
Field differentiate(const Field& f, int i);

/// Value and derivatives of a field at a point. Derivative tensors are full
/// (symmetric) arrays stored row-major.
struct Jet {
  int order = 2;
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  std::vector<double> third;   // n^3 entries, order >= 3
  std::vector<double> fourth;  // n^4 entries, order == 4

  int dim() const noexcept { return static_cast<int>(gradient.size()); }
  double laplacian() const { return hessian.trace(); }
  double third_at(int i, int j, int k) const;
  double fourth_at(int i, int j, int k, int l) const;
};

/// Forward-mode evaluation in truncated multivariate Taylor arithmetic.
/// `order` in 1..4 (order 1 leaves the Hessian zero). Throws DomainError at
/// singular points.
Jet eval_jet(const Field& f, const Point& x, int order = 2);

/// Central-difference value/gradient/Hessian; an independent oracle for eval_jet.
Jet finite_diff_jet(const Field& f, const Point& x, double h);

}  // namespace gammaw
