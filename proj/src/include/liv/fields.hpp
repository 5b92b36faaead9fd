#pragma once

// Scalar fields on the base manifold M, evaluated as (value, X-derivative)
// pairs.  Fields are s-independent; lifted to Jet2 the s-slots vanish.
// The library covers constants, the cosine profile 1 + a cos(2 pi theta)
// with analytic X-derivative, products, exponentials, affine combinations,
// and parsed arithmetic expressions differentiated with forward-mode duals.
//
// Canonical field ids (parsed by scalar_jet and the CLI descriptors):
//   const(c) | cos_theta(a) | prod(id,id) | exp(id) | affine(c0,c1,id)
//   | expr(text)

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liv/flow_models.hpp"
#include "liv/jet.hpp"
#include "liv/numerics.hpp"

namespace liv {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct MJet {
  double value = 0.0;
  double d_X = 0.0;
};

namespace detail {

struct FieldImpl {
  virtual ~FieldImpl() = default;
  virtual MJet eval(const FlowModel& m, const Vec3& p) const = 0;
  virtual std::string id() const = 0;
};

}  // namespace detail

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const detail::FieldImpl> impl)
      : impl_(std::move(impl)) {}

  bool empty() const { return impl_ == nullptr; }

  MJet eval(const FlowModel& m, const Vec3& p) const {
    return impl_->eval(m, p);
  }

  Jet2 jet2(const FlowModel& m, const Vec3& p) const {
    const MJet j = eval(m, p);
    return {j.value, j.d_X, 0.0, 0.0, 0.0};
  }

  std::string id() const { return impl_ ? impl_->id() : "<none>"; }

  static ScalarField constant(double c);
  static ScalarField cos_theta(double a);
  static ScalarField expression(const std::string& text);
  static ScalarField parse(const std::string& field_id);

 private:
  std::shared_ptr<const detail::FieldImpl> impl_;
};

ScalarField field_product(const ScalarField& a, const ScalarField& b);
ScalarField field_exp(const ScalarField& a);
ScalarField field_affine(double c0, double c1, const ScalarField& a);

namespace detail {

struct ConstField final : FieldImpl {
  double c;
  explicit ConstField(double v) : c(v) {}
  MJet eval(const FlowModel&, const Vec3&) const override { return {c, 0.0}; }
  std::string id() const override { return "const(" + num(c) + ")"; }
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

// 1 + a cos(2 pi theta); X has unit theta-component in every model here,
// so d_X = -2 pi a sin(2 pi theta).
struct CosThetaField final : FieldImpl {
  double a;
  explicit CosThetaField(double amp) : a(amp) {}
  MJet eval(const FlowModel&, const Vec3& p) const override {
    return {1.0 + a * std::cos(kTwoPi * p[2]),
            -kTwoPi * a * std::sin(kTwoPi * p[2])};
  }
  std::string id() const override {
    return "cos_theta(" + ConstField::num(a) + ")";
  }
};

struct ProductField final : FieldImpl {
  ScalarField a, b;
  ProductField(ScalarField x, ScalarField y)
      : a(std::move(x)), b(std::move(y)) {}
  MJet eval(const FlowModel& m, const Vec3& p) const override {
    const MJet ja = a.eval(m, p);
    const MJet jb = b.eval(m, p);
    return {ja.value * jb.value, ja.d_X * jb.value + ja.value * jb.d_X};
  }
  std::string id() const override {
    return "prod(" + a.id() + "," + b.id() + ")";
  }
};

struct ExpField final : FieldImpl {
  ScalarField a;
  explicit ExpField(ScalarField x) : a(std::move(x)) {}
  MJet eval(const FlowModel& m, const Vec3& p) const override {
    const MJet j = a.eval(m, p);
    const double e = std::exp(j.value);
    return {e, e * j.d_X};
  }
  std::string id() const override { return "exp(" + a.id() + ")"; }
};

struct AffineField final : FieldImpl {
  double c0, c1;
  ScalarField a;
  AffineField(double k0, double k1, ScalarField x)
      : c0(k0), c1(k1), a(std::move(x)) {}
  MJet eval(const FlowModel& m, const Vec3& p) const override {
    const MJet j = a.eval(m, p);
    return {c0 + c1 * j.value, c1 * j.d_X};
  }
  std::string id() const override {
    return "affine(" + ConstField::num(c0) + "," + ConstField::num(c1) + "," +
           a.id() + ")";
  }
};

// --- arithmetic expression parsing -----------------------------------------
// Grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
// factor := number | var | func '(' expr ')' | '(' expr ')' | '-' factor.
// Variables: x|u -> coord 0, y|v -> coord 1, theta|t -> coord 2.
// Functions: cos, sin, exp.

struct ExprNode {
  enum Kind { kNum, kVar, kAdd, kSub, kMul, kDiv, kNeg, kCos, kSin, kExp };
  Kind kind;
  double num = 0.0;
  int var = 0;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

inline Dual3 expr_eval(const ExprNode& n, const Vec3& p) {
  switch (n.kind) {
    case ExprNode::kNum: return Dual3::constant(n.num);
    case ExprNode::kVar: return Dual3::variable(p[static_cast<std::size_t>(n.var)], n.var);
    case ExprNode::kAdd: return expr_eval(*n.lhs, p) + expr_eval(*n.rhs, p);
    case ExprNode::kSub: return expr_eval(*n.lhs, p) - expr_eval(*n.rhs, p);
    case ExprNode::kMul: return expr_eval(*n.lhs, p) * expr_eval(*n.rhs, p);
    case ExprNode::kDiv: return expr_eval(*n.lhs, p) / expr_eval(*n.rhs, p);
    case ExprNode::kNeg: return -expr_eval(*n.lhs, p);
    case ExprNode::kCos: return dcos(expr_eval(*n.lhs, p));
    case ExprNode::kSin: return dsin(expr_eval(*n.lhs, p));
    case ExprNode::kExp: return dexp(expr_eval(*n.lhs, p));
  }
  throw std::logic_error("expr: bad node");
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != s_.size())
      throw std::invalid_argument("expr: trailing input at '" +
                                  s_.substr(pos_) + "'");
    return e;
  }

 private:
  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      skip_ws();
      if (consume('+')) e = node(ExprNode::kAdd, e, term());
      else if (consume('-')) e = node(ExprNode::kSub, e, term());
      else return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      skip_ws();
      if (consume('*')) e = node(ExprNode::kMul, e, factor());
      else if (consume('/')) e = node(ExprNode::kDiv, e, factor());
      else return e;
    }
  }

  ExprPtr factor() {
    skip_ws();
    if (consume('-')) return node(ExprNode::kNeg, factor(), nullptr);
    if (consume('(')) {
      ExprPtr e = expr();
      expect(')');
      return e;
    }
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      std::size_t used = 0;
      const double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::kNum;
      n->num = v;
      return n;
    }
    std::string name;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
      name += s_[pos_++];
    if (name.empty()) throw std::invalid_argument("expr: unexpected input");
    if (name == "cos" || name == "sin" || name == "exp") {
      expect('(');
      ExprPtr inner = expr();
      expect(')');
      const ExprNode::Kind k = name == "cos"   ? ExprNode::kCos
                               : name == "sin" ? ExprNode::kSin
                                               : ExprNode::kExp;
      return node(k, inner, nullptr);
    }
    int var = -1;
    if (name == "x" || name == "u") var = 0;
    else if (name == "y" || name == "v") var = 1;
    else if (name == "theta" || name == "t") var = 2;
    if (var < 0) throw std::invalid_argument("expr: unknown name '" + name + "'");
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::kVar;
    n->var = var;
    return n;
  }

  static ExprPtr node(ExprNode::Kind k, ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (!consume(c))
      throw std::invalid_argument(std::string("expr: expected '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

struct ExprField final : FieldImpl {
  std::string text;
  ExprPtr ast;
  explicit ExprField(const std::string& t)
      : text(t), ast(ExprParser(t).parse()) {}
  MJet eval(const FlowModel& m, const Vec3& p) const override {
    const Dual3 d = expr_eval(*ast, p);
    const Vec3 vel = m.velocity(p);
    return {d.v, d.d[0] * vel[0] + d.d[1] * vel[1] + d.d[2] * vel[2]};
  }
  std::string id() const override { return "expr(" + text + ")"; }
};

}  // namespace detail

inline ScalarField ScalarField::constant(double c) {
  return ScalarField(std::make_shared<detail::ConstField>(c));
}
inline ScalarField ScalarField::cos_theta(double a) {
  return ScalarField(std::make_shared<detail::CosThetaField>(a));
}
inline ScalarField ScalarField::expression(const std::string& text) {
  return ScalarField(std::make_shared<detail::ExprField>(text));
}
inline ScalarField field_product(const ScalarField& a, const ScalarField& b) {
  return ScalarField(std::make_shared<detail::ProductField>(a, b));
}
inline ScalarField field_exp(const ScalarField& a) {
  return ScalarField(std::make_shared<detail::ExpField>(a));
}
inline ScalarField field_affine(double c0, double c1, const ScalarField& a) {
  return ScalarField(std::make_shared<detail::AffineField>(c0, c1, a));
}

// field_id mini-grammar parser; unknown heads are rejected.
inline ScalarField ScalarField::parse(const std::string& field_id) {
  const auto fail = [&field_id]() -> ScalarField {
    throw std::invalid_argument("unknown field id: " + field_id);
  };
  const std::size_t open = field_id.find('(');
  if (open == std::string::npos || field_id.back() != ')') return fail();
  const std::string head = field_id.substr(0, open);
  const std::string body = field_id.substr(open + 1, field_id.size() - open - 2);
  const auto split_top = [&body]() {
    // split on top-level commas
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : body) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    return parts;
  };
  if (head == "const") return constant(std::stod(body));
  if (head == "cos_theta") return cos_theta(std::stod(body));
  if (head == "expr") return expression(body);
  if (head == "exp") return field_exp(parse(body));
  if (head == "prod") {
    const auto parts = split_top();
    if (parts.size() != 2) return fail();
    return field_product(parse(parts[0]), parse(parts[1]));
  }
  if (head == "affine") {
    const auto parts = split_top();
    if (parts.size() != 3) return fail();
    return field_affine(std::stod(parts[0]), std::stod(parts[1]),
                        parse(parts[2]));
  }
  return fail();
}

// Constructor heads accepted by ScalarField::parse on the given model.
inline std::set<std::string> scalar_field_library(const FlowModel&) {
  return {"const", "cos_theta", "prod", "exp", "affine", "expr"};
}

// Jet of a library field at p; unknown field_id raises invalid_argument.
inline Jet2 scalar_jet(const FlowModel& m, const std::string& field_id,
                       const Vec3& p) {
  return ScalarField::parse(field_id).jet2(m, p);
}

}  // namespace liv
