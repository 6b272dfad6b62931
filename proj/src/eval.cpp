#include "mafol/eval.hpp"

#include <cmath>
#include <sstream>

namespace mafol::dsl {

WJet eval_jet(const ExprAst& ast, std::span<const WJet> vars) {
  const WJet& model = vars[0];
  auto constant = [&](Complex v) {
    return WJet::constant(model.n(), model.order(), model.center(), v);
  };
  switch (ast.kind) {
    case NodeKind::Number: return constant(Complex(ast.number, 0));
    case NodeKind::ImagUnit: return constant(Complex(0, 1));
    case NodeKind::Var: return vars[ast.var];
    case NodeKind::Add: return eval_jet(*ast.lhs, vars) + eval_jet(*ast.rhs, vars);
    case NodeKind::Sub: return eval_jet(*ast.lhs, vars) - eval_jet(*ast.rhs, vars);
    case NodeKind::Mul: return eval_jet(*ast.lhs, vars) * eval_jet(*ast.rhs, vars);
    case NodeKind::Div: return eval_jet(*ast.lhs, vars) / eval_jet(*ast.rhs, vars);
    case NodeKind::Neg: return -eval_jet(*ast.lhs, vars);
    case NodeKind::IntPow: return int_pow(eval_jet(*ast.lhs, vars), ast.exponent);
    case NodeKind::Call: {
      WJet a = eval_jet(*ast.lhs, vars);
      switch (ast.func) {
        case Func::Conj: return conj(a);
        case Func::Re: return real_part(a);
        case Func::Im: return imag_part(a);
        case Func::Abs2: return a * conj(a);
        case Func::Exp: return exp(a);
        case Func::Log: return log(a);
      }
    }
  }
  fail(ErrorKind::BadInput, "corrupt AST");
}

WJet eval_jet(const PotentialSpec& spec, std::span<const Complex> center, int order) {
  require_guards(spec, center);
  std::vector<WJet> vars;
  vars.reserve(spec.n);
  for (int k = 0; k < spec.n; ++k) vars.push_back(WJet::coordinate(spec.n, order, center, k));
  return eval_jet(*spec.expr, vars);
}

namespace {

template <typename C>
struct Ops;

template <>
struct Ops<Complex> {
  static Complex from_real(double v) { return {v, 0}; }
  static Complex imag_unit() { return {0, 1}; }
  static Complex conj_(Complex a) { return std::conj(a); }
  static Complex re_(Complex a) { return {a.real(), 0}; }
  static Complex im_(Complex a) { return {a.imag(), 0}; }
  static Complex exp_(Complex a) { return std::exp(a); }
  static Complex log_(Complex a) { return std::log(a); }
  static Complex pow_(Complex a, int k) { return std::pow(a, k); }
};

template <>
struct Ops<QComplex> {
  static QComplex from_real(double v) { return QComplex(v); }
  static QComplex imag_unit() { return {0, 1}; }
  static QComplex conj_(QComplex a) { return qconj(a); }
  static QComplex re_(QComplex a) { return {a.re, 0}; }
  static QComplex im_(QComplex a) { return {a.im, 0}; }
  static QComplex exp_(QComplex a) { return qexp(a); }
  static QComplex log_(QComplex a) { return qlog(a); }
  static QComplex pow_(QComplex a, int k) { return qpow_int(a, k); }
};

template <typename C>
C eval_rec(const ExprAst& ast, std::span<const C> vars) {
  using O = Ops<C>;
  switch (ast.kind) {
    case NodeKind::Number: return O::from_real(ast.number);
    case NodeKind::ImagUnit: return O::imag_unit();
    case NodeKind::Var: return vars[ast.var];
    case NodeKind::Add: return eval_rec(*ast.lhs, vars) + eval_rec(*ast.rhs, vars);
    case NodeKind::Sub: return eval_rec(*ast.lhs, vars) - eval_rec(*ast.rhs, vars);
    case NodeKind::Mul: return eval_rec(*ast.lhs, vars) * eval_rec(*ast.rhs, vars);
    case NodeKind::Div: return eval_rec(*ast.lhs, vars) / eval_rec(*ast.rhs, vars);
    case NodeKind::Neg: return -eval_rec(*ast.lhs, vars);
    case NodeKind::IntPow: return O::pow_(eval_rec(*ast.lhs, vars), ast.exponent);
    case NodeKind::Call: {
      C a = eval_rec(*ast.lhs, vars);
      switch (ast.func) {
        case Func::Conj: return O::conj_(a);
        case Func::Re: return O::re_(a);
        case Func::Im: return O::im_(a);
        case Func::Abs2: return a * O::conj_(a);
        case Func::Exp: return O::exp_(a);
        case Func::Log: return O::log_(a);
      }
    }
  }
  fail(ErrorKind::BadInput, "corrupt AST");
}

}  // namespace

Complex eval_point(const ExprAst& ast, std::span<const Complex> vars) {
  return eval_rec<Complex>(ast, vars);
}

QComplex eval_point_q(const ExprAst& ast, std::span<const QComplex> vars) {
  return eval_rec<QComplex>(ast, vars);
}

bool guards_ok(const PotentialSpec& spec, std::span<const Complex> center) {
  for (const AstPtr& g : spec.guards) {
    Complex v = eval_point(*g, center);
    if (!(v.real() > 0)) return false;
  }
  return true;
}

void require_guards(const PotentialSpec& spec, std::span<const Complex> center) {
  for (const AstPtr& g : spec.guards) {
    Complex v = eval_point(*g, center);
    if (!(v.real() > 0)) {
      std::ostringstream os;
      os << "guard " << pretty_print(*g) << " is " << v.real() << " at the point";
      fail(ErrorKind::GuardViolated, os.str());
    }
  }
}

bool is_real_at(const ExprAst& ast, std::span<const Complex> center, double tol) {
  Complex v = eval_point(ast, center);
  return std::abs(v.imag()) <= tol * (1.0 + std::abs(v));
}

}  // namespace mafol::dsl
