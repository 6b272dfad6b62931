#ifndef MAFOL_AST_HPP
#define MAFOL_AST_HPP

#include <memory>
#include <string>
#include <vector>

#include "mafol/errors.hpp"

namespace mafol::dsl {

enum class NodeKind { Number, ImagUnit, Var, Add, Sub, Mul, Div, Neg, IntPow, Call };

enum class Func { Conj, Re, Im, Abs2, Exp, Log };

const char* func_name(Func f);

/// Immutable expression tree over z_1..z_n, shared freely.
struct ExprAst;
using AstPtr = std::shared_ptr<const ExprAst>;

struct ExprAst {
  NodeKind kind;
  double number = 0.0;  // Number
  int var = 0;          // Var, 0-based
  int exponent = 0;     // IntPow
  Func func = Func::Conj;
  AstPtr lhs, rhs;  // children; unary nodes use lhs only

  static AstPtr make_number(double v);
  static AstPtr make_imag();
  static AstPtr make_var(int k);
  static AstPtr make_binary(NodeKind kind, AstPtr a, AstPtr b);
  static AstPtr make_neg(AstPtr a);
  static AstPtr make_pow(AstPtr a, int e);
  static AstPtr make_call(Func f, AstPtr a);
};

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | factor
///   factor := base ('^' int)?
///   base   := number | 'i' | 'z'int | '(' expr ')' | ident '(' expr ')'
/// with ident in {conj, re, im, abs2, exp, log}; whitespace insensitive.
AstPtr parse_expr(const std::string& text, int n);

std::string pretty_print(const ExprAst& ast);

bool ast_equal(const ExprAst& a, const ExprAst& b);

/// Complex literal for CLI points: forms like "1", "i", "-2.5i", "0.3+0.1i",
/// "1e-3-2i". Shares the DSL number lexer.
std::complex<double> parse_complex_literal(const std::string& text);

/// Definition of a potential u(z, zbar) together with its declared
/// codimension and positivity guards.
struct PotentialSpec {
  int n = 0;
  int p = 0;
  AstPtr expr;
  std::vector<AstPtr> guards;
};

/// Tangent frame Z^j = sum_k a_jk(z, zbar) d/dz_k, one row per field.
struct FrameSpec {
  int n = 0;
  int rank = 0;  // r = n - p
  std::vector<std::vector<AstPtr>> components;  // rank x n

  int p() const { return n - rank; }
};

PotentialSpec parse_potential(const std::string& text, int n, int p);
FrameSpec parse_frame(const std::vector<std::string>& rows, int n);

}  // namespace mafol::dsl

#endif
