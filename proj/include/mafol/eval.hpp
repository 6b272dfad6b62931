#ifndef MAFOL_EVAL_HPP
#define MAFOL_EVAL_HPP

#include <complex>
#include <span>
#include <vector>

#include "mafol/ast.hpp"
#include "mafol/jet.hpp"
#include "mafol/qcomplex.hpp"

namespace mafol::dsl {

using jet::Complex;
using jet::WJet;

/// Evaluate an expression over arbitrary variable jets (the variables need
/// not be coordinate jets; chart substitutions pass polynomial jets here).
WJet eval_jet(const ExprAst& ast, std::span<const WJet> vars);

/// Jet of the potential at `center`: coordinate jets for the variables,
/// guards checked first (GuardViolated).
WJet eval_jet(const PotentialSpec& spec, std::span<const Complex> center, int order);

/// Pointwise evaluation.
Complex eval_point(const ExprAst& ast, std::span<const Complex> vars);
QComplex eval_point_q(const ExprAst& ast, std::span<const QComplex> vars);

/// True when every guard is strictly positive at the point.
bool guards_ok(const PotentialSpec& spec, std::span<const Complex> center);
void require_guards(const PotentialSpec& spec, std::span<const Complex> center);

/// |Im u| <= tol * (1 + |u|) at the point.
bool is_real_at(const ExprAst& ast, std::span<const Complex> center, double tol = 1e-9);

}  // namespace mafol::dsl

#endif
