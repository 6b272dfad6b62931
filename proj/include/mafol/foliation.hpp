#ifndef MAFOL_FOLIATION_HPP
#define MAFOL_FOLIATION_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mafol/eval.hpp"
#include "mafol/jet.hpp"

namespace mafol::fol {

using jet::Complex;
using jet::MultiIndex;
using jet::WJet;
using Point = std::vector<Complex>;

/// Numerical thresholds shared across the pipeline; echoed into reports.
struct Tolerances {
  double rank_rel = 1e-8;        // eigenvalue cut, relative to the largest
  double identity_rel = 1e-8;    // derivative identity residuals
  double cond_limit = 1e8;       // trailing block conditioning
  double gap_threshold = 1e-8;   // skip curvature gap below this S
  double kernel_angle = 1e-6;    // principal angle agreement of Levi kernels
  double integrability = 1e-8;   // Frobenius residual cut for frames
};

struct LeviData {
  Eigen::MatrixXcd H_full;        // u_{j kbar}
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // unitary columns, phase-fixed
  int rank = 0;
  double herm_defect = 0.0;
};

LeviData levi_matrix(const WJet& jet, double rank_rel = 1e-8);

struct MaVerdict {
  int rank = 0;
  bool degenerate = false;     // (dd^c u)^{p+1} = 0, i.e. rank <= p
  bool nondegenerate = false;  // (dd^c u)^p != 0, i.e. rank = p
};

/// Throws NotPlurisubharmonic when an eigenvalue is below -tol * scale.
MaVerdict ma_verify(const LeviData& levi, int p, double tol);

/// Chart at q: unitary U aligns the Levi kernel with the first n-p slots;
/// a holomorphic quadratic correction flattens the leaf through second order
/// so the on-leaf derivative identities hold at the center even when the
/// leaf is curved. The correction vanishes identically for affine leaves.
struct AdaptedChart {
  Point q;
  int n = 0;
  int p = 0;
  int order = 0;
  Eigen::MatrixXcd U;
  std::vector<Eigen::MatrixXcd> flatten;  // per normal slot l: (n-p)x(n-p) quadratic coeffs
  std::vector<WJet> vars;                 // coordinate jets of the chart map
  WJet jet;                               // adapted jet of u at w = 0
  LeviData ambient;                       // Levi data at q, original coordinates
  double block_defect = 0.0;              // max off-structure Levi entry at 0

  int nleaf() const { return n - p; }
  int normal(int l) const { return n - p + l; }
};

AdaptedChart adapt_chart(const dsl::PotentialSpec& spec, const Point& q, int order,
                         const Tolerances& tol = {});

/// Evaluate another expression through the same chart map (shared adapted
/// coordinates for potential comparison).
WJet eval_in_chart(const AdaptedChart& chart, const dsl::ExprAst& expr);

struct FrameData {
  Eigen::MatrixXcd Lambda;  // (n-p) x p block u_{j, normal bar}
  Eigen::MatrixXcd H;       // trailing p x p block
  Eigen::MatrixXcd Hinv;
  Eigen::MatrixXcd B;       // -Lambda Hinv; frame Z^j = d_j + sum_l B(j,l) d_{normal l}
  double cond = 0.0;
  double annihilation_residual = 0.0;  // relative to |H_full|
};

/// Blocks read off any jet with invertible trailing block (no adaptation
/// assumed); build_frame adds the adapted-chart checks.
FrameData frame_blocks(const WJet& jet, int p, double cond_limit = 1e8);
FrameData build_frame(const AdaptedChart& chart, const Tolerances& tol = {});

/// Bedford-Burns twist components C[j][m][l]: the coefficient along the l-th
/// normal direction of [Z^j, conj(W_m)] mod (leaf tangent + (0,1) vectors).
struct TwistTensor {
  int nleaf = 0;
  int p = 0;
  std::vector<Complex> comps;    // [(j*p + m)*p + l]
  std::vector<double> norm_sq;   // per j, Gram form in the H / Hinv metrics
  double max_abs = 0.0;

  Complex at(int j, int m, int l) const { return comps[(j * p + m) * p + l]; }
  void set(int j, int m, int l, Complex v) { comps[(j * p + m) * p + l] = v; }
};

TwistTensor twist_potential(const AdaptedChart& chart);

struct FramePointData {
  Eigen::MatrixXcd frame;   // n x r, columns Z^j(q)
  Eigen::MatrixXcd normal;  // n x p orthonormal complement, phase-fixed
  TwistTensor twist;        // norms here are Euclidean in the chosen bases
};

FramePointData twist_frame(const dsl::FrameSpec& frame, const Point& q, double rank_rel = 1e-8);

/// Involutivity defect of span{Z} + span{conj Z} at q: the largest norm of a
/// bracket component sticking out of the span. Zero (to roundoff) iff the
/// induced real distribution is integrable at q.
double frobenius_residual(const dsl::FrameSpec& frame, const Point& q, double rank_rel = 1e-8);

// --- small matrices of jets -------------------------------------------------

using JetMat = std::vector<std::vector<WJet>>;

/// Trailing p x p Levi block as jets of order jet.order() - 2.
JetMat trailing_block_jets(const WJet& jet, int p);
WJet jet_matrix_det(const JetMat& m);
/// Gauss-Jordan with pivoting on constant terms; valid exactly when the
/// constant-term matrix is invertible.
JetMat jet_matrix_inverse(const JetMat& m);

}  // namespace mafol::fol

#endif
