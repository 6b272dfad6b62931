#include "mafol/foliation.hpp"

#include <algorithm>
#include <cmath>

namespace mafol::fol {

namespace {

void fix_phases(Eigen::MatrixXcd& V) {
  for (int c = 0; c < V.cols(); ++c) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < V.rows(); ++i) {
      double a = std::abs(V(i, c));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    Complex v = V(imax, c);
    if (best > 0) V.col(c) *= std::conj(v) / best;
  }
}

Eigen::MatrixXcd levi_entries(const WJet& jet) {
  const int n = jet.n();
  Eigen::MatrixXcd H(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      H(j, k) = jet.coeff(MultiIndex(n).dz(j).dzbar(k));
  return H;
}

double cond_number(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  return smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

LeviData levi_matrix(const WJet& jet, double rank_rel) {
  if (jet.order() < 2) fail(ErrorKind::OrderExceeded, "Levi matrix needs jet order >= 2");
  LeviData out;
  out.H_full = levi_entries(jet);
  out.herm_defect = (out.H_full - out.H_full.adjoint()).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.H_full);
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  fix_phases(out.eigenvectors);

  const double lmax = out.eigenvalues.maxCoeff();
  out.rank = 0;
  if (lmax > 0)
    for (int i = 0; i < out.eigenvalues.size(); ++i)
      if (out.eigenvalues[i] > rank_rel * lmax) ++out.rank;
  return out;
}

MaVerdict ma_verify(const LeviData& levi, int p, double tol) {
  const double scale = levi.eigenvalues.cwiseAbs().maxCoeff();
  if (levi.eigenvalues.minCoeff() < -tol * scale)
    fail(ErrorKind::NotPlurisubharmonic,
         "smallest Levi eigenvalue " + std::to_string(levi.eigenvalues.minCoeff()));
  MaVerdict v;
  v.rank = levi.rank;
  v.degenerate = levi.rank <= p;
  v.nondegenerate = levi.rank == p;
  return v;
}

namespace {

std::vector<WJet> chart_vars(const Point& q, int order, const Eigen::MatrixXcd& U,
                             const std::vector<Eigen::MatrixXcd>& flatten, int p) {
  const int n = static_cast<int>(q.size());
  const int nl = n - p;
  std::vector<Complex> origin(n, Complex(0, 0));
  std::vector<WJet> w;
  w.reserve(n);
  for (int k = 0; k < n; ++k) w.push_back(WJet::coordinate(n, order, origin, k));

  // slot jets: leaf slots are plain coordinates, normal slots get the
  // holomorphic quadratic correction w_l + 1/2 sum phi^l_{ja} w_j w_a
  std::vector<WJet> slots = w;
  if (!flatten.empty()) {
    for (int l = 0; l < p; ++l) {
      WJet quad = WJet::constant(n, order, origin, Complex(0, 0));
      for (int j = 0; j < nl; ++j)
        for (int a = 0; a < nl; ++a) {
          Complex c = flatten[l](j, a);
          if (c != Complex(0, 0)) quad += (w[j] * w[a]) * (0.5 * c);
        }
      slots[nl + l] += quad;
    }
  }

  std::vector<WJet> vars;
  vars.reserve(n);
  for (int k = 0; k < n; ++k) {
    WJet zk = WJet::constant(n, order, origin, q[k]);
    for (int j = 0; j < n; ++j) {
      Complex c = U(k, j);
      if (c != Complex(0, 0)) zk += slots[j] * c;
    }
    vars.push_back(std::move(zk));
  }
  return vars;
}

double block_defect_of(const Eigen::MatrixXcd& H, int p) {
  const int n = static_cast<int>(H.rows());
  const int nl = n - p;
  double defect = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j < nl || k < nl) defect = std::max(defect, std::abs(H(j, k)));
  return defect;
}

}  // namespace

AdaptedChart adapt_chart(const dsl::PotentialSpec& spec, const Point& q, int order,
                         const Tolerances& tol) {
  if (order < 3) fail(ErrorKind::OrderExceeded, "adapted chart needs order >= 3");
  dsl::require_guards(spec, q);
  WJet base = dsl::eval_jet(spec, q, order);
  LeviData levi = levi_matrix(base, tol.rank_rel);
  MaVerdict verdict = ma_verify(levi, spec.p, tol.rank_rel);
  if (!verdict.nondegenerate || !verdict.degenerate)
    fail(ErrorKind::RankMismatch,
         "Levi rank " + std::to_string(verdict.rank) + ", declared p = " + std::to_string(spec.p));

  AdaptedChart chart;
  chart.q = q;
  chart.n = spec.n;
  chart.p = spec.p;
  chart.order = order;
  chart.U = levi.eigenvectors;  // ascending eigenvalues: kernel first
  chart.ambient = levi;

  // First pass, affine only: read the leaf's second fundamental form
  // phi^l_{ja} = -sum_r u_{j rbar a} Hinv^{r l} from the rotated jet.
  auto vars0 = chart_vars(q, order, chart.U, {}, chart.p);
  WJet rotated = dsl::eval_jet(*spec.expr, vars0);
  FrameData blocks = frame_blocks(rotated, chart.p, tol.cond_limit);

  const int nl = chart.nleaf();
  chart.flatten.assign(chart.p, Eigen::MatrixXcd::Zero(nl, nl));
  for (int l = 0; l < chart.p; ++l)
    for (int j = 0; j < nl; ++j)
      for (int a = 0; a < nl; ++a) {
        Complex s(0, 0);
        for (int r = 0; r < chart.p; ++r)
          s += rotated.coeff(MultiIndex(chart.n).dz(j).dz(a).dzbar(chart.normal(r))) *
               blocks.Hinv(r, l);
        chart.flatten[l](j, a) = -s;
      }

  chart.vars = chart_vars(q, order, chart.U, chart.flatten, chart.p);
  chart.jet = dsl::eval_jet(*spec.expr, chart.vars);
  chart.block_defect = block_defect_of(levi_entries(chart.jet), chart.p);
  return chart;
}

WJet eval_in_chart(const AdaptedChart& chart, const dsl::ExprAst& expr) {
  return dsl::eval_jet(expr, chart.vars);
}

FrameData frame_blocks(const WJet& jet, int p, double cond_limit) {
  const int n = jet.n();
  const int nl = n - p;
  FrameData out;
  out.Lambda.resize(nl, p);
  out.H.resize(p, p);
  for (int j = 0; j < nl; ++j)
    for (int l = 0; l < p; ++l)
      out.Lambda(j, l) = jet.coeff(MultiIndex(n).dz(j).dzbar(nl + l));
  for (int r = 0; r < p; ++r)
    for (int l = 0; l < p; ++l)
      out.H(r, l) = jet.coeff(MultiIndex(n).dz(nl + r).dzbar(nl + l));
  out.cond = cond_number(out.H);
  if (!(out.cond <= cond_limit))
    fail(ErrorKind::IllConditionedH, "trailing block condition number " + std::to_string(out.cond));
  out.Hinv = out.H.inverse();
  out.B = -out.Lambda * out.Hinv;

  // annihilation of the Levi form by the frame vectors
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) full(j, k) = jet.coeff(MultiIndex(n).dz(j).dzbar(k));
  const double hscale = full.cwiseAbs().maxCoeff();
  double resid = 0.0;
  for (int j = 0; j < nl; ++j) {
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
    z(j) = 1.0;
    for (int l = 0; l < p; ++l) z(nl + l) = out.B(j, l);
    resid = std::max(resid, (full * z.conjugate()).cwiseAbs().maxCoeff());
  }
  out.annihilation_residual = hscale > 0 ? resid / hscale : resid;
  return out;
}

FrameData build_frame(const AdaptedChart& chart, const Tolerances& tol) {
  return frame_blocks(chart.jet, chart.p, tol.cond_limit);
}

JetMat trailing_block_jets(const WJet& jet, int p) {
  const int n = jet.n();
  const int nl = n - p;
  JetMat m;
  for (int r = 0; r < p; ++r) {
    std::vector<WJet> row;
    for (int l = 0; l < p; ++l)
      row.push_back(jet.shifted(MultiIndex(n).dz(nl + r).dzbar(nl + l)));
    m.push_back(std::move(row));
  }
  return m;
}

WJet jet_matrix_det(const JetMat& m) {
  const int p = static_cast<int>(m.size());
  switch (p) {
    case 1: return m[0][0];
    case 2: return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    case 3:
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
             m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    default: fail(ErrorKind::BadInput, "jet determinant supports p <= 3");
  }
}

JetMat jet_matrix_inverse(const JetMat& m) {
  const int p = static_cast<int>(m.size());
  JetMat a = m;  // working copy
  const WJet& model = m[0][0];
  JetMat inv(p, std::vector<WJet>(
                    p, WJet::constant(model.n(), model.order(), model.center(), Complex(0, 0))));
  for (int i = 0; i < p; ++i) inv[i][i] = inv[i][i] + Complex(1, 0);

  for (int col = 0; col < p; ++col) {
    int piv = col;
    double best = std::abs(a[col][col].value());
    for (int row = col + 1; row < p; ++row) {
      double v = std::abs(a[row][col].value());
      if (v > best) {
        best = v;
        piv = row;
      }
    }
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(inv[piv], inv[col]);
    }
    WJet pivot = a[col][col];
    for (int c = 0; c < p; ++c) {
      a[col][c] = a[col][c] / pivot;  // throws DivisionByNearZero on singular block
      inv[col][c] = inv[col][c] / pivot;
    }
    for (int row = 0; row < p; ++row) {
      if (row == col) continue;
      WJet f = a[row][col];
      if (f.max_abs_coeff() == 0.0) continue;
      for (int c = 0; c < p; ++c) {
        a[row][c] -= f * a[col][c];
        inv[row][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

TwistTensor twist_potential(const AdaptedChart& chart) {
  if (chart.order < 3) fail(ErrorKind::OrderExceeded, "twist needs jet order >= 3");
  const int n = chart.n;
  const int p = chart.p;
  const int nl = chart.nleaf();

  JetMat Hjets = trailing_block_jets(chart.jet, p);
  JetMat Hinv = jet_matrix_inverse(Hjets);

  // B = -Lambda Hinv as jets; C[j][m][l] = -dzbar_{normal m} B[j][l]
  TwistTensor t;
  t.nleaf = nl;
  t.p = p;
  t.comps.assign(static_cast<size_t>(nl) * p * p, Complex(0, 0));
  t.norm_sq.assign(nl, 0.0);

  for (int j = 0; j < nl; ++j) {
    std::vector<WJet> lam;
    for (int r = 0; r < p; ++r)
      lam.push_back(chart.jet.shifted(MultiIndex(n).dz(j).dzbar(chart.normal(r))));
    for (int l = 0; l < p; ++l) {
      WJet b = WJet::constant(lam[0].n(), lam[0].order(), lam[0].center(), Complex(0, 0));
      for (int r = 0; r < p; ++r) b += lam[r] * Hinv[r][l];
      b = -b;
      for (int m = 0; m < p; ++m)
        t.set(j, m, l, -b.coeff(MultiIndex(n).dzbar(chart.normal(m))));
    }
  }

  // Gram norm in the metrics induced by H and Hinv (matches the closed-form
  // S^{j jbar} of the curvature report).
  FrameData blocks = frame_blocks(chart.jet, p);
  auto u3 = [&](int j, int m, int s) {
    return chart.jet.coeff(MultiIndex(n).dz(j).dzbar(chart.normal(m)).dzbar(chart.normal(s)));
  };
  for (int j = 0; j < nl; ++j) {
    Complex acc(0, 0);
    for (int l = 0; l < p; ++l)
      for (int m = 0; m < p; ++m)
        for (int r = 0; r < p; ++r)
          for (int s = 0; s < p; ++s)
            acc += blocks.Hinv(l, m) * blocks.Hinv(r, s) * u3(j, m, s) * std::conj(u3(j, r, l));
    t.norm_sq[j] = acc.real();
  }

  t.max_abs = 0.0;
  for (const Complex& c : t.comps) t.max_abs = std::max(t.max_abs, std::abs(c));
  return t;
}

namespace {

struct FrameAtPoint {
  std::vector<std::vector<WJet>> jets;  // r x n order-1 jets of the coefficients
  Eigen::MatrixXcd Z;                   // n x r values
  Eigen::MatrixXcd Q;                   // unitary, first r columns span Z
};

FrameAtPoint frame_at(const dsl::FrameSpec& frame, const Point& q, double rank_rel) {
  const int n = frame.n;
  const int r = frame.rank;
  FrameAtPoint out;
  std::vector<WJet> coords;
  for (int k = 0; k < n; ++k) coords.push_back(WJet::coordinate(n, 1, q, k));
  out.jets.resize(r);
  out.Z.resize(n, r);
  for (int j = 0; j < r; ++j) {
    for (int k = 0; k < n; ++k) {
      out.jets[j].push_back(dsl::eval_jet(*frame.components[j][k], coords));
      out.Z(k, j) = out.jets[j][k].value();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.Z);
  if (svd.singularValues().minCoeff() <= rank_rel * svd.singularValues().maxCoeff())
    fail(ErrorKind::RankDeficient, "frame rows dependent at the point");

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(out.Z);
  out.Q = qr.householderQ();
  fix_phases(out.Q);
  return out;
}

}  // namespace

FramePointData twist_frame(const dsl::FrameSpec& frame, const Point& q, double rank_rel) {
  const int n = frame.n;
  const int r = frame.rank;
  const int p = n - r;
  FrameAtPoint fp = frame_at(frame, q, rank_rel);

  FramePointData out;
  out.frame = fp.Z;
  out.normal = fp.Q.rightCols(p);

  out.twist.nleaf = r;
  out.twist.p = p;
  out.twist.comps.assign(static_cast<size_t>(r) * p * p, Complex(0, 0));
  out.twist.norm_sq.assign(r, 0.0);

  for (int j = 0; j < r; ++j) {
    for (int m = 0; m < p; ++m) {
      // [Z^j, conj(W_m)] with W_m constant: -(conj(W_m) . dzbar)(a_jk) d_k
      Eigen::VectorXcd v(n);
      for (int k = 0; k < n; ++k) {
        Complex acc(0, 0);
        for (int i = 0; i < n; ++i)
          acc += std::conj(out.normal(i, m)) * fp.jets[j][k].coeff(MultiIndex::dzbar_of(n, i));
        v(k) = -acc;
      }
      // mod span{Z}: keep the coordinates along the orthonormal complement
      Eigen::VectorXcd coords = fp.Q.adjoint() * v;
      for (int l = 0; l < p; ++l) out.twist.set(j, m, l, coords(r + l));
    }
    double nrm = 0.0;
    for (int m = 0; m < p; ++m)
      for (int l = 0; l < p; ++l) nrm += std::norm(out.twist.at(j, m, l));
    out.twist.norm_sq[j] = nrm;
  }
  out.twist.max_abs = 0.0;
  for (const Complex& c : out.twist.comps)
    out.twist.max_abs = std::max(out.twist.max_abs, std::abs(c));
  return out;
}

double frobenius_residual(const dsl::FrameSpec& frame, const Point& q, double rank_rel) {
  const int n = frame.n;
  const int r = frame.rank;
  FrameAtPoint fp = frame_at(frame, q, rank_rel);

  Eigen::MatrixXcd Zon = fp.Q.leftCols(r);
  auto defect_10 = [&](const Eigen::VectorXcd& v) {
    return (v - Zon * (Zon.adjoint() * v)).norm();
  };

  auto dz = [&](int j, int k, int t) { return fp.jets[j][k].coeff(MultiIndex::dz_of(n, t)); };
  auto dzbar = [&](int j, int k, int t) { return fp.jets[j][k].coeff(MultiIndex::dzbar_of(n, t)); };
  auto val = [&](int j, int k) { return fp.jets[j][k].value(); };

  double worst = 0.0;
  for (int j = 0; j < r; ++j) {
    for (int k = 0; k < r; ++k) {
      if (j < k) {
        // [Z^j, Z^k]: pure (1,0)
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) {
          Complex acc(0, 0);
          for (int t = 0; t < n; ++t) acc += val(j, t) * dz(k, i, t) - val(k, t) * dz(j, i, t);
          v(i) = acc;
        }
        worst = std::max(worst, defect_10(v));
      }
      // [Z^j, conj(Z^k)]: (1,0) part -conj(Z^k)(a_j.), (0,1) part Z^j(conj a_k.)
      Eigen::VectorXcd w10(n), w01(n);
      for (int i = 0; i < n; ++i) {
        Complex a10(0, 0), a01(0, 0);
        for (int t = 0; t < n; ++t) {
          a10 -= std::conj(val(k, t)) * dzbar(j, i, t);
          a01 += val(j, t) * std::conj(dzbar(k, i, t));
        }
        w10(i) = a10;
        w01(i) = a01;
      }
      worst = std::max(worst, defect_10(w10));
      worst = std::max(worst, defect_10(w01.conjugate()));  // (0,1) part mod span{conj Z}
    }
  }
  return worst;
}

}  // namespace mafol::fol
