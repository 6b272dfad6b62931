#include "mafol/curvature.hpp"

#include <cmath>

namespace mafol::curv {

namespace {

double min_eig_hermitian(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return es.eigenvalues().minCoeff();
}

}  // namespace

CurvatureReport ricci_matrix(const AdaptedChart& chart) {
  if (chart.order < 4) fail(ErrorKind::OrderExceeded, "Ricci matrix needs jet order >= 4");
  const int n = chart.n;
  const int p = chart.p;
  const int nl = chart.nleaf();
  const WJet& u = chart.jet;

  fol::JetMat Hjets = fol::trailing_block_jets(u, p);
  WJet logdet = log(fol::jet_matrix_det(Hjets));

  CurvatureReport out;
  out.S_matrix.resize(nl, nl);
  for (int j = 0; j < nl; ++j)
    for (int k = 0; k < nl; ++k)
      out.S_matrix(j, k) = logdet.coeff(MultiIndex(n).dz(j).dzbar(k));

  fol::FrameData blocks = fol::frame_blocks(u, p);
  auto u3 = [&](int j, int m, int s) {  // u_{j mbar sbar}, m,s normal
    return u.coeff(MultiIndex(n).dz(j).dzbar(chart.normal(m)).dzbar(chart.normal(s)));
  };
  out.S_closed.resize(nl, nl);
  for (int j = 0; j < nl; ++j)
    for (int k = 0; k < nl; ++k) {
      Complex acc(0, 0);
      for (int l = 0; l < p; ++l)
        for (int m = 0; m < p; ++m)
          for (int r = 0; r < p; ++r)
            for (int s = 0; s < p; ++s)
              acc += blocks.Hinv(l, m) * blocks.Hinv(r, s) * u3(j, m, s) * std::conj(u3(k, l, r));
      out.S_closed(j, k) = acc;
    }

  out.herm_defect = (out.S_matrix - out.S_matrix.adjoint()).cwiseAbs().maxCoeff();
  out.psd_margin = min_eig_hermitian(out.S_matrix);
  out.psd_margin_closed = min_eig_hermitian(out.S_closed);
  out.route_agreement = 0.0;
  for (int j = 0; j < nl; ++j)
    for (int k = 0; k < nl; ++k) {
      double d = std::abs(out.S_matrix(j, k) - out.S_closed(j, k));
      out.route_agreement = std::max(out.route_agreement, d / (1.0 + std::abs(out.S_matrix(j, k))));
    }
  return out;
}

double twist_ricci_identity(const AdaptedChart& chart, const TwistTensor& twist,
                            CurvatureReport& report) {
  double worst = 0.0;
  for (int j = 0; j < chart.nleaf(); ++j) {
    double s = report.S_matrix(j, j).real();
    double d = std::abs(s - twist.norm_sq[j]);
    worst = std::max(worst, d / (1.0 + std::abs(s)));
  }
  report.identity_residual = worst;
  return worst;
}

FourthReport fourth_identity(const AdaptedChart& chart) {
  if (chart.order < 4) fail(ErrorKind::OrderExceeded, "fourth identity needs jet order >= 4");
  const int n = chart.n;
  const int p = chart.p;
  const int nl = chart.nleaf();
  const WJet& u = chart.jet;
  fol::FrameData blocks = fol::frame_blocks(u, p);

  // direction d: 0..n-1 are dz_d, n..2n-1 are dzbar_{d-n}
  auto dir = [&](MultiIndex idx, int d) {
    if (d < n) idx.dz(d);
    else idx.dzbar(d - n);
    return idx;
  };
  auto is_leaf_dir = [&](int d) { return (d < n ? d : d - n) < nl; };

  FourthReport out;
  for (int j = 0; j < nl; ++j)
    for (int k = 0; k < nl; ++k)
      for (int A = 0; A < 2 * n; ++A)
        for (int B = 0; B < 2 * n; ++B) {
          MultiIndex base = MultiIndex(n).dz(j).dzbar(k);
          Complex lhs = u.coeff(dir(dir(base, A), B));
          Complex rhs(0, 0);
          double scale = std::abs(lhs);
          for (int r = 0; r < p; ++r)
            for (int l = 0; l < p; ++l) {
              Complex h = blocks.Hinv(r, l);
              Complex t1 = u.coeff(dir(MultiIndex(n).dz(j).dzbar(chart.normal(r)), A)) *
                           u.coeff(dir(MultiIndex(n).dz(chart.normal(l)).dzbar(k), B));
              Complex t2 = u.coeff(dir(MultiIndex(n).dz(j).dzbar(chart.normal(r)), B)) *
                           u.coeff(dir(MultiIndex(n).dz(chart.normal(l)).dzbar(k), A));
              rhs += h * (t1 + t2);
              scale += std::abs(h) * (std::abs(t1) + std::abs(t2));
            }
          double rel = std::abs(lhs - rhs) / (1.0 + scale);
          out.max_identity_rel = std::max(out.max_identity_rel, rel);
          if (is_leaf_dir(A) || is_leaf_dir(B))
            out.max_vanishing_rel = std::max(out.max_vanishing_rel, std::abs(lhs) / (1.0 + scale));
          ++out.cases;
        }
  return out;
}

FifthReport fifth_identity(const AdaptedChart& chart) {
  if (chart.order < 5) fail(ErrorKind::OrderExceeded, "fifth identity needs jet order >= 5");
  const int n = chart.n;
  const int p = chart.p;
  const int nl = chart.nleaf();
  const WJet& u = chart.jet;
  fol::FrameData blocks = fol::frame_blocks(u, p);
  const Eigen::MatrixXcd& Hi = blocks.Hinv;

  auto u3 = [&](int hol1, int bar1, int bar2) {  // ambient slot indices
    return u.coeff(MultiIndex(n).dz(hol1).dzbar(bar1).dzbar(bar2));
  };
  auto u3h = [&](int hol1, int hol2, int bar1) {
    return u.coeff(MultiIndex(n).dz(hol1).dz(hol2).dzbar(bar1));
  };

  FifthReport out;
  for (int j = 0; j < nl; ++j) {
    for (int m = 0; m < p; ++m)
      for (int s = 0; s < p; ++s) {
        const int nm = chart.normal(m), ns = chart.normal(s);
        Complex lhs = u.coeff(MultiIndex(n).dz(j, 2).dzbar(j).dzbar(nm).dzbar(ns));
        Complex rhs(0, 0);
        double scale = std::abs(lhs);
        auto add = [&](Complex term) {
          rhs += term;
          scale += std::abs(term);
        };
        for (int r = 0; r < p; ++r)
          for (int l = 0; l < p; ++l) {
            const int nr = chart.normal(r), nlr = chart.normal(l);
            // d_j of the inverse block, contracted
            for (int a = 0; a < p; ++a)
              for (int b = 0; b < p; ++b) {
                Complex dH = -Hi(r, a) * u3h(chart.normal(a), j, chart.normal(b)) * Hi(b, l);
                add(dH * (u3(j, nr, nm) * u3(nlr, j, ns) + u3(j, nr, ns) * u3(nlr, j, nm)));
              }
            // fourth-derivative factors that survive
            Complex f1 = u.coeff(MultiIndex(n).dz(j, 2).dzbar(nr).dzbar(nm));
            Complex f2 = u.coeff(MultiIndex(n).dz(j, 2).dzbar(nr).dzbar(ns));
            add(Hi(r, l) * (f1 * u3(nlr, j, ns) + f2 * u3(nlr, j, nm)));
            // substituted mixed fourth derivatives
            for (int a = 0; a < p; ++a)
              for (int b = 0; b < p; ++b) {
                const int na = chart.normal(a), nb = chart.normal(b);
                Complex inner1 = u3h(j, nlr, na) * u3(nb, j, ns) + u3(j, na, ns) * u3h(nb, nlr, j);
                Complex inner2 = u3h(j, nlr, na) * u3(nb, j, nm) + u3(j, na, nm) * u3h(nb, nlr, j);
                add(Hi(r, l) * Hi(a, b) * (u3(j, nr, nm) * inner1 + u3(j, nr, ns) * inner2));
              }
          }
        double rel = std::abs(lhs - rhs) / (1.0 + scale);
        out.max_rel = std::max(out.max_rel, rel);
        ++out.cases;
      }
  }
  return out;
}

namespace {

/// The ambient scalar S(z) = sum Hinv^{l mbar} Hinv^{r sbar} u_{mbar j sbar}
/// u_{l jbar r} as an order-2 jet in the chart.
WJet s_function_jet(const AdaptedChart& chart, int j) {
  const int n = chart.n;
  const int p = chart.p;
  const WJet& u = chart.jet;

  fol::JetMat Hjets = fol::trailing_block_jets(u, p);
  fol::JetMat Hinv = fol::jet_matrix_inverse(Hjets);
  for (auto& row : Hinv)
    for (auto& e : row) e = e.truncated(chart.order - 3);

  auto shift3 = [&](const MultiIndex& idx) { return u.shifted(idx); };
  WJet S = WJet::constant(Hinv[0][0].n(), Hinv[0][0].order(), Hinv[0][0].center(), Complex(0, 0));
  for (int l = 0; l < p; ++l)
    for (int m = 0; m < p; ++m)
      for (int r = 0; r < p; ++r)
        for (int s = 0; s < p; ++s) {
          WJet t1 = shift3(MultiIndex(n).dz(j).dzbar(chart.normal(m)).dzbar(chart.normal(s)));
          WJet t2 = shift3(MultiIndex(n).dz(chart.normal(l)).dz(chart.normal(r)).dzbar(j));
          S += Hinv[l][m] * Hinv[r][s] * t1 * t2;
        }
  return S;
}

}  // namespace

GapReport curvature_gap(const AdaptedChart& chart, int j, double gap_threshold) {
  if (chart.order < 5) fail(ErrorKind::OrderExceeded, "curvature gap needs jet order >= 5");
  const int n = chart.n;
  const int p = chart.p;
  GapReport out;
  out.j = j;

  WJet S = s_function_jet(chart, j);
  out.S_value = S.value().real();
  if (!(out.S_value > gap_threshold)) {
    out.skipped = true;
    return out;
  }

  WJet logS = log(S);
  out.logS_laplacian = logS.coeff(MultiIndex(n).dz(j).dzbar(j)).real();
  out.gap = out.logS_laplacian - (2.0 / p) * out.S_value;
  if (p == 1) out.equality_residual = std::abs(out.logS_laplacian - 2.0 * out.S_value);

  // Proof-step identities: S_j and S_{j jbar} from lower-order data.
  const WJet& u = chart.jet;
  fol::FrameData blocks = fol::frame_blocks(u, p);
  const Eigen::MatrixXcd& Hi = blocks.Hinv;
  auto u3 = [&](int hol, int m, int s) {
    return u.coeff(MultiIndex(n).dz(hol).dzbar(chart.normal(m)).dzbar(chart.normal(s)));
  };
  auto u3c = [&](int l, int r, int bar) {  // u_{l jbar r}, l,r normal
    return u.coeff(MultiIndex(n).dz(chart.normal(l)).dz(chart.normal(r)).dzbar(bar));
  };
  auto u4 = [&](int m, int s) {  // u_{j j mbar sbar}
    return u.coeff(MultiIndex(n).dz(j, 2).dzbar(chart.normal(m)).dzbar(chart.normal(s)));
  };

  Complex sj_formula(0, 0);
  for (int l = 0; l < p; ++l)
    for (int m = 0; m < p; ++m)
      for (int r = 0; r < p; ++r)
        for (int s = 0; s < p; ++s)
          sj_formula += Hi(l, m) * Hi(r, s) * u3c(l, r, j) * u4(m, s);
  Complex sj_ad = S.coeff(MultiIndex(n).dz(j));
  out.sj_residual = std::abs(sj_ad - sj_formula) / (1.0 + std::abs(sj_ad));

  Complex sjj_formula(0, 0);
  for (int l = 0; l < p; ++l)
    for (int m = 0; m < p; ++m)
      for (int r = 0; r < p; ++r)
        for (int s = 0; s < p; ++s)
          sjj_formula += Hi(l, m) * Hi(r, s) * u4(m, s) * std::conj(u4(l, r));
  for (int l = 0; l < p; ++l)
    for (int m = 0; m < p; ++m)
      for (int r = 0; r < p; ++r)
        for (int s = 0; s < p; ++s)
          for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
              for (int c = 0; c < p; ++c)
                for (int d = 0; d < p; ++d)
                  sjj_formula += 2.0 * Hi(l, m) * Hi(r, s) * Hi(a, b) * Hi(c, d) * u3(j, m, s) *
                                 u3(j, b, d) * std::conj(u3(j, l, a)) * std::conj(u3(j, r, c));
  Complex sjj_ad = S.coeff(MultiIndex(n).dz(j).dzbar(j));
  out.sjj_residual = std::abs(sjj_ad - sjj_formula) / (1.0 + std::abs(sjj_ad));
  return out;
}

double trace_inequality_margin(const Eigen::MatrixXcd& A, int p) {
  Eigen::MatrixXcd g = A.adjoint() * A;
  double t1 = (g * g).trace().real();
  double t2 = g.trace().real();
  return t1 - t2 * t2 / p;
}

ComparisonReport compare_potentials(const dsl::PotentialSpec& u, const dsl::PotentialSpec& v,
                                    const std::vector<Point>& points, int order,
                                    const Tolerances& tol) {
  if (u.n != v.n || u.p != v.p)
    fail(ErrorKind::NotSameFoliation, "potentials declare different (n, p)");
  const int n = u.n;
  const int p = u.p;
  const int nl = n - p;

  ComparisonReport out;
  for (const Point& q : points) {
    WJet ju = dsl::eval_jet(u, q, order);
    WJet jv = dsl::eval_jet(v, q, order);
    fol::LeviData lu = fol::levi_matrix(ju, tol.rank_rel);
    fol::LeviData lv = fol::levi_matrix(jv, tol.rank_rel);
    fol::MaVerdict mu = fol::ma_verify(lu, p, tol.rank_rel);
    fol::MaVerdict mv = fol::ma_verify(lv, p, tol.rank_rel);
    if (!mu.nondegenerate || !mv.nondegenerate || !mu.degenerate || !mv.degenerate)
      fail(ErrorKind::RankMismatch, "comparison point fails the rank-p conditions");

    // Levi kernels must agree: principal angles between the eigenspaces.
    Eigen::MatrixXcd Ku = lu.eigenvectors.leftCols(nl);
    Eigen::MatrixXcd Kv = lv.eigenvectors.leftCols(nl);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Ku.adjoint() * Kv);
    double cmin = svd.singularValues().minCoeff();
    double angle = std::acos(std::clamp(cmin, 0.0, 1.0));
    if (angle > tol.kernel_angle)
      fail(ErrorKind::NotSameFoliation, "Levi kernels differ, principal angle " + std::to_string(angle));

    fol::AdaptedChart chart = fol::adapt_chart(u, q, order, tol);
    WJet av = fol::eval_in_chart(chart, *v.expr);
    WJet det_u = fol::jet_matrix_det(fol::trailing_block_jets(chart.jet, p));
    WJet det_v = fol::jet_matrix_det(fol::trailing_block_jets(av, p));
    WJet lambda = det_u / det_v;

    Complex l0 = lambda.value();
    if (!(l0.real() > 0) || std::abs(l0.imag()) > 1e-9 * (1.0 + std::abs(l0)))
      out.lambda_positive = false;
    out.lambdas.push_back(l0.real());

    fol::FrameData blocks = fol::build_frame(chart, tol);
    for (int j = 0; j < nl; ++j) {
      Complex zl = lambda.coeff(MultiIndex(n).dz(j));
      for (int l = 0; l < p; ++l)
        zl += blocks.B(j, l) * lambda.coeff(MultiIndex(n).dz(chart.normal(l)));
      out.max_leafwise_residual =
          std::max(out.max_leafwise_residual, std::abs(zl) / (1.0 + std::abs(l0)));
    }
  }
  return out;
}

}  // namespace mafol::curv
