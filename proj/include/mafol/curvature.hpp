#ifndef MAFOL_CURVATURE_HPP
#define MAFOL_CURVATURE_HPP

#include "mafol/foliation.hpp"

namespace mafol::curv {

using fol::AdaptedChart;
using fol::Complex;
using fol::Point;
using fol::Tolerances;
using fol::TwistTensor;
using jet::MultiIndex;
using jet::WJet;

/// Normal-bundle Ricci data at a chart center. S_matrix comes from the
/// mixed second derivatives of log det H (fourth-order route); S_closed is
/// the third-derivative Gram form. The two must agree.
struct CurvatureReport {
  Eigen::MatrixXcd S_matrix;
  Eigen::MatrixXcd S_closed;
  double herm_defect = 0.0;
  double psd_margin = 0.0;         // smallest eigenvalue of S_matrix
  double psd_margin_closed = 0.0;  // smallest eigenvalue of S_closed
  double route_agreement = 0.0;    // max entrywise relative difference
  double identity_residual = 0.0;  // filled by twist_ricci_identity
};

CurvatureReport ricci_matrix(const AdaptedChart& chart);

/// max_j |S^{j jbar} - |L^j|^2| / (1 + |S^{j jbar}|); also records the
/// residual in the report.
double twist_ricci_identity(const AdaptedChart& chart, const TwistTensor& twist,
                            CurvatureReport& report);

struct FourthReport {
  double max_identity_rel = 0.0;  // residual over all (j,k,A,B), relative to term scale
  double max_vanishing_rel = 0.0; // |u_{j kbar A B}| when A or B is a leaf index
  int cases = 0;
};

FourthReport fourth_identity(const AdaptedChart& chart);

struct FifthReport {
  double max_rel = 0.0;
  int cases = 0;
};

FifthReport fifth_identity(const AdaptedChart& chart);

struct GapReport {
  int j = 0;
  bool skipped = false;
  double S_value = 0.0;
  double logS_laplacian = 0.0;
  double gap = 0.0;                // logS_laplacian - (2/p) S_value
  double equality_residual = 0.0;  // p = 1 only: |logS_laplacian - 2 S|
  double sj_residual = 0.0;        // first-derivative proof identity
  double sjj_residual = 0.0;       // second-derivative proof identity
};

GapReport curvature_gap(const AdaptedChart& chart, int j, double gap_threshold = 1e-8);

/// trace((A*A)^2) - (1/p) trace(A*A)^2; nonnegative for every matrix.
double trace_inequality_margin(const Eigen::MatrixXcd& A, int p);

struct ComparisonReport {
  std::vector<double> lambdas;               // per point
  double max_leafwise_residual = 0.0;        // max_j |Z^j(lambda)| / (1 + lambda)
  bool lambda_positive = true;
};

ComparisonReport compare_potentials(const dsl::PotentialSpec& u, const dsl::PotentialSpec& v,
                                    const std::vector<Point>& points, int order,
                                    const Tolerances& tol = {});

}  // namespace mafol::curv

#endif
