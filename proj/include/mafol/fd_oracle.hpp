#ifndef MAFOL_FD_ORACLE_HPP
#define MAFOL_FD_ORACLE_HPP

#include <complex>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "mafol/jet.hpp"
#include "mafol/qcomplex.hpp"

namespace mafol::jet {

/// A single finite-difference query: which Wirtinger derivative to estimate,
/// at what step, with which central stencil (accuracy order 2 or 4).
struct FDRequest {
  MultiIndex target;
  double h = 1e-3;
  int stencil = 4;
};

/// Pointwise evaluator of the (real-valued) function under test, in quad
/// precision. Receives the full complex point.
using RealEval = std::function<__float128(std::span<const QComplex>)>;

/// Central-difference estimate of the Wirtinger derivative D^target u at
/// `center`, built by composing real-coordinate differences
/// (d/dz = (d/dx - i d/dy)/2 per variable). Ground truth independent of the
/// jet arithmetic path.
std::complex<double> fd_oracle(const RealEval& eval, std::span<const std::complex<double>> center,
                               const FDRequest& req);

}  // namespace mafol::jet

#endif
