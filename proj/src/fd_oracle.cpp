#include "mafol/fd_oracle.hpp"

#include <map>
#include <vector>

namespace mafol::jet {

namespace {

struct FDContext {
  const RealEval* eval;
  std::vector<QComplex> base;
  __float128 h;
  int stencil;
  // evaluations memoized by the integer lattice offset (units of h per real
  // coordinate: x_1, y_1, ..., x_n, y_n)
  std::map<std::vector<int>, __float128> cache;

  __float128 value_at(const std::vector<int>& offset) {
    auto it = cache.find(offset);
    if (it != cache.end()) return it->second;
    std::vector<QComplex> pt = base;
    const int n = static_cast<int>(pt.size());
    for (int k = 0; k < n; ++k) {
      pt[k].re += h * offset[2 * k];
      pt[k].im += h * offset[2 * k + 1];
    }
    __float128 v = (*eval)(pt);
    cache.emplace(offset, v);
    return v;
  }
};

// remaining[2k] counts d/dz_k factors still to apply, remaining[2k+1] d/dzbar_k.
QComplex estimate(FDContext& ctx, std::vector<int>& remaining, std::vector<int>& offset) {
  int slot = -1;
  for (int s = 0; s < static_cast<int>(remaining.size()); ++s)
    if (remaining[s] > 0) {
      slot = s;
      break;
    }
  if (slot < 0) return {ctx.value_at(offset), 0};

  remaining[slot] -= 1;
  const int var = slot / 2;
  const bool anti = slot % 2 == 1;

  auto sample = [&](int axis, int step) {  // axis 0 = x_var, 1 = y_var
    offset[2 * var + axis] += step;
    QComplex v = estimate(ctx, remaining, offset);
    offset[2 * var + axis] -= step;
    return v;
  };
  auto diff = [&](int axis) {
    if (ctx.stencil == 2) return (sample(axis, 1) - sample(axis, -1)) / (2 * ctx.h);
    return (sample(axis, -2) - sample(axis, 2) + (sample(axis, 1) - sample(axis, -1)) * (__float128)8) /
           (12 * ctx.h);
  };

  QComplex dx = diff(0);
  QComplex dy = diff(1);
  remaining[slot] += 1;

  // d/dz = (dx - i dy)/2, d/dzbar = (dx + i dy)/2
  QComplex i_dy = QComplex(-dy.im, dy.re);
  return (anti ? dx + i_dy : dx - i_dy) / (__float128)2;
}

}  // namespace

std::complex<double> fd_oracle(const RealEval& eval, std::span<const std::complex<double>> center,
                               const FDRequest& req) {
  if (req.h <= 0) fail(ErrorKind::BadInput, "fd step must be positive");
  if (req.stencil != 2 && req.stencil != 4) fail(ErrorKind::BadInput, "fd stencil must be 2 or 4");
  if (req.target.order() > 4) fail(ErrorKind::OrderExceeded, "fd oracle supports order <= 4");
  const int n = req.target.vars();
  if (static_cast<int>(center.size()) != n) fail(ErrorKind::BadInput, "center size mismatch");

  FDContext ctx;
  ctx.eval = &eval;
  ctx.base.reserve(n);
  for (const auto& c : center) ctx.base.emplace_back(c);
  ctx.h = req.h;
  ctx.stencil = req.stencil;

  std::vector<int> remaining(2 * n, 0);
  for (int k = 0; k < n; ++k) {
    remaining[2 * k] = req.target.holo[k];
    remaining[2 * k + 1] = req.target.anti[k];
  }
  std::vector<int> offset(2 * n, 0);
  return estimate(ctx, remaining, offset).to_double();
}

}  // namespace mafol::jet
