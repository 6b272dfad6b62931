#ifndef MAFOL_QCOMPLEX_HPP
#define MAFOL_QCOMPLEX_HPP

#include <quadmath.h>

#include <complex>

namespace mafol {

/// Minimal quad-precision complex value. The finite-difference oracle runs in
/// __float128 so that stencil roundoff stays far below the tolerances it
/// certifies; double would lose ~1e-4 absolute on fourth-order stencils at
/// h = 1e-3.
struct QComplex {
  __float128 re = 0;
  __float128 im = 0;

  QComplex() = default;
  QComplex(__float128 r, __float128 i) : re(r), im(i) {}
  explicit QComplex(double r) : re(r), im(0) {}
  explicit QComplex(std::complex<double> c) : re(c.real()), im(c.imag()) {}

  std::complex<double> to_double() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  friend QComplex operator+(QComplex a, QComplex b) { return {a.re + b.re, a.im + b.im}; }
  friend QComplex operator-(QComplex a, QComplex b) { return {a.re - b.re, a.im - b.im}; }
  friend QComplex operator-(QComplex a) { return {-a.re, -a.im}; }
  friend QComplex operator*(QComplex a, QComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend QComplex operator/(QComplex a, QComplex b) {
    __float128 d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  friend QComplex operator*(QComplex a, __float128 s) { return {a.re * s, a.im * s}; }
  friend QComplex operator/(QComplex a, __float128 s) { return {a.re / s, a.im / s}; }
};

inline QComplex qconj(QComplex a) { return {a.re, -a.im}; }
inline __float128 qabs(QComplex a) { return hypotq(a.re, a.im); }

inline QComplex qexp(QComplex a) {
  __float128 m = expq(a.re);
  return {m * cosq(a.im), m * sinq(a.im)};
}

inline QComplex qlog(QComplex a) { return {logq(qabs(a)), atan2q(a.im, a.re)}; }

inline QComplex qpow_int(QComplex a, int k) {
  QComplex out(1.0);
  QComplex base = a;
  int e = k >= 0 ? k : -k;
  while (e) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  if (k < 0) return QComplex(1.0) / out;
  return out;
}

}  // namespace mafol

#endif
