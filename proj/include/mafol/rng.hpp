#ifndef MAFOL_RNG_HPP
#define MAFOL_RNG_HPP

#include <complex>
#include <cstdint>

namespace mafol {

/// splitmix64; deterministic across platforms, which std::mt19937 +
/// std::uniform_real_distribution would not guarantee.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::complex<double> uniform_complex(double lo, double hi) {
    double re = uniform(lo, hi);
    double im = uniform(lo, hi);
    return {re, im};
  }

  /// Independent stream for a labeled subtask; parallel or reordered use
  /// reproduces serial results.
  Rng split(uint64_t label) const {
    Rng r(state_ ^ (0x9e3779b97f4a7c15ull * (label + 1)));
    r.next();
    return r;
  }

 private:
  uint64_t state_;
};

}  // namespace mafol

#endif
