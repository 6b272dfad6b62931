#ifndef MAFOL_JET_HPP
#define MAFOL_JET_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mafol/errors.hpp"

namespace mafol::jet {

using Complex = std::complex<double>;

/// Differentiation record in the 2n Wirtinger variables: holo[k] counts
/// d/dz_k applications, anti[k] counts d/dzbar_k. Mixed partials commute,
/// so a MultiIndex is an unordered record.
struct MultiIndex {
  std::vector<int> holo;
  std::vector<int> anti;

  MultiIndex() = default;
  explicit MultiIndex(int n) : holo(n, 0), anti(n, 0) {}

  int vars() const { return static_cast<int>(holo.size()); }
  int order() const;
  /// Swap holo and anti slots (the index of the conjugated derivative).
  MultiIndex conjugated() const { return MultiIndex{anti, holo}; }
  MultiIndex plus(const MultiIndex& other) const;

  MultiIndex& dz(int k, int count = 1) {
    holo.at(k) += count;
    return *this;
  }
  MultiIndex& dzbar(int k, int count = 1) {
    anti.at(k) += count;
    return *this;
  }
  static MultiIndex dz_of(int n, int k) { return MultiIndex(n).dz(k); }
  static MultiIndex dzbar_of(int n, int k) { return MultiIndex(n).dzbar(k); }

  bool operator==(const MultiIndex&) const = default;
  std::string str() const;
};

/// Shared immutable enumeration of all multi-indices of total order <= K over
/// 2n Wirtinger slots, in graded-lex order, with the Leibniz convolution
/// triples precomputed. Triple lists for an index and its conjugate are exact
/// mirror images, which keeps products of conjugate-symmetric jets
/// conjugate-symmetric to the last bit.
class IndexTable {
 public:
  struct Triple {
    int a;     // rank of alpha
    int b;     // rank of gamma - alpha
    double w;  // product of per-slot binomial coefficients
  };

  static std::shared_ptr<const IndexTable> get(int n, int order);

  int n() const { return n_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(packed_.size()); }

  int rank_of(const MultiIndex& idx) const;  // throws OrderExceeded
  MultiIndex index(int rank) const;
  int degree(int rank) const { return degree_[rank]; }
  int swap_rank(int rank) const { return swap_[rank]; }
  const std::vector<Triple>& triples(int rank) const { return triples_[rank]; }

  /// Rank of idx + offset, or -1 when the sum exceeds the order.
  int rank_of_sum(int rank, const MultiIndex& offset) const;

 private:
  IndexTable(int n, int order);

  int n_ = 0;
  int order_ = 0;
  std::vector<uint64_t> packed_;  // graded-lex; one byte per slot
  std::vector<int> degree_;
  std::vector<int> swap_;
  std::vector<std::vector<Triple>> triples_;
  // packed key -> rank
  std::vector<std::pair<uint64_t, int>> lookup_;  // sorted by key

  int find(uint64_t key) const;
  uint64_t pack(const MultiIndex&) const;
};

/// Truncated Taylor expansion of a scalar function of (z, zbar) at a point.
/// Coefficients are the raw partial derivatives D^alpha u(center), not
/// divided by factorials; multiplication carries the binomial weights.
class WJet {
 public:
  WJet(int n, int order, std::vector<Complex> center);

  static WJet constant(int n, int order, std::span<const Complex> center, Complex value);
  static WJet coordinate(int n, int order, std::span<const Complex> center, int k);

  int n() const { return table_->n(); }
  int order() const { return table_->order(); }
  const std::vector<Complex>& center() const { return center_; }
  const IndexTable& table() const { return *table_; }
  std::shared_ptr<const IndexTable> table_ptr() const { return table_; }

  Complex value() const { return coeffs_[0]; }
  Complex coeff(const MultiIndex& idx) const { return coeffs_[table_->rank_of(idx)]; }
  Complex coeff_at(int rank) const { return coeffs_[rank]; }
  void set_coeff(const MultiIndex& idx, Complex v) { coeffs_[table_->rank_of(idx)] = v; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  /// Jet of the derivative function D^idx u, of order K - |idx|.
  WJet shifted(const MultiIndex& idx) const;
  WJet truncated(int new_order) const;

  /// max over index pairs of |coeff(a,b) - conj(coeff(b,a))|; zero for the
  /// jet of a real-valued function up to roundoff.
  double reality_defect() const;
  double max_abs_coeff() const;

  WJet operator-() const;
  WJet& operator+=(const WJet& rhs);
  WJet& operator-=(const WJet& rhs);

  friend WJet operator+(WJet a, const WJet& b) { return a += b; }
  friend WJet operator-(WJet a, const WJet& b) { return a -= b; }
  friend WJet operator*(const WJet& a, const WJet& b);
  friend WJet operator/(const WJet& a, const WJet& b);
  friend WJet operator*(const WJet& a, Complex s);
  friend WJet operator*(Complex s, const WJet& a) { return a * s; }
  friend WJet operator+(const WJet& a, Complex s);
  friend WJet operator-(const WJet& a, Complex s) { return a + (-s); }

  friend WJet conj(const WJet& a);
  friend WJet real_part(const WJet& a);
  friend WJet imag_part(const WJet& a);
  friend WJet exp(const WJet& a);
  friend WJet log(const WJet& a);
  friend WJet int_pow(const WJet& a, int k);

 private:
  std::shared_ptr<const IndexTable> table_;
  std::vector<Complex> center_;
  std::vector<Complex> coeffs_;

  static void require_compatible(const WJet& a, const WJet& b);
};

/// Raw partial derivative lookup, spelled as an operation for clarity at call
/// sites mirroring the derivative symbols u_{j kbar A B ...}.
inline Complex derivative_at(const WJet& jet, const MultiIndex& idx) { return jet.coeff(idx); }

}  // namespace mafol::jet

#endif
