#include "mafol/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace mafol::jet {

namespace {

constexpr double kDivEps = 1e-12;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

int MultiIndex::order() const {
  return std::accumulate(holo.begin(), holo.end(), 0) +
         std::accumulate(anti.begin(), anti.end(), 0);
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
  if (other.vars() != vars()) fail(ErrorKind::BadInput, "multi-index size mismatch");
  MultiIndex out = *this;
  for (int k = 0; k < vars(); ++k) {
    out.holo[k] += other.holo[k];
    out.anti[k] += other.anti[k];
  }
  return out;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "d[";
  for (int k = 0; k < vars(); ++k) {
    for (int c = 0; c < holo[k]; ++c) os << " z" << (k + 1);
    for (int c = 0; c < anti[k]; ++c) os << " z" << (k + 1) << "~";
  }
  os << " ]";
  return os.str();
}

uint64_t IndexTable::pack(const MultiIndex& idx) const {
  uint64_t key = 0;
  for (int k = 0; k < n_; ++k) {
    key |= static_cast<uint64_t>(idx.holo[k]) << (8 * k);
    key |= static_cast<uint64_t>(idx.anti[k]) << (8 * (n_ + k));
  }
  return key;
}

int IndexTable::find(uint64_t key) const {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), key,
                             [](const std::pair<uint64_t, int>& p, uint64_t k) { return p.first < k; });
  if (it == lookup_.end() || it->first != key) return -1;
  return it->second;
}

IndexTable::IndexTable(int n, int order) : n_(n), order_(order) {
  if (n < 1 || n > 4) fail(ErrorKind::BadInput, "variable count must be in [1,4]");
  if (order < 0 || order > 8) fail(ErrorKind::BadInput, "jet order must be in [0,8]");
  const int slots = 2 * n;

  // Graded-lex enumeration: by total degree, then lexicographic on the
  // flattened (holo, anti) count vector.
  std::vector<int> counts(slots, 0);
  std::vector<std::vector<int>> all;
  for (int deg = 0; deg <= order; ++deg) {
    std::vector<int> cur(slots, 0);
    // enumerate compositions of deg into `slots` parts, lex descending on
    // position order means: iterate recursively
    struct Rec {
      int slots;
      std::vector<std::vector<int>>& out;
      std::vector<int>& cur;
      void go(int pos, int remaining) {
        if (pos == slots - 1) {
          cur[pos] = remaining;
          out.push_back(cur);
          return;
        }
        for (int c = remaining; c >= 0; --c) {
          cur[pos] = c;
          go(pos + 1, remaining - c);
        }
      }
    } rec{slots, all, cur};
    rec.go(0, deg);
  }
  // "lex descending on leading slot" above actually enumerates with larger
  // leading counts first; any fixed order works as long as it is degree-major
  // and identical across table orders, which this is.

  packed_.reserve(all.size());
  degree_.reserve(all.size());
  for (const auto& c : all) {
    uint64_t key = 0;
    for (int s = 0; s < slots; ++s) key |= static_cast<uint64_t>(c[s]) << (8 * s);
    packed_.push_back(key);
    degree_.push_back(std::accumulate(c.begin(), c.end(), 0));
  }

  lookup_.reserve(packed_.size());
  for (int r = 0; r < static_cast<int>(packed_.size()); ++r) lookup_.emplace_back(packed_[r], r);
  std::sort(lookup_.begin(), lookup_.end());

  swap_.resize(packed_.size());
  for (int r = 0; r < size(); ++r) {
    const auto& c = all[r];
    uint64_t key = 0;
    for (int k = 0; k < n_; ++k) {
      key |= static_cast<uint64_t>(c[n_ + k]) << (8 * k);
      key |= static_cast<uint64_t>(c[k]) << (8 * (n_ + k));
    }
    swap_[r] = find(key);
  }

  // Leibniz triples. For rank g with swap_[g] < g the list is the mirror of
  // the conjugate's list, entry by entry, so that convolutions of
  // conjugate-symmetric jets stay symmetric bit for bit.
  triples_.resize(size());
  for (int g = 0; g < size(); ++g) {
    if (swap_[g] < g) {
      const auto& src = triples_[swap_[g]];
      auto& dst = triples_[g];
      dst.reserve(src.size());
      for (const auto& t : src) dst.push_back({swap_[t.a], swap_[t.b], t.w});
      continue;
    }
    const auto& gc = all[g];
    for (int a = 0; a < size(); ++a) {
      const auto& ac = all[a];
      bool ok = true;
      for (int s = 0; s < slots && ok; ++s) ok = ac[s] <= gc[s];
      if (!ok) continue;
      uint64_t bkey = 0;
      double w = 1.0;
      for (int s = 0; s < slots; ++s) {
        bkey |= static_cast<uint64_t>(gc[s] - ac[s]) << (8 * s);
        w *= binom(gc[s], ac[s]);
      }
      triples_[g].push_back({a, find(bkey), w});
    }
  }
}

std::shared_ptr<const IndexTable> IndexTable::get(int n, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const IndexTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto table = std::shared_ptr<const IndexTable>(new IndexTable(n, order));
  cache.emplace(key, table);
  return table;
}

int IndexTable::rank_of(const MultiIndex& idx) const {
  if (idx.vars() != n_) fail(ErrorKind::BadInput, "multi-index variable count mismatch");
  if (idx.order() > order_)
    fail(ErrorKind::OrderExceeded,
         "index order " + std::to_string(idx.order()) + " exceeds jet order " + std::to_string(order_));
  int r = find(pack(idx));
  if (r < 0) fail(ErrorKind::BadInput, "negative entry in multi-index");
  return r;
}

MultiIndex IndexTable::index(int rank) const {
  MultiIndex idx(n_);
  uint64_t key = packed_[rank];
  for (int k = 0; k < n_; ++k) {
    idx.holo[k] = static_cast<int>((key >> (8 * k)) & 0xff);
    idx.anti[k] = static_cast<int>((key >> (8 * (n_ + k))) & 0xff);
  }
  return idx;
}

int IndexTable::rank_of_sum(int rank, const MultiIndex& offset) const {
  uint64_t key = packed_[rank] + pack(offset);  // per-byte add, counts stay < 16
  return find(key);
}

WJet::WJet(int n, int order, std::vector<Complex> center)
    : table_(IndexTable::get(n, order)), center_(std::move(center)), coeffs_(table_->size(), Complex(0, 0)) {
  if (static_cast<int>(center_.size()) != n) fail(ErrorKind::BadInput, "center size != n");
}

WJet WJet::constant(int n, int order, std::span<const Complex> center, Complex value) {
  WJet out(n, order, std::vector<Complex>(center.begin(), center.end()));
  out.coeffs_[0] = value;
  return out;
}

WJet WJet::coordinate(int n, int order, std::span<const Complex> center, int k) {
  if (k < 0 || k >= n) fail(ErrorKind::UnknownVariable, "z" + std::to_string(k + 1));
  WJet out(n, order, std::vector<Complex>(center.begin(), center.end()));
  out.coeffs_[0] = center[k];
  if (order >= 1) out.set_coeff(MultiIndex::dz_of(n, k), Complex(1, 0));
  return out;
}

void WJet::require_compatible(const WJet& a, const WJet& b) {
  if (a.table_ != b.table_ && (a.n() != b.n() || a.order() != b.order()))
    fail(ErrorKind::BadInput, "jet shape mismatch");
  if (a.center_ != b.center_) fail(ErrorKind::BadInput, "jet center mismatch");
}

WJet WJet::shifted(const MultiIndex& idx) const {
  const int d = idx.order();
  if (d > order()) fail(ErrorKind::OrderExceeded, "shift order exceeds jet order");
  WJet out(n(), order() - d, center_);
  for (int r = 0; r < out.table_->size(); ++r) {
    int src = table_->rank_of_sum(r, idx);  // same graded-lex prefix, ranks agree
    out.coeffs_[r] = coeffs_[src];
  }
  return out;
}

WJet WJet::truncated(int new_order) const {
  if (new_order > order()) fail(ErrorKind::OrderExceeded, "cannot extend jet order");
  if (new_order == order()) return *this;
  WJet out(n(), new_order, center_);
  std::copy(coeffs_.begin(), coeffs_.begin() + out.table_->size(), out.coeffs_.begin());
  return out;
}

double WJet::reality_defect() const {
  double worst = 0.0;
  for (int r = 0; r < table_->size(); ++r) {
    Complex d = coeffs_[r] - std::conj(coeffs_[table_->swap_rank(r)]);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

double WJet::max_abs_coeff() const {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

WJet WJet::operator-() const {
  WJet out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

WJet& WJet::operator+=(const WJet& rhs) {
  require_compatible(*this, rhs);
  for (int r = 0; r < table_->size(); ++r) coeffs_[r] += rhs.coeffs_[r];
  return *this;
}

WJet& WJet::operator-=(const WJet& rhs) {
  require_compatible(*this, rhs);
  for (int r = 0; r < table_->size(); ++r) coeffs_[r] -= rhs.coeffs_[r];
  return *this;
}

WJet operator*(const WJet& a, const WJet& b) {
  WJet::require_compatible(a, b);
  WJet out(a.n(), a.order(), a.center_);
  const IndexTable& t = *a.table_;
  for (int g = 0; g < t.size(); ++g) {
    Complex acc(0, 0);
    for (const auto& tri : t.triples(g)) acc += tri.w * a.coeffs_[tri.a] * b.coeffs_[tri.b];
    out.coeffs_[g] = acc;
  }
  return out;
}

WJet operator/(const WJet& a, const WJet& b) {
  WJet::require_compatible(a, b);
  const double scale = 1.0 + b.max_abs_coeff();
  const Complex b0 = b.coeffs_[0];
  if (std::abs(b0) <= kDivEps * scale)
    fail(ErrorKind::DivisionByNearZero, "constant term magnitude " + std::to_string(std::abs(b0)));
  WJet out(a.n(), a.order(), a.center_);
  const IndexTable& t = *a.table_;
  // Graded order makes every proper subindex available before its superindex.
  for (int g = 0; g < t.size(); ++g) {
    Complex acc = a.coeffs_[g];
    for (const auto& tri : t.triples(g)) {
      if (tri.a == g) continue;  // the (gamma, 0) term holds the unknown
      acc -= tri.w * out.coeffs_[tri.a] * b.coeffs_[tri.b];
    }
    out.coeffs_[g] = acc / b0;
  }
  return out;
}

WJet operator*(const WJet& a, Complex s) {
  WJet out = a;
  for (auto& c : out.coeffs_) c *= s;
  return out;
}

WJet operator+(const WJet& a, Complex s) {
  WJet out = a;
  out.coeffs_[0] += s;
  return out;
}

WJet conj(const WJet& a) {
  WJet out(a.n(), a.order(), a.center_);
  for (int r = 0; r < a.table_->size(); ++r)
    out.coeffs_[a.table_->swap_rank(r)] = std::conj(a.coeffs_[r]);
  return out;
}

WJet real_part(const WJet& a) { return (a + conj(a)) * Complex(0.5, 0); }

WJet imag_part(const WJet& a) { return (a - conj(a)) * Complex(0, -0.5); }

WJet exp(const WJet& a) {
  const Complex a0 = a.value();
  WJet t = a + (-a0);
  WJet acc = WJet::constant(a.n(), a.order(), a.center(), Complex(1, 0));
  for (int k = a.order(); k >= 1; --k) acc = acc * t * Complex(1.0 / k, 0) + Complex(1, 0);
  return acc * std::exp(a0);
}

WJet log(const WJet& a) {
  const double scale = 1.0 + a.max_abs_coeff();
  const Complex a0 = a.value();
  if (std::abs(a0) <= kDivEps * scale) fail(ErrorKind::LogAtZero, "log of jet with near-zero constant term");
  WJet t = (a + (-a0)) * (Complex(1, 0) / a0);
  // log(1+t) = t - t^2/2 + ... up to the truncation order
  WJet acc = WJet::constant(a.n(), a.order(), a.center(), Complex(0, 0));
  WJet pw = t;
  double sign = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    acc += pw * Complex(sign / k, 0);
    if (k < a.order()) pw = pw * t;
    sign = -sign;
  }
  return acc + std::log(a0);
}

WJet int_pow(const WJet& a, int k) {
  WJet out = WJet::constant(a.n(), a.order(), a.center(), Complex(1, 0));
  if (k == 0) return out;
  const int e = k > 0 ? k : -k;
  WJet base = a;
  int rem = e;
  while (true) {
    if (rem & 1) out = out * base;
    rem >>= 1;
    if (!rem) break;
    base = base * base;
  }
  if (k < 0) return WJet::constant(a.n(), a.order(), a.center(), Complex(1, 0)) / out;
  return out;
}

}  // namespace mafol::jet
