#pragma once

// Sparse nonnegative integer vectors, multisets, integer sets, and the four
// exact convolutions everything else is built on.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "addcomb/errors.hpp"
#include "addcomb/ntt.hpp"
#include "addcomb/primes.hpp"

namespace addcomb {

using Index = std::int64_t;
using Count = std::int64_t;
using IntSet = std::vector<Index>;  // sorted, no duplicates

// Above this output span, conv_sparse hashes instead of running a dense transform.
inline constexpr Index kDenseSpanLimit = Index{1} << 22;

inline Count checked_add(Count a, Count b) {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) throw arithmetic_overflow("count addition overflows int64");
  return r;
}

inline Count checked_mul(Count a, Count b) {
  Count r;
  if (__builtin_mul_overflow(a, b, &r)) throw arithmetic_overflow("count product overflows int64");
  return r;
}

inline Index floor_mod(Index x, Index m) {
  Index r = x % m;
  return r < 0 ? r + m : r;
}

inline int ceil_log2(std::uint64_t n) {
  int k = 0;
  while ((std::uint64_t{1} << k) < n) ++k;
  return k;
}

struct Entry {
  Index index;
  Count count;
  friend bool operator==(const Entry&, const Entry&) = default;
};

class SparseVec {
 public:
  SparseVec() = default;

  // Sorts, merges duplicate indices and drops zeros. Counts must be nonnegative.
  static SparseVec from_entries(std::vector<Entry> es) {
    std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
    SparseVec v;
    for (const auto& e : es) {
      if (e.count < 0) throw invalid_parameter("SparseVec: negative count");
      if (e.count == 0) continue;
      if (!v.es_.empty() && v.es_.back().index == e.index) {
        v.es_.back().count = checked_add(v.es_.back().count, e.count);
      } else {
        v.es_.push_back(e);
      }
    }
    return v;
  }

  // Multiset indicator: duplicates accumulate.
  static SparseVec indicator(std::span<const Index> values) {
    std::vector<Entry> es;
    es.reserve(values.size());
    for (Index x : values) es.push_back({x, 1});
    return from_entries(std::move(es));
  }

  // Dense coordinates v[i] placed at offset + i.
  static SparseVec from_dense(std::span<const Count> v, Index offset) {
    SparseVec r;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 0) throw invalid_parameter("SparseVec: negative count");
      if (v[i] != 0) r.es_.push_back({offset + static_cast<Index>(i), v[i]});
    }
    return r;
  }

  const std::vector<Entry>& entries() const { return es_; }
  std::size_t sparsity() const { return es_.size(); }
  bool empty() const { return es_.empty(); }
  Index min_index() const { return es_.front().index; }
  Index max_index() const { return es_.back().index; }

  Count at(Index i) const {
    auto it = std::lower_bound(es_.begin(), es_.end(), i, [](const Entry& e, Index x) { return e.index < x; });
    return (it != es_.end() && it->index == i) ? it->count : 0;
  }

  Count mass() const {
    Count s = 0;
    for (const auto& e : es_) s = checked_add(s, e.count);
    return s;
  }

  Count max_count() const {
    Count m = 0;
    for (const auto& e : es_) m = std::max(m, e.count);
    return m;
  }

  IntSet support() const {
    IntSet s;
    s.reserve(es_.size());
    for (const auto& e : es_) s.push_back(e.index);
    return s;
  }

  SparseVec shifted(Index by) const {
    SparseVec r = *this;
    for (auto& e : r.es_) e.index += by;
    return r;
  }

  SparseVec negated() const {
    SparseVec r;
    r.es_.assign(es_.rbegin(), es_.rend());
    for (auto& e : r.es_) e.index = -e.index;
    return r;
  }

  // Entries with count >= t (others zeroed).
  SparseVec at_least(Count t) const {
    SparseVec r;
    for (const auto& e : es_) {
      if (e.count >= t) r.es_.push_back(e);
    }
    return r;
  }

  friend bool operator==(const SparseVec&, const SparseVec&) = default;

 private:
  std::vector<Entry> es_;
};

// A multiset of integers in [0, universe).
class MultiSet {
 public:
  MultiSet() = default;

  static MultiSet from_values(std::span<const Index> values, std::optional<Index> universe = std::nullopt) {
    MultiSet m;
    Index hi = 0;
    for (Index x : values) {
      if (x < 0) throw invalid_parameter("MultiSet: negative element");
      hi = std::max(hi, x + 1);
    }
    m.universe_ = universe.value_or(std::max<Index>(hi, 1));
    if (m.universe_ < hi) throw invalid_parameter("MultiSet: element outside universe");
    m.vec_ = SparseVec::indicator(values);
    return m;
  }

  static MultiSet from_sparse(SparseVec v, Index universe) {
    if (!v.empty() && (v.min_index() < 0 || v.max_index() >= universe)) {
      throw invalid_parameter("MultiSet: element outside universe");
    }
    MultiSet m;
    m.universe_ = universe;
    m.vec_ = std::move(v);
    return m;
  }

  Index universe() const { return universe_; }
  const SparseVec& vec() const { return vec_; }
  Count size() const { return vec_.mass(); }
  std::size_t distinct() const { return vec_.sparsity(); }
  bool empty() const { return vec_.empty(); }

  std::vector<Index> values() const {
    std::vector<Index> r;
    for (const auto& e : vec_.entries()) r.insert(r.end(), static_cast<std::size_t>(e.count), e.index);
    return r;
  }

 private:
  Index universe_ = 1;
  SparseVec vec_;
};

// ---- integer sets -----------------------------------------------------------

inline IntSet make_set(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline bool set_contains(const IntSet& s, Index x) { return std::binary_search(s.begin(), s.end(), x); }

inline IntSet negate_set(const IntSet& s) {
  IntSet r(s.rbegin(), s.rend());
  for (auto& x : r) x = -x;
  return r;
}

inline IntSet shift_set(const IntSet& s, Index by) {
  IntSet r = s;
  for (auto& x : r) x += by;
  return r;
}

inline IntSet set_minus(const IntSet& a, const IntSet& b) {
  IntSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline IntSet set_intersection(const IntSet& a, const IntSet& b) {
  IntSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline IntSet set_union(const IntSet& a, const IntSet& b) {
  IntSet r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline IntSet residues(const IntSet& s, Index m) {
  std::vector<Index> r;
  r.reserve(s.size());
  for (Index x : s) r.push_back(floor_mod(x, m));
  return make_set(std::move(r));
}

inline SparseVec indicator(const IntSet& s) {
  std::vector<Entry> es;
  es.reserve(s.size());
  for (Index x : s) es.push_back({x, 1});
  return SparseVec::from_entries(std::move(es));
}

// ---- point lookup -----------------------------------------------------------

// Count lookup for a sparse vector: a flat array when the index span is small,
// a hash map otherwise.
class CountLookup {
 public:
  explicit CountLookup(const SparseVec& v) {
    if (v.empty()) return;
    lo_ = v.min_index();
    const Index span = v.max_index() - lo_ + 1;
    if (span <= std::max<Index>(Index{1} << 16, 8 * static_cast<Index>(v.sparsity())) && span <= (Index{1} << 26)) {
      dense_.assign(static_cast<std::size_t>(span), 0);
      for (const auto& e : v.entries()) dense_[static_cast<std::size_t>(e.index - lo_)] = e.count;
      use_dense_ = true;
    } else {
      map_.reserve(v.sparsity() * 2);
      for (const auto& e : v.entries()) map_.emplace(e.index, e.count);
    }
  }

  Count operator()(Index i) const {
    if (use_dense_) {
      const Index k = i - lo_;
      return (k < 0 || k >= static_cast<Index>(dense_.size())) ? 0 : dense_[static_cast<std::size_t>(k)];
    }
    auto it = map_.find(i);
    return it == map_.end() ? 0 : it->second;
  }

 private:
  bool use_dense_ = false;
  Index lo_ = 0;
  std::vector<Count> dense_;
  std::unordered_map<Index, Count> map_;
};

// ---- convolutions -----------------------------------------------------------

namespace detail {

inline std::vector<Count> densify(const SparseVec& v, Index lo, Index len) {
  std::vector<Count> d(static_cast<std::size_t>(len), 0);
  for (const auto& e : v.entries()) d[static_cast<std::size_t>(e.index - lo)] = e.count;
  return d;
}

inline SparseVec conv_by_pairs(const SparseVec& x, const SparseVec& y) {
  std::vector<Entry> es;
  es.reserve(x.sparsity() * y.sparsity());
  for (const auto& a : x.entries()) {
    for (const auto& b : y.entries()) es.push_back({a.index + b.index, checked_mul(a.count, b.count)});
  }
  return SparseVec::from_entries(std::move(es));
}

// Pair enumeration is cheaper than a transform when the supports are tiny
// compared with the span they occupy.
inline bool pairs_are_cheaper(const SparseVec& x, const SparseVec& y, double span) {
  const double pairs = static_cast<double>(x.sparsity()) * static_cast<double>(y.sparsity());
  return pairs <= 2.0 * span || pairs <= 4096.0;
}

// Exact convolution through a dense transform over the occupied span.
inline SparseVec conv_by_span(const SparseVec& x, const SparseVec& y) {
  if (x.empty() || y.empty()) return {};
  if (pairs_are_cheaper(x, y, static_cast<double>((x.max_index() - x.min_index()) + (y.max_index() - y.min_index()) + 1))) {
    return conv_by_pairs(x, y);
  }
  const Index xl = x.min_index(), yl = y.min_index();
  auto dx = densify(x, xl, x.max_index() - xl + 1);
  auto dy = densify(y, yl, y.max_index() - yl + 1);
  auto out = ntt::convolve_counts(dx, dy);
  return SparseVec::from_dense(out, xl + yl);
}

inline Index output_span(const SparseVec& x, const SparseVec& y) {
  return (x.max_index() - x.min_index()) + (y.max_index() - y.min_index()) + 1;
}

}  // namespace detail

// (x * y)[k] = sum_{i+j=k} x[i] y[j]; x and y supported on [0, universe).
inline SparseVec conv_dense(const SparseVec& x, const SparseVec& y, Index universe) {
  for (const SparseVec* v : {&x, &y}) {
    if (!v->empty() && (v->min_index() < 0 || v->max_index() >= universe)) {
      throw invalid_parameter("conv_dense: index outside [0, universe)");
    }
  }
  return detail::conv_by_span(x, y);
}

// Cyclic convolution modulo m; result supported on [0, m).
inline SparseVec conv_cyclic(const SparseVec& x, const SparseVec& y, Index m) {
  if (m <= 0) throw invalid_parameter("conv_cyclic: modulus must be positive");
  if (x.empty() || y.empty()) return {};
  auto fold = [m](const SparseVec& v) {
    std::vector<Count> d(static_cast<std::size_t>(m), 0);
    for (const auto& e : v.entries()) {
      auto& slot = d[static_cast<std::size_t>(floor_mod(e.index, m))];
      slot = checked_add(slot, e.count);
    }
    return d;
  };
  // Small supports: direct pair enumeration beats a length-2m transform.
  if (static_cast<double>(x.sparsity()) * static_cast<double>(y.sparsity()) < 4.0 * static_cast<double>(m)) {
    std::vector<Entry> es;
    es.reserve(x.sparsity() * y.sparsity());
    for (const auto& a : x.entries()) {
      for (const auto& b : y.entries()) es.push_back({floor_mod(a.index + b.index, m), checked_mul(a.count, b.count)});
    }
    return SparseVec::from_entries(std::move(es));
  }
  auto fx = fold(x), fy = fold(y);
  auto lin = ntt::convolve_counts(fx, fy);
  std::vector<Count> out(static_cast<std::size_t>(m), 0);
  for (std::size_t i = 0; i < lin.size(); ++i) {
    auto& slot = out[i % static_cast<std::size_t>(m)];
    slot = checked_add(slot, lin[i]);
  }
  return SparseVec::from_dense(out, 0);
}

namespace detail {

using u128 = ntt::u128;

// Cyclic convolution of 128-bit vectors of length m, exact under `bound`.
inline std::vector<u128> cyclic_u128(const std::vector<u128>& a, const std::vector<u128>& b, Index m, u128 bound) {
  auto lin = ntt::convolve_exact<u128>(a, b, bound);
  std::vector<u128> out(static_cast<std::size_t>(m), 0);
  for (std::size_t i = 0; i < lin.size(); ++i) out[i % static_cast<std::size_t>(m)] += lin[i];
  return out;
}

}  // namespace detail

// Exact convolution with arbitrary (possibly huge or negative) index ranges.
// Small output spans go through a dense transform and small supports through
// pair enumeration. Otherwise indices are hashed
// modulo a growing prime m; per bucket we track the zeroth, first and second
// moments of the output index. A bucket whose moments satisfy w1^2 = w0*w2
// holds a single index (Cauchy-Schwarz equality) which is then recovered and
// peeled from later rounds.
namespace detail {

inline SparseVec conv_hashed(const SparseVec& x, const SparseVec& y) {
  if (x.empty() || y.empty()) return {};
  const Index span = output_span(x, y);

  const Index xl = x.min_index(), yl = y.min_index();
  const u128 total = static_cast<u128>(x.mass()) * static_cast<u128>(y.mass());
  // Moments stay exact in 128 bits when total * span < 2^63.
  if (total >= (u128{1} << 63) || total * static_cast<u128>(span) >= (u128{1} << 63)) {
    throw arithmetic_overflow("conv_sparse: mass times span too large for exact moments");
  }
  const u128 b0 = total, b1 = total * static_cast<u128>(span), b2 = b1 * static_cast<u128>(span);

  std::vector<Entry> found;
  Index m = static_cast<Index>(next_prime(static_cast<std::uint64_t>(2 * (x.sparsity() + y.sparsity()) + 16)));
  while (true) {
    if (m >= span || m > kDenseSpanLimit) {
      // Output too dense for hashing to pay off. The transform throws
      // budget_exceeded if the span is also too wide.
      return detail::conv_by_span(x, y);
    }
    const auto ms = static_cast<std::size_t>(m);
    std::vector<u128> x0(ms, 0), x1(ms, 0), x2(ms, 0), y0(ms, 0), y1(ms, 0), y2(ms, 0);
    for (const auto& e : x.entries()) {
      const u128 i = static_cast<u128>(e.index - xl), c = static_cast<u128>(e.count);
      const auto r = static_cast<std::size_t>(floor_mod(e.index - xl, m));
      x0[r] += c;
      x1[r] += c * i;
      x2[r] += c * i * i;
    }
    for (const auto& e : y.entries()) {
      const u128 j = static_cast<u128>(e.index - yl), c = static_cast<u128>(e.count);
      const auto r = static_cast<std::size_t>(floor_mod(e.index - yl, m));
      y0[r] += c;
      y1[r] += c * j;
      y2[r] += c * j * j;
    }
    auto w0 = detail::cyclic_u128(x0, y0, m, b0);
    auto w1 = detail::cyclic_u128(x1, y0, m, b1);
    auto w1b = detail::cyclic_u128(x0, y1, m, b1);
    auto w2 = detail::cyclic_u128(x2, y0, m, b2);
    auto w2b = detail::cyclic_u128(x1, y1, m, b2);
    auto w2c = detail::cyclic_u128(x0, y2, m, b2);
    for (std::size_t r = 0; r < ms; ++r) {
      w1[r] += w1b[r];
      w2[r] += 2 * w2b[r] + w2c[r];
    }
    for (const auto& e : found) {
      const u128 k = static_cast<u128>(e.index), c = static_cast<u128>(e.count);
      const auto r = static_cast<std::size_t>(floor_mod(e.index, m));
      w0[r] -= c;
      w1[r] -= c * k;
      w2[r] -= c * k * k;
    }
    bool unresolved = false;
    for (std::size_t r = 0; r < ms; ++r) {
      if (w0[r] == 0) continue;
      if (w1[r] * w1[r] == w0[r] * w2[r] && w1[r] % w0[r] == 0) {
        const u128 k = w1[r] / w0[r];
        if (k < static_cast<u128>(span) && static_cast<std::size_t>(k % ms) == r) {
          found.push_back({static_cast<Index>(k), static_cast<Count>(w0[r])});
          continue;
        }
      }
      unresolved = true;
    }
    if (!unresolved) break;
    m = static_cast<Index>(next_prime(static_cast<std::uint64_t>(2 * m)));
  }
  for (auto& e : found) e.index += xl + yl;
  return SparseVec::from_entries(std::move(found));
}

}  // namespace detail

inline SparseVec conv_sparse(const SparseVec& x, const SparseVec& y) {
  if (x.empty() || y.empty()) return {};
  const Index span = detail::output_span(x, y);
  if (span <= kDenseSpanLimit) return detail::conv_by_span(x, y);
  if (static_cast<double>(x.sparsity()) * static_cast<double>(y.sparsity()) <= double(1 << 22)) {
    return detail::conv_by_pairs(x, y);
  }
  return detail::conv_hashed(x, y);
}

// Values (x * y)[c] for every c in `targets`, in the order given.
inline std::vector<Count> conv_partial(const SparseVec& x, const SparseVec& y, std::span<const Index> targets) {
  std::vector<Count> out(targets.size(), 0);
  if (x.empty() || y.empty() || targets.empty()) return out;
  const double pairs = static_cast<double>(targets.size()) * static_cast<double>(std::min(x.sparsity(), y.sparsity()));
  const Index span = detail::output_span(x, y);
  const double dense_cost = 8.0 * static_cast<double>(span) * std::max(1, ceil_log2(static_cast<std::uint64_t>(span)));
  if (span <= kDenseSpanLimit && dense_cost < pairs) {
    auto full = detail::conv_by_span(x, y);
    CountLookup look(full);
    for (std::size_t t = 0; t < targets.size(); ++t) out[t] = look(targets[t]);
    return out;
  }
  // Iterate the sparser side, look up the other.
  const bool swap = y.sparsity() > x.sparsity();
  const SparseVec& iter = swap ? x : y;
  CountLookup look(swap ? y : x);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    Count s = 0;
    for (const auto& e : iter.entries()) {
      const Count v = look(targets[t] - e.index);
      if (v) s = checked_add(s, checked_mul(v, e.count));
    }
    out[t] = s;
  }
  return out;
}

// A + B as a set.
inline IntSet sumset(const IntSet& a, const IntSet& b) {
  if (a.empty() || b.empty()) return {};
  return conv_sparse(indicator(a), indicator(b)).support();
}

}  // namespace addcomb
