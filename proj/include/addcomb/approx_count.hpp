#pragma once

// Additive approximations of 1_A * 1_B: the one-sided bucket estimate modulo a
// product of primes, the recursive popular-sums estimator built on it, and the
// 4SUM / energy readouts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "addcomb/errors.hpp"
#include "addcomb/primes.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

struct ApproxParams {
  int branch = 0;                    // r of the recursion; 0 selects 2^ceil(sqrt(log2 N))
  Index base_case_threshold = 64;    // universes at most this large are solved exactly
  Index prime_window_factor = 0;     // P, primes drawn from [P, 2P]; 0 selects 2^ceil(sqrt(log2 N))
};

struct ApproxStats {
  std::int64_t bucket_calls = 0;
  std::int64_t dense_shortcuts = 0;
  std::int64_t modulus_rounds = 0;
  std::int64_t primes_scored = 0;
  std::int64_t recursion_levels = 0;
  std::int64_t exact_fallbacks = 0;  // popular-sums rounds that removed nothing; expected to stay 0
};

inline double log2_at_least_one(Index n) { return std::max(1.0, std::log2(static_cast<double>(std::max<Index>(n, 2)))); }

// 2^ceil(sqrt(log2 n)), at least 2.
inline Index sqrt_log_power(Index n) {
  const int e = std::max(1, static_cast<int>(std::ceil(std::sqrt(log2_at_least_one(n)) - 1e-12)));
  return Index{1} << e;
}

inline void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw invalid_parameter("epsilon must lie in (0, 1]");
}

namespace detail {

// Residue histogram modulo q with a reusable flat buffer for moderate q.
class ResidueCounter {
 public:
  static constexpr Index kFlatLimit = Index{1} << 22;

  void reset(Index q) {
    q_ = q;
    flat_ = q <= kFlatLimit;
    if (flat_) {
      if (static_cast<Index>(buf_.size()) < q) buf_.resize(static_cast<std::size_t>(q), 0);
      for (auto r : touched_) buf_[static_cast<std::size_t>(r)] = 0;
      touched_.clear();
    } else {
      map_.clear();
    }
  }

  void add(Index value, Count c) {
    const Index r = floor_mod(value, q_);
    if (flat_) {
      auto& slot = buf_[static_cast<std::size_t>(r)];
      if (slot == 0) touched_.push_back(r);
      slot += c;
    } else {
      map_[r] += c;
    }
  }

  Count get(Index value) const {
    const Index r = floor_mod(value, q_);
    if (flat_) return buf_[static_cast<std::size_t>(r)];
    auto it = map_.find(r);
    return it == map_.end() ? 0 : it->second;
  }

 private:
  Index q_ = 1;
  bool flat_ = true;
  std::vector<Count> buf_;
  std::vector<Index> touched_;
  std::unordered_map<Index, Count> map_;
};

inline bool mul_exceeds(Index m, Index p, Index limit) {
  return static_cast<__int128>(m) * p >= static_cast<__int128>(limit);
}

// One-sided estimate g(c) >= (1_A * 1_B)[c] for each target c, with total
// overestimate at most min(eps |B| |C|, |A| |B| log N). a, b are supported on
// [0, universe); targets are sorted and nonnegative.
inline std::vector<Count> mod_buckets(const SparseVec& a, const SparseVec& b, const IntSet& c, double eps,
                                      Index universe, const ApproxParams& params, ApproxStats* st) {
  std::vector<Count> g(c.size(), 0);
  if (c.empty() || a.empty() || b.empty()) return g;
  if (st) ++st->bucket_calls;
  const Count mass_a = a.mass();
  if (static_cast<long double>(mass_a) >= static_cast<long double>(eps) * universe) {
    if (st) ++st->dense_shortcuts;
    return conv_partial(a, b, c);
  }

  const double log_n = log2_at_least_one(universe);
  const Index big_p = params.prime_window_factor > 0 ? params.prime_window_factor : sqrt_log_power(universe);
  const double log2_p = std::log2(static_cast<double>(std::max<Index>(big_p, 2)));
  const double l = static_cast<double>(big_p) * std::max(1.0, log_n / log2_p);
  const double lo = 10.0 * l * std::log(l);
  std::vector<std::uint64_t> window = primes_in_range(static_cast<std::uint64_t>(std::ceil(lo)),
                                                      static_cast<std::uint64_t>(std::floor(2.0 * lo)));
  for (std::uint64_t hi = 4; window.empty(); hi *= 2) window = primes_in_range(2, hi);

  const double target = static_cast<double>(mass_a) / eps * log_n + 2.0 * static_cast<double>(c.size());
  const int rounds = std::max(1, static_cast<int>(std::ceil(std::log(target) / std::log(static_cast<double>(big_p)) - 1e-12)));
  // Once m exceeds every |a + b - c| and every |c - c'|, neither pseudo-solutions
  // nor collisions exist and further primes change nothing.
  const Index span_limit = a.max_index() + b.max_index() + c.back() + 1;

  std::vector<std::size_t> live(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) live[i] = i;

  ResidueCounter cnt_c, cnt_b;
  auto collisions = [&](Index q) {
    cnt_c.reset(q);
    for (Index x : c) cnt_c.add(x, 1);
    Count s = 0;
    for (auto i : live) s += cnt_c.get(c[i]) - 1;
    return s;
  };
  auto triples = [&](Index q) {
    const double pair_cost = static_cast<double>(a.sparsity()) * static_cast<double>(c.size());
    const double fft_cost = 6.0 * static_cast<double>(q) * std::max(1, ceil_log2(static_cast<std::uint64_t>(q)));
    Count s = 0;
    if (pair_cost <= fft_cost || q > kDenseSpanLimit) {
      cnt_b.reset(q);
      for (const auto& e : b.entries()) cnt_b.add(e.index, e.count);
      for (Index x : c) {
        for (const auto& e : a.entries()) s += e.count * cnt_b.get(x - e.index);
      }
    } else {
      auto w = conv_cyclic(a, b, q);
      CountLookup look(w);
      for (Index x : c) s += look(floor_mod(x, q));
    }
    return s;
  };

  while (!live.empty()) {
    Index m = 1;
    for (int round = 0;; ++round) {
      if (m >= span_limit) break;
      if (round >= rounds) {
        // Past the nominal round count only keep going while nothing is isolated.
        cnt_c.reset(m);
        for (Index x : c) cnt_c.add(x, 1);
        bool any = false;
        for (auto i : live) any = any || cnt_c.get(c[i]) == 1;
        if (any) break;
      }
      if (st) ++st->modulus_rounds;
      if (mul_exceeds(m, static_cast<Index>(window.front()), span_limit)) {
        m = span_limit;  // every window prime lands past the limit: all choices are equivalent
        break;
      }
      const Count coll_m = collisions(m);
      Index best_p = 0;
      Count best_t = 0;
      for (std::uint64_t p : window) {
        // Moduli past the limit behave identically; score them at the limit.
        const Index q = mul_exceeds(m, static_cast<Index>(p), span_limit) ? span_limit : m * static_cast<Index>(p);
        if (st) ++st->primes_scored;
        const Count coll_q = collisions(q);
        if (coll_q * big_p > coll_m) continue;
        const Count t = triples(q);
        if (best_p == 0 || t < best_t) {
          best_p = static_cast<Index>(p);
          best_t = t;
        }
      }
      if (best_p == 0) throw internal_error("mod_buckets: no prime in the window reduces collisions");
      m = mul_exceeds(m, best_p, span_limit) ? span_limit : m * best_p;
    }
    // g'(c) = #{(a, b) : a + b = c mod m}; isolated live targets take it as final.
    cnt_c.reset(m);
    for (Index x : c) cnt_c.add(x, 1);
    cnt_b.reset(m);
    for (const auto& e : b.entries()) cnt_b.add(e.index, e.count);
    std::vector<std::size_t> next;
    for (auto i : live) {
      if (cnt_c.get(c[i]) != 1) {
        next.push_back(i);
        continue;
      }
      Count s = 0;
      for (const auto& e : a.entries()) s = checked_add(s, checked_mul(e.count, cnt_b.get(c[i] - e.index)));
      g[i] = s;
    }
    if (next.size() == live.size()) throw internal_error("mod_buckets: no target isolated");
    live.swap(next);
  }
  return g;
}

inline SparseVec fold(const SparseVec& v, Index m) {
  std::vector<Entry> es;
  es.reserve(v.sparsity());
  for (const auto& e : v.entries()) es.push_back({floor_mod(e.index, m), e.count});
  return SparseVec::from_entries(std::move(es));
}

inline bool meets_threshold(Count v, double eps, Count mass_b) {
  return 2.0L * static_cast<long double>(v) >= static_cast<long double>(eps) * static_cast<long double>(mass_b);
}

// Recursive popular-sums estimator on [0, universe).
inline SparseVec popular_core(const SparseVec& a, const SparseVec& b, Index universe, double eps, Index r,
                              const ApproxParams& params, ApproxStats* st) {
  if (a.empty() || b.empty()) return {};
  if (st) ++st->recursion_levels;
  const Count mass_a = a.mass(), mass_b = b.mass();
  auto keep_popular = [&](const SparseVec& full) {
    std::vector<Entry> es;
    for (const auto& e : full.entries()) {
      if (meets_threshold(e.count, eps, mass_b)) es.push_back(e);
    }
    return SparseVec::from_entries(std::move(es));
  };
  if (universe <= params.base_case_threshold ||
      static_cast<long double>(mass_a) >= static_cast<long double>(eps) * universe) {
    if (st) ++st->dense_shortcuts;
    return keep_popular(conv_sparse(a, b));
  }

  const Index np = (universe + r - 1) / r;
  const SparseVec fp = popular_core(fold(a, np), fold(b, np), np, eps / 16.0, r, params, st);
  CountLookup fp_at(fp);

  std::vector<Index> xs;
  for (const auto& e : fp.entries()) xs.push_back(floor_mod(e.index, np));
  xs = make_set(std::move(xs));

  const long double tolerance = static_cast<long double>(eps) * mass_b / 4.0L;
  const Index out_limit = 2 * universe - 1;
  std::vector<Entry> out;
  while (!xs.empty()) {
    std::vector<Index> cv;
    cv.reserve(xs.size() * static_cast<std::size_t>(2 * r));
    for (Index x : xs) {
      for (Index i = 0; i < 2 * r; ++i) cv.push_back(x + i * np);
    }
    IntSet cs = make_set(std::move(cv));
    auto g = mod_buckets(a, b, cs, eps / (32.0 * static_cast<double>(r)), universe, params, st);
    auto g_at = [&](Index idx) {
      return g[static_cast<std::size_t>(std::lower_bound(cs.begin(), cs.end(), idx) - cs.begin())];
    };
    std::vector<Index> rest;
    for (Index x : xs) {
      Count sum_g = 0;
      for (Index i = 0; i < 2 * r; ++i) sum_g = checked_add(sum_g, g_at(x + i * np));
      const Count f_sum = fp_at(x) + fp_at(x + np);
      if (std::abs(static_cast<long double>(f_sum) - static_cast<long double>(sum_g)) <= tolerance) {
        for (Index i = 0; i < 2 * r; ++i) {
          const Index idx = x + i * np;
          const Count v = g_at(idx);
          if (idx < out_limit && v > 0 && meets_threshold(v, eps, mass_b)) out.push_back({idx, v});
        }
      } else {
        rest.push_back(x);
      }
    }
    if (rest.size() == xs.size()) {
      // The bucket guarantee says at least half of X leaves per round. If a
      // round makes no progress, finish the remaining coordinates exactly.
      if (st) ++st->exact_fallbacks;
      std::vector<Index> cv2;
      for (Index x : rest) {
        for (Index i = 0; i < 2 * r; ++i) cv2.push_back(x + i * np);
      }
      IntSet cs2 = make_set(std::move(cv2));
      auto exact = conv_partial(a, b, cs2);
      for (std::size_t t = 0; t < cs2.size(); ++t) {
        if (cs2[t] < out_limit && exact[t] > 0 && meets_threshold(exact[t], eps, mass_b)) out.push_back({cs2[t], exact[t]});
      }
      break;
    }
    xs.swap(rest);
  }
  return SparseVec::from_entries(std::move(out));
}

inline Index resolve_branch(const ApproxParams& params, Index universe) {
  const Index r = params.branch > 0 ? params.branch : sqrt_log_power(universe);
  return std::max<Index>(r, 2);
}

}  // namespace detail

// g(c) for c in C (sorted): one-sided estimate of (1_A * 1_B)[c].
inline std::vector<Count> approx_mod_buckets(const MultiSet& a, const MultiSet& b, const IntSet& c, double eps,
                                             const ApproxParams& params = {}, ApproxStats* st = nullptr) {
  check_eps(eps);
  if (!std::is_sorted(c.begin(), c.end()) || (!c.empty() && c.front() < 0)) {
    throw invalid_parameter("approx_mod_buckets: targets must be sorted and nonnegative");
  }
  const Index n = std::max(a.universe(), b.universe());
  return detail::mod_buckets(a.vec(), b.vec(), c, eps, n, params, st);
}

// f with ||f - 1_A * 1_B||_inf <= eps |B|; every nonzero entry is at least eps |B| / 2.
inline SparseVec popular_sums_approx(const MultiSet& a, const MultiSet& b, double eps, const ApproxParams& params = {},
                                     ApproxStats* st = nullptr) {
  check_eps(eps);
  const Index n = std::max(a.universe(), b.universe());
  return detail::popular_core(a.vec(), b.vec(), n, eps, detail::resolve_branch(params, n), params, st);
}

// Same estimate for multisets with arbitrary integer support (shifted internally).
inline SparseVec popular_sums_approx(const SparseVec& a, const SparseVec& b, double eps, const ApproxParams& params = {},
                                     ApproxStats* st = nullptr) {
  check_eps(eps);
  if (a.empty() || b.empty()) return {};
  const Index la = a.min_index(), lb = b.min_index();
  const Index n = std::max(a.max_index() - la, b.max_index() - lb) + 1;
  auto f = detail::popular_core(a.shifted(-la), b.shifted(-lb), n, eps, detail::resolve_branch(params, n), params, st);
  return f.shifted(la + lb);
}

inline std::vector<Count> approx_3sum_counts(const MultiSet& a, const MultiSet& b, const IntSet& c, double eps,
                                             const ApproxParams& params = {}, ApproxStats* st = nullptr) {
  auto f = popular_sums_approx(a, b, eps, params, st);
  std::vector<Count> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = f.at(c[i]);
  return out;
}

// Estimate of #{(a, b, c, d) : a + b = c + d} within eps (|A| + |C|) |B| |D|.
inline Count approx_4sum_count(const SparseVec& a, const SparseVec& b, const SparseVec& c, const SparseVec& d,
                               double eps, const ApproxParams& params = {}, ApproxStats* st = nullptr) {
  check_eps(eps);
  if (a.empty() || b.empty() || c.empty() || d.empty()) return 0;
  const SparseVec f = popular_sums_approx(a, b, eps / 2.0, params, st);
  const Count f_mass = f.mass();
  if (f_mass == 0) return 0;
  // |sum f (g - 1_C*1_D)| <= eps_g |D| sum f, so pick eps_g to spend the other half of the budget.
  const long double budget = static_cast<long double>(eps) / 2.0L *
                             (static_cast<long double>(a.mass()) + static_cast<long double>(c.mass())) *
                             static_cast<long double>(b.mass());
  const double eps_g = static_cast<double>(std::min<long double>(1.0L, budget / static_cast<long double>(f_mass)));
  const SparseVec g = popular_sums_approx(c, d, eps_g, params, st);
  __int128 s = 0;
  auto fi = f.entries().begin(), gi = g.entries().begin();
  while (fi != f.entries().end() && gi != g.entries().end()) {
    if (fi->index < gi->index) {
      ++fi;
    } else if (gi->index < fi->index) {
      ++gi;
    } else {
      s += static_cast<__int128>(fi->count) * gi->count;
      ++fi;
      ++gi;
    }
  }
  if (s > static_cast<__int128>(std::numeric_limits<Count>::max())) throw arithmetic_overflow("approx_4sum_count: estimate exceeds int64");
  return static_cast<Count>(s);
}

// Additive energy estimate within eps |A|^3.
inline Count approx_energy(const SparseVec& a, double eps, const ApproxParams& params = {}, ApproxStats* st = nullptr) {
  check_eps(eps);
  return approx_4sum_count(a, a, a, a, eps / 2.0, params, st);
}

inline Count approx_energy(const MultiSet& a, double eps, const ApproxParams& params = {}, ApproxStats* st = nullptr) {
  return approx_energy(a.vec(), eps, params, st);
}

}  // namespace addcomb
