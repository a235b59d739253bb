#pragma once

// Text-to-pattern Hamming distances d(i) = #{j : T[i + j] != P[j]} for shifts
// i in [0, n - m]. Exact per-symbol convolution, an additive eps*m estimate,
// and an eps*k estimate for inputs given as dyadic runs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "addcomb/approx_count.hpp"
#include "addcomb/errors.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

using Symbol = std::uint32_t;
using SymbolString = std::vector<Symbol>;

struct HammingConfig {
  bool chunked = true;  // process the text in windows of length 2m
  ApproxParams approx;
};

namespace detail {

inline void check_strings(const SymbolString& text, const SymbolString& pattern) {
  if (pattern.empty() || pattern.size() > text.size()) throw invalid_parameter("hamming: need 1 <= m <= n");
}

inline std::map<Symbol, IntSet> positions(const SymbolString& s, std::size_t from, std::size_t to) {
  std::map<Symbol, std::vector<Index>> raw;
  for (std::size_t i = from; i < to; ++i) raw[s[i]].push_back(static_cast<Index>(i - from));
  std::map<Symbol, IntSet> out;
  for (auto& [sym, v] : raw) out.emplace(sym, std::move(v));  // already ascending
  return out;
}

// Entry i is sum_s per_symbol(1_{A_s}, 1_{-B_s})[i], computed per text window.
template <class PerSymbol>
std::vector<Count> match_counts(const SymbolString& text, const SymbolString& pattern, bool chunked,
                                PerSymbol per_symbol) {
  const std::size_t n = text.size(), m = pattern.size();
  const std::size_t shifts = n - m + 1;
  const auto pat = positions(pattern, 0, m);
  std::vector<Count> total(shifts, 0);
  const std::size_t step = chunked ? m : shifts;
  for (std::size_t lo = 0; lo < shifts; lo += step) {
    const std::size_t hi_shift = std::min(shifts, lo + step);
    const std::size_t hi_text = hi_shift - 1 + m;
    const auto txt = positions(text, lo, hi_text);
    for (const auto& [sym, bs] : pat) {
      auto it = txt.find(sym);
      if (it == txt.end()) continue;
      const SparseVec f = per_symbol(indicator(it->second), indicator(bs).negated());
      for (const auto& e : f.entries()) {
        if (e.index >= 0 && e.index < static_cast<Index>(hi_shift - lo)) {
          total[lo + static_cast<std::size_t>(e.index)] += e.count;
        }
      }
    }
  }
  return total;
}

inline std::vector<Count> distances_from_matches(const std::vector<Count>& matches, std::size_t m) {
  std::vector<Count> d(matches.size());
  const auto mm = static_cast<Count>(m);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::clamp<Count>(mm - matches[i], 0, mm);
  return d;
}

}  // namespace detail

inline std::vector<Count> hamming_exact(const SymbolString& text, const SymbolString& pattern,
                                        const HammingConfig& cfg = {}) {
  detail::check_strings(text, pattern);
  auto m = detail::match_counts(text, pattern, cfg.chunked,
                                [](const SparseVec& a, const SparseVec& nb) { return conv_sparse(a, nb); });
  return detail::distances_from_matches(m, pattern.size());
}

// |f(i) - d(i)| <= eps * m at every shift.
inline std::vector<Count> hamming_additive(const SymbolString& text, const SymbolString& pattern, double eps,
                                           const HammingConfig& cfg = {}) {
  detail::check_strings(text, pattern);
  check_eps(eps);
  auto m = detail::match_counts(text, pattern, cfg.chunked, [&](const SparseVec& a, const SparseVec& nb) {
    return popular_sums_approx(a, nb, eps, cfg.approx);
  });
  return detail::distances_from_matches(m, pattern.size());
}

// ---- dyadic runs ------------------------------------------------------------

// blocks[s][u] = left endpoints of the length-2^u blocks of symbol s.
using DyadicBlocks = std::map<Symbol, std::vector<IntSet>>;

struct RleInstance {
  Index n = 0;
  Index m = 0;
  DyadicBlocks text;
  DyadicBlocks pattern;
};

namespace detail {

inline DyadicBlocks dyadic_split(const SymbolString& s, Index max_block) {
  std::map<Symbol, std::vector<std::vector<Index>>> raw;
  const auto n = static_cast<Index>(s.size());
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j < n && s[static_cast<std::size_t>(j)] == s[static_cast<std::size_t>(i)]) ++j;
    auto& lists = raw[s[static_cast<std::size_t>(i)]];
    // greedy: the largest aligned power of two that fits
    for (Index x = i; x < j;) {
      int u = 0;
      while ((Index{2} << u) <= std::min(j - x, max_block) && x % (Index{2} << u) == 0) ++u;
      if (lists.size() <= static_cast<std::size_t>(u)) lists.resize(static_cast<std::size_t>(u) + 1);
      lists[static_cast<std::size_t>(u)].push_back(x);
      x += Index{1} << u;
    }
    i = j;
  }
  DyadicBlocks out;
  for (auto& [sym, lists] : raw) {
    auto& dst = out[sym];
    for (auto& v : lists) dst.push_back(make_set(std::move(v)));
  }
  return out;
}

inline void check_blocks(const DyadicBlocks& blocks, Index len, const char* what) {
  std::vector<std::pair<Index, Index>> iv;
  for (const auto& [sym, lists] : blocks) {
    for (std::size_t u = 0; u < lists.size(); ++u) {
      if (u >= 62) throw invalid_parameter(std::string("hamming_rle_dyadic: block exponent too large in ") + what);
      const Index w = Index{1} << u;
      for (Index x : lists[u]) {
        if (x % w != 0) throw invalid_parameter(std::string("hamming_rle_dyadic: unaligned block in ") + what);
        iv.emplace_back(x, x + w);
      }
    }
  }
  std::sort(iv.begin(), iv.end());
  Index at = 0;
  for (auto [lo, hi] : iv) {
    if (lo != at) throw invalid_parameter(std::string("hamming_rle_dyadic: blocks overlap or leave a gap in ") + what);
    at = hi;
  }
  if (at != len) throw invalid_parameter(std::string("hamming_rle_dyadic: blocks do not cover ") + what);
}

}  // namespace detail

// Aligned dyadic blocks of length at most max_block (rounded down to a power of two).
inline RleInstance make_rle_instance(const SymbolString& text, const SymbolString& pattern, Index max_block) {
  detail::check_strings(text, pattern);
  if (max_block < 1) throw invalid_parameter("make_rle_instance: max_block must be positive");
  RleInstance r;
  r.n = static_cast<Index>(text.size());
  r.m = static_cast<Index>(pattern.size());
  r.text = detail::dyadic_split(text, max_block);
  r.pattern = detail::dyadic_split(pattern, max_block);
  return r;
}

inline std::size_t block_count(const DyadicBlocks& blocks) {
  std::size_t c = 0;
  for (const auto& [sym, lists] : blocks) {
    for (const auto& l : lists) c += l.size();
  }
  return c;
}

struct DyadicStats {
  double eps_inner = 0;
  std::size_t triples = 0;  // (s, u, v) with both block lists nonempty
};

// |f(i) - d(i)| <= eps * k at every shift. Each (s, u, v) term is estimated to
// within eps_inner |B_s^v| and smeared by L_{u,v}, so the error of a term is at
// most 2 * 2^max(u,v) * eps_inner |B_s^v|; eps_inner makes these sum to eps * k.
inline std::vector<Count> hamming_rle_dyadic(const RleInstance& rle, double eps, Count k,
                                             const ApproxParams& params = {}, DyadicStats* stats = nullptr) {
  check_eps(eps);
  if (k < 1) throw invalid_parameter("hamming_rle_dyadic: k must be positive");
  if (rle.m < 1 || rle.m > rle.n) throw invalid_parameter("hamming_rle_dyadic: need 1 <= m <= n");
  detail::check_blocks(rle.text, rle.n, "text");
  detail::check_blocks(rle.pattern, rle.m, "pattern");

  long double weight = 0;
  std::size_t triples = 0;
  for (const auto& [sym, pl] : rle.pattern) {
    auto it = rle.text.find(sym);
    if (it == rle.text.end()) continue;
    for (std::size_t u = 0; u < it->second.size(); ++u) {
      if (it->second[u].empty()) continue;
      for (std::size_t v = 0; v < pl.size(); ++v) {
        if (pl[v].empty()) continue;
        weight += 2.0L * std::ldexp(1.0L, static_cast<int>(std::max(u, v))) * static_cast<long double>(pl[v].size());
        ++triples;
      }
    }
  }
  const double eps_in = weight > 0 ? static_cast<double>(std::min<long double>(1.0L, eps * static_cast<long double>(k) / weight)) : 1.0;
  if (stats) {
    stats->eps_inner = eps_in;
    stats->triples = triples;
  }

  // F_{u,v} = sum_s f_{s,u,v}, then one convolution with L_{u,v} per (u, v).
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Entry>> grouped;
  for (const auto& [sym, pl] : rle.pattern) {
    auto it = rle.text.find(sym);
    if (it == rle.text.end()) continue;
    for (std::size_t u = 0; u < it->second.size(); ++u) {
      if (it->second[u].empty()) continue;
      for (std::size_t v = 0; v < pl.size(); ++v) {
        if (pl[v].empty()) continue;
        const int sh = static_cast<int>(std::min(u, v));
        // both sets are multiples of 2^sh, so work on the quotient lattice
        std::vector<Index> qa, qb;
        for (Index x : it->second[u]) qa.push_back(x >> sh);
        for (Index y : pl[v]) qb.push_back(y >> sh);
        const SparseVec f = popular_sums_approx(indicator(make_set(qa)), indicator(make_set(qb)).negated(), eps_in, params);
        auto& dst = grouped[{u, v}];
        for (const auto& e : f.entries()) dst.push_back({e.index * (Index{1} << sh), e.count});
      }
    }
  }

  const Index shifts = rle.n - rle.m + 1;
  std::vector<Count> match(static_cast<std::size_t>(shifts), 0);
  for (auto& [uv, es] : grouped) {
    const Index wu = Index{1} << uv.first, wv = Index{1} << uv.second;
    std::vector<Index> lu, lv;
    for (Index x = 0; x < wu; ++x) lu.push_back(x);
    for (Index y = 0; y < wv; ++y) lv.push_back(-y);
    const SparseVec l = conv_sparse(indicator(make_set(lu)), indicator(make_set(lv)));
    const SparseVec g = conv_sparse(SparseVec::from_entries(std::move(es)), l);
    for (const auto& e : g.entries()) {
      if (e.index >= 0 && e.index < shifts) match[static_cast<std::size_t>(e.index)] += e.count;
    }
  }
  return detail::distances_from_matches(match, static_cast<std::size_t>(rle.m));
}

}  // namespace addcomb
