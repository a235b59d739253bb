#pragma once

// Exact 3SUM counting when a structure set S has a small sumset with A.
//   sums[c]    = (1_A * 1_B)[c]    for every c in C
//   reverse[a] = (1_C * 1_{-B})[a] for every a in A

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "addcomb/errors.hpp"
#include "addcomb/modular.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

struct DoublingStats {
  Index modulus = 1;
  std::size_t cover_size = 0;
  std::size_t sumset_size = 0;  // |A + S|
  std::size_t parts = 0;
  Count sum_b_d = 0;            // sum over parts and d of |B_d|
  Count sum_c_d = 0;            // sum over parts and d of |C_d|
  double c_d_bound = 0;         // sum over parts of |C_i| * 2|A+S||Delta|/M
  std::size_t enumerated = 0;   // subproblems solved by pair enumeration
  std::size_t convolved = 0;    // subproblems solved by convolution
};

struct DoublingResult {
  std::vector<Count> sums;     // aligned with C
  std::vector<Count> reverse;  // aligned with A
  DoublingStats stats;
};

namespace detail {

inline Index joint_universe(std::initializer_list<const IntSet*> sets) {
  Index lo = 0, hi = 0;
  bool first = true;
  for (auto* s : sets) {
    if (s->empty()) continue;
    if (first) {
      lo = s->front();
      hi = s->back();
      first = false;
    }
    lo = std::min(lo, s->front());
    hi = std::max(hi, s->back());
  }
  return hi - lo + 1;
}

inline std::size_t position(const IntSet& s, Index x) {
  return static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
}

}  // namespace detail

inline DoublingResult count_small_doubling(const IntSet& a, const IntSet& b, const IntSet& c, const IntSet& s) {
  if (a.empty() || b.empty() || c.empty() || s.empty()) throw invalid_parameter("count_small_doubling: empty input set");
  DoublingResult res;
  res.sums.assign(c.size(), 0);
  res.reverse.assign(a.size(), 0);
  auto& st = res.stats;

  const ModulusResult mod = find_modulus(s, detail::joint_universe({&a, &b, &c, &s}));
  const Index m = mod.modulus;
  const CoverResult cover = find_cover(residues(s, m), m);
  const IntSet aps = sumset(a, s);
  const CPartition part = partition_c(aps, cover, c);
  st.modulus = m;
  st.cover_size = cover.deltas.size();
  st.sumset_size = aps.size();
  st.parts = part.parts.size();

  std::unordered_map<Index, Index> min_s;  // residue -> smallest s with that residue
  for (Index x : s) min_s.emplace(floor_mod(x, m), x);  // s ascending: first wins
  std::unordered_map<Index, std::vector<Index>> aps_by_res;
  for (Index x : aps) aps_by_res[floor_mod(x, m)].push_back(x);
  const SparseVec one_a = indicator(a);
  CountLookup in_a(one_a);

  for (std::size_t pi = 0; pi < part.parts.size(); ++pi) {
    const IntSet& ci = part.parts[pi];
    const IntSet dphi = residues(shift_set(cover.deltas, part.shifts[pi]), m);
    st.c_d_bound += static_cast<double>(ci.size()) * part.load_bound;

    // B_d = {b : b - s_b = d}
    std::unordered_map<Index, std::vector<Index>> b_d;
    for (Index x : b) {
      bool found = false;
      Index best = 0;
      for (Index dl : dphi) {
        auto it = min_s.find(floor_mod(x - dl, m));
        if (it != min_s.end() && (!found || it->second < best)) {
          best = it->second;
          found = true;
        }
      }
      if (!found) throw internal_error("count_small_doubling: S_hat + Delta does not cover b");
      b_d[x - best].push_back(x);
    }
    // C_d = {c : d in D_c}, D_c = {d in c - (A+S) : d mod M in Delta + phi}
    std::unordered_map<Index, std::vector<Index>> c_d;
    for (Index x : ci) {
      for (Index dl : dphi) {
        auto it = aps_by_res.find(floor_mod(x - dl, m));
        if (it == aps_by_res.end()) continue;
        for (Index y : it->second) {
          const Index d = x - y;
          if (b_d.count(d)) c_d[d].push_back(x);
        }
      }
    }
    Count sum_b = 0, sum_c = 0;
    std::vector<Index> ds;
    for (auto& [d, cs] : c_d) {
      std::sort(cs.begin(), cs.end());
      ds.push_back(d);
      sum_b += static_cast<Count>(b_d[d].size());
      sum_c += static_cast<Count>(cs.size());
    }
    std::sort(ds.begin(), ds.end());
    st.sum_b_d += sum_b;
    st.sum_c_d += sum_c;
    if (ds.empty()) continue;
    const double x_thr = std::sqrt(static_cast<double>(sum_b) * static_cast<double>(aps.size()) / static_cast<double>(sum_c));

    for (Index d : ds) {
      const auto& bs = b_d[d];
      const auto& cs = c_d[d];
      if (static_cast<double>(bs.size()) <= x_thr) {
        ++st.enumerated;
        for (Index y : bs) {
          for (Index x : cs) {
            if (in_a(x - y)) {
              ++res.sums[detail::position(c, x)];
              ++res.reverse[detail::position(a, x - y)];
            }
          }
        }
      } else {
        ++st.convolved;
        const SparseVec one_b = indicator(bs);
        const SparseVec ab = conv_sparse(one_a, one_b);
        for (Index x : cs) res.sums[detail::position(c, x)] += ab.at(x);
        auto rev = conv_partial(indicator(cs), one_b.negated(), a);
        for (std::size_t i = 0; i < a.size(); ++i) res.reverse[i] += rev[i];
      }
    }
  }
  return res;
}

}  // namespace addcomb
