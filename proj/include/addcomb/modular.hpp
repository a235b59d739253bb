#pragma once

// Deterministic modulus selection and covers of Z_M.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "addcomb/approx_count.hpp"
#include "addcomb/errors.hpp"
#include "addcomb/primes.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

struct ModulusResult {
  Index modulus = 1;
  std::vector<Index> prime_factors;
  Index distinct_residues = 0;
  Count collisions = 0;  // ordered pairs x != y in S with x = y mod M
  Index window_p = 0;    // primes were drawn from [P, 2P]
};

// Ordered collision pairs of S modulo m.
inline Count collision_pairs(const IntSet& s, Index m) {
  std::vector<Index> r;
  r.reserve(s.size());
  for (Index x : s) r.push_back(floor_mod(x, m));
  std::sort(r.begin(), r.end());
  Count h = 0;
  for (std::size_t i = 0; i < r.size();) {
    std::size_t j = i;
    while (j < r.size() && r[j] == r[i]) ++j;
    const Count k = static_cast<Count>(j - i);
    h += k * (k - 1);
    i = j;
  }
  return h;
}

// log P = ceil(sqrt(log2|S| * log2 log2 N)), at least 1.
inline Index modulus_window(std::size_t s_size, Index universe) {
  const double ls = std::log2(static_cast<double>(std::max<std::size_t>(s_size, 2)));
  const double lln = std::log2(std::max(2.0, std::log2(static_cast<double>(std::max<Index>(universe, 4)))));
  const int e = std::max(1, static_cast<int>(std::ceil(std::sqrt(ls * lln) - 1e-12)));
  return Index{1} << std::min(e, 40);
}

// Product M of primes from [P, 2P] with |S mod M| >= 0.9 |S|.
inline ModulusResult find_modulus(const IntSet& s, Index universe) {
  if (s.empty()) throw invalid_parameter("find_modulus: empty set");
  ModulusResult res;
  res.window_p = modulus_window(s.size(), universe);
  if (s.size() == 1) {
    res.distinct_residues = 1;
    return res;
  }
  const auto primes = primes_in_range(static_cast<std::uint64_t>(res.window_p), static_cast<std::uint64_t>(2 * res.window_p));
  const Count target_tenths = static_cast<Count>(s.size());  // stop once 10 h <= |S|
  Index m = 1;
  Count h = collision_pairs(s, 1);
  while (10 * h > target_tenths) {
    Index best = 0;
    Count best_h = 0;
    for (auto p : primes) {
      if (detail::mul_exceeds(m, static_cast<Index>(p), Index{1} << 62)) throw arithmetic_overflow("find_modulus: modulus overflow");
      const Count hp = collision_pairs(s, m * static_cast<Index>(p));
      if (best == 0 || hp < best_h) {
        best = static_cast<Index>(p);
        best_h = hp;
      }
    }
    m *= best;
    h = best_h;
    res.prime_factors.push_back(best);
  }
  res.modulus = m;
  res.collisions = h;
  res.distinct_residues = static_cast<Index>(residues(s, m).size());
  return res;
}

struct CoverResult {
  Index modulus = 1;
  IntSet deltas;                  // {0, d1} + ... + {0, dk} mod M
  std::vector<Index> generators;  // d1..dk in the order picked
  std::vector<double> uncovered;  // fraction of Z_M outside S_i, per step
};

// Greedy cover: S_hat + deltas = Z_M.
inline CoverResult find_cover(const IntSet& s_hat, Index m) {
  if (s_hat.empty()) throw invalid_parameter("find_cover: empty set");
  if (m <= 0) throw invalid_parameter("find_cover: modulus must be positive");
  CoverResult res;
  res.modulus = m;
  res.deltas = {0};
  IntSet cur = residues(s_hat, m);
  res.uncovered.push_back(1.0 - static_cast<double>(cur.size()) / static_cast<double>(m));
  while (static_cast<Index>(cur.size()) < m) {
    // f[delta] = |(S_i + delta) cap S_i|
    const SparseVec f = conv_cyclic(indicator(cur), indicator(residues(negate_set(cur), m)), m);
    Index best = -1;
    Count best_v = 0;
    std::size_t k = 0;
    for (Index d = 0; d < m; ++d) {
      Count v = 0;
      if (k < f.entries().size() && f.entries()[k].index == d) v = f.entries()[k++].count;
      if (best < 0 || v < best_v) {
        best = d;
        best_v = v;
        if (v == 0) break;
      }
    }
    res.generators.push_back(best);
    std::vector<Index> grown(cur.begin(), cur.end());
    for (Index x : cur) grown.push_back(floor_mod(x + best, m));
    cur = make_set(std::move(grown));
    std::vector<Index> nd(res.deltas.begin(), res.deltas.end());
    for (Index x : res.deltas) nd.push_back(floor_mod(x + best, m));
    res.deltas = make_set(std::move(nd));
    res.uncovered.push_back(1.0 - static_cast<double>(cur.size()) / static_cast<double>(m));
  }
  return res;
}

struct CPartition {
  std::vector<IntSet> parts;
  std::vector<Index> shifts;  // phi for each part
  IntSet good;                // residues with low bucket load
  double load_bound = 0;      // 2 |A+S| |Delta| / M
};

// Splits C so that within part i every c has (1_{A+S} *_M 1_{Delta + phi_i})[c mod M] <= load_bound.
inline CPartition partition_c(const IntSet& a_plus_s, const CoverResult& cover, const IntSet& c) {
  const Index m = cover.modulus;
  CPartition res;
  std::vector<Entry> folded;
  folded.reserve(a_plus_s.size());
  for (Index x : a_plus_s) folded.push_back({floor_mod(x, m), 1});
  const SparseVec load = conv_cyclic(SparseVec::from_entries(std::move(folded)), indicator(cover.deltas), m);
  res.load_bound = 2.0 * static_cast<double>(a_plus_s.size()) * static_cast<double>(cover.deltas.size()) / static_cast<double>(m);
  std::size_t k = 0;
  for (Index r = 0; r < m; ++r) {
    Count v = 0;
    if (k < load.entries().size() && load.entries()[k].index == r) v = load.entries()[k++].count;
    if (static_cast<double>(v) <= res.load_bound) res.good.push_back(r);
  }
  const CoverResult phi = find_cover(res.good, m);
  res.shifts = phi.deltas;
  res.parts.assign(res.shifts.size(), {});
  for (Index x : c) {
    const Index xr = floor_mod(x, m);
    bool placed = false;
    for (std::size_t i = 0; i < res.shifts.size(); ++i) {
      if (set_contains(res.good, floor_mod(xr - res.shifts[i], m))) {
        res.parts[i].push_back(x);
        placed = true;
        break;
      }
    }
    if (!placed) throw internal_error("partition_c: residue not covered");
  }
  // drop empty parts
  std::vector<IntSet> parts;
  std::vector<Index> shifts;
  for (std::size_t i = 0; i < res.parts.size(); ++i) {
    if (!res.parts[i].empty()) {
      parts.push_back(std::move(res.parts[i]));
      shifts.push_back(res.shifts[i]);
    }
  }
  res.parts = std::move(parts);
  res.shifts = std::move(shifts);
  return res;
}

}  // namespace addcomb
