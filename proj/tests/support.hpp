#pragma once

// Shared generators and conversions for the test suites.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "addcomb/vecmath.hpp"

namespace testing_support {

using addcomb::Count;
using addcomb::Index;
using addcomb::IntSet;
using addcomb::SparseVec;

inline std::map<Index, Count> to_map(const SparseVec& v) {
  std::map<Index, Count> m;
  for (const auto& e : v.entries()) m[e.index] = e.count;
  return m;
}

inline SparseVec from_map(const std::map<Index, Count>& m) {
  std::vector<addcomb::Entry> es;
  for (auto [i, c] : m) es.push_back({i, c});
  return SparseVec::from_entries(es);
}

inline std::vector<Index> as_vector(const IntSet& s) { return {s.begin(), s.end()}; }

// k distinct values from [lo, hi].
inline IntSet random_set(std::mt19937_64& rng, Index lo, Index hi, std::size_t k) {
  k = std::min<std::size_t>(k, static_cast<std::size_t>(hi - lo + 1));
  std::vector<Index> v;
  if (static_cast<double>(k) * 3 > static_cast<double>(hi - lo + 1)) {
    for (Index x = lo; x <= hi; ++x) v.push_back(x);
    std::shuffle(v.begin(), v.end(), rng);
    v.resize(k);
  } else {
    std::uniform_int_distribution<Index> d(lo, hi);
    std::vector<Index> seen;
    while (v.size() < k) {
      v.push_back(d(rng));
      if (v.size() % 64 == 0 || v.size() == k) {
        v = addcomb::make_set(v);
      }
    }
  }
  return addcomb::make_set(v);
}

inline std::vector<Index> random_multiset(std::mt19937_64& rng, Index universe, std::size_t k) {
  std::uniform_int_distribution<Index> d(0, universe - 1);
  std::vector<Index> v(k);
  for (auto& x : v) x = d(rng);
  return v;
}

inline IntSet interval(Index lo, Index len) {
  IntSet s(static_cast<std::size_t>(len));
  for (Index i = 0; i < len; ++i) s[static_cast<std::size_t>(i)] = lo + i;
  return s;
}

inline IntSet arithmetic_progression(Index start, Index step, Index len) {
  IntSet s;
  for (Index i = 0; i < len; ++i) s.push_back(start + step * i);
  return addcomb::make_set(s);
}

// Greedy Sidon set (all pairwise sums distinct) of size n.
inline IntSet sidon_set(std::size_t n) {
  IntSet s;
  std::vector<char> used;
  for (Index x = 0; s.size() < n; ++x) {
    bool ok = true;
    std::vector<Index> sums;
    for (Index y : s) {
      const Index t = x + y;
      if (t < static_cast<Index>(used.size()) && used[static_cast<std::size_t>(t)]) {
        ok = false;
        break;
      }
      sums.push_back(t);
    }
    if (!ok || (static_cast<Index>(used.size()) > 2 * x && used[static_cast<std::size_t>(2 * x)])) continue;
    sums.push_back(2 * x);
    if (used.size() <= static_cast<std::size_t>(2 * x)) used.resize(static_cast<std::size_t>(4 * x + 8), 0);
    for (Index t : sums) used[static_cast<std::size_t>(t)] = 1;
    s.push_back(x);
  }
  return s;
}

// Union of a few random-offset intervals: small doubling, nontrivial structure.
inline IntSet interval_union(std::mt19937_64& rng, Index universe, int pieces, Index len) {
  std::uniform_int_distribution<Index> d(0, std::max<Index>(0, universe - len));
  std::vector<Index> v;
  for (int p = 0; p < pieces; ++p) {
    const Index s = d(rng);
    for (Index i = 0; i < len; ++i) v.push_back(s + i);
  }
  return addcomb::make_set(v);
}

// Dense random subset of an arithmetic progression.
inline IntSet ap_subset(std::mt19937_64& rng, Index start, Index step, Index len, double keep) {
  std::bernoulli_distribution b(keep);
  IntSet s;
  for (Index i = 0; i < len; ++i) {
    if (b(rng)) s.push_back(start + step * i);
  }
  if (s.empty()) s.push_back(start);
  return s;
}

}  // namespace testing_support
