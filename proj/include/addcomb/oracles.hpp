#pragma once

// Brute-force reference implementations. Deliberately naive, built only on
// standard containers, and guarded by work budgets.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "addcomb/errors.hpp"

namespace addcomb::oracle {

using Index = std::int64_t;
using Count = std::int64_t;

inline constexpr double kDefaultBudget = 2e8;

inline void charge(double work, double budget, const char* what) {
  if (work > budget) throw budget_exceeded(std::string("oracle budget exceeded: ") + what);
}

// Multiset given as a list of values (duplicates are multiplicity).
inline std::map<Index, Count> bf_conv(const std::vector<Index>& a, const std::vector<Index>& b,
                                      double budget = kDefaultBudget) {
  charge(static_cast<double>(a.size()) * static_cast<double>(b.size()), budget, "bf_conv");
  std::map<Index, Count> r;
  for (Index x : a) {
    for (Index y : b) ++r[x + y];
  }
  return r;
}

inline std::map<Index, Count> bf_conv_weighted(const std::map<Index, Count>& x, const std::map<Index, Count>& y,
                                               double budget = kDefaultBudget) {
  charge(static_cast<double>(x.size()) * static_cast<double>(y.size()), budget, "bf_conv_weighted");
  std::map<Index, Count> r;
  for (auto [i, u] : x) {
    for (auto [j, v] : y) r[i + j] += u * v;
  }
  for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
  return r;
}

// E(A) = sum_s r(s)^2 with r(s) = #{(a, b) in A^2 : a + b = s}.
inline __int128 bf_energy(const std::vector<Index>& a, double budget = kDefaultBudget) {
  charge(static_cast<double>(a.size()) * static_cast<double>(a.size()), budget, "bf_energy");
  std::map<Index, Count> r;
  for (Index x : a) {
    for (Index y : a) ++r[x + y];
  }
  __int128 e = 0;
  for (auto [s, c] : r) e += static_cast<__int128>(c) * c;
  return e;
}

inline std::set<Index> bf_sumset(const std::vector<Index>& a, const std::vector<Index>& b,
                                 double budget = kDefaultBudget) {
  charge(static_cast<double>(a.size()) * static_cast<double>(b.size()), budget, "bf_sumset");
  std::set<Index> s;
  for (Index x : a) {
    for (Index y : b) s.insert(x + y);
  }
  return s;
}

// Shifts c in [-max B, max A] with |(c + B) \ A| <= k (or < k when strict).
inline std::vector<Index> bf_constellation(const std::vector<Index>& a, const std::vector<Index>& b, Count k,
                                           bool strict = false, double budget = kDefaultBudget) {
  std::set<Index> as(a.begin(), a.end()), bs(b.begin(), b.end());
  std::vector<Index> out;
  if (bs.empty()) return out;
  const Index lo = -*bs.rbegin(), hi = as.empty() ? 0 : *as.rbegin();
  charge(static_cast<double>(hi - lo + 1) * static_cast<double>(bs.size()), budget, "bf_constellation");
  for (Index c = lo; c <= hi; ++c) {
    Count miss = 0;
    for (Index x : bs) miss += as.count(c + x) ? 0 : 1;
    if (strict ? miss < k : miss <= k) out.push_back(c);
  }
  return out;
}

// d(i) = #{j : T[i + j] != P[j]} for every shift 0 <= i <= n - m.
template <class Sym>
std::vector<Count> bf_hamming(const std::vector<Sym>& text, const std::vector<Sym>& pattern,
                              double budget = kDefaultBudget) {
  std::vector<Count> d;
  if (pattern.size() > text.size()) return d;
  const std::size_t shifts = text.size() - pattern.size() + 1;
  charge(static_cast<double>(shifts) * static_cast<double>(pattern.size()), budget, "bf_hamming");
  d.assign(shifts, 0);
  for (std::size_t i = 0; i < shifts; ++i) {
    for (std::size_t j = 0; j < pattern.size(); ++j) d[i] += text[i + j] != pattern[j];
  }
  return d;
}

// Shifts where P matches T with at most k mismatches; `wild` in P matches anything.
template <class Sym>
std::vector<Index> bf_wildcard(const std::vector<Sym>& text, const std::vector<Sym>& pattern, Count k, Sym wild,
                               double budget = kDefaultBudget) {
  std::vector<Index> out;
  if (pattern.size() > text.size()) return out;
  const std::size_t shifts = text.size() - pattern.size() + 1;
  charge(static_cast<double>(shifts) * static_cast<double>(pattern.size()), budget, "bf_wildcard");
  for (std::size_t i = 0; i < shifts; ++i) {
    Count miss = 0;
    for (std::size_t j = 0; j < pattern.size(); ++j) miss += (pattern[j] != wild && text[i + j] != pattern[j]);
    if (miss <= k) out.push_back(static_cast<Index>(i));
  }
  return out;
}

// max over nonzero characters gamma of |(1/|C|) sum_{x in C} omega^{<gamma, x>}|,
// omega a primitive p-th root of unity; C is a multiset of vectors over F_p.
inline double bf_bias(const std::vector<std::vector<std::uint64_t>>& set, std::uint64_t p,
                      double budget = kDefaultBudget) {
  if (set.empty()) throw invalid_parameter("bf_bias: empty set");
  const std::size_t m = set.front().size();
  double chars = std::pow(static_cast<double>(p), static_cast<double>(m));
  charge(chars * static_cast<double>(set.size()) * static_cast<double>(m), budget, "bf_bias");
  std::vector<std::uint64_t> gamma(m, 0);
  double worst = 0;
  while (true) {
    // next gamma in lexicographic order; stop after wrapping to zero
    std::size_t pos = 0;
    while (pos < m && ++gamma[pos] == p) gamma[pos++] = 0;
    if (pos == m) break;
    std::vector<double> hist(p, 0.0);
    for (const auto& v : set) {
      std::uint64_t dot = 0;
      for (std::size_t t = 0; t < m; ++t) dot = (dot + gamma[t] * v[t]) % p;
      hist[dot] += 1.0;
    }
    std::complex<double> s = 0;
    for (std::uint64_t j = 0; j < p; ++j) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p);
      s += hist[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    worst = std::max(worst, std::abs(s) / static_cast<double>(set.size()));
  }
  return worst;
}

}  // namespace addcomb::oracle
