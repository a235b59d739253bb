#pragma once

// Exact counts for the popular sums {s : (1_A * 1_B)[s] >= |A|/k}. A is peeled
// into BSG parts A_i with companions B_i; sums popular in some part are counted
// with the small-doubling routine, the rest directly.

#include <algorithm>
#include <cmath>
#include <vector>

#include "addcomb/approx_count.hpp"
#include "addcomb/bsg.hpp"
#include "addcomb/errors.hpp"
#include "addcomb/small_doubling.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

struct PopularExactConfig {
  double K = 0;  // 0 selects |A|^{3/64}
  BsgConfig bsg;
  ApproxParams approx;
};

struct PopularDecomposition {
  std::vector<IntSet> parts;       // A_1..A_g
  std::vector<IntSet> companions;  // B_1..B_g
  IntSet residual;                 // A hat
  std::vector<IntSet> targets;     // S_1..S_g
  IntSet residual_targets;         // S hat
  IntSet candidates;               // S tilde
  double K = 1;
  std::size_t bsg_fallbacks = 0;
  double s_hat_bound = 0;          // k^2 sqrt(|B|^3 / (K |A|)), diagnostic only
};

struct PopularExactResult {
  IntSet sums;                // popular s, ascending
  std::vector<Count> counts;  // aligned with sums
  PopularDecomposition decomposition;
};

inline PopularExactResult popular_sums_exact(const IntSet& a, const IntSet& b, Count k,
                                             const PopularExactConfig& cfg = {}) {
  if (k < 1) throw invalid_parameter("popular_sums_exact: k must be at least 1");
  PopularExactResult res;
  if (a.empty() || b.empty()) return res;
  detail::check_set(a, "popular_sums_exact");
  detail::check_set(b, "popular_sums_exact");
  auto& dec = res.decomposition;
  const double n = static_cast<double>(a.size());
  const double kd = static_cast<double>(k);
  const double K = std::max(1.0, cfg.K > 0 ? cfg.K : std::pow(n, 3.0 / 64.0));
  dec.K = K;

  // Peel BSG parts while the residual is large and has high energy.
  IntSet rest = a;
  while (static_cast<double>(rest.size()) > n / std::cbrt(K)) {
    const double rs = static_cast<double>(rest.size());
    const Count e = approx_energy(indicator(rest), std::min(1.0, 1.0 / (2.0 * K)), cfg.approx);
    if (static_cast<double>(e) <= 1.5 * rs * rs * rs / K) break;
    const BsgOutput o = bsg_decompose(rest, K, 3, cfg.bsg);
    dec.bsg_fallbacks += o.fallback;
    rest = set_minus(rest, o.a_prime);
    dec.parts.push_back(o.a_prime);
    dec.companions.push_back(o.b_prime);
  }
  dec.residual = rest;
  const std::size_t g = dec.parts.size();
  dec.s_hat_bound = kd * kd * std::sqrt(std::pow(static_cast<double>(b.size()), 3.0) / (K * n));

  // S tilde sits between the |A|/(2k)- and |A|/k-popular sums.
  const SparseVec vb = indicator(b);
  const SparseVec ft = popular_sums_approx(vb, indicator(a), std::min(1.0, 1.0 / (4.0 * kd)), cfg.approx);
  for (const auto& e : ft.entries()) {
    if (static_cast<double>(e.count) >= 3.0 * n / (4.0 * kd)) dec.candidates.push_back(e.index);
  }

  // Assign each candidate to the first part where it is approximately popular.
  std::vector<Index> owner(dec.candidates.size(), -1);
  for (std::size_t i = 0; i < g; ++i) {
    const double ai = static_cast<double>(dec.parts[i].size());
    const SparseVec fi = popular_sums_approx(vb, indicator(dec.parts[i]), std::min(1.0, 1.0 / (12.0 * kd)), cfg.approx);
    const CountLookup at(fi);
    for (std::size_t t = 0; t < dec.candidates.size(); ++t) {
      if (owner[t] < 0 && static_cast<double>(at(dec.candidates[t])) >= ai / (6.0 * kd)) owner[t] = static_cast<Index>(i);
    }
  }
  dec.targets.assign(g, {});
  for (std::size_t t = 0; t < dec.candidates.size(); ++t) {
    if (owner[t] < 0) {
      dec.residual_targets.push_back(dec.candidates[t]);
    } else {
      dec.targets[static_cast<std::size_t>(owner[t])].push_back(dec.candidates[t]);
    }
  }

  std::vector<Count> count(dec.candidates.size(), 0);
  auto store = [&](const IntSet& ss, const std::vector<Count>& vals) {
    for (std::size_t t = 0; t < ss.size(); ++t) {
      const auto pos = std::lower_bound(dec.candidates.begin(), dec.candidates.end(), ss[t]) - dec.candidates.begin();
      count[static_cast<std::size_t>(pos)] = vals[t];
    }
  };
  const IntSet neg_b = negate_set(b);
  for (std::size_t i = 0; i < g; ++i) {
    if (dec.targets[i].empty()) continue;
    // reverse[s] = (1_A * 1_B)[s] for s in S_i; B_i keeps |S_i + B_i| small
    store(dec.targets[i], count_small_doubling(dec.targets[i], neg_b, a, dec.companions[i]).reverse);
  }
  if (!dec.residual_targets.empty()) store(dec.residual_targets, conv_partial(indicator(a), vb, dec.residual_targets));

  for (std::size_t t = 0; t < dec.candidates.size(); ++t) {
    if (count[t] * k >= static_cast<Count>(a.size())) {
      res.sums.push_back(dec.candidates[t]);
      res.counts.push_back(count[t]);
    }
  }
  return res;
}

}  // namespace addcomb
