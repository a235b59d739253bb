#pragma once

// Constructive Balog-Szemeredi-Gowers: extract a small high-energy subset by
// hashing into buckets, pick a Schoen subset X = A n (A + s), and assemble
// A', B' with a small sumset.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "addcomb/approx_count.hpp"
#include "addcomb/errors.hpp"
#include "addcomb/hashing.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

struct BsgConfig {
  double slack_budget = 0;      // 0 selects 2^{0.7 log2 N / sqrt(log2 log2 N)}
  double size_slack = 2;        // the high-energy loop stops once |A_i| <= R * size_slack
  double energy_slack = 4;      // sigma: a bucket is kept if E(G) >= |G|^3 / (3 K sigma)
  double window_factor = 10;    // bucket size window is [|A|/(p w), |A| w / p] with w = window_factor * K
  std::uint64_t p_floor = 2;
  double fallback_factor = 192; // |A| < fallback_factor * K^{r+3} returns A' = A, |B'| = 1
  double bucket_budget = 4e9;   // members * p buckets per round
  ApproxParams approx;
};

inline double default_slack_budget(Index universe) {
  const double lg = std::max(2.0, std::log2(static_cast<double>(std::max<Index>(universe, 4))));
  const double llg = std::max(1.0, std::log2(lg));
  return std::pow(2.0, 0.7 * lg / std::sqrt(llg));
}

struct HighEnergyResult {
  IntSet subset;
  double k_final = 1;      // E(subset) >= |subset|^3 / k_final; the caller's K when no round ran
  int rounds = 0;
  std::size_t energy_tests = 0;
  std::uint64_t last_p = 0;
  std::vector<std::string> notes;
};

struct SchoenOutput {
  IntSet x_subset;
  Index s_shift = 0;
  double c = 0;
  Count m_tilde = 0;
  std::size_t p_tilde_size = 0;
  std::size_t q_tilde_size = 0;
  std::size_t shifts_tried = 0;
};

struct BsgMeasured {
  std::size_t sum_ab = 0;   // |A' + B'|
  std::size_t sum_aa = 0;   // |A' + A'|
  Count energy_a = 0;       // approximate E(A) from the precondition check
  double sum_ratio = 0;     // |A' + B'| / (K^5 |A|)
  double b_ratio = 0;       // |B'| K^{r+3} / |A|
};

struct BsgOutput {
  IntSet a_prime;
  IntSet b_prime;
  double K = 1;
  int r = 2;
  double slack_budget = 1;
  bool fallback = false;
  BsgMeasured measured;
  std::size_t s_size = 0, b1_size = 0, b0_size = 0, x_size = 0;
  double k_b0 = 0;
  Index schoen_shift = 0;
  std::vector<std::string> notes;
};

namespace detail {

inline Index set_span(const IntSet& a) { return a.back() - a.front() + 1; }

inline double cube(double x) { return x * x * x; }

inline void check_set(const IntSet& a, const char* who) {
  if (a.empty()) throw invalid_parameter(std::string(who) + ": empty set");
  if (!std::is_sorted(a.begin(), a.end()) || std::adjacent_find(a.begin(), a.end()) != a.end()) {
    throw invalid_parameter(std::string(who) + ": input must be sorted without duplicates");
  }
}

// Approximate test E(A) >= |A|^3 / (3K); sound when E(A) >= |A|^3 / K.
inline Count energy_precheck(const IntSet& a, double K, const ApproxParams& ap, const char* who) {
  const double n = static_cast<double>(a.size());
  const Count e = approx_energy(indicator(a), std::min(1.0, 1.0 / (3.0 * K)), ap);
  if (static_cast<double>(e) < 2.0 / 3.0 * cube(n) / K) {
    throw precondition_failed(std::string(who) + ": approximate energy " + std::to_string(e) + " below 2|A|^3/(3K)");
  }
  return e;
}

// One round: scan (h, i) in family order, return the first bucket union that
// passes the size window and the approximate energy test.
inline IntSet high_energy_round(const IntSet& a, double K, double R, double k0, const BsgConfig& cfg,
                                HighEnergyResult& res) {
  const double n = static_cast<double>(a.size());
  const Index base = a.front();
  const Index universe = std::max<Index>(2, set_span(a));
  const auto want = static_cast<std::uint64_t>(std::ceil(10.0 * n / R));
  const std::uint64_t p = next_prime(std::max<std::uint64_t>({cfg.p_floor, want, 2}));
  res.last_p = p;

  HashConfig hc;
  hc.k = 4;
  hc.p = p;
  hc.moduli = {next_prime(static_cast<std::uint64_t>(2 * universe + 1))};
  hc.field_degree = 1;
  const HashFamily fam(universe, hc);
  for (const auto& s : fam.notes()) {
    if (std::find(res.notes.begin(), res.notes.end(), s) == res.notes.end()) res.notes.push_back(s);
  }
  const std::uint64_t members = fam.size_u64();
  if (members == 0 || static_cast<double>(members) * static_cast<double>(p) > cfg.bucket_budget) {
    throw budget_exceeded("find_high_energy_subset: " + std::to_string(p) + "^3 buckets above budget");
  }

  const double w = cfg.window_factor * K;
  const double lo = std::max({n / (static_cast<double>(p) * w), R / (k0 * k0), 1.0});
  const double hi = std::min(n * w / static_cast<double>(p), n / 2.0);
  const double eps = std::min(1.0, 1.0 / (3.0 * K * cfg.energy_slack));

  std::vector<std::uint64_t> hv(a.size());
  std::vector<Count> bucket(p);
  std::set<IntSet> rejected;
  for (std::uint64_t j = 0; j < members; ++j) {
    const HashSpec h = fam.member(j);
    std::fill(bucket.begin(), bucket.end(), 0);
    for (std::size_t t = 0; t < a.size(); ++t) {
      hv[t] = hash_eval(h, a[t] - base);
      ++bucket[hv[t]];
    }
    const auto dp = delta_prime(h);
    for (std::uint64_t i = 0; i < p; ++i) {
      Count size = 0;
      for (std::uint64_t d : dp) size += bucket[(i + d) % p];
      if (static_cast<double>(size) < lo || static_cast<double>(size) > hi) continue;
      std::vector<char> in(p, 0);
      for (std::uint64_t d : dp) in[(i + d) % p] = 1;
      IntSet g;
      g.reserve(static_cast<std::size_t>(size));
      for (std::size_t t = 0; t < a.size(); ++t) {
        if (in[hv[t]]) g.push_back(a[t]);
      }
      if (rejected.count(g)) continue;
      ++res.energy_tests;
      const Count e = approx_energy(indicator(g), eps, cfg.approx);
      const double gs = static_cast<double>(g.size());
      if (static_cast<double>(e) >= 2.0 / 3.0 * cube(gs) / (K * cfg.energy_slack)) return g;
      rejected.insert(std::move(g));
    }
  }
  throw search_exhausted("find_high_energy_subset: no bucket union passed the window and energy test (p=" +
                         std::to_string(p) + ")");
}

}  // namespace detail

// A' subset of A with R/K^2 <= |A'| <= R * size_slack and E(A') >= |A'|^3 / k_final.
inline HighEnergyResult find_high_energy_subset(const IntSet& a, double R, double K, const BsgConfig& cfg = {}) {
  detail::check_set(a, "find_high_energy_subset");
  if (!(K >= 1.0)) throw invalid_parameter("find_high_energy_subset: K must be at least 1");
  if (!(R >= 1.0) || R > static_cast<double>(a.size())) throw invalid_parameter("find_high_energy_subset: need 1 <= R <= |A|");
  HighEnergyResult res;
  if (K > std::cbrt(R) + 1e-9) res.notes.push_back("K above R^{1/3}");
  detail::energy_precheck(a, K, cfg.approx, "find_high_energy_subset");
  IntSet cur = a;
  double k = K;
  while (static_cast<double>(cur.size()) > R * cfg.size_slack) {
    cur = detail::high_energy_round(cur, k, R, K, cfg, res);
    k *= 3.0 * cfg.energy_slack;
    ++res.rounds;
  }
  res.subset = std::move(cur);
  res.k_final = k;
  return res;
}

// X = A n (A + s) with |X| >= |A|/(3K) and at most 18c|X|^2 pairs whose
// difference is unpopular (below c|A|/(3K)) in 1_A * 1_{-A}.
inline SchoenOutput schoen_subset(const IntSet& a, double K, double c, const BsgConfig& cfg = {}) {
  detail::check_set(a, "schoen_subset");
  if (!(K >= 1.0)) throw invalid_parameter("schoen_subset: K must be at least 1");
  if (!(c > 0.0 && c < 1.0)) throw invalid_parameter("schoen_subset: c must lie in (0, 1)");
  SchoenOutput out;
  out.c = c;
  if (a.size() == 1) {
    out.x_subset = a;
    return out;
  }
  const double n = static_cast<double>(a.size());
  const SparseVec va = indicator(a), vna = va.negated();

  const SparseVec fp = popular_sums_approx(va, vna, c / (3.0 * K), cfg.approx);
  std::vector<Index> pt;
  for (const auto& e : fp.entries()) {
    if (static_cast<double>(e.count) >= 2.0 * c * n / (3.0 * K)) pt.push_back(e.index);
  }
  const SparseVec p_tilde = indicator(make_set(std::move(pt)));
  out.p_tilde_size = p_tilde.sparsity();

  const SparseVec fq = popular_sums_approx(va, vna, std::min(1.0, 1.0 / (12.0 * K)), cfg.approx);
  std::vector<Index> q_tilde;
  for (const auto& e : fq.entries()) {
    if (static_cast<double>(e.count) >= n / (6.0 * K)) q_tilde.push_back(e.index);
  }
  out.q_tilde_size = q_tilde.size();
  std::sort(q_tilde.begin(), q_tilde.end(), [](Index x, Index y) {
    return std::abs(x) != std::abs(y) ? std::abs(x) < std::abs(y) : x < y;
  });

  const SparseVec zero = indicator(IntSet{0});
  for (Index s : q_tilde) {
    ++out.shifts_tried;
    IntSet x = set_intersection(a, shift_set(a, s));
    const double xs = static_cast<double>(x.size());
    if (xs < n / (3.0 * K)) continue;
    const Count m = p_tilde.empty()
                        ? 0
                        : approx_4sum_count(indicator(x), zero, indicator(x), p_tilde,
                                            std::min(1.0, c * xs / (2.0 * static_cast<double>(p_tilde.sparsity()))),
                                            cfg.approx);
    if (xs * xs - static_cast<double>(m) <= 17.0 * c * xs * xs) {
      out.x_subset = std::move(x);
      out.s_shift = s;
      out.m_tilde = m;
      return out;
    }
  }
  throw search_exhausted("schoen_subset: no shift passed the acceptance test");
}

inline BsgOutput bsg_decompose(const IntSet& a, double K, int r, const BsgConfig& cfg = {}) {
  detail::check_set(a, "bsg_decompose");
  if (!(K >= 1.0)) throw invalid_parameter("bsg_decompose: K must be at least 1");
  if (r < 2) throw invalid_parameter("bsg_decompose: r must be at least 2");
  BsgOutput out;
  out.K = K;
  out.r = r;
  out.slack_budget = cfg.slack_budget > 0 ? cfg.slack_budget : default_slack_budget(detail::set_span(a));
  const double n = static_cast<double>(a.size());
  out.measured.energy_a = detail::energy_precheck(a, K, cfg.approx, "bsg_decompose");

  auto finish = [&]() {
    out.measured.sum_ab = sumset(out.a_prime, out.b_prime).size();
    out.measured.sum_aa = sumset(out.a_prime, out.a_prime).size();
    out.measured.sum_ratio = static_cast<double>(out.measured.sum_ab) / (std::pow(K, 5) * n);
    out.measured.b_ratio = static_cast<double>(out.b_prime.size()) * std::pow(K, r + 3) / n;
    return out;
  };

  if (n < cfg.fallback_factor * std::pow(K, r + 3)) {
    out.fallback = true;
    out.a_prime = a;
    out.b_prime = {a.front()};
    return finish();
  }

  const SparseVec va = indicator(a), vna = va.negated();
  // S sits between the |A|/(4K)- and |A|/(2K)-popular sums of A + A.
  std::vector<Index> sv;
  const SparseVec f0 = popular_sums_approx(va, va, 1.0 / (8.0 * K), cfg.approx);
  for (const auto& e : f0.entries()) {
    if (static_cast<double>(e.count) >= 3.0 * n / (8.0 * K)) sv.push_back(e.index);
  }
  const IntSet s = make_set(std::move(sv));
  out.s_size = s.size();
  const SparseVec vs = indicator(s);

  // B1: elements b with (1_S * 1_{-A})[b] between |A|/(32K) and |A|/(16K).
  const SparseVec f1 = popular_sums_approx(vs, vna, 1.0 / (64.0 * K), cfg.approx);
  IntSet b1;
  for (Index b : a) {
    if (static_cast<double>(f1.at(b)) >= 3.0 * n / (64.0 * K)) b1.push_back(b);
  }
  out.b1_size = b1.size();
  if (b1.empty()) throw internal_error("bsg_decompose: B1 is empty");

  double R = n / (3.0 * std::pow(K, r));
  if (R > static_cast<double>(b1.size())) {
    out.notes.push_back("R clamped to |B1|");
    R = static_cast<double>(b1.size());
  }
  R = std::max(R, 1.0);
  const auto hfe = find_high_energy_subset(b1, R, 4.0 * K, cfg);
  for (const auto& note : hfe.notes) out.notes.push_back("high-energy: " + note);
  const IntSet& b0 = hfe.subset;
  out.b0_size = b0.size();
  out.k_b0 = hfe.k_final;

  const double c = 1.0 / (8192.0 * K);
  const auto sch = schoen_subset(b0, hfe.k_final, c, cfg);
  const IntSet& x = sch.x_subset;
  out.x_size = x.size();
  out.schoen_shift = sch.s_shift;

  // B': drop elements of X with too many unpopular partners.
  const double tau = c * static_cast<double>(b0.size()) / (3.0 * hfe.k_final);
  const SparseVec vb0 = indicator(b0);
  const CountLookup diff(conv_sparse(vb0, vb0.negated()));
  const double allowed = 36.0 * c * static_cast<double>(x.size());
  for (Index b : x) {
    std::size_t bad = 0;
    for (Index bp : x) bad += static_cast<double>(diff(b - bp)) < tau;
    if (static_cast<double>(bad) <= allowed) out.b_prime.push_back(b);
  }
  if (out.b_prime.empty()) throw internal_error("bsg_decompose: B' is empty");

  // A': elements a with (1_S * 1_{-X})[a] between |X|/(128K) and |X|/(64K).
  const double xs = static_cast<double>(x.size());
  const SparseVec f2 = popular_sums_approx(vs, indicator(x).negated(), 1.0 / (256.0 * K), cfg.approx);
  for (Index v : a) {
    if (static_cast<double>(f2.at(v)) >= 3.0 * xs / (256.0 * K)) out.a_prime.push_back(v);
  }
  if (out.a_prime.empty()) throw internal_error("bsg_decompose: A' is empty");
  return finish();
}

}  // namespace addcomb
