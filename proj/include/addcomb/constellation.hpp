#pragma once

// k-mismatch constellation: all shifts c with |(c + B) \ A| <= k, equivalently
// (1_A * 1_{-B})[c] >= |B| - k. The default solver is deterministic (scaling
// over moduli M * 2^i); a seeded subsampling filter feeds the large-B solver for
// the randomized path. Wildcard string matching reduces to the same counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "addcomb/approx_count.hpp"
#include "addcomb/errors.hpp"
#include "addcomb/hamming.hpp"
#include "addcomb/modular.hpp"
#include "addcomb/oracles.hpp"
#include "addcomb/popular_exact.hpp"
#include "addcomb/small_doubling.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

enum class Convention { at_most, strict_less };

struct ConstellationInstance {
  IntSet a;
  IntSet b;
  Count k = 0;
  Convention convention = Convention::at_most;
  double eta = 0.7;    // headroom of the subsampling filter
  Index universe = 0;  // N; 0 selects max(A u B) + 1
};

struct ConstellationConfig {
  double R = 0;               // 0 selects ceil((k / L^2)^{1/3}) clamped to [1, k]
  bool verify_bounds = true;  // recompute |B_bad| and |C - C| exactly in the large-B branch
  bool keep_levels = false;   // store every C_i in the level log
  ApproxParams approx;
  PopularExactConfig popular;
};

// Output of the fixed-C solvers, aligned with the sorted candidate set.
struct CandidateCounts {
  std::vector<Count> counts;
  bool delegated = false;   // large-B call answered by the small-C solver
  std::size_t promise_violations = 0;  // candidates with count < |B| - k
  std::size_t b_bad = 0;
  std::size_t b_plus_c = 0;   // |B' + C| (large-B) or |B + C| (small-C), when verified
  std::size_t c_minus_c = 0;  // |C - C|, when verified
  bool b_bad_ok = true;       // |B_bad| <= 4k
  bool c_minus_c_ok = true;   // |C - C| <= 5 |A| L
};

enum class LevelBranch { dense, small_c, large_b };

struct ScalingLevel {
  Index modulus = 0;  // M_i
  std::size_t a_size = 0, b_size = 0;
  std::size_t lifted = 0;      // |C'_i|
  std::size_t candidates = 0;  // |C_i|
  LevelBranch branch = LevelBranch::dense;
  std::size_t b_bad = 0;
  std::size_t c_minus_c = 0;
  bool bounds_ok = true;
  IntSet c;  // C_i, only with keep_levels
};

struct ConstellationResult {
  IntSet shifts;
  std::vector<Count> counts;  // (1_A * 1_{-B})[c], aligned with shifts
  std::string path;           // scaling | popular_exact | all_shifts | empty | randomized
  Count k_effective = 0;      // k after the strict convention is applied
  Index base_modulus = 0;
  double R = 1;
  std::vector<ScalingLevel> levels;
};

inline const char* branch_name(LevelBranch b) {
  switch (b) {
    case LevelBranch::dense: return "dense";
    case LevelBranch::small_c: return "small_c";
    default: return "large_b";
  }
}

namespace detail {

inline void check_instance(const ConstellationInstance& in, const char* who) {
  for (const IntSet* s : {&in.a, &in.b}) {
    if (s->empty()) throw invalid_parameter(std::string(who) + ": empty set");
    if (!std::is_sorted(s->begin(), s->end()) || std::adjacent_find(s->begin(), s->end()) != s->end()) {
      throw invalid_parameter(std::string(who) + ": sets must be sorted without duplicates");
    }
    if (s->front() < 0) throw invalid_parameter(std::string(who) + ": sets must be nonnegative");
  }
  if (in.k < 0) throw invalid_parameter(std::string(who) + ": k must be nonnegative");
}

inline Count effective_k(const ConstellationInstance& in) {
  return in.convention == Convention::strict_less ? in.k - 1 : in.k;
}

inline Index universe_of(const ConstellationInstance& in) {
  const Index top = std::max(in.a.back(), in.b.back()) + 1;
  if (in.universe != 0 && in.universe < top) throw invalid_parameter("constellation: universe smaller than max element + 1");
  return in.universe != 0 ? in.universe : top;
}

inline double default_r(std::size_t a, std::size_t b, Count k) {
  if (k < 1) return 1;
  const double L = static_cast<double>(a) / static_cast<double>(b);
  return std::clamp(std::ceil(std::cbrt(static_cast<double>(k) / (L * L)) - 1e-12), 1.0, static_cast<double>(k));
}

inline std::size_t violations(const std::vector<Count>& counts, std::size_t b, Count k) {
  std::size_t v = 0;
  for (Count x : counts) v += x < static_cast<Count>(b) - k;
  return v;
}

// B_bad = {b : f[b] <= 0.5|C|} with ||f - 1_A * 1_{-C}||_inf <= 0.25|C|.
inline IntSet bad_elements(const IntSet& a, const IntSet& b, const IntSet& c, const ApproxParams& ap) {
  const SparseVec f = popular_sums_approx(indicator(a), indicator(negate_set(c)), 0.25, ap);
  const CountLookup at(f);
  IntSet bad;
  for (Index x : b) {
    if (2 * at(x) <= static_cast<Count>(c.size())) bad.push_back(x);
  }
  return bad;
}

// (1_A * 1_{-B'})[c] + (1_A * 1_{-B_bad})[c] for c in C; the second term via
// the small-doubling counter on (C, B_bad, A, -C).
inline std::vector<Count> split_counts(const IntSet& a, const IntSet& b_good, const IntSet& b_bad, const IntSet& c) {
  std::vector<Count> out = conv_partial(indicator(a), indicator(negate_set(b_good)), c);
  if (!b_bad.empty()) {
    const auto extra = count_small_doubling(c, b_bad, a, negate_set(c)).reverse;
    for (std::size_t t = 0; t < c.size(); ++t) out[t] += extra[t];
  }
  return out;
}

inline void check_candidates(const IntSet& c, const char* who) {
  if (!std::is_sorted(c.begin(), c.end()) || std::adjacent_find(c.begin(), c.end()) != c.end()) {
    throw invalid_parameter(std::string(who) + ": candidates must be sorted without duplicates");
  }
}

}  // namespace detail

// Full shift enumeration through the oracle.
inline IntSet constellation_bruteforce(const ConstellationInstance& in, double budget = oracle::kDefaultBudget) {
  detail::check_instance(in, "constellation_bruteforce");
  const auto v = oracle::bf_constellation({in.a.begin(), in.a.end()}, {in.b.begin(), in.b.end()}, in.k,
                                          in.convention == Convention::strict_less, budget);
  return IntSet(v.begin(), v.end());
}

// Exact counts at every candidate; no structure assumed beyond the promise,
// which is only checked afterwards.
inline CandidateCounts constellation_small_c(const IntSet& a, const IntSet& b, const IntSet& c, Count k,
                                             bool verify = false) {
  detail::check_candidates(c, "constellation_small_c");
  CandidateCounts r;
  r.counts = conv_partial(indicator(a), indicator(negate_set(b)), c);
  r.promise_violations = detail::violations(r.counts, b.size(), k);
  if (verify && !c.empty() && !b.empty()) r.b_plus_c = sumset(b, c).size();
  return r;
}

// Exact counts at every candidate via the B_bad / B' split. Delegates to the
// small-C solver when |C| < |A| / R.
inline CandidateCounts constellation_large_b(const IntSet& a, const IntSet& b, const IntSet& c, Count k, double R,
                                             bool verify = true, const ApproxParams& ap = {}) {
  detail::check_candidates(c, "constellation_large_b");
  if (a.empty() || b.empty()) throw invalid_parameter("constellation_large_b: empty set");
  if (k < 0 || 10 * k > 4 * static_cast<Count>(b.size())) throw invalid_parameter("constellation_large_b: need 0 <= k <= 0.4|B|");
  if (!(R >= 1)) throw invalid_parameter("constellation_large_b: R must be at least 1");
  if (static_cast<double>(c.size()) < static_cast<double>(a.size()) / R) {
    CandidateCounts r = constellation_small_c(a, b, c, k, verify);
    r.delegated = true;
    return r;
  }
  CandidateCounts r;
  const IntSet bad = detail::bad_elements(a, b, c, ap);
  const IntSet good = set_minus(b, bad);
  r.counts = detail::split_counts(a, good, bad, c);
  r.promise_violations = detail::violations(r.counts, b.size(), k);
  r.b_bad = bad.size();
  r.b_bad_ok = static_cast<Count>(bad.size()) <= 4 * k;
  if (verify) {
    r.c_minus_c = sumset(c, negate_set(c)).size();
    const double L = static_cast<double>(a.size()) / static_cast<double>(b.size());
    r.c_minus_c_ok = static_cast<double>(r.c_minus_c) <= 5.0 * static_cast<double>(a.size()) * L;
    if (!good.empty()) r.b_plus_c = sumset(good, c).size();
  }
  return r;
}

// ---- deterministic scaling --------------------------------------------------

namespace detail {

inline ConstellationResult finish_from_counts(const SparseVec& counts, Count threshold, std::string path) {
  ConstellationResult res;
  for (const auto& e : counts.entries()) {
    if (e.count >= threshold) {
      res.shifts.push_back(e.index);
      res.counts.push_back(e.count);
    }
  }
  res.path = std::move(path);
  return res;
}

// k >= |B|: every shift in [-max B, max A] qualifies.
inline ConstellationResult all_shifts(const ConstellationInstance& in) {
  const SparseVec full = conv_sparse(indicator(in.a), indicator(negate_set(in.b)));
  const CountLookup at(full);
  ConstellationResult res;
  res.path = "all_shifts";
  for (Index c = -in.b.back(); c <= in.a.back(); ++c) {
    res.shifts.push_back(c);
    res.counts.push_back(at(c));
  }
  return res;
}

// k > 0.3|B|: the answers are |B| / kk-popular sums of (-B) + A for kk = ceil(|B| / (|B| - k)).
inline ConstellationResult via_popular_sums(const ConstellationInstance& in, Count k, const PopularExactConfig& pc) {
  const Count nb = static_cast<Count>(in.b.size());
  const Count kk = (nb + (nb - k) - 1) / (nb - k);
  const auto pop = popular_sums_exact(negate_set(in.b), in.a, kk, pc);
  ConstellationResult res;
  res.path = "popular_exact";
  for (std::size_t t = 0; t < pop.sums.size(); ++t) {
    if (pop.counts[t] >= nb - k) {
      res.shifts.push_back(pop.sums[t]);
      res.counts.push_back(pop.counts[t]);
    }
  }
  return res;
}

inline IntSet lift_a(const IntSet& a, Index m) {
  const IntSet r = residues(a, m);
  return set_union(r, shift_set(r, m));
}

}  // namespace detail

inline ConstellationResult constellation_deterministic(const ConstellationInstance& in, const ConstellationConfig& cfg = {}) {
  detail::check_instance(in, "constellation_deterministic");
  const Index n = detail::universe_of(in);
  const Count k = detail::effective_k(in);
  const Count nb = static_cast<Count>(in.b.size());
  ConstellationResult res;
  if (k < 0) {
    res.path = "empty";
  } else if (k >= nb) {
    res = detail::all_shifts(in);
  } else if (10 * k > 3 * nb) {
    res = detail::via_popular_sums(in, k, cfg.popular);
  }
  if (!res.path.empty()) {
    res.k_effective = k;
    return res;
  }

  const double R = cfg.R > 0 ? cfg.R : detail::default_r(in.a.size(), in.b.size(), k);
  const Index base = find_modulus(in.b, n).modulus;
  res.R = R;
  res.base_modulus = base;
  res.k_effective = k;
  res.path = "scaling";

  // Level 0: C_0 from a dense cyclic convolution modulo M.
  Index m = base;
  IntSet b_i = residues(in.b, m);
  IntSet a_i = detail::lift_a(in.a, m);
  IntSet c_i;
  std::vector<Count> cnt_i;
  {
    const SparseVec f = conv_cyclic(indicator(residues(in.a, m)), indicator(b_i).negated(), m);
    for (const auto& e : f.entries()) {
      if (e.count >= static_cast<Count>(b_i.size()) - k) {
        c_i.push_back(e.index);
        cnt_i.push_back(e.count);
      }
    }
    ScalingLevel lv;
    lv.modulus = m;
    lv.a_size = a_i.size();
    lv.b_size = b_i.size();
    lv.lifted = static_cast<std::size_t>(m);
    lv.candidates = c_i.size();
    if (cfg.keep_levels) lv.c = c_i;
    res.levels.push_back(std::move(lv));
  }

  while (m < 2 * n) {
    const Index m_next = 2 * m;
    const IntSet b_next = residues(in.b, m_next);
    const IntSet a_next = detail::lift_a(in.a, m_next);
    const IntSet lifted = set_union(c_i, shift_set(c_i, m));
    ScalingLevel lv;
    lv.modulus = m_next;
    lv.a_size = a_next.size();
    lv.b_size = b_next.size();
    lv.lifted = lifted.size();
    std::vector<Count> counts;
    if (lifted.empty()) {
      lv.branch = LevelBranch::small_c;
    } else if (static_cast<double>(c_i.size()) < static_cast<double>(a_i.size()) / R) {
      lv.branch = LevelBranch::small_c;
      counts = conv_partial(indicator(a_next), indicator(negate_set(b_next)), lifted);
    } else {
      // Split B_i using the previous level, where the promise holds for C_{i-1}.
      lv.branch = LevelBranch::large_b;
      const IntSet bad = detail::bad_elements(a_i, b_i, c_i, cfg.approx);
      IntSet bad_next, good_next;
      for (Index x : b_next) (set_contains(bad, floor_mod(x, m)) ? bad_next : good_next).push_back(x);
      counts = detail::split_counts(a_next, good_next, bad_next, lifted);
      lv.b_bad = bad.size();
      lv.bounds_ok = static_cast<Count>(bad.size()) <= 4 * k;
      if (cfg.verify_bounds) {
        lv.c_minus_c = sumset(c_i, negate_set(c_i)).size();
        const double L = static_cast<double>(a_i.size()) / static_cast<double>(b_i.size());
        lv.bounds_ok = lv.bounds_ok && static_cast<double>(lv.c_minus_c) <= 5.0 * static_cast<double>(a_i.size()) * L;
      }
    }
    IntSet c_next;
    std::vector<Count> cnt_next;
    for (std::size_t t = 0; t < lifted.size(); ++t) {
      if (counts[t] >= static_cast<Count>(b_next.size()) - k) {
        c_next.push_back(lifted[t]);
        cnt_next.push_back(counts[t]);
      }
    }
    lv.candidates = c_next.size();
    if (cfg.keep_levels) lv.c = c_next;
    res.levels.push_back(std::move(lv));
    m = m_next;
    a_i = a_next;
    b_i = b_next;
    c_i = std::move(c_next);
    cnt_i = std::move(cnt_next);
  }

  // With M >= 2N the residues in [M/2, M) stand for negative shifts.
  std::vector<std::pair<Index, Count>> out;
  for (std::size_t t = 0; t < c_i.size(); ++t) out.emplace_back(c_i[t] >= m / 2 ? c_i[t] - m : c_i[t], cnt_i[t]);
  std::sort(out.begin(), out.end());
  for (auto [c, v] : out) {
    res.shifts.push_back(c);
    res.counts.push_back(v);
  }
  return res;
}

// ---- randomized path --------------------------------------------------------

struct SubsampleResult {
  IntSet candidates;
  bool fallback = false;   // k0 below the sampling threshold; candidates are the exact answers
  double rate = 1;         // p
  double k_sample = 0;     // k' = (1 + eta/40) p k0
  Count k_promise = 0;     // floor((1 + eta/20) k0), promised for every candidate w.h.p.
  std::size_t sample_size = 0;
};

// Keeps each b with probability p = rate_constant * ln n / (eta^2 k0) and
// returns the shifts with at most k' misses against the sample. With the
// default constant the margin (eta/40) p k0 is below one standard deviation of
// the sampled miss count, so shifts with close to k0 misses can be lost.
inline SubsampleResult candidate_filter_subsample(const ConstellationInstance& in, std::uint64_t seed,
                                                  double rate_constant = 100) {
  detail::check_instance(in, "candidate_filter_subsample");
  const double eta = in.eta;
  if (!(eta > 0 && eta < 1)) throw invalid_parameter("candidate_filter_subsample: eta must lie in (0, 1)");
  const Count k0 = detail::effective_k(in);
  const double nb = static_cast<double>(in.b.size());
  if (static_cast<double>(k0) > (1 - eta) * nb) throw invalid_parameter("candidate_filter_subsample: need k0 <= (1 - eta)|B|");
  SubsampleResult r;
  r.k_promise = static_cast<Count>(std::floor((1 + eta / 20) * static_cast<double>(k0)));
  const double ln = std::log(static_cast<double>(in.a.size() + in.b.size()));
  const SparseVec full_b = indicator(negate_set(in.b));
  if (!(rate_constant > 0)) throw invalid_parameter("candidate_filter_subsample: rate constant must be positive");
  if (k0 < 1 || static_cast<double>(k0) < rate_constant * ln / (eta * eta)) {
    r.fallback = true;
    r.sample_size = in.b.size();
    const SparseVec f = conv_sparse(indicator(in.a), full_b);
    for (const auto& e : f.entries()) {
      if (e.count >= static_cast<Count>(in.b.size()) - k0) r.candidates.push_back(e.index);
    }
    return r;
  }
  r.rate = std::min(1.0, rate_constant * ln / (eta * eta * static_cast<double>(k0)));
  r.k_sample = (1 + eta / 40) * r.rate * static_cast<double>(k0);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(r.rate);
  IntSet sample;
  for (Index x : in.b) {
    if (keep(rng)) sample.push_back(x);
  }
  r.sample_size = sample.size();
  const double thr = static_cast<double>(sample.size()) - r.k_sample;
  if (sample.empty() || thr <= 0) throw precondition_failed("candidate_filter_subsample: sample too small for the miss budget");
  const SparseVec f = conv_sparse(indicator(in.a), indicator(negate_set(sample)));
  for (const auto& e : f.entries()) {
    if (static_cast<double>(e.count) >= thr) r.candidates.push_back(e.index);
  }
  return r;
}

// Subsampling filter followed by the large-B solver; exact whenever the filter
// kept every answer, which holds with high probability.
inline ConstellationResult constellation_randomized(const ConstellationInstance& in, std::uint64_t seed,
                                                   const ConstellationConfig& cfg = {}) {
  const SubsampleResult sub = candidate_filter_subsample(in, seed);
  const Count k0 = detail::effective_k(in);
  const Count nb = static_cast<Count>(in.b.size());
  const Count kp = std::min<Count>(sub.k_promise, 4 * nb / 10);
  ConstellationResult res;
  res.path = "randomized";
  res.k_effective = k0;
  res.R = cfg.R > 0 ? cfg.R : detail::default_r(in.a.size(), in.b.size(), std::max<Count>(kp, 1));
  const CandidateCounts cc = constellation_large_b(in.a, in.b, sub.candidates, kp, res.R, cfg.verify_bounds, cfg.approx);
  for (std::size_t t = 0; t < sub.candidates.size(); ++t) {
    if (cc.counts[t] >= nb - k0) {
      res.shifts.push_back(sub.candidates[t]);
      res.counts.push_back(cc.counts[t]);
    }
  }
  return res;
}

// ---- wildcard matching ------------------------------------------------------

struct WildcardResult {
  std::vector<Index> shifts;
  std::vector<Count> mismatches;  // aligned with shifts
  std::string path;               // shortcut | constellation
  std::size_t chunks = 0;
  double R = 1;
};

namespace detail {

// Positions in the padded strings: symbol s at i becomes s * mw + 4i, followed
// by three sentinels at 4i + 1..3 that always match.
inline IntSet flatten_padded(const SymbolString& s, const std::map<Symbol, Index>& code, Index mw, bool skip_wild,
                             Symbol wild) {
  const Index sentinel = static_cast<Index>(code.size()) + 1;
  std::vector<Index> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Index at = 4 * static_cast<Index>(i);
    if (!(skip_wild && s[i] == wild)) out.push_back(code.at(s[i]) * mw + at);
    for (Index j = 1; j <= 3; ++j) out.push_back((sentinel + j - 1) * mw + at + j);
  }
  return make_set(std::move(out));
}

}  // namespace detail

// Shifts c in [0, n - m] where P matches T[c, c + m) with at most k mismatches;
// `wild` in P matches any symbol and may not occur in T.
inline WildcardResult wildcard_match(const SymbolString& text, const SymbolString& pattern, Count k, Symbol wild,
                                     const ConstellationConfig& cfg = {}) {
  detail::check_strings(text, pattern);
  if (k < 0) throw invalid_parameter("wildcard_match: k must be nonnegative");
  if (std::find(text.begin(), text.end(), wild) != text.end()) throw invalid_parameter("wildcard_match: wildcard in text");
  WildcardResult res;
  const std::size_t n = text.size(), m = pattern.size(), shifts = n - m + 1;
  const Count solid = static_cast<Count>(m) - std::count(pattern.begin(), pattern.end(), wild);
  if (k >= solid) {
    res.path = "shortcut";
    for (std::size_t c = 0; c < shifts; ++c) {
      res.shifts.push_back(static_cast<Index>(c));
      Count miss = 0;
      for (std::size_t j = 0; j < m; ++j) miss += pattern[j] != wild && text[c + j] != pattern[j];
      res.mismatches.push_back(miss);
    }
    return res;
  }
  res.path = "constellation";
  res.R = std::max(1.0, std::ceil(std::sqrt(static_cast<double>(k)) - 1e-12));

  std::map<Symbol, Index> code;
  for (Symbol s : text) code.emplace(s, 0);
  for (Symbol s : pattern) {
    if (s != wild) code.emplace(s, 0);
  }
  Index next = 1;
  for (auto& [s, v] : code) v = next++;

  // Chunks of 2m - 1 text symbols cover m shifts each.
  for (std::size_t lo = 0; lo < shifts; lo += m) {
    const std::size_t hi_shift = std::min(shifts, lo + m);
    const SymbolString piece(text.begin() + static_cast<std::ptrdiff_t>(lo),
                             text.begin() + static_cast<std::ptrdiff_t>(hi_shift - 1 + m));
    const Index mw = 10 * 4 * static_cast<Index>(piece.size());
    const IntSet a = detail::flatten_padded(piece, code, mw, false, wild);
    const IntSet b = detail::flatten_padded(pattern, code, mw, true, wild);
    // Only axis shifts 4c matter, so they serve directly as the candidate set.
    IntSet axis;
    for (std::size_t c = 0; c < hi_shift - lo; ++c) axis.push_back(4 * static_cast<Index>(c));
    const CandidateCounts cc = constellation_large_b(a, b, axis, k, res.R, false, cfg.approx);
    for (std::size_t t = 0; t < axis.size(); ++t) {
      const Count miss = static_cast<Count>(b.size()) - cc.counts[t];
      if (miss <= k) {
        res.shifts.push_back(static_cast<Index>(lo + t));
        res.mismatches.push_back(miss);
      }
    }
    ++res.chunks;
  }
  return res;
}

}  // namespace addcomb
