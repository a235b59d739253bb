// Command-line front end: one subcommand per library operation, JSON on stdout.
// Exit codes: 0 ok, 1 runtime failure, 2 usage or input error, 3 invariant violation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "addcomb/addcomb.hpp"
#include "addcomb/oracles.hpp"

using json = nlohmann::json;
using namespace addcomb;

namespace {

constexpr int kSchemaVersion = 1;

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;  // accepted for interface stability; the library runs on one thread
  bool timing = false;
  bool oracle = false;
};

struct Report {
  json parameters = json::object();
  json result = json::object();
  json metadata = json::object();
  bool violated = false;
};

json entries_json(const SparseVec& v) {
  json arr = json::array();
  for (const auto& e : v.entries()) arr.push_back({e.index, e.count});
  return arr;
}

std::vector<Index> as_values(const IntSet& s) { return {s.begin(), s.end()}; }

// Records an oracle comparison; a deviation above the bound marks the run as violated.
void oracle_check(Report& r, const std::string& name, double deviation, double bound) {
  const bool ok = deviation <= bound;
  r.result["oracle"][name] = {{"max_deviation", deviation}, {"bound", bound}, {"ok", ok}};
  if (!ok) r.violated = true;
}

double max_abs_diff(const std::map<Index, Count>& want, const SparseVec& got) {
  std::map<Index, Count> g;
  for (const auto& e : got.entries()) g[e.index] = e.count;
  double dev = 0;
  for (auto [i, v] : want) {
    auto it = g.find(i);
    dev = std::max(dev, std::abs(static_cast<double>(v - (it == g.end() ? 0 : it->second))));
  }
  for (auto [i, v] : g) {
    if (!want.count(i)) dev = std::max(dev, std::abs(static_cast<double>(v)));
  }
  return dev;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- subcommands ------------------------------------------------------------

struct ConvArgs {
  std::string a, b, c;
};

void run_conv(const ConvArgs& o, const Globals& g, Report& r) {
  const MultiSet a = read_multiset(o.a), b = read_multiset(o.b);
  r.parameters = {{"a", o.a}, {"b", o.b}};
  if (!o.c.empty()) {
    r.parameters["c"] = o.c;
    const IntSet c = read_int_set(o.c);
    const auto vals = conv_partial(a.vec(), b.vec(), c);
    json arr = json::array();
    for (std::size_t t = 0; t < c.size(); ++t) arr.push_back({c[t], vals[t]});
    r.result["values"] = arr;
    if (g.oracle) {
      const auto want = oracle::bf_conv(a.values(), b.values());
      double dev = 0;
      for (std::size_t t = 0; t < c.size(); ++t) {
        auto it = want.find(c[t]);
        dev = std::max(dev, std::abs(static_cast<double>((it == want.end() ? 0 : it->second) - vals[t])));
      }
      oracle_check(r, "bf_conv", dev, 0);
    }
    return;
  }
  const SparseVec f = conv_sparse(a.vec(), b.vec());
  r.result["entries"] = entries_json(f);
  r.result["sparsity"] = f.sparsity();
  if (g.oracle) oracle_check(r, "bf_conv", max_abs_diff(oracle::bf_conv(a.values(), b.values()), f), 0);
}

struct ApproxArgs {
  std::string a, b;
  double eps = 0.1;
  int branch = 0;
};

void run_approx(const ApproxArgs& o, const Globals& g, Report& r) {
  const MultiSet a = read_multiset(o.a), b = read_multiset(o.b);
  ApproxParams ap;
  ap.branch = o.branch;
  r.parameters = {{"a", o.a}, {"b", o.b}, {"eps", o.eps}, {"branch", o.branch}};
  ApproxStats st;
  const SparseVec f = popular_sums_approx(a, b, o.eps, ap, &st);
  r.result["entries"] = entries_json(f);
  r.result["sparsity"] = f.sparsity();
  r.metadata["error_bound"] = o.eps * static_cast<double>(b.size());
  r.metadata["recursion_levels"] = st.recursion_levels;
  r.metadata["exact_fallbacks"] = st.exact_fallbacks;
  if (g.oracle) {
    oracle_check(r, "bf_conv", max_abs_diff(oracle::bf_conv(a.values(), b.values()), f), o.eps * static_cast<double>(b.size()));
  }
}

struct EnergyArgs {
  std::string a;
  double eps = 0.1;
};

void run_energy(const EnergyArgs& o, const Globals& g, Report& r) {
  const MultiSet a = read_multiset(o.a);
  r.parameters = {{"a", o.a}, {"eps", o.eps}};
  const Count e = approx_energy(a, o.eps);
  const double n = static_cast<double>(a.size());
  r.result["energy"] = e;
  r.metadata["error_bound"] = o.eps * n * n * n;
  if (g.oracle) {
    const auto exact = static_cast<double>(oracle::bf_energy(a.values()));
    r.result["exact"] = exact;
    oracle_check(r, "bf_energy", std::abs(exact - static_cast<double>(e)), o.eps * n * n * n);
  }
}

struct CountPopularArgs {
  std::string a, b;
  Count k = 1;
  double K = 0;
};

void run_count_popular(const CountPopularArgs& o, const Globals& g, Report& r) {
  const IntSet a = read_int_set(o.a), b = read_int_set(o.b);
  r.parameters = {{"a", o.a}, {"b", o.b}, {"k", o.k}, {"K", o.K}};
  PopularExactConfig cfg;
  cfg.K = o.K;
  const auto res = popular_sums_exact(a, b, o.k, cfg);
  json arr = json::array();
  for (std::size_t t = 0; t < res.sums.size(); ++t) arr.push_back({res.sums[t], res.counts[t]});
  r.result["sums"] = arr;
  const auto& d = res.decomposition;
  r.metadata["parts"] = d.parts.size();
  r.metadata["residual"] = d.residual.size();
  r.metadata["candidates"] = d.candidates.size();
  r.metadata["residual_targets"] = d.residual_targets.size();
  r.metadata["K"] = d.K;
  r.metadata["bsg_fallbacks"] = d.bsg_fallbacks;
  if (g.oracle) {
    const auto full = oracle::bf_conv(as_values(a), as_values(b));
    std::map<Index, Count> want;
    for (auto [s, v] : full) {
      if (v * o.k >= static_cast<Count>(a.size())) want[s] = v;
    }
    std::vector<Entry> es;
    for (std::size_t t = 0; t < res.sums.size(); ++t) es.push_back({res.sums[t], res.counts[t]});
    oracle_check(r, "bf_conv", max_abs_diff(want, SparseVec::from_entries(es)), 0);
  }
}

struct SmallDoublingArgs {
  std::string a, b, c, s;
};

void run_small_doubling(const SmallDoublingArgs& o, const Globals& g, Report& r) {
  const IntSet a = read_int_set(o.a), b = read_int_set(o.b), c = read_int_set(o.c), s = read_int_set(o.s);
  r.parameters = {{"a", o.a}, {"b", o.b}, {"c", o.c}, {"s", o.s}};
  const auto res = count_small_doubling(a, b, c, s);
  json sums = json::array(), rev = json::array();
  for (std::size_t t = 0; t < c.size(); ++t) sums.push_back({c[t], res.sums[t]});
  for (std::size_t t = 0; t < a.size(); ++t) rev.push_back({a[t], res.reverse[t]});
  r.result["sums"] = sums;
  r.result["reverse"] = rev;
  r.metadata["modulus"] = res.stats.modulus;
  r.metadata["cover_size"] = res.stats.cover_size;
  r.metadata["sumset_size"] = res.stats.sumset_size;
  r.metadata["parts"] = res.stats.parts;
  if (g.oracle) {
    const auto ab = oracle::bf_conv(as_values(a), as_values(b));
    std::vector<Index> nb;
    for (Index x : b) nb.push_back(-x);
    const auto cb = oracle::bf_conv(as_values(c), nb);
    double dev = 0;
    for (std::size_t t = 0; t < c.size(); ++t) {
      auto it = ab.find(c[t]);
      dev = std::max(dev, std::abs(static_cast<double>((it == ab.end() ? 0 : it->second) - res.sums[t])));
    }
    for (std::size_t t = 0; t < a.size(); ++t) {
      auto it = cb.find(a[t]);
      dev = std::max(dev, std::abs(static_cast<double>((it == cb.end() ? 0 : it->second) - res.reverse[t])));
    }
    oracle_check(r, "bf_conv", dev, 0);
  }
}

struct BsgArgs {
  std::string a;
  double K = 2;
  int r = 3;
  double fallback_factor = BsgConfig{}.fallback_factor;
  double slack = 0;
};

void run_bsg(const BsgArgs& o, const Globals& g, Report& r) {
  const IntSet a = read_int_set(o.a);
  r.parameters = {{"a", o.a}, {"K", o.K}, {"r", o.r}, {"fallback_factor", o.fallback_factor}, {"slack", o.slack}};
  BsgConfig cfg;
  cfg.fallback_factor = o.fallback_factor;
  cfg.slack_budget = o.slack;
  const auto out = bsg_decompose(a, o.K, o.r, cfg);
  r.result["a_prime"] = out.a_prime;
  r.result["b_prime"] = out.b_prime;
  r.result["sum_ab"] = out.measured.sum_ab;
  r.result["sum_aa"] = out.measured.sum_aa;
  r.metadata["fallback"] = out.fallback;
  r.metadata["slack_budget"] = out.slack_budget;
  r.metadata["sum_ratio"] = out.measured.sum_ratio;
  r.metadata["b_ratio"] = out.measured.b_ratio;
  r.metadata["notes"] = out.notes;
  if (g.oracle) {
    const bool subsets = std::includes(a.begin(), a.end(), out.a_prime.begin(), out.a_prime.end()) &&
                         std::includes(a.begin(), a.end(), out.b_prime.begin(), out.b_prime.end());
    oracle_check(r, "subsets", subsets ? 0 : 1, 0);
    const auto ab = oracle::bf_sumset(as_values(out.a_prime), as_values(out.b_prime));
    oracle_check(r, "bf_sumset", std::abs(static_cast<double>(ab.size()) - static_cast<double>(out.measured.sum_ab)), 0);
    const double sab = static_cast<double>(out.measured.sum_ab);
    const double ruzsa = static_cast<double>(out.measured.sum_aa) - sab * sab / static_cast<double>(out.b_prime.size());
    oracle_check(r, "ruzsa", std::max(0.0, ruzsa), 0);
    if (!out.fallback) {
      const double floor = std::ceil(static_cast<double>(a.size()) / (64 * o.K));
      oracle_check(r, "a_prime_floor", std::max(0.0, floor - static_cast<double>(out.a_prime.size())), 0);
    }
  }
}

struct HammingArgs {
  std::string text, pattern, mode = "additive";
  double eps = 0.1;
  Count k = 1;
  Index max_block = Index{1} << 30;
  bool binary = false;
};

void run_hamming(const HammingArgs& o, const Globals& g, Report& r) {
  const SymbolString t = read_symbols(o.text, o.binary), p = read_symbols(o.pattern, o.binary);
  r.parameters = {{"text", o.text}, {"pattern", o.pattern}, {"mode", o.mode}, {"eps", o.eps}, {"binary", o.binary}};
  std::vector<Count> f;
  double bound = 0;
  if (o.mode == "exact") {
    f = hamming_exact(t, p);
  } else if (o.mode == "additive") {
    f = hamming_additive(t, p, o.eps);
    bound = o.eps * static_cast<double>(p.size());
  } else if (o.mode == "dyadic") {
    r.parameters["k"] = o.k;
    r.parameters["max_block"] = o.max_block;
    const auto rle = make_rle_instance(t, p, o.max_block);
    DyadicStats st;
    f = hamming_rle_dyadic(rle, o.eps, o.k, {}, &st);
    bound = o.eps * static_cast<double>(o.k);
    r.metadata["text_blocks"] = block_count(rle.text);
    r.metadata["pattern_blocks"] = block_count(rle.pattern);
    r.metadata["eps_inner"] = st.eps_inner;
  } else {
    throw invalid_parameter("hamming: --mode must be exact, additive or dyadic");
  }
  json arr = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) arr.push_back({{"shift", i}, {"value", f[i]}});
  r.result["distances"] = arr;
  r.metadata["error_bound"] = bound;
  if (g.oracle) {
    const auto d = oracle::bf_hamming(t, p);
    double dev = 0;
    for (std::size_t i = 0; i < d.size(); ++i) dev = std::max(dev, std::abs(static_cast<double>(d[i] - f[i])));
    oracle_check(r, "bf_hamming", dev, bound);
  }
}

struct ConstellationArgs {
  std::string a, b;
  Count k = 0;
  bool strict = false;
  bool randomized = false;
  double R = 0;
  double eta = 0.7;
};

void run_constellation(const ConstellationArgs& o, const Globals& g, Report& r) {
  ConstellationInstance in;
  in.a = read_int_set(o.a);
  in.b = read_int_set(o.b);
  in.k = o.k;
  in.eta = o.eta;
  in.convention = o.strict ? Convention::strict_less : Convention::at_most;
  r.parameters = {{"a", o.a}, {"b", o.b}, {"k", o.k}, {"strict", o.strict}, {"randomized", o.randomized}, {"R", o.R}};
  ConstellationConfig cfg;
  cfg.R = o.R;
  const auto res = o.randomized ? constellation_randomized(in, g.seed, cfg) : constellation_deterministic(in, cfg);
  json counts = json::object();
  for (std::size_t t = 0; t < res.shifts.size(); ++t) counts[std::to_string(res.shifts[t])] = res.counts[t];
  r.result["shifts"] = res.shifts;
  r.result["counts"] = counts;
  r.metadata["path"] = res.path;
  r.metadata["seed"] = o.randomized ? json(g.seed) : json(nullptr);
  r.metadata["R"] = res.R;
  r.metadata["base_modulus"] = res.base_modulus;
  r.metadata["slack"] = res.base_modulus > 0 ? static_cast<double>(res.base_modulus) / static_cast<double>(in.b.size()) : 0.0;
  json levels = json::array();
  for (const auto& lv : res.levels) {
    levels.push_back({{"modulus", lv.modulus}, {"branch", branch_name(lv.branch)}, {"candidates", lv.candidates},
                      {"lifted", lv.lifted}, {"b_bad", lv.b_bad}, {"bounds_ok", lv.bounds_ok}});
  }
  r.metadata["levels"] = levels;
  if (g.oracle) {
    const auto want = oracle::bf_constellation(as_values(in.a), as_values(in.b), in.k, o.strict);
    oracle_check(r, "bf_constellation", IntSet(want.begin(), want.end()) == res.shifts ? 0 : 1, 0);
  }
}

struct WildcardArgs {
  std::string text, pattern, wildcard = "?";
  Count k = 0;
  bool binary = false;
};

void run_wildcard(const WildcardArgs& o, const Globals& g, Report& r) {
  const SymbolString t = read_symbols(o.text, o.binary), p = read_symbols(o.pattern, o.binary);
  const SymbolString w = decode_symbols(o.wildcard, o.binary);
  if (w.size() != 1) throw invalid_parameter("wildcard: --wildcard must be a single character");
  r.parameters = {{"text", o.text}, {"pattern", o.pattern}, {"k", o.k}, {"wildcard", o.wildcard}, {"binary", o.binary}};
  const auto res = wildcard_match(t, p, o.k, w[0]);
  r.result["shifts"] = res.shifts;
  r.result["mismatches"] = res.mismatches;
  r.metadata["path"] = res.path;
  r.metadata["chunks"] = res.chunks;
  r.metadata["R"] = res.R;
  if (g.oracle) {
    const auto want = oracle::bf_wildcard(t, p, o.k, w[0]);
    oracle_check(r, "bf_wildcard", want == res.shifts ? 0 : 1, 0);
  }
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string out = "bench.csv";
  std::string suite = "all";
  bool quick = false;
};

template <class F>
double time_it(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

void run_bench(const BenchArgs& o, const Globals& g, Report& r) {
  r.parameters = {{"out", o.out}, {"suite", o.suite}, {"quick", o.quick}};
  std::ofstream csv(o.out);
  if (!csv) throw invalid_parameter("bench: cannot write " + o.out);
  csv << "suite,case,size,k,method,seconds,value\n";
  std::mt19937_64 rng(g.seed);
  std::size_t rows = 0;
  auto row = [&](const std::string& suite, const std::string& name, std::size_t size, Count k, const std::string& method,
                 double secs, double value) {
    csv << suite << ',' << name << ',' << size << ',' << k << ',' << method << ',' << secs << ',' << value << '\n';
    ++rows;
  };
  const bool all = o.suite == "all";

  if (all || o.suite == "small-doubling") {
    // AP-structured: A, B, S progressions with common step, C their sums
    for (Index n : o.quick ? std::vector<Index>{1 << 10} : std::vector<Index>{1 << 10, 1 << 11, 1 << 12}) {
      IntSet a, b, c, s;
      for (Index i = 0; i < n; ++i) {
        a.push_back(7 * i);
        b.push_back(7 * i + 3);
        s.push_back(7 * i);
        c.push_back(7 * (2 * i) + 3);
      }
      std::vector<Count> fast;
      const double t_fast = time_it([&] { fast = count_small_doubling(a, b, c, s).sums; });
      std::vector<Count> brute(c.size(), 0);
      const double t_brute = time_it([&] {
        for (std::size_t t = 0; t < c.size(); ++t) {
          for (Index x : a) brute[t] += set_contains(b, c[t] - x);
        }
      });
      row("small-doubling", "ap", static_cast<std::size_t>(n), 0, "small_doubling", t_fast, fast == brute);
      row("small-doubling", "ap", static_cast<std::size_t>(n), 0, "brute_force", t_brute, t_brute / std::max(t_fast, 1e-9));
    }
  }

  if (all || o.suite == "constellation") {
    // |A| ~ |B| ~ 2^13: both intervals with 0.5% holes, so every shift in
    // [0, |A| - |B|] has few misses and the candidate sets stay large
    const Index nb = o.quick ? 1 << 11 : 1 << 13;
    auto holed = [&](Index len) {
      std::vector<Index> v;
      for (Index i = 0; i < len; ++i) {
        if (rng() % 200 != 0) v.push_back(i);
      }
      return make_set(v);
    };
    const IntSet b = holed(nb);
    const IntSet a = holed(nb + nb / 6);
    for (Count k : {Count{64}, Count{256}}) {
      ConstellationInstance in;
      in.a = a;
      in.b = b;
      in.k = k;
      ConstellationConfig large;
      ConstellationConfig small;
      small.R = 1e18;  // |C| < |A|/R always: small-C branch at every level
      ConstellationResult r1, r2;
      const double t1 = time_it([&] { r1 = constellation_deterministic(in, large); });
      const double t2 = time_it([&] { r2 = constellation_deterministic(in, small); });
      row("constellation", "holed_intervals", b.size(), k, "scaling_default_R", t1, static_cast<double>(r1.shifts.size()));
      row("constellation", "holed_intervals", b.size(), k, "small_c_only", t2, r1.shifts == r2.shifts);
    }
  }

  if (all || o.suite == "hamming") {
    for (std::size_t n : o.quick ? std::vector<std::size_t>{1 << 14} : std::vector<std::size_t>{1 << 14, 1 << 17, 1000000}) {
      SymbolString t(n), p(n / 4);
      for (auto& x : t) x = static_cast<Symbol>(rng() & 1);
      for (auto& x : p) x = static_cast<Symbol>(rng() & 1);
      std::vector<Count> f;
      const double secs = time_it([&] { f = hamming_additive(t, p, 0.1); });
      row("hamming", "binary", n, 0, "additive_eps_0.1", secs, static_cast<double>(f.size()));
    }
  }

  if (all || o.suite == "approx") {
    for (Index n : o.quick ? std::vector<Index>{1 << 10} : std::vector<Index>{1 << 10, 1 << 12, 1 << 14}) {
      std::vector<Index> av, bv;
      for (Index i = 0; i < n; ++i) {
        av.push_back(static_cast<Index>(rng() % (1 << 16)));
        bv.push_back(static_cast<Index>(rng() % (1 << 16)));
      }
      const MultiSet a = MultiSet::from_values(av, Index{1} << 16), b = MultiSet::from_values(bv, Index{1} << 16);
      SparseVec f;
      const double secs = time_it([&] { f = popular_sums_approx(a, b, 0.1); });
      row("approx", "random", static_cast<std::size_t>(n), 0, "popular_sums_eps_0.1", secs, static_cast<double>(f.sparsity()));
    }
  }
  r.result["rows"] = rows;
  r.result["csv"] = o.out;
}

// ---- selftest ---------------------------------------------------------------

void run_selftest(const Globals& g, Report& r) {
  std::mt19937_64 rng(g.seed);
  json checks = json::array();
  auto check = [&](const std::string& name, bool ok) {
    checks.push_back({{"name", name}, {"ok", ok}});
    if (!ok) r.violated = true;
  };
  auto rand_set = [&](Index hi, std::size_t k) {
    std::vector<Index> v;
    for (std::size_t i = 0; i < k; ++i) v.push_back(static_cast<Index>(rng() % static_cast<std::uint64_t>(hi)));
    return make_set(v);
  };
  auto exact_map = [](const IntSet& a, const IntSet& b) { return oracle::bf_conv(as_values(a), as_values(b)); };

  bool conv_ok = true, approx_ok = true, sd_ok = true, pop_ok = true, const_ok = true, wild_ok = true, ham_ok = true;
  for (int it = 0; it < 20; ++it) {
    const IntSet a = rand_set(4096, 1 + rng() % 300), b = rand_set(4096, 1 + rng() % 300);
    const auto want = exact_map(a, b);
    conv_ok &= max_abs_diff(want, conv_sparse(indicator(a), indicator(b))) == 0;
    approx_ok &= max_abs_diff(want, popular_sums_approx(indicator(a), indicator(b), 0.1)) <= 0.1 * static_cast<double>(b.size());

    const IntSet c = rand_set(8192, 1 + rng() % 200), s = rand_set(4096, 1 + rng() % 50);
    const auto sd = count_small_doubling(a, b, c, s);
    for (std::size_t t = 0; t < c.size(); ++t) {
      auto w = want.find(c[t]);
      sd_ok &= sd.sums[t] == (w == want.end() ? 0 : w->second);
    }

    const Count k = 1 + static_cast<Count>(rng() % 8);
    const auto pop = popular_sums_exact(a, b, k);
    std::vector<Index> ps;
    for (auto [x, v] : want) {
      if (v * k >= static_cast<Count>(a.size())) ps.push_back(x);
    }
    pop_ok &= IntSet(ps.begin(), ps.end()) == pop.sums;

    ConstellationInstance in;
    in.a = a;
    in.b = rand_set(256, 1 + rng() % 20);
    in.k = static_cast<Count>(rng() % (in.b.size() / 3 + 1));
    const auto bf = oracle::bf_constellation(as_values(in.a), as_values(in.b), in.k);
    const_ok &= IntSet(bf.begin(), bf.end()) == constellation_deterministic(in).shifts;

    SymbolString t(300 + rng() % 500), p(1 + rng() % 100);
    for (auto& x : t) x = static_cast<Symbol>(rng() % 3);
    for (auto& x : p) x = (rng() % 5 == 0) ? 9u : static_cast<Symbol>(rng() % 3);
    const Count km = static_cast<Count>(rng() % (p.size() / 2 + 1));
    wild_ok &= wildcard_match(t, p, km, 9u).shifts == oracle::bf_wildcard(t, p, km, 9u);
    const auto d = oracle::bf_hamming(t, p);
    const auto f = hamming_additive(t, p, 0.1);
    for (std::size_t i = 0; i < d.size(); ++i) ham_ok &= std::abs(static_cast<double>(d[i] - f[i])) <= 0.1 * static_cast<double>(p.size());
  }
  check("conv_sparse_exact", conv_ok);
  check("popular_sums_approx_error", approx_ok);
  check("small_doubling_exact", sd_ok);
  check("popular_sums_exact", pop_ok);
  check("constellation_exact", const_ok);
  check("wildcard_exact", wild_ok);
  check("hamming_additive_error", ham_ok);
  check("energy_anchor_44", oracle::bf_energy({0, 1, 2, 3}) == 44);
  const Count e = approx_energy(indicator({0, 1, 2, 3}), 0.1);
  check("approx_energy_anchor", std::abs(static_cast<double>(e) - 44.0) <= 6.4);
  r.result["checks"] = checks;
  std::size_t passed = 0;
  for (const auto& c : checks) passed += c["ok"].get<bool>();
  r.result["passed"] = passed;
  r.result["total"] = checks.size();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"addcomb: additive-combinatorics counting toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "seed for randomized paths and generators")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--timing", g.timing, "add wall time to the metadata");
  app.add_flag("--oracle", g.oracle, "cross-check against the brute-force oracles");
  app.fallthrough();

  Report report;
  std::string command;
  std::function<void()> action;

  ConvArgs conv;
  auto* c_conv = app.add_subcommand("conv", "exact convolution of two multisets");
  c_conv->add_option("--a", conv.a)->required();
  c_conv->add_option("--b", conv.b)->required();
  c_conv->add_option("--c", conv.c, "evaluate only at these targets");
  c_conv->callback([&] { action = [&] { run_conv(conv, g, report); }; });

  ApproxArgs apx;
  auto* c_apx = app.add_subcommand("approx-popular", "additive eps|B| estimate of 1_A * 1_B");
  c_apx->add_option("--a", apx.a)->required();
  c_apx->add_option("--b", apx.b)->required();
  c_apx->add_option("--eps", apx.eps)->capture_default_str();
  c_apx->add_option("--branch", apx.branch, "recursion branching r (0 = default)")->capture_default_str();
  c_apx->callback([&] { action = [&] { run_approx(apx, g, report); }; });

  EnergyArgs en;
  auto* c_en = app.add_subcommand("energy", "additive energy within eps|A|^3");
  c_en->add_option("--a", en.a)->required();
  c_en->add_option("--eps", en.eps)->capture_default_str();
  c_en->callback([&] { action = [&] { run_energy(en, g, report); }; });

  CountPopularArgs cp;
  auto* c_cp = app.add_subcommand("count-popular", "exact counts of the |A|/k-popular sums");
  c_cp->add_option("--a", cp.a)->required();
  c_cp->add_option("--b", cp.b)->required();
  c_cp->add_option("--k", cp.k)->required();
  c_cp->add_option("--K", cp.K, "energy parameter (0 = |A|^{3/64})")->capture_default_str();
  c_cp->callback([&] { action = [&] { run_count_popular(cp, g, report); }; });

  SmallDoublingArgs sd;
  auto* c_sd = app.add_subcommand("small-doubling", "(1_A * 1_B)[c] for c in C using |A + S| small");
  c_sd->add_option("--a", sd.a)->required();
  c_sd->add_option("--b", sd.b)->required();
  c_sd->add_option("--c", sd.c)->required();
  c_sd->add_option("--s", sd.s)->required();
  c_sd->callback([&] { action = [&] { run_small_doubling(sd, g, report); }; });

  BsgArgs bsg;
  auto* c_bsg = app.add_subcommand("bsg", "constructive BSG decomposition");
  c_bsg->add_option("--a", bsg.a)->required();
  c_bsg->add_option("--K", bsg.K)->capture_default_str();
  c_bsg->add_option("--r", bsg.r)->capture_default_str();
  c_bsg->add_option("--fallback-factor", bsg.fallback_factor)->capture_default_str();
  c_bsg->add_option("--slack", bsg.slack, "slack budget (0 = default)")->capture_default_str();
  c_bsg->callback([&] { action = [&] { run_bsg(bsg, g, report); }; });

  HammingArgs hm;
  auto* c_hm = app.add_subcommand("hamming", "text-to-pattern Hamming distances");
  c_hm->add_option("--text", hm.text)->required();
  c_hm->add_option("--pattern", hm.pattern)->required();
  c_hm->add_option("--mode", hm.mode, "exact | additive | dyadic")->capture_default_str();
  c_hm->add_option("--eps", hm.eps)->capture_default_str();
  c_hm->add_option("--k", hm.k, "run budget for the dyadic mode")->capture_default_str();
  c_hm->add_option("--max-block", hm.max_block)->capture_default_str();
  c_hm->add_flag("--binary", hm.binary, "treat bytes as symbols");
  c_hm->callback([&] { action = [&] { run_hamming(hm, g, report); }; });

  ConstellationArgs cs;
  auto* c_cs = app.add_subcommand("constellation", "k-mismatch constellation");
  c_cs->add_option("--a", cs.a)->required();
  c_cs->add_option("--b", cs.b)->required();
  c_cs->add_option("--k", cs.k)->required();
  c_cs->add_flag("--strict", cs.strict, "count fewer than k misses instead of at most k");
  c_cs->add_flag("--randomized", cs.randomized, "subsampling filter with --seed");
  c_cs->add_option("--R", cs.R, "branch parameter (0 = default)")->capture_default_str();
  c_cs->add_option("--eta", cs.eta, "headroom of the randomized filter")->capture_default_str();
  c_cs->callback([&] { action = [&] { run_constellation(cs, g, report); }; });

  WildcardArgs wc;
  auto* c_wc = app.add_subcommand("wildcard", "k-mismatch matching with wildcards in the pattern");
  c_wc->add_option("--text", wc.text)->required();
  c_wc->add_option("--pattern", wc.pattern)->required();
  c_wc->add_option("--k", wc.k)->required();
  c_wc->add_option("--wildcard", wc.wildcard)->capture_default_str();
  c_wc->add_flag("--binary", wc.binary);
  c_wc->callback([&] { action = [&] { run_wildcard(wc, g, report); }; });

  BenchArgs bn;
  auto* c_bn = app.add_subcommand("bench", "timing sweeps written as CSV");
  c_bn->add_option("--out", bn.out)->capture_default_str();
  c_bn->add_option("--suite", bn.suite, "all | small-doubling | constellation | hamming | approx")->capture_default_str();
  c_bn->add_flag("--quick", bn.quick, "smaller sizes");
  c_bn->callback([&] { action = [&] { run_bench(bn, g, report); }; });

  auto* c_st = app.add_subcommand("selftest", "randomized invariant suite against the oracles");
  c_st->callback([&] { action = [&] { run_selftest(g, report); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  command = app.get_subcommands().front()->get_name();

  const auto t0 = std::chrono::steady_clock::now();
  try {
    action();
  } catch (const invalid_parameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (g.timing) report.metadata["wall_seconds"] = seconds_since(t0);

  json out = {{"schema_version", kSchemaVersion},
              {"command", command},
              {"parameters", report.parameters},
              {"result", report.result},
              {"metadata", report.metadata}};
  std::cout << out.dump(2) << "\n";
  return report.violated ? 3 : 0;
}
