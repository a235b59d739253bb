#include <gtest/gtest.h>

#include <map>
#include <random>

#include "addcomb/hashing.hpp"
#include "addcomb/oracles.hpp"

using namespace addcomb;

TEST(FiniteField, BarrettMatchesPlainModulo) {
  std::mt19937_64 rng(1);
  for (u64 p : {2ull, 3ull, 65537ull, 4294967291ull}) {
    const Fp F(p);
    for (int i = 0; i < 10000; ++i) {
      const u64 a = rng() % p, b = rng() % p;
      ASSERT_EQ(F.mul(a, b), mul_mod(a, b, p));
      ASSERT_EQ(F.add(a, b), (a + b) % p);
    }
  }
  EXPECT_THROW(Fp(15), invalid_parameter);
}

TEST(FiniteField, FirstIrreducibleIsLexicographic) {
  GaloisField f8(2, 3);
  EXPECT_EQ(f8.modulus(), (std::vector<u64>{1, 1, 0, 1}));  // x^3 + x + 1
  GaloisField f9(3, 2);
  EXPECT_EQ(f9.modulus(), (std::vector<u64>{1, 0, 1}));  // x^2 + 1
}

TEST(FiniteField, MultiplicativeGroupHasOrderQMinusOne) {
  for (auto [p, r] : std::vector<std::pair<u64, int>>{{2, 3}, {3, 2}, {5, 3}, {7, 2}}) {
    GaloisField F(p, r);
    u64 q = 1;
    for (int i = 0; i < r; ++i) q *= p;
    for (u64 code = 1; code < q; ++code) {
      std::vector<u64> digits;
      for (u64 c = code; digits.size() < static_cast<std::size_t>(r); c /= p) digits.push_back(c % p);
      ASSERT_EQ(F.pow(F.from_digits(digits), q - 1), F.one());
    }
  }
}

TEST(BiasedSet, Gf8DimensionThree) {
  const auto s = build_biased_set(2, 3, 1, 3);
  ASSERT_EQ(s.members.size(), 64u);
  EXPECT_LE(oracle::bf_bias(s.members, 2), 2.0 / 8 + 1e-12);
}

TEST(BiasedSet, DimensionOneIsBalanced) {
  const auto s = build_biased_set(3, 1, 1, 2);
  ASSERT_EQ(s.members.size(), 81u);
  std::map<u64, int> hist;
  for (const auto& v : s.members) ++hist[v[0]];
  ASSERT_EQ(hist.size(), 3u);
  for (auto [val, cnt] : hist) EXPECT_EQ(cnt, 27) << val;
}

TEST(BiasedSet, SizeIsQSquared) {
  for (auto [p, r] : std::vector<std::pair<u64, int>>{{2, 2}, {2, 4}, {3, 2}, {5, 2}}) {
    const auto s = build_biased_set(p, 3, 1, r);
    u64 q = 1;
    for (int i = 0; i < r; ++i) q *= p;
    EXPECT_EQ(s.members.size(), q * q);
  }
}

TEST(BiasedSet, ExhaustiveBiasCertificate) {
  for (u64 p : {2ull, 3ull}) {
    for (int r : {2, 3}) {
      for (int m = 1; m <= 4; ++m) {
        if (p == 3 && r == 3 && m == 4) continue;  // 3^4 characters x 729 members is fine, but keep the suite quick
        const auto s = build_biased_set(p, m, 1, r);
        double q = std::pow(static_cast<double>(p), r);
        const double bias = oracle::bf_bias(s.members, p);
        EXPECT_LE(bias, (m - 1) / q + 1e-9) << "p=" << p << " r=" << r << " m=" << m;
      }
    }
  }
}

TEST(BiasedSet, RefusesHugeSpaces) { EXPECT_THROW(build_biased_set(1000003, 4, 3), budget_exceeded); }

TEST(HashFamily, SizeBoundAtTwoToTheTwenty) {
  const Index n = Index{1} << 20;
  const HashFamily fam(n, HashConfig{});
  // smallest admissible p is the first prime >= 20^6
  EXPECT_EQ(fam.p(), next_prime(64000000));
  EXPECT_GE(fam.m(), 2);
  EXPECT_LE(fam.log2_size(), fam.log2_size_bound());
  double prod = 0;
  for (u64 q : fam.moduli()) {
    EXPECT_GE(static_cast<double>(q), fam.big_q() / 2);
    EXPECT_LE(static_cast<double>(q), fam.big_q());
    prod += std::log2(static_cast<double>(q));
  }
  EXPECT_GE(prod, 20 + 6 * std::log2(20.0));
  EXPECT_LE(prod, 20 + 9 * std::log2(20.0));
  EXPECT_TRUE(fam.notes().empty());
}

TEST(HashFamily, InsufficientPrimesIsReported) {
  HashConfig cfg;
  cfg.q_factor = 2;
  EXPECT_THROW(HashFamily(Index{1} << 30, cfg), invalid_parameter);
}

TEST(HashFamily, ConstantMember) {
  HashSpec h;
  h.universe = 1000;
  h.p = 101;
  h.moduli = {53, 59, 61};
  h.c = {0, 0, 0, 17};
  h.delta = compute_delta(h.p, h.moduli, h.c);
  EXPECT_EQ(h.delta, std::vector<u64>{17});
  for (Index x : {-1000, -3, 0, 5, 999}) EXPECT_EQ(hash_eval(h, x), 17u);
}

namespace {

std::vector<HashSpec> sample_members(const HashFamily& fam, int count) {
  std::vector<HashSpec> out;
  std::mt19937_64 rng(42);
  for (int i = 0; i < count; ++i) out.push_back(fam.member(rng()));
  return out;
}

}  // namespace

TEST(HashFamily, AlmostLinearityOnTwentyMembers) {
  const Index n = Index{1} << 20;
  const HashFamily fam(n, HashConfig{});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> d(0, n / 2 - 1);
  for (const auto& h : sample_members(fam, 20)) {
    ASSERT_LE(h.delta.size(), std::size_t{1} << (fam.m() - 1));
    const Fp F(h.p);
    for (int t = 0; t < 10000; ++t) {
      const Index x = d(rng), y = d(rng);
      const u64 defect = F.sub(F.sub(hash_eval(h, x + y), hash_eval(h, x)), hash_eval(h, y));
      ASSERT_TRUE(std::binary_search(h.delta.begin(), h.delta.end(), defect));
    }
  }
}

TEST(HashFamily, NegativeArgumentsAndDefects) {
  const HashFamily fam(4096, HashConfig{});
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<Index> d(-2048, 2048);
  for (const auto& h : sample_members(fam, 5)) {
    const Fp F(h.p);
    for (int t = 0; t < 2000; ++t) {
      const Index x = d(rng), y = d(rng);
      const u64 defect = F.sub(F.sub(hash_eval(h, x + y), hash_eval(h, x)), hash_eval(h, y));
      ASSERT_TRUE(std::binary_search(h.delta.begin(), h.delta.end(), defect));
    }
  }
}

TEST(HashFamily, EvaluationBasics) {
  const HashFamily fam(4096, HashConfig{});
  const auto h = fam.member(123456789);
  EXPECT_EQ(hash_eval(h, 0), h.c.back());
  EXPECT_EQ(hash_eval(h, 777), hash_eval(h, 777));
  EXPECT_THROW(hash_eval(h, 4097), invalid_parameter);
  EXPECT_THROW(hash_eval(h, -4097), invalid_parameter);
}

TEST(DeltaPrime, SingletonDelta) {
  HashSpec h;
  h.p = 101;
  h.delta = {5};
  EXPECT_EQ(delta_prime(h), (std::vector<u64>{0, 5, 10, 15}));
}

TEST(DeltaPrime, SizeBound) {
  const HashFamily fam(Index{1} << 16, HashConfig{});
  for (const auto& h : sample_members(fam, 20)) {
    const double bound = std::pow(static_cast<double>(h.delta.size()) + 1.0, 3.0);
    EXPECT_LT(static_cast<double>(delta_prime(h).size()), bound);
  }
}

TEST(DeltaPrime, SidonQuadruplesLandInOneWindow) {
  // A small family we can list completely: one modulus, F_p itself.
  HashConfig cfg;
  cfg.p = 101;
  cfg.moduli = {2053};
  cfg.field_degree = 1;
  const HashFamily fam(1024, cfg);
  ASSERT_EQ(fam.size_u64(), 101u * 101u);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Index> d(0, 511);
  for (int t = 0; t < 30; ++t) {
    const Index x = d(rng), y = d(rng), z = d(rng);
    const Index w = x + y - z;
    if (w < 0 || w >= 1024) continue;
    u64 hits = 0;
    for (u64 j = 0; j < fam.size_u64(); ++j) {
      const auto h = fam.member(j);
      if (hash_eval(h, x - y) != 0 || hash_eval(h, y - z) != 0) continue;
      ++hits;
      const Fp F(h.p);
      const auto dp = delta_prime(h);
      const u64 i = hash_eval(h, z);
      for (Index v : {x, y, z, w}) {
        ASSERT_TRUE(std::binary_search(dp.begin(), dp.end(), F.sub(hash_eval(h, v), i)));
      }
    }
    EXPECT_GT(hits, 0u);
  }
}

TEST(HashFamily, EmpiricalUniformityOnIndependentPair) {
  // p = 3, moduli 5 and 7, q = 27: the whole family has 729 members.
  HashConfig cfg;
  cfg.p = 3;
  cfg.k = 2;
  cfg.moduli = {5, 7};
  cfg.field_degree = 3;
  const HashFamily fam(30, cfg);
  ASSERT_EQ(fam.size_u64(), 729u);
  std::map<std::pair<u64, u64>, double> hist;
  for (u64 j = 0; j < 729; ++j) {
    const auto h = fam.member(j);
    hist[{hash_eval(h, 1), hash_eval(h, 2)}] += 1.0 / 729;
  }
  double l1 = 0;
  for (u64 a = 0; a < 3; ++a) {
    for (u64 b = 0; b < 3; ++b) l1 += std::abs(hist[{a, b}] - 1.0 / 9);
  }
  // bias (m-1)/q = 2/27 per character; L1 <= p^2 * bias
  EXPECT_LE(l1, 9 * 2.0 / 27);
}

TEST(Relations, Examples) {
  EXPECT_TRUE(has_relation({5, 5}, 1));
  EXPECT_FALSE(has_relation({0, 1, 1000000}, 2));
  EXPECT_TRUE(has_relation({1, 2, 3}, 2));
  EXPECT_FALSE(has_relation({7}, 3));
}

TEST(Relations, AgreesWithNaiveEnumeration) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + rng() % 3;
    std::vector<Index> v(k);
    for (auto& x : v) x = static_cast<Index>(rng() % 40) - 20;
    const Index ell = 1 + static_cast<Index>(rng() % 3);
    bool naive = false;
    std::vector<Index> beta(k, -ell);
    while (!naive) {
      Index s = 0, dot = 0;
      bool nz = false;
      for (std::size_t j = 0; j < k; ++j) {
        s += beta[j];
        dot += beta[j] * v[j];
        nz |= beta[j] != 0;
      }
      naive = nz && s == 0 && dot == 0;
      std::size_t i = 0;
      while (i < k && ++beta[i] > ell) beta[i++] = -ell;
      if (i == k) break;
    }
    ASSERT_EQ(has_relation(v, ell), naive);
  }
}

TEST(Relations, BudgetIsEnforced) {
  EXPECT_THROW(has_relation({1, 2, 3, 4, 5}, 1000, 1e6), budget_exceeded);
}
