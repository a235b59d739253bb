#include <gtest/gtest.h>

#include <random>

#include "addcomb/oracles.hpp"
#include "addcomb/vecmath.hpp"
#include "support.hpp"

using namespace addcomb;
using namespace testing_support;

TEST(ConvDense, TwoPointSets) {
  auto x = indicator({0, 1});
  auto r = to_map(conv_dense(x, x, 2));
  std::map<Index, Count> want{{0, 1}, {1, 2}, {2, 1}};
  EXPECT_EQ(r, want);
}

TEST(ConvDense, WeightedEntries) {
  auto x = SparseVec::from_entries({{0, 1}, {2, 2}});
  auto y = SparseVec::from_entries({{0, 3}, {1, 1}});
  std::map<Index, Count> want{{0, 3}, {1, 1}, {2, 6}, {3, 2}};
  EXPECT_EQ(to_map(conv_dense(x, y, 3)), want);
}

TEST(ConvDense, EmptyOperand) {
  EXPECT_TRUE(conv_dense(SparseVec{}, indicator({1, 2}), 4).empty());
}

TEST(ConvDense, RejectsOutOfUniverse) {
  EXPECT_THROW(conv_dense(indicator({0, 5}), indicator({0}), 4), invalid_parameter);
}

TEST(ConvCyclic, SingleWrap) {
  auto r = to_map(conv_cyclic(indicator({3}), indicator({2}), 4));
  std::map<Index, Count> want{{1, 1}};
  EXPECT_EQ(r, want);
}

TEST(ConvPartial, ReadsRequestedTargets) {
  IntSet c{5, 6};
  auto r = conv_partial(indicator({0, 5, 10}), indicator({0, 1}), c);
  EXPECT_EQ(r, (std::vector<Count>{1, 1}));
}

TEST(ConvSparse, FarApartPoints) {
  auto x = indicator({0, 1000000000});
  auto r = to_map(conv_sparse(x, x));
  std::map<Index, Count> want{{0, 1}, {1000000000, 2}, {2000000000, 1}};
  EXPECT_EQ(r, want);
}

TEST(ConvSparse, NegativeIndices) {
  auto x = indicator({-7, 3});
  auto y = indicator({-1, 0});
  std::map<Index, Count> want{{-8, 1}, {-7, 1}, {2, 1}, {3, 1}};
  EXPECT_EQ(to_map(conv_sparse(x, y)), want);
}

TEST(ConvSparse, MassOverflowIsReported) {
  auto x = SparseVec::from_entries({{0, Count{1} << 40}, {Index{1} << 40, 1}});
  auto y = SparseVec::from_entries({{0, Count{1} << 40}, {Index{1} << 40, 1}});
  EXPECT_THROW(conv_sparse(x, y), arithmetic_overflow);
}

TEST(NttCounts, OverflowOfInt64IsReported) {
  std::vector<Count> a(64, Count{1} << 40), b(64, Count{1} << 40);
  EXPECT_THROW(ntt::convolve_counts(a, b), arithmetic_overflow);
}

TEST(NttCounts, LargeCountsNeedSeveralPrimes) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Count> d(0, Count{1} << 24);
  std::vector<Count> a(300), b(200);
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  auto got = ntt::convolve_counts(a, b);
  for (std::size_t k = 0; k < got.size(); k += 37) {
    __int128 s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (k >= i && k - i < b.size()) s += static_cast<__int128>(a[i]) * b[k - i];
    }
    ASSERT_EQ(static_cast<__int128>(got[k]), s) << k;
  }
}

// ---- properties --------------------------------------------------------------

namespace {

std::map<Index, Count> random_weighted(std::mt19937_64& rng, Index lo, Index hi, int n, Count maxc) {
  std::uniform_int_distribution<Index> di(lo, hi);
  std::uniform_int_distribution<Count> dc(1, maxc);
  std::map<Index, Count> m;
  for (int i = 0; i < n; ++i) m[di(rng)] += dc(rng);
  return m;
}

}  // namespace

TEST(ConvProperties, AllFourAgreeWithOracle) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    const Index hi = Index{1} << (3 + it % 18);
    auto mx = random_weighted(rng, 0, hi, 1 + it % 50, 1 + it % 7);
    auto my = random_weighted(rng, 0, hi, 1 + (it * 7) % 40, 1 + it % 5);
    auto want = oracle::bf_conv_weighted(mx, my);
    auto x = from_map(mx), y = from_map(my);
    ASSERT_EQ(to_map(conv_dense(x, y, hi + 1)), want);
    ASSERT_EQ(to_map(conv_sparse(x, y)), want);
    IntSet targets;
    for (auto [k, v] : want) targets.push_back(k);
    targets.push_back(hi * 2 + 5);
    auto part = conv_partial(x, y, targets);
    for (std::size_t t = 0; t + 1 < targets.size(); ++t) ASSERT_EQ(part[t], want.at(targets[t]));
    ASSERT_EQ(part.back(), 0);
    const Index m = 1 + it % 97;
    std::map<Index, Count> cyc;
    for (auto [k, v] : want) cyc[floor_mod(k, m)] += v;
    ASSERT_EQ(to_map(conv_cyclic(x, y, m)), cyc);
  }
}

TEST(ConvProperties, SparseHashingPathOnWideSupports) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 25; ++it) {
    auto mx = random_weighted(rng, -(Index{1} << 34), Index{1} << 34, 5 + it * 2, 4);
    auto my = random_weighted(rng, 0, Index{1} << 33, 3 + it, 3);
    auto want = oracle::bf_conv_weighted(mx, my);
    ASSERT_EQ(to_map(detail::conv_hashed(from_map(mx), from_map(my))), want);
    ASSERT_EQ(to_map(conv_sparse(from_map(mx), from_map(my))), want);
  }
}

TEST(ConvProperties, SparseHashingOnStructuredSums) {
  // Sums concentrate on few indices: an AP with a huge step convolved with itself.
  const Index step = (Index{1} << 31) + 1;
  std::map<Index, Count> mx;
  for (Index i = 0; i < 300; ++i) mx[i * step] = 1;
  auto x = from_map(mx);
  auto got = detail::conv_hashed(x, x);
  ASSERT_EQ(got.sparsity(), 599u);
  for (Index s = 0; s < 599; ++s) ASSERT_EQ(got.at(s * step), std::min(s + 1, 599 - s));
}

TEST(ConvProperties, SparseHashingWithStructuredCollisions) {
  // Many sums share residues modulo small primes: arithmetic progressions with huge step.
  const Index step = Index{1} << 30;
  std::map<Index, Count> mx, my;
  for (Index i = 0; i < 60; ++i) mx[i * step] = 1 + i % 3;
  for (Index i = 0; i < 45; ++i) my[i * step + 7] = 1;
  ASSERT_EQ(to_map(detail::conv_hashed(from_map(mx), from_map(my))), oracle::bf_conv_weighted(mx, my));
}

TEST(ConvProperties, CommutativeAndLinear) {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 50; ++it) {
    auto x = from_map(random_weighted(rng, 0, 5000, 30, 3));
    auto y = from_map(random_weighted(rng, 0, 5000, 20, 3));
    auto z = from_map(random_weighted(rng, 0, 5000, 25, 3));
    ASSERT_EQ(conv_sparse(x, y), conv_sparse(y, x));
    std::map<Index, Count> yz = to_map(y);
    for (auto [k, v] : to_map(z)) yz[k] += v;
    auto lhs = to_map(conv_sparse(x, from_map(yz)));
    auto rhs = to_map(conv_sparse(x, y));
    for (auto [k, v] : to_map(conv_sparse(x, z))) rhs[k] += v;
    ASSERT_EQ(lhs, rhs);
    // total mass multiplies
    ASSERT_EQ(conv_sparse(x, y).mass(), x.mass() * y.mass());
  }
}

TEST(MultiSet, FromValuesCountsDuplicates) {
  std::vector<Index> v{3, 1, 3, 0};
  auto m = MultiSet::from_values(v, 8);
  EXPECT_EQ(m.size(), 4);
  EXPECT_EQ(m.distinct(), 3u);
  EXPECT_EQ(m.vec().at(3), 2);
  EXPECT_THROW(MultiSet::from_values(std::vector<Index>{-1}), invalid_parameter);
  EXPECT_THROW(MultiSet::from_values(std::vector<Index>{9}, 8), invalid_parameter);
}
