#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "addcomb/modular.hpp"
#include "support.hpp"

using namespace addcomb;
using namespace testing_support;

namespace {

// M <= |S| * kModulusSlack * P; calibrated, see the decisions notes.
constexpr double kModulusSlack = 40.0;

void check_modulus(const IntSet& s, Index n) {
  const auto r = find_modulus(s, n);
  Index prod = 1;
  for (Index p : r.prime_factors) {
    prod *= p;
    ASSERT_GE(p, r.window_p);
    ASSERT_LE(p, 2 * r.window_p);
  }
  ASSERT_EQ(prod, r.modulus);
  const Index distinct = static_cast<Index>(residues(s, r.modulus).size());
  ASSERT_EQ(distinct, r.distinct_residues);
  ASSERT_GE(10 * distinct, 9 * static_cast<Index>(s.size()));
  ASSERT_GE(2 * r.modulus, static_cast<Index>(s.size()));
  ASSERT_LE(10 * r.collisions, static_cast<Count>(s.size()));
  // Cauchy-Schwarz: M >= |S|^2 / (h + |S|)
  ASSERT_GE(static_cast<double>(r.modulus) * static_cast<double>(r.collisions + static_cast<Count>(s.size())),
            static_cast<double>(s.size()) * static_cast<double>(s.size()));
  if (s.size() > 1) {
    ASSERT_LE(static_cast<double>(r.modulus), kModulusSlack * static_cast<double>(r.window_p) * static_cast<double>(s.size()));
  }
}

}  // namespace

TEST(FindModulus, IntervalOfTen) {
  const auto r = find_modulus(interval(0, 10), 1 << 10);
  EXPECT_GE(r.distinct_residues, 9);
  EXPECT_GE(r.modulus, 9);
  check_modulus(interval(0, 10), 1 << 10);
}

TEST(FindModulus, Singleton) {
  const auto r = find_modulus(IntSet{0}, 16);
  EXPECT_EQ(r.modulus, 1);
  EXPECT_EQ(r.distinct_residues, 1);
}

TEST(FindModulus, Empty) { EXPECT_THROW(find_modulus(IntSet{}, 16), invalid_parameter); }

TEST(FindModulus, RandomAndStructuredSets) {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 200; ++it) {
    const Index n = Index{1} << (10 + it % 20);
    const std::size_t k = 2 + (rng() % 4095);
    IntSet s;
    switch (it % 4) {
      case 0: s = random_set(rng, 0, n - 1, k); break;
      case 1: s = arithmetic_progression(static_cast<Index>(rng() % 100), 1 + static_cast<Index>(rng() % 50), static_cast<Index>(k)); break;
      case 2: s = arithmetic_progression(0, 2 * 3 * 5 * 7 * 11 * 13, static_cast<Index>(k)); break;
      default: s = interval_union(rng, n, 4, static_cast<Index>(k / 4 + 1)); break;
    }
    check_modulus(s, std::max<Index>(n, s.back() + 1));
  }
}

TEST(FindModulus, Deterministic) {
  std::mt19937_64 rng(3);
  auto s = random_set(rng, 0, 1 << 20, 1000);
  auto r1 = find_modulus(s, 1 << 20), r2 = find_modulus(s, 1 << 20);
  EXPECT_EQ(r1.modulus, r2.modulus);
  EXPECT_EQ(r1.prime_factors, r2.prime_factors);
}

namespace {

void check_cover(const IntSet& s_hat, Index m) {
  const auto cv = find_cover(s_hat, m);
  // S_hat + Delta = Z_M
  std::vector<char> hit(static_cast<std::size_t>(m), 0);
  for (Index x : s_hat) {
    for (Index d : cv.deltas) hit[static_cast<std::size_t>(floor_mod(x + d, m))] = 1;
  }
  for (Index r = 0; r < m; ++r) ASSERT_TRUE(hit[static_cast<std::size_t>(r)]) << r;
  // Delta is the iterated sumset of the generators
  IntSet iter{0};
  for (Index g : cv.generators) {
    std::vector<Index> v(iter.begin(), iter.end());
    for (Index x : iter) v.push_back(floor_mod(x + g, m));
    iter = make_set(v);
  }
  ASSERT_EQ(iter, cv.deltas);
  if (static_cast<Index>(s_hat.size()) < m) {
    ASSERT_LE(static_cast<double>(cv.deltas.size()),
              2.0 * static_cast<double>(m) * std::log(static_cast<double>(m)) / static_cast<double>(s_hat.size()));
  }
  for (std::size_t i = 0; i + 1 < cv.uncovered.size(); ++i) {
    ASSERT_LE(cv.uncovered[i + 1], cv.uncovered[i] * cv.uncovered[i] + 1e-12);
  }
}

}  // namespace

TEST(FindCover, AlreadyCovered) {
  const auto cv = find_cover(interval(0, 7), 7);
  EXPECT_EQ(cv.deltas, IntSet{0});
  EXPECT_TRUE(cv.generators.empty());
}

TEST(FindCover, EvenResiduesModFour) {
  const auto cv = find_cover(IntSet{0, 2}, 4);
  EXPECT_EQ(cv.generators, std::vector<Index>{1});
  EXPECT_EQ(cv.deltas, (IntSet{0, 1}));
  check_cover(IntSet{0, 2}, 4);
}

TEST(FindCover, RandomSets) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 150; ++it) {
    const Index m = 2 + static_cast<Index>(rng() % 4095);
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(m / 8 + rng() % static_cast<std::uint64_t>(m)));
    check_cover(random_set(rng, 0, m - 1, k), m);
  }
}

TEST(FindCover, SparseStructuredSets) {
  for (Index m : {97, 128, 1000, 4096}) {
    check_cover(arithmetic_progression(0, 3, m / 8), m);
    check_cover(interval(5, m / 8), m);
  }
}

TEST(PartitionC, SinglePartWhenEverythingIsGood) {
  // A+S = Z_M and Delta = {0}: load 1 everywhere, bound 2.
  CoverResult cover;
  cover.modulus = 5;
  cover.deltas = {0};
  const auto p = partition_c(interval(0, 5), cover, interval(0, 12));
  ASSERT_EQ(p.parts.size(), 1u);
  EXPECT_EQ(p.shifts, std::vector<Index>{0});
  EXPECT_EQ(p.parts[0], interval(0, 12));
}

namespace {

void check_partition(const IntSet& a_plus_s, const CoverResult& cover, const IntSet& c) {
  const Index m = cover.modulus;
  const auto p = partition_c(a_plus_s, cover, c);
  std::vector<Index> all;
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    all.insert(all.end(), p.parts[i].begin(), p.parts[i].end());
    // recompute the load with an independent double loop
    for (Index x : p.parts[i]) {
      Count load = 0;
      for (Index y : a_plus_s) {
        for (Index d : cover.deltas) load += floor_mod(y + d + p.shifts[i], m) == floor_mod(x, m);
      }
      ASSERT_LE(static_cast<double>(load), 2.0 * a_plus_s.size() * cover.deltas.size() / static_cast<double>(m));
    }
  }
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all, c);
}

}  // namespace

TEST(PartitionC, IntervalInstance) {
  const IntSet a = interval(0, 16), s = interval(0, 16), c = interval(0, 32);
  const auto mod = find_modulus(s, 64);
  const auto cover = find_cover(residues(s, mod.modulus), mod.modulus);
  check_partition(sumset(a, s), cover, c);
}

TEST(PartitionC, RandomInstances) {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 40; ++it) {
    const IntSet a = ap_subset(rng, 0, 3, 100, 0.7);
    const IntSet s = random_set(rng, 0, 1000, 20 + rng() % 60);
    const IntSet c = random_set(rng, -50, 2000, 100);
    const auto mod = find_modulus(s, 4096);
    const auto cover = find_cover(residues(s, mod.modulus), mod.modulus);
    check_partition(sumset(a, s), cover, c);
  }
}
