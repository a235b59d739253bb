#include <gtest/gtest.h>

#include <random>

#include "addcomb/oracles.hpp"
#include "addcomb/small_doubling.hpp"
#include "support.hpp"

using namespace addcomb;
using namespace testing_support;

namespace {

// Compares both outputs against a direct double loop.
void check_exact(const IntSet& a, const IntSet& b, const IntSet& c, const IntSet& s) {
  const auto r = count_small_doubling(a, b, c, s);
  auto ab = oracle::bf_conv(as_vector(a), as_vector(b));
  std::vector<Index> neg_b;
  for (Index x : b) neg_b.push_back(-x);
  auto cb = oracle::bf_conv(as_vector(c), neg_b);
  for (std::size_t i = 0; i < c.size(); ++i) ASSERT_EQ(r.sums[i], ab.count(c[i]) ? ab[c[i]] : 0) << "c=" << c[i];
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(r.reverse[i], cb.count(a[i]) ? cb[a[i]] : 0) << "a=" << a[i];
  // the bound on sum |C_d|
  ASSERT_LE(static_cast<double>(r.stats.sum_c_d), r.stats.c_d_bound + 1e-9);
}

}  // namespace

TEST(SmallDoubling, AllIntervals) {
  const IntSet x = interval(0, 16);
  const auto r = count_small_doubling(x, x, x, x);
  for (Index c = 0; c < 16; ++c) EXPECT_EQ(r.sums[static_cast<std::size_t>(c)], c + 1);
  check_exact(x, x, x, x);
}

TEST(SmallDoubling, SingletonB) {
  const IntSet a{1, 4, 9, 16, 25}, c = interval(0, 30);
  const auto r = count_small_doubling(a, IntSet{0}, c, a);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(r.sums[i], set_contains(a, c[i]) ? 1 : 0);
}

TEST(SmallDoubling, RejectsEmptySets) {
  EXPECT_THROW(count_small_doubling({}, {1}, {1}, {1}), invalid_parameter);
}

TEST(SmallDoubling, ProgressionStepSeven) {
  std::mt19937_64 rng(70);
  for (int it = 0; it < 100; ++it) {
    const Index len = 20 + static_cast<Index>(rng() % 300);
    const IntSet a = arithmetic_progression(static_cast<Index>(rng() % 50), 7, len);
    const IntSet b = random_set(rng, 0, 7 * len, 10 + rng() % 200);
    std::vector<Index> cv;
    const IntSet ab = sumset(a, b);
    std::sample(ab.begin(), ab.end(), std::back_inserter(cv), 50 + rng() % 300, rng);
    cv.push_back(ab.back() + 3);
    check_exact(a, b, make_set(cv), a);
  }
}

TEST(SmallDoubling, NegativeValuesAndMixedStructure) {
  std::mt19937_64 rng(71);
  for (int it = 0; it < 60; ++it) {
    const IntSet a = shift_set(ap_subset(rng, 0, 3, 200, 0.6), -300);
    const IntSet s = negate_set(interval_union(rng, 2000, 3, 40));
    const IntSet b = random_set(rng, -5000, 5000, 150);
    const IntSet c = random_set(rng, -6000, 6000, 400);
    check_exact(a, b, c, s);
  }
}

TEST(SmallDoubling, BothBranchesAreExercised) {
  // A large B concentrated on few d values forces the convolution branch.
  const IntSet a = interval(0, 400);
  const IntSet s = interval(0, 50);
  std::vector<Index> bv;
  for (Index i = 0; i < 300; ++i) bv.push_back(i * 50);
  const IntSet b = make_set(bv);
  const IntSet c = interval(0, 15000);
  const auto r = count_small_doubling(a, b, c, s);
  EXPECT_GT(r.stats.convolved + r.stats.enumerated, 0u);
  check_exact(a, b, c, s);
}

TEST(SmallDoubling, RandomInstancesAgainstBruteForce) {
  std::mt19937_64 rng(72);
  for (int it = 0; it < 80; ++it) {
    const Index n = Index{1} << (8 + it % 12);
    auto pick = [&](std::size_t k) { return random_set(rng, 0, n - 1, k); };
    const IntSet a = pick(5 + rng() % 200), b = pick(5 + rng() % 200), c = pick(5 + rng() % 300);
    const IntSet s = (it % 2) ? a : pick(1 + rng() % 100);
    check_exact(a, b, c, s);
  }
}
