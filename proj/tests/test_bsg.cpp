#include <gtest/gtest.h>

#include <map>
#include <random>

#include "addcomb/bsg.hpp"
#include "addcomb/oracles.hpp"
#include "support.hpp"

using namespace addcomb;
using namespace testing_support;

namespace {

double energy_ratio(const IntSet& s) {
  const double n = static_cast<double>(s.size());
  return static_cast<double>(oracle::bf_energy(as_vector(s))) / (n * n * n);
}

bool is_subset(const IntSet& sub, const IntSet& sup) { return std::includes(sup.begin(), sup.end(), sub.begin(), sub.end()); }

// Pairs (a, b) in X^2 with (1_A * 1_{-A})[a - b] < threshold, by a direct census.
std::size_t bad_pairs(const IntSet& a, const IntSet& x, double threshold) {
  std::vector<Index> neg;
  for (Index v : a) neg.push_back(-v);
  const auto d = oracle::bf_conv(as_vector(a), neg);
  std::size_t bad = 0;
  for (Index u : x) {
    for (Index v : x) {
      auto it = d.find(u - v);
      bad += static_cast<double>(it == d.end() ? 0 : it->second) < threshold;
    }
  }
  return bad;
}

// AP of length len with step, plus `noise` random elements from the same range.
IntSet ap_with_noise(std::mt19937_64& rng, Index step, Index len, std::size_t noise) {
  IntSet s = arithmetic_progression(0, step, len);
  const IntSet extra = random_set(rng, 0, step * len, noise);
  return set_union(s, extra);
}

}  // namespace

TEST(HighEnergySubset, IntervalOf1024) {
  const IntSet a = interval(0, 1024);
  const auto r = find_high_energy_subset(a, 256, 2);
  EXPECT_TRUE(is_subset(r.subset, a));
  EXPECT_GE(r.subset.size(), 64u);
  EXPECT_LE(static_cast<double>(r.subset.size()), 256 * BsgConfig{}.size_slack);
  EXPECT_GE(r.rounds, 1);
  const double ratio = energy_ratio(r.subset);
  EXPECT_GE(ratio, 1.0 / r.k_final);
  EXPECT_GE(ratio, 1.0 / (2 * default_slack_budget(1024)));
}

TEST(HighEnergySubset, SmallSetIsReturnedWhole) {
  const IntSet a = interval(0, 4);
  const auto r = find_high_energy_subset(a, 4, 1);
  EXPECT_EQ(r.subset, a);
  EXPECT_EQ(r.rounds, 0);
}

TEST(HighEnergySubset, SidonSetFailsThePrecheck) {
  const IntSet a = sidon_set(64);
  ASSERT_LT(energy_ratio(a), 0.05);
  EXPECT_THROW(find_high_energy_subset(a, 32, 2), precondition_failed);
}

TEST(HighEnergySubset, RejectsBadParameters) {
  EXPECT_THROW(find_high_energy_subset(interval(0, 10), 20, 1), invalid_parameter);
  EXPECT_THROW(find_high_energy_subset(interval(0, 10), 5, 0.5), invalid_parameter);
  EXPECT_THROW(find_high_energy_subset(IntSet{}, 1, 1), invalid_parameter);
}

TEST(HighEnergySubset, StructuredInstances) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 8; ++it) {
    const IntSet a = ap_with_noise(rng, 1 + static_cast<Index>(rng() % 5), 600 + static_cast<Index>(rng() % 600), 40);
    const double R = static_cast<double>(a.size()) / 8;
    const auto r = find_high_energy_subset(a, R, 2);
    ASSERT_TRUE(is_subset(r.subset, a));
    ASSERT_GE(static_cast<double>(r.subset.size()), R / 4);
    ASSERT_LE(static_cast<double>(r.subset.size()), R * 2);
    ASSERT_GE(energy_ratio(r.subset), 1.0 / r.k_final);
  }
}

TEST(Schoen, IntervalOf256) {
  const IntSet a = interval(0, 256);
  const double K = 2, c = 1.0 / 64;
  const auto s = schoen_subset(a, K, c);
  const IntSet& x = s.x_subset;
  ASSERT_TRUE(is_subset(x, a));
  EXPECT_GE(static_cast<double>(x.size()), 256 / (3 * K));
  EXPECT_LE(static_cast<double>(bad_pairs(a, x, c * 256 / (3 * K))), 18 * c * x.size() * x.size());
}

TEST(Schoen, Singleton) {
  const auto s = schoen_subset(IntSet{42}, 3, 0.1);
  EXPECT_EQ(s.x_subset, IntSet{42});
}

TEST(Schoen, AcceptanceReplayOnStructuredSets) {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 12; ++it) {
    const IntSet a = ap_with_noise(rng, 1 + static_cast<Index>(rng() % 4), 100 + static_cast<Index>(rng() % 300), rng() % 60);
    const double K = 1.0 / energy_ratio(a) * 1.01;
    const double c = (it % 2) ? 1.0 / 64 : 1.0 / 512;
    const auto s = schoen_subset(a, K, c);
    const IntSet& x = s.x_subset;
    ASSERT_EQ(x, set_intersection(a, shift_set(a, s.s_shift)));
    ASSERT_GE(static_cast<double>(x.size()), static_cast<double>(a.size()) / (3 * K));
    const double n = static_cast<double>(a.size()), xs = static_cast<double>(x.size());
    ASSERT_LE(static_cast<double>(bad_pairs(a, x, c * n / (3 * K))), 18 * c * xs * xs);
  }
}

TEST(Schoen, RejectsBadParameters) {
  EXPECT_THROW(schoen_subset(interval(0, 8), 2, 0), invalid_parameter);
  EXPECT_THROW(schoen_subset(interval(0, 8), 2, 1), invalid_parameter);
  EXPECT_THROW(schoen_subset(interval(0, 8), 0.5, 0.1), invalid_parameter);
}

TEST(Bsg, SmallSetsFallBack) {
  const IntSet a = interval(0, 1000);
  const auto out = bsg_decompose(a, 2, 3);
  EXPECT_TRUE(out.fallback);
  EXPECT_EQ(out.a_prime, a);
  EXPECT_EQ(out.b_prime.size(), 1u);
  EXPECT_EQ(out.measured.sum_ab, a.size());
}

TEST(Bsg, IntervalPipeline) {
  BsgConfig cfg;
  cfg.fallback_factor = 1;
  const IntSet a = interval(0, 4096);
  const double K = 2;
  const auto out = bsg_decompose(a, K, 3, cfg);
  ASSERT_FALSE(out.fallback);
  EXPECT_TRUE(is_subset(out.a_prime, a));
  EXPECT_TRUE(is_subset(out.b_prime, a));
  EXPECT_GE(out.a_prime.size(), 4096u / 128);
  EXPECT_GE(static_cast<double>(out.b_prime.size()), 4096 / (std::pow(K, 6) * out.slack_budget));
  EXPECT_LE(static_cast<double>(out.measured.sum_ab), std::pow(K, 5) * 4096 * out.slack_budget);
  EXPECT_EQ(out.measured.sum_aa, sumset(out.a_prime, out.a_prime).size());
  // the sub-structure is an interval, so A' + A' stays small
  EXPECT_LE(out.measured.sum_aa, 2 * out.a_prime.size());
}

TEST(Bsg, StructuredInstancesHardFloorsAndRuzsa) {
  std::mt19937_64 rng(17);
  BsgConfig cfg;
  cfg.fallback_factor = 1;
  for (int it = 0; it < 6; ++it) {
    const IntSet a = ap_with_noise(rng, 1 + static_cast<Index>(rng() % 6), 1000 + static_cast<Index>(rng() % 2000), rng() % 200);
    const double K = 2;
    const auto out = bsg_decompose(a, K, 2, cfg);
    const double n = static_cast<double>(a.size());
    ASSERT_TRUE(is_subset(out.a_prime, a));
    ASSERT_TRUE(is_subset(out.b_prime, a));
    ASSERT_GE(out.a_prime.size(), static_cast<std::size_t>(std::ceil(n / (64 * K))));
    const double ab = static_cast<double>(out.measured.sum_ab);
    ASSERT_LE(static_cast<double>(out.measured.sum_aa), ab * ab / static_cast<double>(out.b_prime.size()));
    ASSERT_EQ(out.measured.sum_ab, oracle::bf_sumset(as_vector(out.a_prime), as_vector(out.b_prime)).size());
  }
}

TEST(Bsg, RejectsBadParameters) {
  EXPECT_THROW(bsg_decompose(interval(0, 10), 2, 1), invalid_parameter);
  EXPECT_THROW(bsg_decompose(interval(0, 10), 0, 3), invalid_parameter);
  EXPECT_THROW(bsg_decompose(sidon_set(64), 2, 3), precondition_failed);
}
