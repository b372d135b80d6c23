#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "quantobs/errors.hpp"
#include "quantobs/var_stats.hpp"

using quantobs::VarStats;
namespace oracle = quantobs::testing;

namespace {

VarStats stats_of(std::initializer_list<double> ys) {
  VarStats s;
  for (double y : ys) s.observe(y);
  return s;
}

VarStats stats_of(std::span<const double> ys) {
  VarStats s;
  for (double y : ys) s.observe(y);
  return s;
}

}  // namespace

TEST(VarStatsObserve, SingleObservation) {
  VarStats s;
  s.observe(5.0, 1.0);
  EXPECT_EQ(s.count(), 1.0);
  EXPECT_EQ(s.mean(), 5.0);
  EXPECT_EQ(s.m2(), 0.0);
}

TEST(VarStatsObserve, MatchesTwoPassOnOneToFour) {
  const std::vector<double> ys = {1, 2, 3, 4};
  const auto want = oracle::two_pass(ys);
  ASSERT_EQ(want.mean, 2.5L);
  ASSERT_EQ(want.m2, 5.0L);

  const VarStats s = stats_of(ys);
  EXPECT_EQ(s.count(), 4.0);
  EXPECT_DOUBLE_EQ(s.mean(), 2.5);
  EXPECT_DOUBLE_EQ(s.m2(), 5.0);
}

TEST(VarStatsObserve, IdenticalValuesHaveNoDispersion) {
  const VarStats s = stats_of({3.0, 3.0});
  EXPECT_EQ(s.count(), 2.0);
  EXPECT_EQ(s.mean(), 3.0);
  EXPECT_EQ(s.m2(), 0.0);
}

TEST(VarStatsObserve, WeightEqualsRepetition) {
  VarStats weighted;
  weighted.observe(1.0, 2.0);
  weighted.observe(4.0, 3.0);
  const VarStats repeated = stats_of({1.0, 1.0, 4.0, 4.0, 4.0});
  EXPECT_DOUBLE_EQ(weighted.count(), repeated.count());
  EXPECT_DOUBLE_EQ(weighted.mean(), repeated.mean());
  EXPECT_NEAR(weighted.m2(), repeated.m2(), 1e-12);
}

TEST(VarStatsObserve, RejectsBadInput) {
  VarStats s;
  EXPECT_THROW(s.observe(std::numeric_limits<double>::quiet_NaN()), quantobs::InvalidInput);
  EXPECT_THROW(s.observe(std::numeric_limits<double>::infinity()), quantobs::InvalidInput);
  EXPECT_THROW(s.observe(1.0, 0.0), quantobs::InvalidInput);
  EXPECT_THROW(s.observe(1.0, -1.0), quantobs::InvalidInput);
  EXPECT_THROW(s.observe(1.0, std::numeric_limits<double>::infinity()), quantobs::InvalidInput);
  EXPECT_TRUE(s.empty());
}

TEST(VarStatsMerge, TwoHalvesOfOneToFour) {
  const VarStats a = VarStats::from_moments(2, 1.5, 0.5);
  const VarStats b = VarStats::from_moments(2, 3.5, 0.5);
  const VarStats ab = quantobs::merge(a, b);
  EXPECT_EQ(ab.count(), 4.0);
  EXPECT_DOUBLE_EQ(ab.mean(), 2.5);
  EXPECT_DOUBLE_EQ(ab.m2(), 5.0);
}

TEST(VarStatsMerge, EmptyIsIdentity) {
  const VarStats s = stats_of({1.0, 7.0, -2.0});
  EXPECT_EQ(quantobs::merge(VarStats{}, s), s);
  EXPECT_EQ(quantobs::merge(s, VarStats{}), s);
}

TEST(VarStatsMerge, SelfMergeDoublesCountAndM2) {
  const VarStats s = stats_of({1.0, 7.0, -2.0});
  const VarStats ss = quantobs::merge(s, s);
  EXPECT_EQ(ss.count(), 2 * s.count());
  EXPECT_DOUBLE_EQ(ss.mean(), s.mean());
  EXPECT_DOUBLE_EQ(ss.m2(), 2 * s.m2());
}

TEST(VarStatsDifference, RecoversFirstHalf) {
  const VarStats ab = VarStats::from_moments(4, 2.5, 5.0);
  const VarStats b = VarStats::from_moments(2, 3.5, 0.5);
  const VarStats a = quantobs::difference(ab, b);
  EXPECT_EQ(a.count(), 2.0);
  EXPECT_DOUBLE_EQ(a.mean(), 1.5);
  EXPECT_DOUBLE_EQ(a.m2(), 0.5);
}

TEST(VarStatsDifference, SelfAndEmpty) {
  const VarStats s = stats_of({1.0, 7.0, -2.0});
  EXPECT_EQ(quantobs::difference(s, s), VarStats{});
  EXPECT_EQ(quantobs::difference(s, VarStats{}), s);
}

TEST(VarStatsDifference, UnderflowThrows) {
  const VarStats small = stats_of({1.0});
  const VarStats big = stats_of({1.0, 2.0});
  EXPECT_THROW((void)quantobs::difference(small, big), quantobs::UnderflowError);
}

TEST(VarStatsDifference, ClampsNegativeM2) {
  // b's m2 exceeds what ab can account for: the raw formula goes negative.
  const VarStats ab = VarStats::from_moments(3, 0.0, 1.0);
  const VarStats b = VarStats::from_moments(1, 0.0, 0.0);
  const VarStats inconsistent = VarStats::from_moments(2, 0.0, 5.0);
  EXPECT_GE(quantobs::difference(ab, b).m2(), 0.0);
  const VarStats a = quantobs::difference(ab, inconsistent);
  EXPECT_EQ(a.m2(), 0.0);
}

TEST(VarStatsVariance, Conventions) {
  EXPECT_NEAR(VarStats::from_moments(4, 2.5, 5.0).variance(), 5.0 / 3.0, 1e-15);
  EXPECT_EQ(VarStats::from_moments(1, 7.0, 0).variance(), 0.0);
  EXPECT_EQ(VarStats::from_moments(2, 3.0, 0).variance(), 0.0);
  EXPECT_EQ(VarStats{}.variance(), 0.0);
}

TEST(VarStatsFromMoments, CanonicalEmptyAndValidation) {
  EXPECT_EQ(VarStats::from_moments(0, 3.0, 2.0), VarStats{});
  EXPECT_THROW((void)VarStats::from_moments(-1, 0, 0), quantobs::InvalidInput);
  EXPECT_THROW((void)VarStats::from_moments(1, 0, -1), quantobs::InvalidInput);
  EXPECT_THROW((void)VarStats::from_moments(1, std::nan(""), 0), quantobs::InvalidInput);
}

// Property: merge of any two parts equals the batch statistics of the whole.
TEST(VarStatsProperty, MergeMatchesBatchAndIsCommutativeAssociative) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 2000;
    std::uniform_real_distribution<double> value(-1e7, 1e7);
    std::vector<double> ys(n);
    for (double& y : ys) y = value(rng);
    const std::size_t cut1 = 1 + rng() % (n - 2);
    const std::size_t cut2 = cut1 + 1 + rng() % (n - cut1 - 1);
    std::span<const double> all(ys);
    const VarStats a = stats_of(all.subspan(0, cut1));
    const VarStats b = stats_of(all.subspan(cut1, cut2 - cut1));
    const VarStats c = stats_of(all.subspan(cut2));

    const auto want = oracle::two_pass(ys);
    const VarStats ab = quantobs::merge(a, b);
    const VarStats abc = quantobs::merge(ab, c);
    EXPECT_EQ(abc.count(), static_cast<double>(n));
    EXPECT_LT(oracle::rel_err(abc.mean(), want.mean), 1e-9);
    EXPECT_LT(oracle::rel_err(abc.m2(), want.m2), 1e-9);

    const VarStats ba = quantobs::merge(b, a);
    EXPECT_LT(oracle::rel_err(ba.mean(), ab.mean()), 1e-9);
    EXPECT_LT(oracle::rel_err(ba.m2(), ab.m2()), 1e-9);
    const VarStats a_bc = quantobs::merge(a, quantobs::merge(b, c));
    EXPECT_LT(oracle::rel_err(a_bc.mean(), abc.mean()), 1e-9);
    EXPECT_LT(oracle::rel_err(a_bc.m2(), abc.m2()), 1e-9);

    const VarStats back = quantobs::difference(ab, b);
    EXPECT_LT(oracle::rel_err(back.count(), a.count()), 1e-8);
    EXPECT_LT(oracle::rel_err(back.mean(), a.mean()), 1e-8);
    EXPECT_LT(oracle::recovered_err(back.m2(), a.m2(), ab.m2()), 1e-8);
  }
}

TEST(VarStatsProperty, AllFieldsStayFinite) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> value(0.0, 1e150);
  VarStats s;
  for (int i = 0; i < 1000; ++i) s.observe(value(rng));
  EXPECT_TRUE(std::isfinite(s.mean()));
  EXPECT_TRUE(std::isfinite(s.m2()));
}
