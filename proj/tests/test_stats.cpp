#include <gtest/gtest.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>

#include "oracles.hpp"

using namespace posebench;
using namespace posebench::stats;

using namespace oracles;

TEST(BestAtK, MatchesSubsetEnumerationExactly) {
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0;
  for (int n = 1; n <= 12; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k <= n; ++k) {
        const auto exact = brute_best_at_k(n, c, k);
        ASSERT_EQ(best_at_k(n, c, k), to_double(exact)) << n << " " << c << " " << k;
        ++checked;
      }
  EXPECT_EQ(checked, 728);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(BestAtK, SpotValues) {
  EXPECT_EQ(best_at_k(20, 1, 5), 0.25);
  EXPECT_EQ(best_at_k(5, 2, 3), 0.9);
  EXPECT_EQ(best_at_k(20, 0, 20), 0.0);
  EXPECT_EQ(best_at_k(20, 1, 20), 1.0);
  EXPECT_EQ(best_at_k(20, 20, 1), 1.0);
  EXPECT_EQ(best_at_k(20, 7, 1), 0.35);
}

TEST(BestAtK, LargeNFallsBackToProduct) {
  // C(100, 50) exceeds 2^53.
  const double v = best_at_k(100, 3, 50);
  const double expect = 1.0 - (50.0 / 100) * (49.0 / 99) * (48.0 / 98);
  EXPECT_NEAR(v, expect, 1e-14);
}

TEST(BestAtK, RejectsBadArguments) {
  EXPECT_THROW(best_at_k(0, 0, 1), InvalidArgument);
  EXPECT_THROW(best_at_k(5, 6, 1), InvalidArgument);
  EXPECT_THROW(best_at_k(5, 1, 0), InvalidArgument);
  EXPECT_THROW(best_at_k(5, 1, 6), InvalidArgument);
}

TEST(BestAtK, MonotoneInK) {
  for (int n = 1; n <= 20; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k < n; ++k) EXPECT_LE(best_at_k(n, c, k), best_at_k(n, c, k + 1));
}

TEST(BestAtK, MeanOverStructuresIsExact) {
  const std::vector<std::pair<int, int>> counts = {{20, 0}, {20, 1}, {20, 3}, {20, 20}, {20, 7}};
  for (int k : {1, 5, 20}) {
    cpp_rational sum = 0;
    for (const auto& [n, c] : counts) {
      sum += 1 - cpp_rational(choose(n - c, k), choose(n, k));
    }
    sum /= static_cast<long>(counts.size());
    EXPECT_EQ(mean_best_at_k(counts, k), to_double(sum)) << k;
  }
}

TEST(ExpectedMax, ZeroOneValuesReduceToBestAtK) {
  for (int n = 1; n <= 12; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k <= n; ++k) {
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < c; ++i) v[static_cast<std::size_t>(i)] = 1.0;
        EXPECT_NEAR(expected_max_at_k(v, k), best_at_k(n, c, k), 1e-12);
      }
  // Max of 2 from {0.1, 0.5, 0.9}: pairs give 0.5, 0.9, 0.9.
  EXPECT_NEAR(expected_max_at_k({0.9, 0.1, 0.5}, 2), (0.5 + 0.9 + 0.9) / 3, 1e-15);
}

TEST(Confidence, HighestConfidenceWithTies) {
  std::vector<PoseOutcome> p = {{0, 1, false, 0.7}, {0, 0, true, 0.9}, {1, 0, false, 0.9}};
  EXPECT_TRUE(select_max_confidence(p));
  p[1].seed = 2;
  EXPECT_FALSE(select_max_confidence(p));
  const auto o = make_outcome("x", p);
  EXPECT_EQ(o.n, 3);
  EXPECT_EQ(o.c, 1);
  p[0].confidence.reset();
  EXPECT_FALSE(make_outcome("x", p).confidence_best_success.has_value());
}

// ---------------------------------------------------------------------------

TEST(SplitMix, PublishedFirstOutputs) {
  SplitMix64 r(0);
  EXPECT_EQ(r.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(r.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(r.next(), 0x06C45D188009454FULL);
}

TEST(SplitMix, BelowStaysInRangeAndMatchesReference) {
  SplitMix64 a(42);
  RefRng b{42};
  for (std::uint64_t n : {1ULL, 2ULL, 3ULL, 7ULL, 20ULL, 1000ULL, (1ULL << 63) + 5}) {
    for (int i = 0; i < 200; ++i) {
      const auto x = a.below(n);
      EXPECT_LT(x, n);
      EXPECT_EQ(x, b.below(n));
    }
  }
  EXPECT_THROW(a.below(0), InvalidArgument);
}

TEST(Bootstrap, ConstantVectorHasZeroSem) {
  const auto r = bootstrap(std::vector<double>(37, 0.35), 500, 7);
  EXPECT_EQ(r.sem, 0.0);
  double s = 0.0;
  for (int i = 0; i < 37; ++i) s += 0.35;
  EXPECT_EQ(r.mean, s / 37);
}

TEST(Bootstrap, ReproducesReferenceGeneratorBitExactly) {
  std::vector<double> v;
  for (int i = 0; i < 53; ++i) v.push_back(std::fmod(i * 0.37, 1.0));
  for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
    const auto r = bootstrap(v, 1000, seed);
    const auto ref = ref_resample_means(v, 1000, seed);
    ASSERT_EQ(r.resample_means.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_EQ(r.resample_means[i], ref[i]) << i;
    // Summary from the reference means, two-pass.
    double m = 0.0;
    for (double x : ref) m += x;
    m /= static_cast<double>(ref.size());
    double var = 0.0;
    for (double x : ref) var += (x - m) * (x - m);
    EXPECT_NEAR(r.mean, m, 1e-14);
    EXPECT_NEAR(r.sem, std::sqrt(var / static_cast<double>(ref.size())), 1e-13);
  }
}

TEST(Bootstrap, SerialAndParallelIdentical) {
  std::vector<double> v;
  for (int i = 0; i < 85; ++i) v.push_back((i * 7919 % 101) / 101.0);
  const auto serial = bootstrap(v, 1000, 99, 1);
  for (int w : {2, 3, 8, 64}) EXPECT_EQ(bootstrap(v, 1000, 99, w), serial) << w;
  EXPECT_NE(bootstrap(v, 1000, 100, 1).resample_means, serial.resample_means);
}

TEST(Bootstrap, SemTracksAnalyticStandardError) {
  // Bernoulli(0.3) sample of 400: SEM of the mean is about sqrt(p(1-p)/n).
  std::vector<double> v(400, 0.0);
  for (int i = 0; i < 120; ++i) v[static_cast<std::size_t>(i)] = 1.0;
  const auto r = bootstrap(v, 2000, 3);
  EXPECT_NEAR(r.sem, std::sqrt(0.3 * 0.7 / 400), 0.003);
  EXPECT_NEAR(r.mean, 0.3, 0.005);
}

TEST(Bootstrap, Errors) {
  EXPECT_THROW(bootstrap({}, 10), InvalidArgument);
  EXPECT_THROW(bootstrap({1.0}, 0), InvalidArgument);
}

TEST(Bootstrap, PairedP) {
  std::vector<double> a(30, 1.0), b(30, 0.0);
  EXPECT_EQ(bootstrap_paired_p(a, b), 0.0);
  EXPECT_EQ(bootstrap_paired_p(b, a), 1.0);
  EXPECT_THROW(bootstrap_paired_p(a, {1.0}), InvalidArgument);
}

// ---------------------------------------------------------------------------

TEST(TTest, FourPairFixtureAgainstIntegration) {
  const std::vector<double> d = {1, -1, 1, 1}, zero(4, 0.0);
  const auto r = paired_one_sided_ttest_detail(d, zero);
  EXPECT_EQ(r.df, 3);
  EXPECT_NEAR(r.t, 1.0, 1e-15);
  const double oracle = t_upper_tail(1.0, 3);
  EXPECT_NEAR(oracle, 0.1955, 0.0005);
  EXPECT_NEAR(r.p, 0.1955, 0.0005);
  EXPECT_NEAR(r.p, oracle, 1e-9);
}

TEST(TTest, OtherDegreesOfFreedom) {
  for (int df : {1, 2, 5, 12, 40})
    for (double t : {0.3, 1.7, 3.2}) {
      // Build n = df + 1 differences with mean/sd ratio giving t.
      const int n = df + 1;
      std::vector<double> d(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = (i % 2 ? 1.0 : -1.0) + (n % 2 && i == n - 1 ? 1.0 : 0.0);
      double m = 0, ss = 0;
      for (double x : d) m += x;
      m /= n;
      for (double& x : d) x -= m;
      for (double x : d) ss += x * x;
      const double sd = std::sqrt(ss / df);
      for (double& x : d) x += t * sd / std::sqrt(static_cast<double>(n));
      const auto r = paired_one_sided_ttest_detail(d, z);
      EXPECT_NEAR(r.t, t, 1e-9);
      EXPECT_NEAR(r.p, t_upper_tail(t, df), 1e-7) << df << " " << t;
    }
}

TEST(TTest, NegativeMeanAndDegenerate) {
  const std::vector<double> z(4, 0.0);
  EXPECT_NEAR(paired_one_sided_ttest({-1, 1, -1, -1}, z), 1.0 - 0.19550110, 1e-6);
  EXPECT_EQ(paired_one_sided_ttest({1, 1, 1}, {0, 0, 0}), 0.0);
  EXPECT_EQ(paired_one_sided_ttest({0, 0, 0}, {0, 0, 0}), 1.0);
  EXPECT_THROW(paired_one_sided_ttest({1}, {0}), InvalidArgument);
  EXPECT_THROW(paired_one_sided_ttest({1, 2}, {0}), InvalidArgument);
}

TEST(Stars, ThresholdBoundaries) {
  EXPECT_EQ(significance_stars(0.0), "***");
  EXPECT_EQ(significance_stars(0.001), "***");
  EXPECT_EQ(significance_stars(std::nextafter(0.001, 1.0)), "**");
  EXPECT_EQ(significance_stars(0.01), "**");
  EXPECT_EQ(significance_stars(std::nextafter(0.01, 1.0)), "*");
  EXPECT_EQ(significance_stars(0.05), "*");
  EXPECT_EQ(significance_stars(std::nextafter(0.05, 1.0)), "");
  EXPECT_EQ(significance_stars(1.0), "");
  EXPECT_THROW(significance_stars(-0.1), InvalidArgument);
  EXPECT_THROW(significance_stars(NAN), InvalidArgument);
}
