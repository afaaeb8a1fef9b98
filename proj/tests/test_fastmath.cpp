#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "bsopt/batch.hpp"
#include "bsopt/fastmath.hpp"
#include "bsopt/partition.hpp"
#include "bsopt/pricing.hpp"
#include "oracle.hpp"

using namespace bsopt;

namespace {

const MarketModel kModel{0.05, 0.2};

// Relative error with the absolute floor used by the Low11 contract.
double tier_error(double got, long double exact) {
  const double e = static_cast<double>(exact);
  return std::fabs(got - e) / std::max(std::fabs(e), kLow11Tolerance);
}

}  // namespace

TEST(FastErf, ExactAtZero) {
  EXPECT_EQ(fast_erf(0.0f), 0.0f);
  EXPECT_TRUE(std::signbit(fast_erf(-0.0f)));
}

TEST(FastErf, AtOne) {
  const long double exact = oracle::erf(1.0L);
  EXPECT_NEAR(static_cast<double>(exact), 0.8427007929497149, 1e-15);
  EXPECT_LE(tier_error(fast_erf(1.0f), exact), kLow11Tolerance);
}

TEST(FastErf, SaturatesBeyondDomain) {
  EXPECT_NEAR(fast_erf(6.0f), 1.0f, kLow11Tolerance);
  EXPECT_NEAR(fast_erf(10.0f), 1.0f, kLow11Tolerance);
  EXPECT_NEAR(fast_erf(-1e30f), -1.0f, kLow11Tolerance);
}

TEST(FastErf, OddSymmetryIsBitExact) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> dist(0.0f, 8.0f);
  for (int i = 0; i < 100000; ++i) {
    const float x = dist(rng);
    EXPECT_EQ(std::bit_cast<std::uint32_t>(fast_erf(-x)),
              std::bit_cast<std::uint32_t>(fast_erf(x)) ^ 0x80000000u);
  }
}

TEST(FastErf, MonotoneOnDenseGrid) {
  constexpr int kPoints = 100000;
  float prev = fast_erf(-kFastErfDomain);
  for (int i = 1; i <= kPoints; ++i) {
    const float x = -kFastErfDomain + 2.0f * kFastErfDomain * static_cast<float>(i) / kPoints;
    const float y = fast_erf(x);
    ASSERT_GE(y, prev) << "at x = " << x;
    prev = y;
  }
}

TEST(FastErf, ErrorBoundOnSweep) {
  constexpr int kPoints = 1000000;
  double worst = 0.0;
  for (int i = 0; i <= kPoints; ++i) {
    const float x = -kFastErfDomain + 2.0f * kFastErfDomain * static_cast<float>(i) / kPoints;
    worst = std::max(worst, tier_error(fast_erf(x), oracle::erf(static_cast<long double>(x))));
  }
  EXPECT_LE(worst, kLow11Tolerance);
}

TEST(FastExp, ExactAtZero) { EXPECT_EQ(fast_exp(0.0f), 1.0f); }

TEST(FastExp, DiscountFactorOfCanonicalOption) {
  const long double exact = oracle::exp(-0.15L);
  EXPECT_NEAR(static_cast<double>(exact), 0.860708, 1e-6);
  EXPECT_LE(tier_error(fast_exp(-0.15f), exact), kLow11Tolerance);
}

TEST(FastExp, MonotoneOnDenseGrid) {
  constexpr int kPoints = 100000;
  float prev = fast_exp(-kFastExpDomain);
  for (int i = 1; i <= kPoints; ++i) {
    const float x = -kFastExpDomain + 2.0f * kFastExpDomain * static_cast<float>(i) / kPoints;
    const float y = fast_exp(x);
    ASSERT_GE(y, prev) << "at x = " << x;
    prev = y;
  }
}

TEST(FastExp, ErrorBoundOnSweep) {
  constexpr int kPoints = 1000000;
  double worst = 0.0;
  for (int i = 0; i <= kPoints; ++i) {
    const float x = -kFastExpDomain + 2.0f * kFastExpDomain * static_cast<float>(i) / kPoints;
    worst = std::max(worst, tier_error(fast_exp(x), oracle::exp(static_cast<long double>(x))));
  }
  EXPECT_LE(worst, kLow11Tolerance);
}

TEST(FastLog, ExactAtOne) { EXPECT_EQ(fast_log(1.0f), 0.0f); }

TEST(FastLog, AtE) {
  EXPECT_LE(tier_error(fast_log(static_cast<float>(M_E)),
                       oracle::log(static_cast<long double>(static_cast<float>(M_E)))),
            kLow11Tolerance);
  EXPECT_NEAR(fast_log(static_cast<float>(M_E)), 1.0f, kLow11Tolerance);
}

TEST(FastLog, MonotoneOnDenseGrid) {
  // Geometric grid over [2^-60, 2^60].
  constexpr int kPoints = 100000;
  float prev = fast_log(std::ldexp(1.0f, -60));
  for (int i = 1; i <= kPoints; ++i) {
    const float x = std::exp2(-60.0f + 120.0f * static_cast<float>(i) / kPoints);
    const float y = fast_log(x);
    ASSERT_GE(y, prev) << "at x = " << x;
    prev = y;
  }
}

TEST(FastLog, ErrorBoundOnSweep) {
  constexpr int kPoints = 1000000;
  double worst = 0.0;
  for (int i = 0; i <= kPoints; ++i) {
    const float x = std::exp2(-60.0f + 120.0f * static_cast<float>(i) / kPoints);
    worst = std::max(worst, tier_error(fast_log(x), oracle::log(static_cast<long double>(x))));
  }
  // Neighbourhood of 1, where log crosses zero.
  for (int i = -50000; i <= 50000; ++i) {
    const float x = 1.0f + static_cast<float>(i) * 1e-6f;
    worst = std::max(worst, tier_error(fast_log(x), oracle::log(static_cast<long double>(x))));
  }
  EXPECT_LE(worst, kLow11Tolerance);
}

TEST(PriceBatchFastMath, CanonicalOptionWithinObservedBand) {
  OptionBatchSoA b(64);
  init_batch(b, 3.0f, 100.0f, 100.0f, make_partition(64, {}));
  price_batch_fastmath(b, kModel);
  EXPECT_GE(b.c()[0], 20.919f);
  EXPECT_LE(b.c()[0], 20.932f);
  for (float c : b.c()) {
    EXPECT_EQ(std::bit_cast<std::uint32_t>(c), std::bit_cast<std::uint32_t>(b.c()[0]));
  }
}

TEST(PriceBatchFastMath, CanonicalRangeSweepAgainstReference) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> ratio(0.5, 2.0);
  std::uniform_real_distribution<double> strike(10.0, 200.0);
  std::uniform_real_distribution<double> mat(0.25, 10.0);
  constexpr std::size_t n = 10000;
  OptionBatchSoA b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.k()[i] = static_cast<float>(strike(rng));
    b.s0()[i] = static_cast<float>(b.k()[i] * ratio(rng));
    b.t()[i] = static_cast<float>(mat(rng));
  }
  price_batch_fastmath(b, kModel);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ASSERT_FALSE(std::isnan(b.c()[i]));
    const double ref = price_reference({b.s0()[i], b.k()[i], b.t()[i]}, kModel).c;
    worst = std::max(worst, std::fabs(b.c()[i] - ref));
  }
  EXPECT_LE(worst, 5e-3);
}

TEST(PriceBatchFastMath, AosMatchesSoa) {
  std::mt19937_64 rng(41);
  constexpr std::size_t n = 999;
  OptionBatchSoA soa(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = oracle::random_valid_option(rng);
    soa.t()[i] = static_cast<float>(o.t);
    soa.s0()[i] = static_cast<float>(o.s0);
    soa.k()[i] = static_cast<float>(o.k);
    soa.c()[i] = 0.0f;
  }
  auto aos = soa_to_aos(soa);
  price_batch_fastmath(soa, kModel);
  price_batch_fastmath(aos, kModel);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(soa.c()[i], aos.records()[i].c);
}
