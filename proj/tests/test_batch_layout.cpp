#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>

#include "bsopt/batch.hpp"
#include "bsopt/error.hpp"
#include "bsopt/io.hpp"
#include "bsopt/partition.hpp"
#include "bsopt/pricing.hpp"
#include "bsopt/worker_pool.hpp"
#include "oracle.hpp"

namespace {

using namespace bsopt;

bool same_bits(float a, float b) { return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b); }

// Arbitrary finite payload, including zeros, negatives and subnormals.
OptionBatchSoA random_payload(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OptionBatchSoA b(n);
  auto draw = [&]() -> float {
    switch (rng() % 8) {
      case 0: return 0.0f;
      case 1: return -0.0f;
      case 2: return -1.0f;
      case 3: return std::numeric_limits<float>::denorm_min();
      default: {
        float f;
        do {
          const auto bits = static_cast<std::uint32_t>(rng());
          f = std::bit_cast<float>(bits);
        } while (!std::isfinite(f));
        return f;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    b.t()[i] = draw();
    b.s0()[i] = draw();
    b.k()[i] = draw();
    b.c()[i] = draw();
  }
  return b;
}

TEST(BatchContainer, ColumnsAlignedAndSized) {
  for (std::size_t n : {1u, 3u, 17u, 1000u}) {
    OptionBatchSoA b(n);
    EXPECT_EQ(b.t().size(), n);
    EXPECT_EQ(b.c().size(), n);
    for (auto* p : {b.t().data(), b.s0().data(), b.k().data(), b.c().data()}) {
      EXPECT_EQ(reinterpret_cast<std::uintptr_t>(p) % kBatchAlignment, 0u);
    }
    // Columns must not overlap.
    EXPECT_GE(b.s0().data(), b.t().data() + n);
    EXPECT_GE(b.k().data(), b.s0().data() + n);
    EXPECT_GE(b.c().data(), b.k().data() + n);

    OptionBatchAoS a(n);
    EXPECT_EQ(reinterpret_cast<std::uintptr_t>(a.records().data()) % kBatchAlignment, 0u);
  }
  EXPECT_EQ(sizeof(OptionRecord), kBytesPerOption);
}

TEST(BatchContainer, EmptyBatch) {
  OptionBatchSoA b(0);
  EXPECT_TRUE(b.empty());
  EXPECT_TRUE(validate_batch(b).empty());
  const auto p = make_partition(0, ExecConfig{});
  init_batch(b, 3.0f, 100.0f, 100.0f, p);
  EXPECT_TRUE(soa_to_aos(b).empty());
}

TEST(BatchContainer, OversizedAllocationReportsBytes) {
  try {
    (void)aligned_allocate(std::size_t{1} << 62);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_EQ(e.bytes_requested(), std::size_t{1} << 62);
  }
}

TEST(InitBatch, CanonicalFill) {
  OptionBatchSoA b(1001);
  std::fill(b.c().begin(), b.c().end(), 7.0f);
  init_batch(b, 3.0f, 100.0f, 100.0f, make_partition(b.size(), ExecConfig{3, std::nullopt, {}}));
  for (std::size_t i = 0; i < b.size(); ++i) {
    ASSERT_EQ(b.t()[i], 3.0f);
    ASSERT_EQ(b.s0()[i], 100.0f);
    ASSERT_EQ(b.k()[i], 100.0f);
    ASSERT_EQ(b.c()[i], 0.0f);
  }
  EXPECT_TRUE(validate_batch(b).empty());
}

TEST(InitBatch, ContentIndependentOfPartition) {
  const std::size_t n = 4099;
  const BatchFill fill = synth_fill(7, SynthMode::Uniform);
  OptionBatchSoA one(n);
  init_batch(one, make_partition(n, ExecConfig{}), fill);

  WorkerPool pool(3);
  for (std::size_t chunk : {1u, 7u, 64u, 1000u, 5000u}) {
    OptionBatchSoA many(n);
    init_batch(many, make_partition(n, ExecConfig{3, chunk, {}}), fill, &pool);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_TRUE(same_bits(one.t()[i], many.t()[i]));
      ASSERT_TRUE(same_bits(one.s0()[i], many.s0()[i]));
      ASSERT_TRUE(same_bits(one.k()[i], many.k()[i]));
    }
    ASSERT_EQ(many.first_touch_partition(), make_partition(n, ExecConfig{3, chunk, {}}));
  }
}

TEST(InitBatch, RejectsMismatchedPartition) {
  OptionBatchSoA b(10);
  EXPECT_THROW(init_batch(b, 3.0f, 100.0f, 100.0f, make_partition(11, ExecConfig{})),
               StructuralError);
}

TEST(InitBatch, AosMatchesSoa) {
  const std::size_t n = 513;
  const BatchFill fill = synth_fill(11, SynthMode::Uniform);
  OptionBatchSoA s(n);
  OptionBatchAoS a(n);
  const auto p = make_partition(n, ExecConfig{2, 100, {}});
  init_batch(s, p, fill);
  init_batch(a, p, fill);
  for (std::size_t i = 0; i < n; ++i) {
    ASSERT_TRUE(same_bits(a.records()[i].t, s.t()[i]));
    ASSERT_TRUE(same_bits(a.records()[i].s0, s.s0()[i]));
    ASSERT_TRUE(same_bits(a.records()[i].k, s.k()[i]));
  }
}

TEST(LayoutConversion, RoundTripIsBitwiseIdentity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + seed * 53;
    const OptionBatchSoA b = random_payload(n, seed);
    const OptionBatchSoA back = aos_to_soa(soa_to_aos(b));
    ASSERT_EQ(back.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_TRUE(same_bits(back.t()[i], b.t()[i]));
      ASSERT_TRUE(same_bits(back.s0()[i], b.s0()[i]));
      ASSERT_TRUE(same_bits(back.k()[i], b.k()[i]));
      ASSERT_TRUE(same_bits(back.c()[i], b.c()[i]));
    }
  }
}

TEST(LayoutConversion, ThousandElementRoundTrip) {
  const OptionBatchSoA b = synth_batch(1000, 3, SynthMode::Uniform);
  const OptionBatchSoA back = aos_to_soa(soa_to_aos(b));
  EXPECT_EQ(std::memcmp(back.t().data(), b.t().data(), 1000 * sizeof(float)), 0);
  EXPECT_EQ(std::memcmp(back.s0().data(), b.s0().data(), 1000 * sizeof(float)), 0);
  EXPECT_EQ(std::memcmp(back.k().data(), b.k().data(), 1000 * sizeof(float)), 0);
}

TEST(LayoutConversion, SingleRecord) {
  OptionBatchSoA b(1);
  b.t()[0] = 3.0f;
  b.s0()[0] = 100.0f;
  b.k()[0] = 95.0f;
  b.c()[0] = 1.5f;
  const OptionBatchAoS a = soa_to_aos(b);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a.records()[0].t, 3.0f);
  EXPECT_EQ(a.records()[0].s0, 100.0f);
  EXPECT_EQ(a.records()[0].k, 95.0f);
  EXPECT_EQ(a.records()[0].c, 1.5f);
}

TEST(LayoutConversion, PricingAgreesAcrossLayouts) {
  std::mt19937_64 rng(99);
  const std::size_t n = 10'000;
  OptionBatchSoA s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = oracle::random_valid_option(rng);
    s.t()[i] = static_cast<float>(o.t);
    s.s0()[i] = static_cast<float>(o.s0);
    s.k()[i] = static_cast<float>(o.k);
  }
  OptionBatchAoS a = soa_to_aos(s);
  const MarketModel m;
  for (KernelKind kind : {KernelKind::Scalar, KernelKind::Lanes, KernelKind::FastMath}) {
    price_batch(kind, s, m);
    price_batch(kind, a, m);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_LE(oracle::ulp_distance(s.c()[i], a.records()[i].c), 1)
          << to_string(kind) << " at " << i;
    }
  }
}

TEST(ValidateBatch, ReportsBadElements) {
  OptionBatchSoA b = synth_batch(8, 0, SynthMode::Constant);
  EXPECT_TRUE(validate_batch(b).empty());
  b.t()[2] = 0.0f;
  b.k()[5] = std::numeric_limits<float>::quiet_NaN();
  b.s0()[7] = -1.0f;
  EXPECT_EQ(validate_batch(b), (std::vector<std::size_t>{2, 5, 7}));
  EXPECT_EQ(validate_batch(soa_to_aos(b)), (std::vector<std::size_t>{2, 5, 7}));
}

TEST(ValidateBatch, InfinityRejected) {
  OptionBatchSoA b = synth_batch(3, 0, SynthMode::Constant);
  b.s0()[1] = std::numeric_limits<float>::infinity();
  EXPECT_EQ(validate_batch(b), (std::vector<std::size_t>{1}));
}

TEST(BatchClone, IsDeepCopy) {
  OptionBatchSoA b = synth_batch(50, 1, SynthMode::Uniform);
  b.set_first_touch_partition(make_partition(50, ExecConfig{2, std::nullopt, {}}));
  OptionBatchSoA c = b.clone();
  EXPECT_NE(c.t().data(), b.t().data());
  EXPECT_EQ(c.first_touch_partition(), b.first_touch_partition());
  c.t()[0] = 9.0f;
  EXPECT_NE(b.t()[0], 9.0f);
}

}  // namespace
