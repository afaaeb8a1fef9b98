#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "bsopt/batch.hpp"
#include "bsopt/market.hpp"

namespace bsopt {

// Closed-form call price in double precision with std::erf:
//   C  = S0 F(d1) - K exp(-rT) F(d2),  F(x) = 0.5 + 0.5 erf(x / sqrt 2)
//   d1 = (ln(S0/K) + (r + sigma^2/2) T) / (sigma sqrt T)
//   d2 = (ln(S0/K) + (r - sigma^2/2) T) / (sigma sqrt T)
// Throws DomainError on invalid input or model.
PriceResult price_reference(const OptionInput& input, const MarketModel& model);

// Same formula evaluated entirely in single precision with the standard math
// library; this is the per-element kernel of price_batch_scalar.
PriceResult price_one_f32(const OptionInput& input, const MarketModel& model);

// Which inner loop a batch is priced with.
enum class KernelKind { Scalar, Lanes, FastMath };

std::string_view to_string(KernelKind kind) noexcept;

inline constexpr std::size_t kDefaultLaneWidth = 8;

// Throws ConfigError unless lane_width is 4, 8 or 16.
void check_lane_width(std::size_t lane_width);

// Batch kernels. Inputs are assumed validated (see validate_batch); only the
// c array is written. Results are deterministic for a given build.
void price_batch_scalar(OptionBatchSoA& batch, const MarketModel& model);
void price_batch_scalar(OptionBatchAoS& batch, const MarketModel& model);

void price_batch_lanes(OptionBatchSoA& batch, const MarketModel& model,
                       std::size_t lane_width = kDefaultLaneWidth);
void price_batch_lanes(OptionBatchAoS& batch, const MarketModel& model,
                       std::size_t lane_width = kDefaultLaneWidth);

// Prices elements [begin, end) with the given kernel. Safe to call
// concurrently on disjoint ranges of one batch.
void price_range(KernelKind kind, OptionBatchSoA& batch, const MarketModel& model,
                 std::size_t begin, std::size_t end, std::size_t lane_width = kDefaultLaneWidth);
void price_range(KernelKind kind, OptionBatchAoS& batch, const MarketModel& model,
                 std::size_t begin, std::size_t end, std::size_t lane_width = kDefaultLaneWidth);

// Convenience: price a whole batch serially.
void price_batch(KernelKind kind, OptionBatchSoA& batch, const MarketModel& model,
                 std::size_t lane_width = kDefaultLaneWidth);
void price_batch(KernelKind kind, OptionBatchAoS& batch, const MarketModel& model,
                 std::size_t lane_width = kDefaultLaneWidth);

}  // namespace bsopt
