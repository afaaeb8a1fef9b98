#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "bsopt/partition.hpp"
#include "bsopt/pricing.hpp"

namespace bsopt {

// Rungs of the optimization ladder, cheapest change first.
enum class PricingStage { Scalar, Lanes, FastMath, Parallel, ParallelNuma };

inline constexpr std::array<PricingStage, 5> kLadder = {
    PricingStage::Scalar, PricingStage::Lanes, PricingStage::FastMath, PricingStage::Parallel,
    PricingStage::ParallelNuma};

// How a stage executes. Parallel stages run parallel_kernel (Lanes unless the
// caller asks for FastMath); ParallelNuma additionally initializes each batch
// on the pricing partition and spreads workers across memory domains.
struct StagePlan {
  KernelKind kernel = KernelKind::Scalar;
  bool parallel = false;
  bool first_touch = false;
  Placement placement = Placement::None;
};

StagePlan plan_for(PricingStage stage, KernelKind parallel_kernel = KernelKind::Lanes);

std::string_view to_string(PricingStage stage) noexcept;
std::optional<PricingStage> parse_stage(std::string_view text) noexcept;

}  // namespace bsopt
