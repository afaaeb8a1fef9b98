#include "bsopt/stage.hpp"

namespace bsopt {

StagePlan plan_for(PricingStage stage, KernelKind parallel_kernel) {
  switch (stage) {
    case PricingStage::Scalar:
      return {KernelKind::Scalar, false, false, Placement::None};
    case PricingStage::Lanes:
      return {KernelKind::Lanes, false, false, Placement::None};
    case PricingStage::FastMath:
      return {KernelKind::FastMath, false, false, Placement::None};
    case PricingStage::Parallel:
      return {parallel_kernel, true, false, Placement::None};
    case PricingStage::ParallelNuma:
      return {parallel_kernel, true, true, Placement::SpreadAcrossDomains};
  }
  return {};
}

std::string_view to_string(PricingStage stage) noexcept {
  switch (stage) {
    case PricingStage::Scalar:
      return "scalar";
    case PricingStage::Lanes:
      return "lanes";
    case PricingStage::FastMath:
      return "fastmath";
    case PricingStage::Parallel:
      return "parallel";
    case PricingStage::ParallelNuma:
      return "parallel-numa";
  }
  return "unknown";
}

std::optional<PricingStage> parse_stage(std::string_view text) noexcept {
  for (PricingStage s : kLadder) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

}  // namespace bsopt
