#include "bsopt/market.hpp"

#include <string>

namespace bsopt {

void validate(const MarketModel& model) {
  if (!std::isfinite(model.r)) {
    throw DomainError("interest rate must be finite");
  }
  if (!(model.sigma > 0.0) || !std::isfinite(model.sigma)) {
    throw DomainError("volatility must be positive and finite, got " +
                      std::to_string(model.sigma));
  }
}

void validate(const OptionInput& input) {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw DomainError(std::string(name) + " must be positive and finite, got " +
                        std::to_string(v));
    }
  };
  check(input.s0, "s0");
  check(input.k, "k");
  check(input.t, "t");
}

}  // namespace bsopt
