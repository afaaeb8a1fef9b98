#pragma once

#include <cmath>

#include "bsopt/error.hpp"

namespace bsopt {

// Interest rate and volatility shared by a whole run.
struct MarketModel {
  double r = 0.05;
  double sigma = 0.2;
};

struct OptionInput {
  double s0 = 0.0;  // initial share price
  double k = 0.0;   // strike
  double t = 0.0;   // maturity
};

struct PriceResult {
  double c = 0.0;
};

// Throws DomainError unless sigma > 0 and r is finite.
void validate(const MarketModel& model);

// Throws DomainError unless s0, k, t are finite and strictly positive.
void validate(const OptionInput& input);

inline bool is_priceable(float s0, float k, float t) noexcept {
  return std::isfinite(s0) && std::isfinite(k) && std::isfinite(t) &&
         s0 > 0.0f && k > 0.0f && t > 0.0f;
}

}  // namespace bsopt
