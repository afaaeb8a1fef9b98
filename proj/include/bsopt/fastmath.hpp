#pragma once

// Reduced-precision single-precision erf, exp and log.
//
// Each function guarantees a relative error of at most 2^-11 on its declared
// domain (with an absolute floor of 2^-11 * 2^-11 near zeros of the target).
// Outside the domain nothing is promised: NaN, infinities, denormals and
// extreme arguments are excluded rather than handled. The bodies are
// branch-free so loops calling them vectorize.

#include <bit>
#include <cmath>
#include <cstdint>

namespace bsopt {

class OptionBatchSoA;
class OptionBatchAoS;
struct MarketModel;

enum class AccuracyTier { Standard, Low11 };

// 2^-11, the Low11 relative error budget.
inline constexpr double kLow11Tolerance = 1.0 / 2048.0;

inline constexpr float kFastErfDomain = 6.0f;
inline constexpr float kFastExpDomain = 80.0f;

// Domain: |x| <= 80. fast_exp(0) == 1 exactly.
inline float fast_exp(float x) {
  constexpr float log2e = 1.44269504088896341f;
  constexpr float ln2_hi = 0.693145751953125f;
  constexpr float ln2_lo = 1.428606765330187045e-06f;
  // Adding and subtracting 1.5 * 2^23 rounds to the nearest integer.
  constexpr float round_magic = 12582912.0f;

  const float n = (x * log2e + round_magic) - round_magic;
  const float r = (x - n * ln2_hi) - n * ln2_lo;
  const float poly =
      1.0f +
      r * (1.0f +
           r * (0.5f +
                r * (1.0f / 6.0f +
                     r * (1.0f / 24.0f + r * (1.0f / 120.0f)))));
  const auto biased = static_cast<std::int32_t>(n) + 127;
  const float scale = std::bit_cast<float>(static_cast<std::uint32_t>(biased) << 23);
  return poly * scale;
}

// Domain: x in [2^-60, 2^60]. fast_log(1) == 0 exactly.
inline float fast_log(float x) {
  constexpr float ln2 = 0.693147180559945309f;
  constexpr float sqrt2 = 1.41421356237309505f;

  const auto bits = std::bit_cast<std::uint32_t>(x);
  float exponent = static_cast<float>(static_cast<std::int32_t>(bits >> 23) - 127);
  float m = std::bit_cast<float>((bits & 0x007fffffu) | 0x3f800000u);
  // Fold the mantissa into [sqrt(1/2), sqrt(2)).
  const bool high = m > sqrt2;
  m = high ? 0.5f * m : m;
  exponent = high ? exponent + 1.0f : exponent;

  const float f = m - 1.0f;
  const float s = f / (2.0f + f);
  const float z = s * s;
  const float log_m =
      2.0f * s * (1.0f + z * (1.0f / 3.0f + z * (1.0f / 5.0f + z * (1.0f / 7.0f))));
  return exponent * ln2 + log_m;
}

// Domain: |x| <= 6; larger magnitudes saturate to +-erf(6). Odd symmetry is
// exact because the magnitude is computed first and the sign copied on.
inline float fast_erf(float x) {
  // A select rather than fmin: NaN is outside the domain, and fmin's NaN
  // rules keep the compiler from vectorizing callers.
  const float abs_x = std::fabs(x);
  const float a = abs_x < kFastErfDomain ? abs_x : kFastErfDomain;

  // Maclaurin series through x^11 for a < 1/2.
  const float z = a * a;
  const float series =
      a * (1.12837916709551257f +
           z * (-0.376126389031837524f +
                z * (0.112837916709551257f +
                     z * (-0.0268661706451312517f +
                          z * (0.00522397762544218784f +
                               z * (-0.000854832702345085283f))))));

  // Rational-exponential fit, |error| < 1.5e-7, for a >= 1/2.
  const float t = 1.0f / (1.0f + 0.3275911f * a);
  const float tail =
      t * (0.254829592f +
           t * (-0.284496736f +
                t * (1.421413741f + t * (-1.453152027f + t * 1.061405429f))));
  const float asymptotic = 1.0f - tail * fast_exp(-z);

  return std::copysign(a < 0.5f ? series : asymptotic, x);
}

// Fast-math batch kernels: same formula as the standard kernels, with every
// log/exp/erf call replaced by the Low11 implementations above.
void price_batch_fastmath(OptionBatchSoA& batch, const MarketModel& model);
void price_batch_fastmath(OptionBatchAoS& batch, const MarketModel& model);

}  // namespace bsopt
