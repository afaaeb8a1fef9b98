#pragma once

// Range kernels shared by every layout and by the parallel executor.
//
// Arrays are addressed as base[i * Stride]: Stride == 1 is the SoA layout,
// Stride == 4 walks the {t, s0, k, c} records of the AoS layout. All layouts
// and lane paths evaluate the same expression sequence, so results agree
// bit for bit as long as the build does not contract a*b+c into FMA.

#include <cmath>
#include <cstddef>

#include "bsopt/fastmath.hpp"
#include "bsopt/market.hpp"

namespace bsopt::detail {

template <std::size_t Stride>
struct OptionArrays {
  const float* t;
  const float* s0;
  const float* k;
  float* c;
};

// Model constants hoisted out of the loop, all in single precision.
struct KernelParams {
  float sig;
  float drift_up;    // r + sigma^2 / 2
  float drift_down;  // r - sigma^2 / 2
  float neg_r;       // -r
  float sqrt2;

  explicit KernelParams(const MarketModel& model)
      : sig(static_cast<float>(model.sigma)),
        drift_up(static_cast<float>(model.r) + 0.5f * sig * sig),
        drift_down(static_cast<float>(model.r) - 0.5f * sig * sig),
        neg_r((-1.0f) * static_cast<float>(model.r)),
        sqrt2(std::sqrt(2.0f)) {}
};

inline float price_f32(float t, float s0, float k, const KernelParams& p) {
  const float d1 =
      (std::log(s0 / k) + p.drift_up * t) / (p.sig * std::sqrt(t));
  const float d2 =
      (std::log(s0 / k) + p.drift_down * t) / (p.sig * std::sqrt(t));
  const float erf1 = 0.5f + 0.5f * std::erf(d1 / p.sqrt2);
  const float erf2 = 0.5f + 0.5f * std::erf(d2 / p.sqrt2);
  return s0 * erf1 - k * std::exp(p.neg_r * t) * erf2;
}

inline float price_fast_f32(float t, float s0, float k, const KernelParams& p) {
  const float log_sk = fast_log(s0 / k);
  const float vol_t = p.sig * std::sqrt(t);
  const float d1 = (log_sk + p.drift_up * t) / vol_t;
  const float d2 = (log_sk + p.drift_down * t) / vol_t;
  const float erf1 = 0.5f + 0.5f * fast_erf(d1 / p.sqrt2);
  const float erf2 = 0.5f + 0.5f * fast_erf(d2 / p.sqrt2);
  return s0 * erf1 - k * fast_exp(p.neg_r * t) * erf2;
}

template <std::size_t Stride>
void scalar_range(OptionArrays<Stride> a, std::size_t begin, std::size_t end,
                  const KernelParams& p) {
  for (std::size_t i = begin; i < end; ++i) {
    const std::size_t j = i * Stride;
    a.c[j] = price_f32(a.t[j], a.s0[j], a.k[j], p);
  }
}

// Processes lane-width groups as a sequence of short independent loops so
// the arithmetic between the math-library calls maps onto vector registers.
// A scalar tail prices the last (end - begin) % Width elements.
template <std::size_t Width, std::size_t Stride>
void lanes_range(OptionArrays<Stride> a, std::size_t begin, std::size_t end,
                 const KernelParams& p) {
  std::size_t i = begin;
  for (; i + Width <= end; i += Width) {
    alignas(64) float t[Width];
    alignas(64) float s0[Width];
    alignas(64) float k[Width];
    alignas(64) float log_sk[Width];
    alignas(64) float vol_t[Width];
    alignas(64) float x1[Width];
    alignas(64) float x2[Width];
    alignas(64) float disc[Width];

    for (std::size_t l = 0; l < Width; ++l) {
      const std::size_t j = (i + l) * Stride;
      t[l] = a.t[j];
      s0[l] = a.s0[j];
      k[l] = a.k[j];
    }
    for (std::size_t l = 0; l < Width; ++l) log_sk[l] = std::log(s0[l] / k[l]);
    for (std::size_t l = 0; l < Width; ++l) vol_t[l] = p.sig * std::sqrt(t[l]);
    for (std::size_t l = 0; l < Width; ++l) {
      x1[l] = ((log_sk[l] + p.drift_up * t[l]) / vol_t[l]) / p.sqrt2;
      x2[l] = ((log_sk[l] + p.drift_down * t[l]) / vol_t[l]) / p.sqrt2;
    }
    for (std::size_t l = 0; l < Width; ++l) x1[l] = std::erf(x1[l]);
    for (std::size_t l = 0; l < Width; ++l) x2[l] = std::erf(x2[l]);
    for (std::size_t l = 0; l < Width; ++l) disc[l] = std::exp(p.neg_r * t[l]);
    for (std::size_t l = 0; l < Width; ++l) {
      const float erf1 = 0.5f + 0.5f * x1[l];
      const float erf2 = 0.5f + 0.5f * x2[l];
      a.c[(i + l) * Stride] = s0[l] * erf1 - k[l] * disc[l] * erf2;
    }
  }
  scalar_range(a, i, end, p);
}

// The fast functions are inline and branch-free, so a whole group of 16
// prices compiles to straight vector code once inputs sit in local arrays.
template <std::size_t Stride>
void fastmath_range(OptionArrays<Stride> a, std::size_t begin, std::size_t end,
                    const KernelParams& p) {
  constexpr std::size_t kGroup = 16;
  std::size_t i = begin;
  for (; i + kGroup <= end; i += kGroup) {
    alignas(64) float t[kGroup];
    alignas(64) float s0[kGroup];
    alignas(64) float k[kGroup];
    alignas(64) float c[kGroup];
    for (std::size_t l = 0; l < kGroup; ++l) {
      const std::size_t j = (i + l) * Stride;
      t[l] = a.t[j];
      s0[l] = a.s0[j];
      k[l] = a.k[j];
    }
    for (std::size_t l = 0; l < kGroup; ++l) c[l] = price_fast_f32(t[l], s0[l], k[l], p);
    for (std::size_t l = 0; l < kGroup; ++l) a.c[(i + l) * Stride] = c[l];
  }
  for (; i < end; ++i) {
    const std::size_t j = i * Stride;
    a.c[j] = price_fast_f32(a.t[j], a.s0[j], a.k[j], p);
  }
}

}  // namespace bsopt::detail
