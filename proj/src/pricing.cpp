#include "bsopt/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsopt/detail/kernels.hpp"
#include "bsopt/error.hpp"
#include "bsopt/fastmath.hpp"

namespace bsopt {

namespace {

// Normal CDF through the error function. The left tail goes through erfc so
// deep out-of-the-money prices keep their relative precision.
double norm_cdf(double x) {
  const double scaled = x / std::sqrt(2.0);
  return x < 0.0 ? 0.5 * std::erfc(-scaled) : 0.5 + 0.5 * std::erf(scaled);
}

detail::OptionArrays<1> arrays(OptionBatchSoA& b) {
  return {b.t().data(), b.s0().data(), b.k().data(), b.c().data()};
}

detail::OptionArrays<4> arrays(OptionBatchAoS& b) {
  auto* rec = b.records().data();
  if (rec == nullptr) return {nullptr, nullptr, nullptr, nullptr};
  return {&rec->t, &rec->s0, &rec->k, &rec->c};
}

template <std::size_t Stride>
void lanes_dispatch(detail::OptionArrays<Stride> a, std::size_t begin, std::size_t end,
                    const detail::KernelParams& p, std::size_t lane_width) {
  switch (lane_width) {
    case 4:
      detail::lanes_range<4>(a, begin, end, p);
      break;
    case 8:
      detail::lanes_range<8>(a, begin, end, p);
      break;
    case 16:
      detail::lanes_range<16>(a, begin, end, p);
      break;
    default:
      check_lane_width(lane_width);
  }
}

template <class Batch>
void price_range_impl(KernelKind kind, Batch& batch, const MarketModel& model,
                      std::size_t begin, std::size_t end, std::size_t lane_width) {
  if (begin > end || end > batch.size()) {
    throw StructuralError("price range [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") outside batch of " + std::to_string(batch.size()));
  }
  if (kind == KernelKind::Lanes) check_lane_width(lane_width);
  validate(model);
  if (begin == end) return;
  const detail::KernelParams params(model);
  auto a = arrays(batch);
  switch (kind) {
    case KernelKind::Scalar:
      detail::scalar_range(a, begin, end, params);
      break;
    case KernelKind::Lanes:
      lanes_dispatch(a, begin, end, params, lane_width);
      break;
    case KernelKind::FastMath:
      detail::fastmath_range(a, begin, end, params);
      break;
  }
}

}  // namespace

PriceResult price_reference(const OptionInput& input, const MarketModel& model) {
  validate(model);
  validate(input);
  const double sqrt_t = std::sqrt(input.t);
  const double log_sk = std::log(input.s0 / input.k);
  const double half_var = 0.5 * model.sigma * model.sigma;
  const double d1 = (log_sk + (model.r + half_var) * input.t) / (model.sigma * sqrt_t);
  const double d2 = (log_sk + (model.r - half_var) * input.t) / (model.sigma * sqrt_t);
  const double c = input.s0 * norm_cdf(d1) - input.k * std::exp(-model.r * input.t) * norm_cdf(d2);
  // Far out of the money both terms underflow and the difference can land a
  // subnormal below zero.
  return {std::max(0.0, c)};
}

PriceResult price_one_f32(const OptionInput& input, const MarketModel& model) {
  validate(model);
  validate(input);
  const detail::KernelParams params(model);
  return {detail::price_f32(static_cast<float>(input.t), static_cast<float>(input.s0),
                            static_cast<float>(input.k), params)};
}

std::string_view to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Scalar:
      return "scalar";
    case KernelKind::Lanes:
      return "lanes";
    case KernelKind::FastMath:
      return "fastmath";
  }
  return "unknown";
}

void check_lane_width(std::size_t lane_width) {
  if (lane_width != 4 && lane_width != 8 && lane_width != 16) {
    throw ConfigError("unsupported lane width " + std::to_string(lane_width) +
                      " (expected 4, 8 or 16)");
  }
}

void price_batch_scalar(OptionBatchSoA& batch, const MarketModel& model) {
  price_range_impl(KernelKind::Scalar, batch, model, 0, batch.size(), kDefaultLaneWidth);
}

void price_batch_scalar(OptionBatchAoS& batch, const MarketModel& model) {
  price_range_impl(KernelKind::Scalar, batch, model, 0, batch.size(), kDefaultLaneWidth);
}

void price_batch_lanes(OptionBatchSoA& batch, const MarketModel& model, std::size_t lane_width) {
  price_range_impl(KernelKind::Lanes, batch, model, 0, batch.size(), lane_width);
}

void price_batch_lanes(OptionBatchAoS& batch, const MarketModel& model, std::size_t lane_width) {
  price_range_impl(KernelKind::Lanes, batch, model, 0, batch.size(), lane_width);
}

void price_batch_fastmath(OptionBatchSoA& batch, const MarketModel& model) {
  price_range_impl(KernelKind::FastMath, batch, model, 0, batch.size(), kDefaultLaneWidth);
}

void price_batch_fastmath(OptionBatchAoS& batch, const MarketModel& model) {
  price_range_impl(KernelKind::FastMath, batch, model, 0, batch.size(), kDefaultLaneWidth);
}

void price_range(KernelKind kind, OptionBatchSoA& batch, const MarketModel& model,
                 std::size_t begin, std::size_t end, std::size_t lane_width) {
  price_range_impl(kind, batch, model, begin, end, lane_width);
}

void price_range(KernelKind kind, OptionBatchAoS& batch, const MarketModel& model,
                 std::size_t begin, std::size_t end, std::size_t lane_width) {
  price_range_impl(kind, batch, model, begin, end, lane_width);
}

void price_batch(KernelKind kind, OptionBatchSoA& batch, const MarketModel& model,
                 std::size_t lane_width) {
  price_range_impl(kind, batch, model, 0, batch.size(), lane_width);
}

void price_batch(KernelKind kind, OptionBatchAoS& batch, const MarketModel& model,
                 std::size_t lane_width) {
  price_range_impl(kind, batch, model, 0, batch.size(), lane_width);
}

}  // namespace bsopt
