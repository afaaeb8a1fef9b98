#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "bsopt/partition.hpp"
#include "bsopt/pricing.hpp"

namespace bsopt {

// Traffic and work per option. bytes_per_option defaults to three input
// floats plus one output float.
struct KernelCostModel {
  double flops_per_option = 1.0;
  double bytes_per_option = 16.0;
};

struct MachineModel {
  double mem_bandwidth = 0.0;  // bytes per second
  std::optional<double> peak_flops;
};

// Throws ConfigError when flops < 1 or bytes < 4.
void validate(const KernelCostModel& cost);

// Flops per byte: the x coordinate of a kernel on a roofline plot.
double arithmetic_intensity(const KernelCostModel& cost);

// Bytes moved by one batch of `options` elements.
std::uint64_t batch_bytes(std::uint64_t options, std::uint64_t bytes_per_option = 16);

// Shortest time a memory-bound pass over batch_bytes can take.
double bandwidth_lower_bound(double batch_bytes, const MachineModel& machine);

// Throws ConfigError unless measured_seconds > 0.
double effective_bandwidth(double batch_bytes, double measured_seconds);

// Static operation counts of one option priced by each kernel. Basic
// arithmetic (add, sub, mul, div, sqrt) counts one flop. Math-library calls
// are weighted per tier:
//   standard tier (libm, nominal): log 20, exp 20, erf 40
//   Low11 tier (counted from fastmath.hpp): log 16, exp 18, erf 44
// which yields
//   Scalar   21 basic + 2 sqrt + 2 log + 2 erf + 1 exp = 163
//   Lanes    19 basic + 1 sqrt + 1 log + 2 erf + 1 exp = 140
//   FastMath 19 basic + 1 sqrt + 1 log + 2 erf + 1 exp = 142
struct OpCensus {
  int basic = 0;
  int sqrt = 0;
  int log = 0;
  int erf = 0;
  int exp = 0;
};

OpCensus op_census(KernelKind kind) noexcept;
KernelCostModel cost_model_for(KernelKind kind);

struct TriadResult {
  double bytes_per_second = 0.0;
  double best_seconds = 0.0;
  std::size_t elements = 0;
  std::size_t workers = 0;
};

// STREAM-style triad a[i] = b[i] + s * c[i] over doubles, first-touch
// initialized on the same partition that runs the timed loop. Counts 24
// bytes per element and keeps the best of `repetitions` timed passes after
// one warm-up pass.
TriadResult measure_triad(std::size_t elements, const ExecConfig& exec,
                          std::size_t repetitions = 5);

inline MachineModel machine_from(const TriadResult& triad) {
  return MachineModel{triad.bytes_per_second, std::nullopt};
}

}  // namespace bsopt
