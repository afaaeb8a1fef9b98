#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsopt/batch.hpp"
#include "bsopt/market.hpp"
#include "bsopt/partition.hpp"
#include "bsopt/stage.hpp"

namespace bsopt {

// How batch memory is obtained across a run.
//   PerBatch / StagedCopyPerBatch: fresh allocation for every batch, included
//     in the batch's measured time.
//   Reused / StagedCopyReused: one allocation before the first batch, shared
//     by all batches and left out of the measurements.
// Staged variants price into a compute buffer and copy c out to a separate
// host result array; the others hand the compute buffer's c to the sink.
enum class AllocStrategy { PerBatch, Reused, StagedCopyPerBatch, StagedCopyReused };

enum class Layout { SoA, AoS };

std::string_view to_string(AllocStrategy s) noexcept;
std::optional<AllocStrategy> parse_strategy(std::string_view text) noexcept;
std::string_view to_string(Layout l) noexcept;
std::optional<Layout> parse_layout(std::string_view text) noexcept;

inline bool is_reused(AllocStrategy s) noexcept {
  return s == AllocStrategy::Reused || s == AllocStrategy::StagedCopyReused;
}
inline bool is_staged(AllocStrategy s) noexcept {
  return s == AllocStrategy::StagedCopyPerBatch || s == AllocStrategy::StagedCopyReused;
}

struct PipelineConfig {
  std::size_t batch_count = 5;
  std::size_t batch_size = 0;
  AllocStrategy strategy = AllocStrategy::Reused;
  PricingStage stage = PricingStage::Scalar;
  Layout layout = Layout::SoA;
  ExecConfig exec;
  std::size_t lane_width = kDefaultLaneWidth;
  KernelKind parallel_kernel = KernelKind::Lanes;
};

struct PipelineStats {
  std::size_t alloc_count = 0;       // pricing-array allocations
  std::size_t sink_alloc_count = 0;  // host result arrays (staged strategies)
  std::uint64_t bytes_allocated = 0;
  std::uint64_t copy_bytes = 0;

  std::vector<double> kernel_seconds;  // per batch
  std::vector<double> init_seconds;    // per batch
  std::vector<double> batch_seconds;   // per batch, wall time of everything
  std::vector<double> checksums;       // per batch, sum of delivered c

  double total_seconds = 0.0;     // sum of batch_seconds
  // total - sum(kernel) - sum(init): allocation, copy-out and sink time.
  double overhead_seconds = 0.0;
  double min_kernel_seconds = 0.0;  // warm-up batch excluded when count >= 2
  bool warm_up_excluded = false;

  // Set for first-touch stages: every chunk of every batch was priced by the
  // worker that initialized it.
  std::optional<bool> first_touch_paired;
  std::vector<std::string> warnings;
};

// Read-only view of one delivered batch, handed to the observer after the
// batch's timing has stopped.
struct BatchView {
  const float* t;
  const float* s0;
  const float* k;
  std::size_t input_stride;
  const float* c;
  std::size_t c_stride;
  std::size_t n;

  float t_at(std::size_t i) const { return t[i * input_stride]; }
  float s0_at(std::size_t i) const { return s0[i * input_stride]; }
  float k_at(std::size_t i) const { return k[i * input_stride]; }
  float c_at(std::size_t i) const { return c[i * c_stride]; }
};

using BatchObserver = std::function<void(std::size_t batch_index, const BatchView& view)>;

// Initializes, prices and delivers batch_count batches built by fill. Throws
// ConfigError for batch_count == 0 and ResourceError when memory runs out.
PipelineStats run_pipeline(const PipelineConfig& cfg, const MarketModel& model,
                           const BatchFill& fill, const BatchObserver& observe = {});

// Bitwise copy of computed prices into the host result array. Adds the bytes
// moved to stats->copy_bytes when stats is given.
void copy_out_results(std::span<const float> compute, std::span<float> sink,
                      PipelineStats* stats = nullptr);

}  // namespace bsopt
