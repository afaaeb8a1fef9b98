#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bsopt/batch.hpp"
#include "bsopt/market.hpp"
#include "bsopt/partition.hpp"
#include "bsopt/pricing.hpp"
#include "bsopt/worker_pool.hpp"

namespace bsopt {

struct ParallelRun {
  double seconds = 0.0;
  // Non-fatal problems, e.g. pricing with a partition other than the one the
  // batch was initialized with.
  std::vector<std::string> warnings;
};

// Prices the batch chunk by chunk on the pool. Output equals the serial
// kernel for any partition. If trace is given, trace->price_worker is filled.
ParallelRun parallel_price(OptionBatchSoA& batch, const MarketModel& model, KernelKind kernel,
                           WorkerPool& pool, const ChunkPartition& partition,
                           ChunkTrace* trace = nullptr,
                           std::size_t lane_width = kDefaultLaneWidth);
ParallelRun parallel_price(OptionBatchAoS& batch, const MarketModel& model, KernelKind kernel,
                           WorkerPool& pool, const ChunkPartition& partition,
                           ChunkTrace* trace = nullptr,
                           std::size_t lane_width = kDefaultLaneWidth);

// One-shot form: builds a pool and the partition from cfg.
ParallelRun parallel_price(OptionBatchSoA& batch, const MarketModel& model, KernelKind kernel,
                           const ExecConfig& cfg, std::size_t lane_width = kDefaultLaneWidth);

struct ScalingRow {
  std::size_t workers = 0;
  double min_seconds = 0.0;
  double speedup = 0.0;     // serial_seconds / min_seconds
  double efficiency = 0.0;  // serial_seconds / (workers * min_seconds)
};

struct ScalingReport {
  double serial_seconds = 0.0;
  std::vector<ScalingRow> rows;
};

// Times the kernel serially and at each worker count. Every configuration is
// run `repetitions` times; the first run is a warm-up and the minimum of the
// rest is kept (a single repetition is kept as is).
ScalingReport sweep_workers(OptionBatchSoA& batch, const MarketModel& model, KernelKind kernel,
                            std::span<const std::size_t> worker_counts,
                            std::size_t repetitions = 5,
                            std::size_t lane_width = kDefaultLaneWidth);

// Hardware threads available, at least 1.
std::size_t hardware_threads() noexcept;

// Physical cores (distinct core ids), at least 1. Falls back to
// hardware_threads() when topology is unavailable.
std::size_t physical_cores();

}  // namespace bsopt
