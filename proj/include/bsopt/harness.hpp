#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bsopt/alloc_pipeline.hpp"
#include "bsopt/io.hpp"
#include "bsopt/market.hpp"
#include "bsopt/metrics.hpp"
#include "bsopt/partition.hpp"
#include "bsopt/report.hpp"
#include "bsopt/stage.hpp"

namespace bsopt {

// Options per batch at scale 1.
inline constexpr std::uint64_t kFullScaleBatchSize = 240'000'000;
inline constexpr double kDefaultScale = 0.01;

// Accuracy bounds checked when verification is on.
inline constexpr double kStandardRelBound = 1e-3;  // |err| <= 1e-3 * max(1, ref)
inline constexpr double kFastMathAbsBound = 5e-3;  // |err| <= 5e-3

struct RunConfig {
  // Explicit batch size; otherwise round(kFullScaleBatchSize * scale).
  std::optional<std::uint64_t> batch_size;
  double scale = kDefaultScale;
  std::size_t batch_count = 5;
  std::vector<PricingStage> stages{kLadder.begin(), kLadder.end()};
  Layout layout = Layout::SoA;
  AllocStrategy strategy = AllocStrategy::Reused;
  ExecConfig exec;
  std::size_t lane_width = kDefaultLaneWidth;
  KernelKind parallel_kernel = KernelKind::Lanes;
  bool verify = false;
  std::size_t verify_sample = 10'000;
  std::uint64_t seed = 42;
  SynthMode synth = SynthMode::Constant;
  std::optional<std::filesystem::path> input_path;
  InputFormat input_format = InputFormat::Csv;
  // Batches needing more than this many bytes (16 per option) are refused.
  std::uint64_t memory_budget = 0;  // 0 = half of physical memory
  MarketModel model;
  std::optional<MachineModel> machine;  // e.g. from measure_triad
};

// Worker count used when none is configured: the physical core count.
ExecConfig default_exec_config();

std::uint64_t physical_memory_bytes();

std::uint64_t effective_batch_size(const RunConfig& cfg);

// Throws ConfigError when the configuration cannot run (zero batches, a
// batch over the memory budget, bad lane width, empty stage list, ...).
void check_config(const RunConfig& cfg, std::uint64_t batch_size);

// Compares every sampled element against price_reference. The sample is up
// to `sample` elements evenly spaced over the batch.
AccuracySummary measure_accuracy(const BatchView& view, const MarketModel& model, KernelKind kernel,
                                 std::size_t sample);

struct LadderResult {
  std::vector<BenchmarkReport> reports;
  bool partial = false;          // a stage failed; reports holds the ones before it
  std::exception_ptr failure;    // the error that stopped the ladder
  std::string failure_message;

  bool verification_failed() const;
};

// Runs each configured stage through the allocation pipeline and builds its
// report. Configuration errors are thrown; failures inside a stage stop the
// ladder and are returned in the result.
LadderResult run_ladder(const RunConfig& cfg);

}  // namespace bsopt
