#include "bsopt/alloc_pipeline.hpp"

#include <algorithm>
#include <cstring>
#include <memory>
#include <numeric>
#include <string>

#include "bsopt/error.hpp"
#include "bsopt/parallel.hpp"
#include "bsopt/timing.hpp"
#include "bsopt/worker_pool.hpp"

namespace bsopt {

std::string_view to_string(AllocStrategy s) noexcept {
  switch (s) {
    case AllocStrategy::PerBatch:
      return "per-batch";
    case AllocStrategy::Reused:
      return "reused";
    case AllocStrategy::StagedCopyPerBatch:
      return "staged-per-batch";
    case AllocStrategy::StagedCopyReused:
      return "staged-reused";
  }
  return "unknown";
}

std::optional<AllocStrategy> parse_strategy(std::string_view text) noexcept {
  for (auto s : {AllocStrategy::PerBatch, AllocStrategy::Reused, AllocStrategy::StagedCopyPerBatch,
                 AllocStrategy::StagedCopyReused}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(Layout l) noexcept { return l == Layout::SoA ? "soa" : "aos"; }

std::optional<Layout> parse_layout(std::string_view text) noexcept {
  if (text == "soa") return Layout::SoA;
  if (text == "aos") return Layout::AoS;
  return std::nullopt;
}

void copy_out_results(std::span<const float> compute, std::span<float> sink,
                      PipelineStats* stats) {
  if (compute.size() != sink.size()) {
    throw StructuralError("copy-out length mismatch: " + std::to_string(compute.size()) +
                          " computed vs " + std::to_string(sink.size()) + " in sink");
  }
  if (!compute.empty()) std::memcpy(sink.data(), compute.data(), compute.size_bytes());
  if (stats != nullptr) stats->copy_bytes += compute.size_bytes();
}

namespace {

void gather_results(const OptionBatchAoS& batch, std::span<float> sink, PipelineStats& stats) {
  if (batch.size() != sink.size()) {
    throw StructuralError("copy-out length mismatch: " + std::to_string(batch.size()) +
                          " computed vs " + std::to_string(sink.size()) + " in sink");
  }
  const auto rec = batch.records();
  for (std::size_t i = 0; i < rec.size(); ++i) sink[i] = rec[i].c;
  stats.copy_bytes += sink.size_bytes();
}

void copy_out(OptionBatchSoA& batch, std::span<float> sink, PipelineStats& stats) {
  copy_out_results(batch.c(), sink, &stats);
}

void copy_out(OptionBatchAoS& batch, std::span<float> sink, PipelineStats& stats) {
  gather_results(batch, sink, stats);
}

BatchView view_of(OptionBatchSoA& b) {
  return {b.t().data(), b.s0().data(), b.k().data(), 1, b.c().data(), 1, b.size()};
}

BatchView view_of(OptionBatchAoS& b) {
  const OptionColumns c = b.columns();
  return {c.t, c.s0, c.k, 4, c.c, 4, b.size()};
}

// Sum in index order so the checksum is reproducible.
double checksum(const BatchView& v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.n; ++i) sum += v.c_at(i);
  return sum;
}

template <class Batch>
PipelineStats run_impl(const PipelineConfig& cfg, const MarketModel& model,
                       const BatchFill& fill, const BatchObserver& observe) {
  if (cfg.batch_count == 0) throw ConfigError("batch_count must be at least 1");
  validate(model);
  if (cfg.exec.worker_count == 0) throw ConfigError("worker_count must be positive");

  const StagePlan plan = plan_for(cfg.stage, cfg.parallel_kernel);
  if (plan.kernel == KernelKind::Lanes) check_lane_width(cfg.lane_width);

  PipelineStats stats;
  const std::size_t n = cfg.batch_size;
  const std::uint64_t batch_bytes = static_cast<std::uint64_t>(n) * kBytesPerOption;
  const std::uint64_t sink_bytes = static_cast<std::uint64_t>(n) * sizeof(float);

  std::unique_ptr<WorkerPool> pool;
  ChunkPartition partition = make_partition(n, ExecConfig{1, std::nullopt, Placement::None});
  if (plan.parallel) {
    ExecConfig exec = cfg.exec;
    exec.placement = plan.placement;
    pool = std::make_unique<WorkerPool>(exec.worker_count, exec.placement);
    partition = make_partition(n, exec);
    stats.warnings.insert(stats.warnings.end(), pool->warnings().begin(), pool->warnings().end());
  }
  const ChunkPartition serial_partition =
      make_partition(n, ExecConfig{1, std::nullopt, Placement::None});
  if (plan.first_touch) stats.first_touch_paired = true;

  auto allocate_batch = [&] {
    Batch b(n);
    ++stats.alloc_count;
    stats.bytes_allocated += batch_bytes;
    return b;
  };
  auto allocate_sink = [&] {
    AlignedArray<float> s(n);
    ++stats.sink_alloc_count;
    stats.bytes_allocated += sink_bytes;
    return s;
  };

  Batch reused_batch;
  AlignedArray<float> reused_sink;
  if (is_reused(cfg.strategy)) {
    reused_batch = allocate_batch();
    if (is_staged(cfg.strategy)) reused_sink = allocate_sink();
  }

  for (std::size_t b = 0; b < cfg.batch_count; ++b) {
    Stopwatch batch_watch;

    Batch fresh_batch;
    AlignedArray<float> fresh_sink;
    if (!is_reused(cfg.strategy)) {
      fresh_batch = allocate_batch();
      if (is_staged(cfg.strategy)) fresh_sink = allocate_sink();
    }
    Batch& batch = is_reused(cfg.strategy) ? reused_batch : fresh_batch;
    AlignedArray<float>& sink = is_reused(cfg.strategy) ? reused_sink : fresh_sink;

    ChunkTrace trace;
    Stopwatch init_watch;
    if (plan.first_touch) {
      init_batch(batch, partition, fill, pool.get(), &trace);
    } else {
      init_batch(batch, serial_partition, fill);
      // Serial initialization is deliberately unpaired with the pricing
      // partition.
      batch.set_first_touch_partition(std::nullopt);
    }
    const double init_time = init_watch.seconds();

    double kernel_time = 0.0;
    if (plan.parallel) {
      ParallelRun run = parallel_price(batch, model, plan.kernel, *pool, partition,
                                       plan.first_touch ? &trace : nullptr, cfg.lane_width);
      kernel_time = run.seconds;
      for (auto& w : run.warnings) {
        if (std::find(stats.warnings.begin(), stats.warnings.end(), w) == stats.warnings.end()) {
          stats.warnings.push_back(std::move(w));
        }
      }
      if (plan.first_touch && !trace.paired()) stats.first_touch_paired = false;
    } else {
      Stopwatch kernel_watch;
      price_batch(plan.kernel, batch, model, cfg.lane_width);
      kernel_time = kernel_watch.seconds();
    }

    BatchView view = view_of(batch);
    if (is_staged(cfg.strategy)) {
      copy_out(batch, std::span<float>(sink.data(), n), stats);
      view.c = sink.data();
      view.c_stride = 1;
    }
    stats.checksums.push_back(checksum(view));
    const double batch_time = batch_watch.seconds();

    stats.kernel_seconds.push_back(kernel_time);
    stats.init_seconds.push_back(init_time);
    stats.batch_seconds.push_back(batch_time);

    if (observe) observe(b, view);
  }

  stats.total_seconds = std::accumulate(stats.batch_seconds.begin(), stats.batch_seconds.end(), 0.0);
  const double kernel_total =
      std::accumulate(stats.kernel_seconds.begin(), stats.kernel_seconds.end(), 0.0);
  const double init_total =
      std::accumulate(stats.init_seconds.begin(), stats.init_seconds.end(), 0.0);
  stats.overhead_seconds = std::max(0.0, stats.total_seconds - kernel_total - init_total);

  const TimingSummary summary = summarize_batches(stats.kernel_seconds);
  stats.min_kernel_seconds = summary.min_seconds;
  stats.warm_up_excluded = summary.warm_up_excluded;
  if (!summary.warm_up_excluded) {
    stats.warnings.push_back("only one batch: warm-up exclusion disabled");
  }
  return stats;
}

}  // namespace

PipelineStats run_pipeline(const PipelineConfig& cfg, const MarketModel& model,
                           const BatchFill& fill, const BatchObserver& observe) {
  if (cfg.layout == Layout::AoS) return run_impl<OptionBatchAoS>(cfg, model, fill, observe);
  return run_impl<OptionBatchSoA>(cfg, model, fill, observe);
}

}  // namespace bsopt
