#include "bsopt/parallel.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <utility>

#include "bsopt/error.hpp"
#include "bsopt/timing.hpp"

namespace bsopt {

namespace {

template <class Batch>
ParallelRun parallel_price_impl(Batch& batch, const MarketModel& model, KernelKind kernel,
                                WorkerPool& pool, const ChunkPartition& partition,
                                ChunkTrace* trace, std::size_t lane_width) {
  if (partition.element_count() != batch.size()) {
    throw StructuralError("partition covers " + std::to_string(partition.element_count()) +
                          " elements but batch holds " + std::to_string(batch.size()));
  }
  partition.validate();
  validate(model);
  if (kernel == KernelKind::Lanes) check_lane_width(lane_width);

  ParallelRun out;
  const auto& touched = batch.first_touch_partition();
  if (touched && !(*touched == partition)) {
    out.warnings.push_back(
        "batch was initialized with a different partition; first-touch pairing is lost");
  }
  if (trace != nullptr) {
    if (trace->init_worker.size() != partition.chunk_count()) {
      trace->init_worker.assign(partition.chunk_count(), kNoWorker);
    }
    trace->price_worker.assign(partition.chunk_count(), kNoWorker);
  }

  Stopwatch watch;
  pool.run(partition, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    price_range(kernel, batch, model, begin, end, lane_width);
    if (trace != nullptr) trace->price_worker[chunk] = current_worker_id();
  });
  out.seconds = watch.seconds();
  for (const auto& w : pool.warnings()) out.warnings.push_back(w);
  return out;
}

double min_time_of(std::size_t repetitions, auto&& body) {
  std::vector<double> times;
  times.reserve(repetitions);
  for (std::size_t rep = 0; rep < std::max<std::size_t>(1, repetitions); ++rep) {
    times.push_back(body());
  }
  return summarize_batches(times).min_seconds;
}

}  // namespace

ParallelRun parallel_price(OptionBatchSoA& batch, const MarketModel& model, KernelKind kernel,
                           WorkerPool& pool, const ChunkPartition& partition, ChunkTrace* trace,
                           std::size_t lane_width) {
  return parallel_price_impl(batch, model, kernel, pool, partition, trace, lane_width);
}

ParallelRun parallel_price(OptionBatchAoS& batch, const MarketModel& model, KernelKind kernel,
                           WorkerPool& pool, const ChunkPartition& partition, ChunkTrace* trace,
                           std::size_t lane_width) {
  return parallel_price_impl(batch, model, kernel, pool, partition, trace, lane_width);
}

ParallelRun parallel_price(OptionBatchSoA& batch, const MarketModel& model, KernelKind kernel,
                           const ExecConfig& cfg, std::size_t lane_width) {
  WorkerPool pool(cfg.worker_count, cfg.placement);
  const ChunkPartition partition = make_partition(batch.size(), cfg);
  return parallel_price_impl(batch, model, kernel, pool, partition, nullptr, lane_width);
}

ScalingReport sweep_workers(OptionBatchSoA& batch, const MarketModel& model, KernelKind kernel,
                            std::span<const std::size_t> worker_counts, std::size_t repetitions,
                            std::size_t lane_width) {
  ScalingReport report;
  report.serial_seconds = min_time_of(repetitions, [&] {
    Stopwatch watch;
    price_batch(kernel, batch, model, lane_width);
    return watch.seconds();
  });

  for (const std::size_t workers : worker_counts) {
    ExecConfig cfg;
    cfg.worker_count = workers;
    WorkerPool pool(workers);
    const ChunkPartition partition = make_partition(batch.size(), cfg);
    ScalingRow row;
    row.workers = workers;
    row.min_seconds = min_time_of(repetitions, [&] {
      return parallel_price_impl(batch, model, kernel, pool, partition, nullptr, lane_width)
          .seconds;
    });
    if (row.min_seconds > 0.0) {
      row.speedup = report.serial_seconds / row.min_seconds;
      row.efficiency = row.speedup / static_cast<double>(workers);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::size_t hardware_threads() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t physical_cores() {
  // Distinct (physical id, core id) pairs from /proc/cpuinfo.
  std::ifstream in("/proc/cpuinfo");
  std::set<std::pair<int, int>> cores;
  std::string line;
  int physical = 0;
  int core = -1;
  auto field = [](const std::string& l) { return std::stoi(l.substr(l.find(':') + 1)); };
  while (std::getline(in, line)) {
    try {
      if (line.rfind("physical id", 0) == 0) physical = field(line);
      if (line.rfind("core id", 0) == 0) core = field(line);
    } catch (const std::exception&) {
      continue;
    }
    if (line.empty() && core >= 0) {
      cores.insert({physical, core});
      core = -1;
    }
  }
  if (core >= 0) cores.insert({physical, core});
  if (cores.empty()) return hardware_threads();
  return std::min(cores.size(), hardware_threads());
}

}  // namespace bsopt
