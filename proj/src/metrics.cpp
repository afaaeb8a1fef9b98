#include "bsopt/metrics.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "bsopt/batch.hpp"
#include "bsopt/error.hpp"
#include "bsopt/timing.hpp"
#include "bsopt/worker_pool.hpp"

namespace bsopt {

namespace {

struct TierWeights {
  int log;
  int exp;
  int erf;
};

constexpr TierWeights kStandardWeights{20, 20, 40};
constexpr TierWeights kLow11Weights{16, 18, 44};

}  // namespace

void validate(const KernelCostModel& cost) {
  if (!(cost.flops_per_option >= 1.0)) throw ConfigError("flops_per_option must be >= 1");
  if (!(cost.bytes_per_option >= 4.0)) throw ConfigError("bytes_per_option must be >= 4");
}

double arithmetic_intensity(const KernelCostModel& cost) {
  validate(cost);
  return cost.flops_per_option / cost.bytes_per_option;
}

std::uint64_t batch_bytes(std::uint64_t options, std::uint64_t bytes_per_option) {
  return options * bytes_per_option;
}

double bandwidth_lower_bound(double batch_bytes, const MachineModel& machine) {
  if (!(machine.mem_bandwidth > 0.0)) throw ConfigError("memory bandwidth must be positive");
  if (batch_bytes < 0.0) throw ConfigError("batch size must be non-negative");
  return batch_bytes / machine.mem_bandwidth;
}

double effective_bandwidth(double batch_bytes, double measured_seconds) {
  if (!(measured_seconds > 0.0)) throw ConfigError("measured time must be positive");
  return batch_bytes / measured_seconds;
}

OpCensus op_census(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Scalar:
      // Both d1 and d2 recompute log(S0/K) and sqrt(T), as written.
      return {21, 2, 2, 2, 1};
    case KernelKind::Lanes:
      return {19, 1, 1, 2, 1};
    case KernelKind::FastMath:
      return {19, 1, 1, 2, 1};
  }
  return {};
}

KernelCostModel cost_model_for(KernelKind kind) {
  const OpCensus ops = op_census(kind);
  const TierWeights w = kind == KernelKind::FastMath ? kLow11Weights : kStandardWeights;
  const int flops = ops.basic + ops.sqrt + ops.log * w.log + ops.erf * w.erf + ops.exp * w.exp;
  return {static_cast<double>(flops), static_cast<double>(kBytesPerOption)};
}

TriadResult measure_triad(std::size_t elements, const ExecConfig& exec, std::size_t repetitions) {
  if (elements == 0) throw ConfigError("triad needs at least one element");
  WorkerPool pool(exec.worker_count, exec.placement);
  const ChunkPartition partition = make_partition(elements, exec);

  AlignedArray<double> a(elements);
  AlignedArray<double> b(elements);
  AlignedArray<double> c(elements);
  double* pa = a.data();
  double* pb = b.data();
  double* pc = c.data();

  pool.run(partition, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      pa[i] = 0.0;
      pb[i] = 1.0;
      pc[i] = 2.0;
    }
  });

  const double scalar = 3.0;
  std::vector<double> times;
  for (std::size_t rep = 0; rep < std::max<std::size_t>(2, repetitions + 1); ++rep) {
    Stopwatch watch;
    pool.run(partition, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) pa[i] = pb[i] + scalar * pc[i];
    });
    times.push_back(watch.seconds());
  }
  // Reading a[] keeps the stores observable.
  if (pa[elements / 2] != 7.0) throw Error("triad produced a wrong result");

  TriadResult out;
  out.best_seconds = summarize_batches(times).min_seconds;
  out.elements = elements;
  out.workers = exec.worker_count;
  out.bytes_per_second = 3.0 * sizeof(double) * static_cast<double>(elements) / out.best_seconds;
  return out;
}

}  // namespace bsopt
