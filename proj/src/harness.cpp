#include "bsopt/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "bsopt/error.hpp"
#include "bsopt/parallel.hpp"
#include "bsopt/pricing.hpp"

namespace bsopt {

ExecConfig default_exec_config() {
  ExecConfig cfg;
  cfg.worker_count = physical_cores();
  return cfg;
}

std::uint64_t physical_memory_bytes() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page_size = sysconf(_SC_PAGESIZE);
  if (pages <= 0 || page_size <= 0) return 0;
  return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page_size);
}

std::uint64_t effective_batch_size(const RunConfig& cfg) {
  if (cfg.batch_size) return *cfg.batch_size;
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(kFullScaleBatchSize) * cfg.scale));
}

void check_config(const RunConfig& cfg, std::uint64_t batch_size) {
  if (cfg.batch_count == 0) throw ConfigError("batch count must be at least 1");
  if (cfg.stages.empty()) throw ConfigError("no stages selected");
  if (!cfg.batch_size && !(cfg.scale > 0.0)) throw ConfigError("scale must be positive");
  if (cfg.exec.worker_count == 0) throw ConfigError("worker count must be positive");
  if (cfg.exec.chunk_size && *cfg.exec.chunk_size == 0) {
    throw ConfigError("chunk size must be positive");
  }
  if (cfg.verify && cfg.verify_sample == 0) throw ConfigError("verification sample is empty");
  check_lane_width(cfg.lane_width);
  validate(cfg.model);

  std::uint64_t budget = cfg.memory_budget;
  if (budget == 0) budget = physical_memory_bytes() / 2;
  const std::uint64_t need = batch_bytes(batch_size);
  if (budget != 0 && need > budget) {
    throw ConfigError("batch of " + std::to_string(batch_size) + " options needs " +
                      std::to_string(need) + " bytes, over the memory budget of " +
                      std::to_string(budget));
  }
  const bool wants_spread =
      std::find(cfg.stages.begin(), cfg.stages.end(), PricingStage::ParallelNuma) !=
          cfg.stages.end() ||
      cfg.exec.placement == Placement::SpreadAcrossDomains;
  if (wants_spread && cfg.exec.worker_count > hardware_threads()) {
    throw ConfigError("spread placement allows at most " + std::to_string(hardware_threads()) +
                      " workers, got " + std::to_string(cfg.exec.worker_count));
  }
}

AccuracySummary measure_accuracy(const BatchView& view, const MarketModel& model, KernelKind kernel,
                                 std::size_t sample) {
  AccuracySummary out;
  out.bound_is_relative = kernel != KernelKind::FastMath;
  out.bound = out.bound_is_relative ? kStandardRelBound : kFastMathAbsBound;
  if (view.n == 0 || sample == 0) return out;

  const std::size_t count = std::min(sample, view.n);
  for (std::size_t s = 0; s < count; ++s) {
    // Evenly spaced indices, first and last element included when count > 1.
    const std::size_t i = count == 1 ? 0 : s * (view.n - 1) / (count - 1);
    const double ref =
        price_reference({view.s0_at(i), view.k_at(i), view.t_at(i)}, model).c;
    const double err = std::fabs(static_cast<double>(view.c_at(i)) - ref);
    out.max_abs_error = std::max(out.max_abs_error, err);
    out.max_rel_error = std::max(out.max_rel_error, err / std::max(1.0, std::fabs(ref)));
    if (std::isnan(view.c_at(i))) out.max_abs_error = out.max_rel_error = INFINITY;
  }
  out.sample_size = count;
  const double measured = out.bound_is_relative ? out.max_rel_error : out.max_abs_error;
  out.passed = measured <= out.bound;
  return out;
}

bool LadderResult::verification_failed() const {
  return std::any_of(reports.begin(), reports.end(),
                     [](const BenchmarkReport& r) { return r.accuracy && !r.accuracy->passed; });
}

namespace {

BenchmarkReport run_stage(const RunConfig& cfg, PricingStage stage, std::uint64_t n,
                          const BatchFill& fill, const MachineFingerprint& machine) {
  PipelineConfig pc;
  pc.batch_count = cfg.batch_count;
  pc.batch_size = static_cast<std::size_t>(n);
  pc.strategy = cfg.strategy;
  pc.stage = stage;
  pc.layout = cfg.layout;
  pc.exec = cfg.exec;
  pc.lane_width = cfg.lane_width;
  pc.parallel_kernel = cfg.parallel_kernel;
  const StagePlan plan = plan_for(stage, cfg.parallel_kernel);

  std::optional<AccuracySummary> accuracy;
  BatchObserver observe;
  if (cfg.verify) {
    observe = [&](std::size_t batch_index, const BatchView& view) {
      if (batch_index + 1 == cfg.batch_count) {
        accuracy = measure_accuracy(view, cfg.model, plan.kernel, cfg.verify_sample);
      }
    };
  }
  const PipelineStats stats = run_pipeline(pc, cfg.model, fill, observe);

  BenchmarkReport r;
  r.stage = std::string(to_string(stage));
  r.kernel = std::string(to_string(plan.kernel));
  r.layout = std::string(to_string(cfg.layout));
  r.strategy = std::string(to_string(cfg.strategy));
  r.batch_size = n;
  r.batch_count = cfg.batch_count;
  r.scale = cfg.batch_size ? static_cast<double>(n) / kFullScaleBatchSize : cfg.scale;
  r.workers = plan.parallel ? cfg.exec.worker_count : 1;
  r.chunk_size = cfg.exec.chunk_size.value_or(0);
  r.placement = plan.placement == Placement::SpreadAcrossDomains ? "spread" : "none";
  r.lane_width = cfg.lane_width;
  r.seed = cfg.seed;
  r.synth = cfg.input_path ? "file" : std::string(to_string(cfg.synth));
  r.input_path = cfg.input_path ? cfg.input_path->string() : "";
  r.r = cfg.model.r;
  r.sigma = cfg.model.sigma;

  r.kernel_seconds = stats.kernel_seconds;
  r.init_seconds = stats.init_seconds;
  r.batch_seconds = stats.batch_seconds;
  r.min_seconds = stats.min_kernel_seconds;
  r.warm_up_excluded = stats.warm_up_excluded;
  r.overhead_seconds = stats.overhead_seconds;
  r.total_seconds = stats.total_seconds;

  r.alloc_count = stats.alloc_count;
  r.sink_alloc_count = stats.sink_alloc_count;
  r.bytes_allocated = stats.bytes_allocated;
  r.copy_bytes = stats.copy_bytes;
  r.checksums = stats.checksums;

  const KernelCostModel cost = cost_model_for(plan.kernel);
  const double bytes = static_cast<double>(batch_bytes(n));
  r.flops_per_option = cost.flops_per_option;
  r.bytes_per_option = cost.bytes_per_option;
  r.arithmetic_intensity = arithmetic_intensity(cost);
  if (r.min_seconds > 0.0) {
    r.throughput = static_cast<double>(n) / r.min_seconds;
    r.effective_bandwidth = effective_bandwidth(bytes, r.min_seconds);
  }
  if (cfg.machine) {
    r.machine_bandwidth = cfg.machine->mem_bandwidth;
    r.bandwidth_lower_bound = bandwidth_lower_bound(bytes, *cfg.machine);
  }
  r.accuracy = accuracy;
  r.first_touch_paired = stats.first_touch_paired;
  r.warnings = stats.warnings;
  r.machine = machine;
  return r;
}

}  // namespace

LadderResult run_ladder(const RunConfig& cfg) {
  LadderResult result;

  std::shared_ptr<const OptionBatchSoA> loaded;
  if (cfg.input_path) {
    loaded = std::make_shared<const OptionBatchSoA>(load_batch(*cfg.input_path, cfg.input_format));
  }
  const std::uint64_t n = loaded ? loaded->size() : effective_batch_size(cfg);
  check_config(cfg, n);

  const BatchFill fill = loaded ? copy_fill(loaded) : synth_fill(cfg.seed, cfg.synth);
  const MachineFingerprint machine = current_machine();

  for (PricingStage stage : cfg.stages) {
    try {
      result.reports.push_back(run_stage(cfg, stage, n, fill, machine));
    } catch (const std::exception& e) {
      result.partial = true;
      result.failure = std::current_exception();
      result.failure_message = std::string(to_string(stage)) + ": " + e.what();
      break;
    }
  }
  return result;
}

}  // namespace bsopt
