// Acceptance gate: one PASS / FAIL / SKIP line per criterion. Exits non-zero
// when any criterion fails; SKIP means the machine cannot run the check.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bsopt/alloc_pipeline.hpp"
#include "bsopt/batch.hpp"
#include "bsopt/fastmath.hpp"
#include "bsopt/io.hpp"
#include "bsopt/metrics.hpp"
#include "bsopt/parallel.hpp"
#include "bsopt/pricing.hpp"
#include "bsopt/timing.hpp"
#include "bsopt/worker_pool.hpp"
#include "oracle.hpp"

namespace {

using namespace bsopt;

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome check(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double tier_error(double got, long double exact) {
  const double e = static_cast<double>(exact);
  return std::fabs(got - e) / std::max(std::fabs(e), kLow11Tolerance);
}

OptionBatchSoA random_batch(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OptionBatchSoA b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = oracle::random_valid_option(rng);
    b.t()[i] = static_cast<float>(o.t);
    b.s0()[i] = static_cast<float>(o.s0);
    b.k()[i] = static_cast<float>(o.k);
    b.c()[i] = 0.0f;
  }
  return b;
}

Outcome canonical_price() {
  const double c = price_reference({100, 100, 3}, MarketModel{0.05, 0.2}).c;
  return check(std::fabs(c - 20.924) <= 1e-3, fmt("price %.9f, expected 20.924 +- 0.001", c));
}

Outcome fastmath_accuracy() {
  const MarketModel m;
  OptionBatchSoA one = synth_batch(1, 0, SynthMode::Constant);
  price_batch_fastmath(one, m);
  const float canon = one.c()[0];

  // Canonical range: S0, K in [50, 200], T in [0.25, 10].
  OptionBatchSoA b = synth_batch(10'000, 2024, SynthMode::Uniform);
  price_batch_fastmath(b, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double ref = price_reference({b.s0()[i], b.k()[i], b.t()[i]}, m).c;
    worst = std::max(worst, std::fabs(b.c()[i] - ref));
  }
  const bool ok = canon >= 20.919f && canon <= 20.932f && worst <= 5e-3;
  return check(ok, fmt("canonical %.5f in [20.919, 20.932]; max abs error %.3g <= 5e-3 over 1e4",
                       canon, worst));
}

Outcome fastmath_bounds() {
  constexpr int kPoints = 1'000'000;
  double erf_worst = 0.0, exp_worst = 0.0, log_worst = 0.0;
  for (int i = 0; i <= kPoints; ++i) {
    const float u = static_cast<float>(i) / kPoints;
    const float xe = -kFastErfDomain + 2.0f * kFastErfDomain * u;
    erf_worst = std::max(erf_worst, tier_error(fast_erf(xe), oracle::erf(static_cast<long double>(xe))));
    const float xx = -kFastExpDomain + 2.0f * kFastExpDomain * u;
    exp_worst = std::max(exp_worst, tier_error(fast_exp(xx), oracle::exp(static_cast<long double>(xx))));
    const float xl = std::exp2(-60.0f + 120.0f * u);
    log_worst = std::max(log_worst, tier_error(fast_log(xl), oracle::log(static_cast<long double>(xl))));
  }
  const double tol = kLow11Tolerance;
  return check(erf_worst <= tol && exp_worst <= tol && log_worst <= tol,
               fmt("max rel error erf %.3g, exp %.3g, log %.3g; bound 2^-11 = %.3g", erf_worst,
                   exp_worst, log_worst, tol));
}

Outcome bandwidth_bound() {
  const double t = bandwidth_lower_bound(3.84e9, MachineModel{68e9, std::nullopt});
  return check(std::fabs(t - 0.0565) <= 5e-5 && t >= 0.056,
               fmt("3.84e9 B / 68e9 B/s = %.6f s", t));
}

Outcome bytes_per_option() {
  const std::uint64_t bytes = batch_bytes(240'000'000);
  const bool ok = bytes == 3'840'000'000ull && KernelCostModel{}.bytes_per_option == 16.0 &&
                  kBytesPerOption == 16;
  return check(ok, fmt("240e6 options x 16 B = %llu B", static_cast<unsigned long long>(bytes)));
}

Outcome oracle_equivalence() {
  const MarketModel m;
  const OptionBatchSoA base = random_batch(10'000, 77);
  OptionBatchSoA scalar = base.clone();
  price_batch(KernelKind::Scalar, scalar, m);

  std::int64_t lanes_ulp = 0, parallel_ulp = 0, layout_ulp = 0;
  for (std::size_t width : {4u, 8u, 16u}) {
    OptionBatchSoA lanes = base.clone();
    price_batch(KernelKind::Lanes, lanes, m, width);
    for (std::size_t i = 0; i < base.size(); ++i) {
      lanes_ulp = std::max(lanes_ulp, oracle::ulp_distance(scalar.c()[i], lanes.c()[i]));
    }
  }
  for (std::size_t workers : {1u, 2u, 3u, 4u}) {
    OptionBatchSoA par = base.clone();
    parallel_price(par, m, KernelKind::Lanes, ExecConfig{workers, std::nullopt, {}});
    for (std::size_t i = 0; i < base.size(); ++i) {
      parallel_ulp = std::max(parallel_ulp, oracle::ulp_distance(scalar.c()[i], par.c()[i]));
    }
  }
  for (KernelKind kind : {KernelKind::Scalar, KernelKind::Lanes, KernelKind::FastMath}) {
    OptionBatchSoA soa = base.clone();
    OptionBatchAoS aos = soa_to_aos(base);
    price_batch(kind, soa, m);
    price_batch(kind, aos, m);
    for (std::size_t i = 0; i < base.size(); ++i) {
      layout_ulp = std::max(layout_ulp, oracle::ulp_distance(soa.c()[i], aos.records()[i].c));
    }
  }
  const OptionBatchSoA back = aos_to_soa(soa_to_aos(scalar));
  bool identity = back.size() == scalar.size();
  for (std::size_t i = 0; identity && i < back.size(); ++i) {
    identity = oracle::ulp_distance(back.t()[i], scalar.t()[i]) == 0 &&
               oracle::ulp_distance(back.s0()[i], scalar.s0()[i]) == 0 &&
               oracle::ulp_distance(back.k()[i], scalar.k()[i]) == 0 &&
               oracle::ulp_distance(back.c()[i], scalar.c()[i]) == 0;
  }
  const bool ok = lanes_ulp <= 1 && parallel_ulp <= 1 && layout_ulp <= 1 && identity;
  return check(ok, fmt("max ULP lanes %lld, parallel %lld, soa/aos %lld; round trip %s",
                       static_cast<long long>(lanes_ulp), static_cast<long long>(parallel_ulp),
                       static_cast<long long>(layout_ulp), identity ? "bitwise" : "DIFFERS"));
}

double pipeline_min(PricingStage stage, std::size_t workers) {
  PipelineConfig cfg;
  cfg.batch_count = 5;
  cfg.batch_size = 2'400'000;
  cfg.stage = stage;
  cfg.exec = ExecConfig{workers, std::nullopt, {}};
  return run_pipeline(cfg, MarketModel{}, synth_fill(0, SynthMode::Constant)).min_kernel_seconds;
}

Outcome parallel_speedup() {
  const std::size_t cores = physical_cores();
  if (cores < 4) {
    return {Verdict::Skip, fmt("needs >= 4 physical cores, this machine has %zu", cores)};
  }
  const double serial = pipeline_min(PricingStage::Scalar, 1);
  const double parallel = pipeline_min(PricingStage::Parallel, 4);
  return check(serial >= 2.0 * parallel,
               fmt("scalar %.4f s, parallel x4 %.4f s, speedup %.2f (need >= 2)", serial, parallel,
                   serial / parallel));
}

Outcome allocation_accounting() {
  const AllocStrategy all[] = {AllocStrategy::PerBatch, AllocStrategy::Reused,
                               AllocStrategy::StagedCopyPerBatch, AllocStrategy::StagedCopyReused};
  std::vector<PipelineStats> stats;
  for (AllocStrategy s : all) {
    PipelineConfig cfg;
    cfg.batch_count = 5;
    cfg.batch_size = 240'000;
    cfg.strategy = s;
    cfg.stage = PricingStage::Lanes;
    stats.push_back(run_pipeline(cfg, MarketModel{}, synth_fill(9, SynthMode::Uniform)));
  }
  bool same = true;
  for (const auto& s : stats) same = same && s.checksums == stats[0].checksums;
  const bool ok = stats[1].alloc_count == 1 && stats[3].alloc_count == 1 &&
                  stats[0].alloc_count == 5 && stats[2].alloc_count == 5 && same;
  return check(ok, fmt("allocations per-batch %zu, reused %zu, staged %zu/%zu; checksums %s",
                       stats[0].alloc_count, stats[1].alloc_count, stats[2].alloc_count,
                       stats[3].alloc_count, same ? "identical" : "DIFFER"));
}

Outcome timing_methodology() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(1e-6, 1.0);
  bool ok = true;
  for (int trial = 0; trial < 10'000 && ok; ++trial) {
    double t[5];
    for (double& x : t) x = dist(rng);
    const TimingSummary s = summarize_batches(t);
    const double expect = *std::min_element(t + 1, t + 5);
    ok = s.warm_up_excluded && s.min_seconds == expect;
    for (int i = 1; i < 5; ++i) ok = ok && s.min_seconds <= t[i];
  }
  // Warm-up made artificially fastest must still be excluded.
  const double rigged[] = {1e-9, 0.3, 0.2, 0.4, 0.5};
  ok = ok && summarize_batches(rigged).min_seconds == 0.2;

  PipelineConfig cfg;
  cfg.batch_count = 5;
  cfg.batch_size = 100'000;
  const PipelineStats st = run_pipeline(cfg, MarketModel{}, synth_fill(0, SynthMode::Constant));
  ok = ok && st.min_kernel_seconds ==
                 *std::min_element(st.kernel_seconds.begin() + 1, st.kernel_seconds.end());
  return check(ok, "min over batches 2-5 on 1e4 synthetic timer sets and a live run");
}

Outcome first_touch_pairing() {
  const std::size_t hw = hardware_threads();
  PipelineConfig cfg;
  cfg.batch_count = 3;
  cfg.batch_size = 1'000'000;
  cfg.stage = PricingStage::ParallelNuma;
  cfg.exec = ExecConfig{hw, std::nullopt, {}};
  const PipelineStats st = run_pipeline(cfg, MarketModel{}, synth_fill(0, SynthMode::Constant));
  const bool stage_ok = st.first_touch_paired.value_or(false);

  // Four workers with explicit chunks, independent of the core count.
  WorkerPool pool(4);
  const ChunkPartition p = make_partition(1'000'000, ExecConfig{4, 10'000, {}});
  OptionBatchSoA b(1'000'000);
  ChunkTrace trace;
  init_batch(b, 3.0f, 100.0f, 100.0f, p, &pool, &trace);
  parallel_price(b, MarketModel{}, KernelKind::Lanes, pool, p, &trace);
  const bool trace_ok = trace.paired();

  return check(stage_ok && trace_ok,
               fmt("parallel-numa stage at %zu workers: %s; 4 workers x %zu chunks: %s", hw,
                   stage_ok ? "paired" : "NOT paired", p.chunk_count(),
                   trace_ok ? "paired" : "NOT paired"));
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"canonical price", canonical_price},
      {"fast-math accuracy", fastmath_accuracy},
      {"fast-math function bounds", fastmath_bounds},
      {"bandwidth-bound arithmetic", bandwidth_bound},
      {"bytes-per-option model", bytes_per_option},
      {"oracle equivalence", oracle_equivalence},
      {"parallel speedup", parallel_speedup},
      {"allocation accounting", allocation_accounting},
      {"timing methodology", timing_methodology},
      {"first-touch pairing", first_touch_pairing},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    Stopwatch w;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    if (o.verdict == Verdict::Fail) ++failures;
    std::printf("%s  %-28s %s (%.2f s)\n", tag, name, o.detail.c_str(), w.seconds());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
