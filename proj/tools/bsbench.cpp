// bsbench: runs the pricing ladder and prints benchmark reports.
//
// Exit codes: 0 ok, 1 bad configuration or input, 2 accuracy check failed,
// 3 out of memory or other resource failure.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsopt/error.hpp"
#include "bsopt/harness.hpp"
#include "bsopt/metrics.hpp"
#include "bsopt/parallel.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kVerify = 2, kResource = 3 };

template <class T, class Parse>
T parse_or_throw(const std::string& text, Parse parse, const char* what) {
  if (auto v = parse(text)) return *v;
  throw bsopt::ConfigError(std::string("unknown ") + what + ": " + text);
}

std::vector<bsopt::PricingStage> parse_stages(const std::string& text) {
  if (text == "ladder") return {bsopt::kLadder.begin(), bsopt::kLadder.end()};
  std::vector<bsopt::PricingStage> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_or_throw<bsopt::PricingStage>(item, bsopt::parse_stage, "stage"));
  }
  return out;
}

bsopt::Placement parse_placement(const std::string& text) {
  if (text == "none") return bsopt::Placement::None;
  if (text == "spread" || text == "numa_domains") return bsopt::Placement::SpreadAcrossDomains;
  throw bsopt::ConfigError("unknown placement: " + text);
}

int exit_code_for(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const bsopt::ResourceError& x) {
    std::cerr << "bsbench: resource failure: " << x.what() << '\n';
    return kResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "bsbench: resource failure: out of memory\n";
    return kResource;
  } catch (const bsopt::ValidationError& x) {
    std::cerr << "bsbench: invalid input: " << x.what() << '\n';
    return kConfig;
  } catch (const bsopt::ParseError& x) {
    std::cerr << "bsbench: parse error: " << x.what() << '\n';
    return kConfig;
  } catch (const bsopt::Error& x) {
    std::cerr << "bsbench: " << x.what() << '\n';
    return kConfig;
  } catch (const std::exception& x) {
    std::cerr << "bsbench: " << x.what() << '\n';
    return kResource;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch Black-Scholes pricing benchmark"};

  std::string stage = "ladder";
  std::string layout = "soa";
  std::string strategy = "reused";
  std::optional<std::uint64_t> batch_size;
  std::size_t batches = 5;
  double scale = bsopt::kDefaultScale;
  std::optional<std::size_t> workers;
  std::optional<std::string> placement;
  bool verify = false;
  std::uint64_t seed = 42;
  std::optional<std::string> input;
  std::string format = "csv";
  std::optional<std::string> output;
  std::string report = "human";
  bool probe = false;
  std::size_t probe_elements = std::size_t{1} << 22;
  std::size_t lane_width = bsopt::kDefaultLaneWidth;
  std::optional<std::size_t> chunk_size;
  std::string synth = "constant";
  std::uint64_t memory_budget = 0;
  std::string parallel_kernel = "lanes";
  std::size_t verify_sample = 10'000;

  app.add_option("--stage", stage,
                 "scalar, lanes, fastmath, parallel, parallel-numa, a comma list, or ladder");
  app.add_option("--layout", layout, "soa or aos");
  app.add_option("--strategy", strategy, "per-batch, reused, staged-per-batch, staged-reused");
  app.add_option("--batch-size", batch_size, "options per batch (overrides --scale)");
  app.add_option("--batches", batches, "number of batches; the first is warm-up");
  app.add_option("--scale", scale, "fraction of the 240M-option batch");
  app.add_option("--workers", workers, "worker threads (default: physical cores)");
  app.add_option("--placement", placement, "none or spread (env BSOPT_CPU_PLACES)");
  app.add_flag("--verify", verify, "check prices against the double-precision reference");
  app.add_option("--verify-sample", verify_sample, "elements checked per stage");
  app.add_option("--seed", seed, "seed for uniform synthesis");
  app.add_option("--synth", synth, "constant or uniform");
  app.add_option("--input", input, "read options from a file instead of synthesizing");
  app.add_option("--format", format, "input file format: csv or bin");
  app.add_option("--output", output, "write the report here instead of stdout");
  app.add_option("--report", report, "json, csv or human");
  app.add_flag("--bandwidth-probe", probe, "measure memory bandwidth with a triad first");
  app.add_option("--probe-elements", probe_elements, "triad array length");
  app.add_option("--lane-width", lane_width, "4, 8 or 16");
  app.add_option("--chunk-size", chunk_size, "options per parallel chunk (default: auto)");
  app.add_option("--memory-budget", memory_budget, "bytes; default half of physical memory");
  app.add_option("--parallel-kernel", parallel_kernel, "kernel for parallel stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    bsopt::RunConfig cfg;
    cfg.stages = parse_stages(stage);
    cfg.layout = parse_or_throw<bsopt::Layout>(layout, bsopt::parse_layout, "layout");
    cfg.strategy = parse_or_throw<bsopt::AllocStrategy>(strategy, bsopt::parse_strategy, "strategy");
    cfg.batch_size = batch_size;
    cfg.batch_count = batches;
    cfg.scale = scale;
    cfg.exec = bsopt::default_exec_config();
    if (workers) cfg.exec.worker_count = *workers;
    cfg.exec.chunk_size = chunk_size;
    if (placement) {
      cfg.exec.placement = parse_placement(*placement);
    } else if (const char* env = std::getenv("BSOPT_CPU_PLACES"); env && *env) {
      cfg.exec.placement = parse_placement(env);
    }
    cfg.verify = verify;
    cfg.verify_sample = verify_sample;
    cfg.seed = seed;
    cfg.synth = parse_or_throw<bsopt::SynthMode>(synth, bsopt::parse_synth_mode, "synth mode");
    if (input) {
      cfg.input_path = *input;
      cfg.input_format =
          parse_or_throw<bsopt::InputFormat>(format, bsopt::parse_input_format, "input format");
    }
    cfg.lane_width = lane_width;
    cfg.memory_budget = memory_budget;
    if (parallel_kernel == "scalar") {
      cfg.parallel_kernel = bsopt::KernelKind::Scalar;
    } else if (parallel_kernel == "lanes") {
      cfg.parallel_kernel = bsopt::KernelKind::Lanes;
    } else if (parallel_kernel == "fastmath") {
      cfg.parallel_kernel = bsopt::KernelKind::FastMath;
    } else {
      throw bsopt::ConfigError("unknown parallel kernel: " + parallel_kernel);
    }
    const auto fmt =
        parse_or_throw<bsopt::ReportFormat>(report, bsopt::parse_report_format, "report format");

    if (probe) {
      const auto triad = bsopt::measure_triad(probe_elements, cfg.exec);
      cfg.machine = bsopt::machine_from(triad);
      std::cerr << "triad: " << triad.bytes_per_second / 1e9 << " GB/s\n";
    }

    const bsopt::LadderResult result = bsopt::run_ladder(cfg);
    if (!result.reports.empty()) {
      if (output) {
        bsopt::emit_report(result.reports, fmt, std::filesystem::path(*output));
      } else {
        bsopt::emit_report(result.reports, fmt, std::cout);
      }
    }
    if (result.partial) {
      std::cerr << "bsbench: ladder stopped after " << result.reports.size()
                << " stage(s): " << result.failure_message << '\n';
      return exit_code_for(result.failure);
    }
    if (result.verification_failed()) {
      std::cerr << "bsbench: accuracy check failed\n";
      return kVerify;
    }
    return kOk;
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
}
