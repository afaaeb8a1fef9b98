#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bsopt {

inline constexpr int kReportSchemaVersion = 1;

struct AccuracySummary {
  std::uint64_t sample_size = 0;
  double max_abs_error = 0.0;
  // max |c - ref| / max(1, |ref|)
  double max_rel_error = 0.0;
  // Threshold applied: absolute for the fast-math kernel, relative (as in
  // max_rel_error) for the standard kernels.
  double bound = 0.0;
  bool bound_is_relative = true;
  bool passed = true;

  bool operator==(const AccuracySummary&) const = default;
};

struct MachineFingerprint {
  std::string cpu_model;
  std::uint64_t hardware_threads = 0;
  std::uint64_t physical_cores = 0;
  std::uint64_t memory_domains = 0;
  std::string compiler;
  std::string build_flags;

  bool operator==(const MachineFingerprint&) const = default;
};

MachineFingerprint current_machine();

struct BenchmarkReport {
  int schema_version = kReportSchemaVersion;

  // Configuration echo: enough to re-run the measurement.
  std::string stage;
  std::string kernel;
  std::string layout;
  std::string strategy;
  std::uint64_t batch_size = 0;
  std::uint64_t batch_count = 0;
  double scale = 0.0;
  std::uint64_t workers = 1;
  std::uint64_t chunk_size = 0;  // 0 = auto
  std::string placement;
  std::uint64_t lane_width = 0;
  std::uint64_t seed = 0;
  std::string synth;
  std::string input_path;
  double r = 0.0;
  double sigma = 0.0;

  // Timings, seconds.
  std::vector<double> kernel_seconds;
  std::vector<double> init_seconds;
  std::vector<double> batch_seconds;
  double min_seconds = 0.0;
  bool warm_up_excluded = false;
  double overhead_seconds = 0.0;
  double total_seconds = 0.0;

  // Allocation accounting.
  std::uint64_t alloc_count = 0;
  std::uint64_t sink_alloc_count = 0;
  std::uint64_t bytes_allocated = 0;
  std::uint64_t copy_bytes = 0;
  std::vector<double> checksums;

  // Derived metrics.
  double throughput = 0.0;           // options per second at min_seconds
  double effective_bandwidth = 0.0;  // bytes per second at min_seconds
  double flops_per_option = 0.0;
  double bytes_per_option = 0.0;
  double arithmetic_intensity = 0.0;
  std::optional<double> machine_bandwidth;
  std::optional<double> bandwidth_lower_bound;

  std::optional<AccuracySummary> accuracy;
  std::optional<bool> first_touch_paired;
  std::vector<std::string> warnings;
  MachineFingerprint machine;

  bool operator==(const BenchmarkReport&) const = default;
};

nlohmann::json to_json(const BenchmarkReport& report);
// Throws ParseError on missing fields or an unknown schema version.
BenchmarkReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { Json, Csv, Human };

std::string_view to_string(ReportFormat f) noexcept;
std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

// Fixed CSV column order, one row per report.
std::span<const std::string_view> csv_columns() noexcept;

// JSON: {"schema_version": 1, "reports": [...]}. Throws ConfigError for an
// empty report list.
void emit_report(std::span<const BenchmarkReport> reports, ReportFormat format, std::ostream& out);
// Throws IoError when the file cannot be written.
void emit_report(std::span<const BenchmarkReport> reports, ReportFormat format,
                 const std::filesystem::path& path);

}  // namespace bsopt
