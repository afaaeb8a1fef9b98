#include "bsopt/report.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "bsopt/error.hpp"
#include "bsopt/parallel.hpp"
#include "bsopt/worker_pool.hpp"

namespace bsopt {

namespace {

constexpr std::array<std::string_view, 33> kCsvColumns = {
    "schema_version", "stage",          "kernel",           "layout",
    "strategy",       "batch_size",     "batch_count",      "scale",
    "workers",        "chunk_size",     "placement",        "lane_width",
    "seed",           "synth",          "r",                "sigma",
    "min_seconds",    "warm_up_excluded", "overhead_seconds", "total_seconds",
    "alloc_count",    "sink_alloc_count", "bytes_allocated",  "copy_bytes",
    "throughput",     "effective_bandwidth", "flops_per_option", "arithmetic_intensity",
    "machine_bandwidth", "bandwidth_lower_bound", "max_abs_error", "accuracy_passed",
    "first_touch_paired"};

std::string read_cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        auto v = line.substr(colon + 1);
        v.erase(0, v.find_first_not_of(' '));
        return v;
      }
    }
  }
  return "unknown";
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

template <class T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ParseError(std::string("report is missing field '") + name + "'", 0);
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report field '") + name + "': " + e.what(), 0);
  }
}

template <class T>
std::optional<T> optional_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return field<T>(j, name);
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
std::string opt_str(const std::optional<T>& v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(17) << *v;
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void emit_csv(std::span<const BenchmarkReport> reports, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    out << (i ? "," : "") << kCsvColumns[i];
  }
  out << '\n';
  for (const auto& r : reports) {
    const std::array<std::string, kCsvColumns.size()> row = {
        std::to_string(r.schema_version),
        csv_escape(r.stage),
        csv_escape(r.kernel),
        csv_escape(r.layout),
        csv_escape(r.strategy),
        std::to_string(r.batch_size),
        std::to_string(r.batch_count),
        num(r.scale),
        std::to_string(r.workers),
        std::to_string(r.chunk_size),
        csv_escape(r.placement),
        std::to_string(r.lane_width),
        std::to_string(r.seed),
        csv_escape(r.synth),
        num(r.r),
        num(r.sigma),
        num(r.min_seconds),
        r.warm_up_excluded ? "true" : "false",
        num(r.overhead_seconds),
        num(r.total_seconds),
        std::to_string(r.alloc_count),
        std::to_string(r.sink_alloc_count),
        std::to_string(r.bytes_allocated),
        std::to_string(r.copy_bytes),
        num(r.throughput),
        num(r.effective_bandwidth),
        num(r.flops_per_option),
        num(r.arithmetic_intensity),
        opt_str(r.machine_bandwidth),
        opt_str(r.bandwidth_lower_bound),
        r.accuracy ? num(r.accuracy->max_abs_error) : "",
        r.accuracy ? (r.accuracy->passed ? "true" : "false") : "",
        r.first_touch_paired ? (*r.first_touch_paired ? "true" : "false") : ""};
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void emit_human(std::span<const BenchmarkReport> reports, std::ostream& out) {
  const auto& first = reports.front();
  out << "machine: " << first.machine.cpu_model << " (" << first.machine.physical_cores
      << " cores, " << first.machine.hardware_threads << " threads, "
      << first.machine.memory_domains << " memory domains)\n";
  out << "batches: " << first.batch_count << " x " << first.batch_size << " options, layout "
      << first.layout << ", strategy " << first.strategy << "\n";
  if (first.machine_bandwidth) {
    out << "measured triad bandwidth: " << std::fixed << std::setprecision(2)
        << *first.machine_bandwidth / 1e9 << " GB/s\n";
  }
  out << '\n';
  out << std::left << std::setw(15) << "stage" << std::setw(10) << "kernel" << std::right
      << std::setw(8) << "workers" << std::setw(12) << "min [s]" << std::setw(12)
      << "overhead" << std::setw(12) << "Mopt/s" << std::setw(10) << "GB/s" << std::setw(10)
      << "flop/B" << std::setw(12) << "max |err|" << "\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(15) << r.stage << std::setw(10) << r.kernel << std::right
        << std::setw(8) << r.workers << std::setw(12) << std::fixed << std::setprecision(5)
        << r.min_seconds << std::setw(12) << r.overhead_seconds << std::setw(12)
        << std::setprecision(1) << r.throughput / 1e6 << std::setw(10) << std::setprecision(2)
        << r.effective_bandwidth / 1e9 << std::setw(10) << r.arithmetic_intensity;
    if (r.accuracy) {
      out << std::setw(12) << std::scientific << std::setprecision(2) << r.accuracy->max_abs_error
          << (r.accuracy->passed ? "" : "  FAIL");
    }
    out << std::defaultfloat << '\n';
  }
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) out << "warning [" << r.stage << "]: " << w << '\n';
  }
}

}  // namespace

MachineFingerprint current_machine() {
  MachineFingerprint m;
  m.cpu_model = read_cpu_model();
  m.hardware_threads = hardware_threads();
  m.physical_cores = physical_cores();
  m.memory_domains = memory_domains().size();
  m.compiler = compiler_id();
#ifdef __OPTIMIZE__
  m.build_flags = "optimized";
#else
  m.build_flags = "unoptimized";
#endif
#ifdef __AVX512F__
  m.build_flags += " avx512f";
#elif defined(__AVX2__)
  m.build_flags += " avx2";
#endif
  return m;
}

nlohmann::json to_json(const BenchmarkReport& r) {
  nlohmann::json j;
  j["schema_version"] = r.schema_version;
  j["config"] = {{"stage", r.stage},       {"kernel", r.kernel},
                 {"layout", r.layout},     {"strategy", r.strategy},
                 {"batch_size", r.batch_size}, {"batch_count", r.batch_count},
                 {"scale", r.scale},       {"workers", r.workers},
                 {"chunk_size", r.chunk_size}, {"placement", r.placement},
                 {"lane_width", r.lane_width}, {"seed", r.seed},
                 {"synth", r.synth},       {"input_path", r.input_path},
                 {"r", r.r},               {"sigma", r.sigma}};
  j["timing"] = {{"kernel_seconds", r.kernel_seconds},
                 {"init_seconds", r.init_seconds},
                 {"batch_seconds", r.batch_seconds},
                 {"min_seconds", r.min_seconds},
                 {"warm_up_excluded", r.warm_up_excluded},
                 {"overhead_seconds", r.overhead_seconds},
                 {"total_seconds", r.total_seconds}};
  j["allocation"] = {{"alloc_count", r.alloc_count},
                     {"sink_alloc_count", r.sink_alloc_count},
                     {"bytes_allocated", r.bytes_allocated},
                     {"copy_bytes", r.copy_bytes},
                     {"checksums", r.checksums}};
  j["metrics"] = {{"throughput", r.throughput},
                  {"effective_bandwidth", r.effective_bandwidth},
                  {"flops_per_option", r.flops_per_option},
                  {"bytes_per_option", r.bytes_per_option},
                  {"arithmetic_intensity", r.arithmetic_intensity},
                  {"machine_bandwidth", optional_json(r.machine_bandwidth)},
                  {"bandwidth_lower_bound", optional_json(r.bandwidth_lower_bound)}};
  if (r.accuracy) {
    const auto& a = *r.accuracy;
    j["accuracy"] = {{"sample_size", a.sample_size},
                     {"max_abs_error", a.max_abs_error},
                     {"max_rel_error", a.max_rel_error},
                     {"bound", a.bound},
                     {"bound_is_relative", a.bound_is_relative},
                     {"passed", a.passed}};
  } else {
    j["accuracy"] = nullptr;
  }
  j["first_touch_paired"] = optional_json(r.first_touch_paired);
  j["warnings"] = r.warnings;
  j["machine"] = {{"cpu_model", r.machine.cpu_model},
                  {"hardware_threads", r.machine.hardware_threads},
                  {"physical_cores", r.machine.physical_cores},
                  {"memory_domains", r.machine.memory_domains},
                  {"compiler", r.machine.compiler},
                  {"build_flags", r.machine.build_flags}};
  return j;
}

BenchmarkReport report_from_json(const nlohmann::json& j) {
  BenchmarkReport r;
  r.schema_version = field<int>(j, "schema_version");
  if (r.schema_version != kReportSchemaVersion) {
    throw ParseError("unsupported report schema version " + std::to_string(r.schema_version), 0);
  }
  const auto& c = field<nlohmann::json>(j, "config");
  r.stage = field<std::string>(c, "stage");
  r.kernel = field<std::string>(c, "kernel");
  r.layout = field<std::string>(c, "layout");
  r.strategy = field<std::string>(c, "strategy");
  r.batch_size = field<std::uint64_t>(c, "batch_size");
  r.batch_count = field<std::uint64_t>(c, "batch_count");
  r.scale = field<double>(c, "scale");
  r.workers = field<std::uint64_t>(c, "workers");
  r.chunk_size = field<std::uint64_t>(c, "chunk_size");
  r.placement = field<std::string>(c, "placement");
  r.lane_width = field<std::uint64_t>(c, "lane_width");
  r.seed = field<std::uint64_t>(c, "seed");
  r.synth = field<std::string>(c, "synth");
  r.input_path = field<std::string>(c, "input_path");
  r.r = field<double>(c, "r");
  r.sigma = field<double>(c, "sigma");

  const auto& t = field<nlohmann::json>(j, "timing");
  r.kernel_seconds = field<std::vector<double>>(t, "kernel_seconds");
  r.init_seconds = field<std::vector<double>>(t, "init_seconds");
  r.batch_seconds = field<std::vector<double>>(t, "batch_seconds");
  r.min_seconds = field<double>(t, "min_seconds");
  r.warm_up_excluded = field<bool>(t, "warm_up_excluded");
  r.overhead_seconds = field<double>(t, "overhead_seconds");
  r.total_seconds = field<double>(t, "total_seconds");

  const auto& a = field<nlohmann::json>(j, "allocation");
  r.alloc_count = field<std::uint64_t>(a, "alloc_count");
  r.sink_alloc_count = field<std::uint64_t>(a, "sink_alloc_count");
  r.bytes_allocated = field<std::uint64_t>(a, "bytes_allocated");
  r.copy_bytes = field<std::uint64_t>(a, "copy_bytes");
  r.checksums = field<std::vector<double>>(a, "checksums");

  const auto& m = field<nlohmann::json>(j, "metrics");
  r.throughput = field<double>(m, "throughput");
  r.effective_bandwidth = field<double>(m, "effective_bandwidth");
  r.flops_per_option = field<double>(m, "flops_per_option");
  r.bytes_per_option = field<double>(m, "bytes_per_option");
  r.arithmetic_intensity = field<double>(m, "arithmetic_intensity");
  r.machine_bandwidth = optional_field<double>(m, "machine_bandwidth");
  r.bandwidth_lower_bound = optional_field<double>(m, "bandwidth_lower_bound");

  if (j.contains("accuracy") && !j.at("accuracy").is_null()) {
    const auto& acc = j.at("accuracy");
    AccuracySummary s;
    s.sample_size = field<std::uint64_t>(acc, "sample_size");
    s.max_abs_error = field<double>(acc, "max_abs_error");
    s.max_rel_error = field<double>(acc, "max_rel_error");
    s.bound = field<double>(acc, "bound");
    s.bound_is_relative = field<bool>(acc, "bound_is_relative");
    s.passed = field<bool>(acc, "passed");
    r.accuracy = s;
  }
  r.first_touch_paired = optional_field<bool>(j, "first_touch_paired");
  r.warnings = field<std::vector<std::string>>(j, "warnings");

  const auto& mf = field<nlohmann::json>(j, "machine");
  r.machine.cpu_model = field<std::string>(mf, "cpu_model");
  r.machine.hardware_threads = field<std::uint64_t>(mf, "hardware_threads");
  r.machine.physical_cores = field<std::uint64_t>(mf, "physical_cores");
  r.machine.memory_domains = field<std::uint64_t>(mf, "memory_domains");
  r.machine.compiler = field<std::string>(mf, "compiler");
  r.machine.build_flags = field<std::string>(mf, "build_flags");
  return r;
}

std::string_view to_string(ReportFormat f) noexcept {
  switch (f) {
    case ReportFormat::Json:
      return "json";
    case ReportFormat::Csv:
      return "csv";
    case ReportFormat::Human:
      return "human";
  }
  return "unknown";
}

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
  for (auto f : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Human}) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

std::span<const std::string_view> csv_columns() noexcept { return kCsvColumns; }

void emit_report(std::span<const BenchmarkReport> reports, ReportFormat format, std::ostream& out) {
  if (reports.empty()) throw ConfigError("no reports to emit");
  switch (format) {
    case ReportFormat::Json: {
      nlohmann::json doc;
      doc["schema_version"] = kReportSchemaVersion;
      doc["reports"] = nlohmann::json::array();
      for (const auto& r : reports) doc["reports"].push_back(to_json(r));
      out << doc.dump(2) << '\n';
      break;
    }
    case ReportFormat::Csv:
      emit_csv(reports, out);
      break;
    case ReportFormat::Human:
      emit_human(reports, out);
      break;
  }
  if (!out) throw IoError("failed to write report");
}

void emit_report(std::span<const BenchmarkReport> reports, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  emit_report(reports, format, out);
  out.flush();
  if (!out) throw IoError("failed to write " + path.string());
}

}  // namespace bsopt
