#include "bsopt/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bsopt/error.hpp"

namespace bsopt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform in [lo, hi] from 24 random bits.
float uniform_at(std::uint64_t seed, std::uint64_t index, std::uint64_t field, float lo, float hi) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(index * 3 + field));
  const float u = static_cast<float>(h >> 40) * 0x1.0p-24f;
  return std::min(hi, lo + (hi - lo) * u);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

float parse_float(const std::string& field, std::size_t line) {
  float v = 0.0f;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line) + ": '" + field + "' is not a number", line);
  }
  return v;
}

void require_valid(const OptionBatchSoA& batch, auto&& describe) {
  const auto bad = validate_batch(batch);
  if (bad.empty()) return;
  std::string msg = "invalid options at ";
  for (std::size_t i = 0; i < bad.size() && i < 20; ++i) {
    if (i != 0) msg += ", ";
    msg += describe(bad[i]);
  }
  if (bad.size() > 20) msg += " and " + std::to_string(bad.size() - 20) + " more";
  throw ValidationError(msg, bad);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  out.write(b, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

std::string_view to_string(SynthMode m) noexcept {
  return m == SynthMode::Constant ? "constant" : "uniform";
}

std::optional<SynthMode> parse_synth_mode(std::string_view text) noexcept {
  if (text == "constant") return SynthMode::Constant;
  if (text == "uniform") return SynthMode::Uniform;
  return std::nullopt;
}

std::string_view to_string(InputFormat f) noexcept { return f == InputFormat::Csv ? "csv" : "bin"; }

std::optional<InputFormat> parse_input_format(std::string_view text) noexcept {
  if (text == "csv") return InputFormat::Csv;
  if (text == "bin") return InputFormat::Bin;
  return std::nullopt;
}

BatchFill synth_fill(std::uint64_t seed, SynthMode mode) {
  if (mode == SynthMode::Constant) return constant_fill(kCanonicalT, kCanonicalS0, kCanonicalK);
  return [seed](std::size_t begin, std::size_t end, OptionColumns out) {
    const std::size_t s = out.stride;
    for (std::size_t i = begin; i < end; ++i) {
      out.s0[i * s] = uniform_at(seed, i, 0, kUniformPriceLo, kUniformPriceHi);
      out.k[i * s] = uniform_at(seed, i, 1, kUniformPriceLo, kUniformPriceHi);
      out.t[i * s] = uniform_at(seed, i, 2, kUniformTLo, kUniformTHi);
      out.c[i * s] = 0.0f;
    }
  };
}

OptionBatchSoA synth_batch(std::size_t n, std::uint64_t seed, SynthMode mode) {
  OptionBatchSoA batch(n);
  init_batch(batch, make_partition(n, {}), synth_fill(seed, mode));
  batch.set_first_touch_partition(std::nullopt);
  return batch;
}

BatchFill copy_fill(std::shared_ptr<const OptionBatchSoA> source) {
  return [src = std::move(source)](std::size_t begin, std::size_t end, OptionColumns out) {
    if (end > src->size()) throw StructuralError("source batch is shorter than the fill range");
    const std::size_t s = out.stride;
    for (std::size_t i = begin; i < end; ++i) {
      out.t[i * s] = src->t()[i];
      out.s0[i * s] = src->s0()[i];
      out.k[i * s] = src->k()[i];
      out.c[i * s] = 0.0f;
    }
  };
}

OptionBatchSoA read_csv(std::istream& in) {
  std::vector<float> t, s0, k;
  std::vector<std::size_t> line_of;
  int col_s0 = -1, col_k = -1, col_t = -1;
  bool have_header = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      if (fields.size() != 3) {
        throw ParseError("line " + std::to_string(line_no) +
                             ": header must name exactly the columns s0, k, t",
                         line_no);
      }
      for (int c = 0; c < 3; ++c) {
        std::string name = fields[c];
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        int* slot = name == "s0" ? &col_s0 : name == "k" ? &col_k : name == "t" ? &col_t : nullptr;
        if (slot == nullptr || *slot != -1) {
          throw ParseError("line " + std::to_string(line_no) + ": unexpected header column '" +
                               fields[c] + "'",
                           line_no);
        }
        *slot = c;
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    s0.push_back(parse_float(fields[col_s0], line_no));
    k.push_back(parse_float(fields[col_k], line_no));
    t.push_back(parse_float(fields[col_t], line_no));
    line_of.push_back(line_no);
  }
  if (in.bad()) throw IoError("read error");

  OptionBatchSoA batch(t.size());
  std::copy(t.begin(), t.end(), batch.t().begin());
  std::copy(s0.begin(), s0.end(), batch.s0().begin());
  std::copy(k.begin(), k.end(), batch.k().begin());
  std::fill(batch.c().begin(), batch.c().end(), 0.0f);
  require_valid(batch, [&](std::size_t i) { return "line " + std::to_string(line_of[i]); });
  return batch;
}

OptionBatchSoA read_bin(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() == 0) return OptionBatchSoA(0);
  if (in.gcount() != 8 || magic != kBinaryMagic) throw ParseError("bad magic", 0);

  unsigned char count_bytes[8];
  in.read(reinterpret_cast<char*>(count_bytes), 8);
  if (in.gcount() != 8) throw ParseError("truncated header", 8 + static_cast<std::size_t>(in.gcount()));
  const std::uint64_t count = static_cast<std::uint64_t>(get_u32(count_bytes)) |
                              static_cast<std::uint64_t>(get_u32(count_bytes + 4)) << 32;
  constexpr std::size_t kRecord = 3 * sizeof(float);
  if (count > (std::uint64_t{1} << 40)) throw ParseError("implausible element count", 8);

  OptionBatchSoA batch(static_cast<std::size_t>(count));
  std::vector<unsigned char> buf(kRecord * 4096);
  std::size_t i = 0;
  while (i < count) {
    const std::size_t chunk = std::min<std::size_t>(4096, count - i);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(chunk * kRecord));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != chunk * kRecord) {
      throw ParseError("truncated payload: expected " + std::to_string(count) + " records",
                       16 + i * kRecord + got);
    }
    for (std::size_t j = 0; j < chunk; ++j) {
      const unsigned char* p = buf.data() + j * kRecord;
      batch.s0()[i + j] = std::bit_cast<float>(get_u32(p));
      batch.k()[i + j] = std::bit_cast<float>(get_u32(p + 4));
      batch.t()[i + j] = std::bit_cast<float>(get_u32(p + 8));
      batch.c()[i + j] = 0.0f;
    }
    i += chunk;
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError("trailing bytes after payload", 16 + count * kRecord);
  }
  require_valid(batch, [](std::size_t i) { return "record " + std::to_string(i); });
  return batch;
}

OptionBatchSoA load_batch(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return format == InputFormat::Csv ? read_csv(in) : read_bin(in);
}

void write_csv(std::ostream& out, const OptionBatchSoA& batch) {
  out << "s0,k,t\n";
  char buf[64];
  auto put = [&](float v, char sep) {
    // Shortest representation that reads back to the same float.
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, end - buf);
    out.put(sep);
  };
  for (std::size_t i = 0; i < batch.size(); ++i) {
    put(batch.s0()[i], ',');
    put(batch.k()[i], ',');
    put(batch.t()[i], '\n');
  }
}

void write_bin(std::ostream& out, const OptionBatchSoA& batch) {
  out.write(kBinaryMagic.data(), kBinaryMagic.size());
  const std::uint64_t n = batch.size();
  put_u32(out, static_cast<std::uint32_t>(n));
  put_u32(out, static_cast<std::uint32_t>(n >> 32));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    put_u32(out, std::bit_cast<std::uint32_t>(batch.s0()[i]));
    put_u32(out, std::bit_cast<std::uint32_t>(batch.k()[i]));
    put_u32(out, std::bit_cast<std::uint32_t>(batch.t()[i]));
  }
}

void save_batch(const std::filesystem::path& path, const OptionBatchSoA& batch,
                InputFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (format == InputFormat::Csv) {
    write_csv(out, batch);
  } else {
    write_bin(out, batch);
  }
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace bsopt
