#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>

#include "bsopt/batch.hpp"

namespace bsopt {

enum class SynthMode { Constant, Uniform };
enum class InputFormat { Csv, Bin };

std::string_view to_string(SynthMode m) noexcept;
std::optional<SynthMode> parse_synth_mode(std::string_view text) noexcept;
std::string_view to_string(InputFormat f) noexcept;
std::optional<InputFormat> parse_input_format(std::string_view text) noexcept;

// Canonical option used by constant fills.
inline constexpr float kCanonicalT = 3.0f;
inline constexpr float kCanonicalS0 = 100.0f;
inline constexpr float kCanonicalK = 100.0f;

// Ranges of uniform synthetic data.
inline constexpr float kUniformPriceLo = 50.0f;
inline constexpr float kUniformPriceHi = 200.0f;
inline constexpr float kUniformTLo = 0.25f;
inline constexpr float kUniformTHi = 10.0f;

// Fill for synthetic batches. Uniform values are a pure function of
// (seed, element index), so any partition produces the same contents.
BatchFill synth_fill(std::uint64_t seed, SynthMode mode);

OptionBatchSoA synth_batch(std::size_t n, std::uint64_t seed, SynthMode mode);

// Fill that replays the inputs of an existing batch.
BatchFill copy_fill(std::shared_ptr<const OptionBatchSoA> source);

// Binary layout (little-endian):
//   bytes 0..7   magic "BSOPTBIN"
//   bytes 8..15  element count, uint64
//   then count records of three float32: s0, k, t
inline constexpr std::array<char, 8> kBinaryMagic = {'B', 'S', 'O', 'P', 'T', 'B', 'I', 'N'};

// CSV layout: a header naming the columns s0, k and t (any order), then one
// option per line. Blank lines are ignored; an empty file is an empty batch.
//
// Both readers throw ParseError (line number, or byte offset for binary) on
// malformed input and ValidationError listing every unpriceable element.
// c is zeroed.
OptionBatchSoA read_csv(std::istream& in);
OptionBatchSoA read_bin(std::istream& in);
OptionBatchSoA load_batch(const std::filesystem::path& path, InputFormat format);

void write_csv(std::ostream& out, const OptionBatchSoA& batch);
void write_bin(std::ostream& out, const OptionBatchSoA& batch);
void save_batch(const std::filesystem::path& path, const OptionBatchSoA& batch, InputFormat format);

}  // namespace bsopt
