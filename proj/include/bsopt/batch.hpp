#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bsopt/partition.hpp"

namespace bsopt {

class WorkerPool;
struct ChunkTrace;

// Every array the containers hand out starts on this boundary, which covers
// the widest lane group (16 floats) the lanes kernel processes.
inline constexpr std::size_t kBatchAlignment = 64;

// Bytes of memory traffic per option: three input floats and one output.
inline constexpr std::size_t kBytesPerOption = 4 * sizeof(float);

namespace detail {
struct AlignedFree {
  void operator()(void* p) const noexcept;
};
}  // namespace detail

// Uninitialized, kBatchAlignment-aligned storage. Pages are not touched on
// allocation so the first writer decides their placement.
template <class T>
class AlignedArray {
 public:
  AlignedArray() = default;
  explicit AlignedArray(std::size_t count);

  T* data() noexcept { return data_.get(); }
  const T* data() const noexcept { return data_.get(); }
  std::size_t size() const noexcept { return count_; }

 private:
  std::unique_ptr<T, detail::AlignedFree> data_;
  std::size_t count_ = 0;
};

// Raw aligned allocation; throws ResourceError with the byte count on failure.
void* aligned_allocate(std::size_t bytes);

template <class T>
AlignedArray<T>::AlignedArray(std::size_t count)
    : data_(count == 0 ? nullptr : static_cast<T*>(aligned_allocate(count * sizeof(T)))),
      count_(count) {}

// Strided view of the four per-option fields, used by fill callbacks so one
// routine can initialize either layout. Element i of field f lives at
// f[i * stride].
struct OptionColumns {
  float* t;
  float* s0;
  float* k;
  float* c;
  std::size_t stride;
};

// Writes elements [begin, end) through the columns view.
using BatchFill = std::function<void(std::size_t begin, std::size_t end, OptionColumns out)>;

// Structure of arrays: four separate stride-1 float arrays carved out of a
// single allocation. t, s0 and k are inputs; c is written by the kernels.
class OptionBatchSoA {
 public:
  OptionBatchSoA() = default;
  // Allocates n elements, contents unspecified.
  explicit OptionBatchSoA(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<float> t() noexcept { return {column(0), n_}; }
  std::span<float> s0() noexcept { return {column(1), n_}; }
  std::span<float> k() noexcept { return {column(2), n_}; }
  std::span<float> c() noexcept { return {column(3), n_}; }
  std::span<const float> t() const noexcept { return {column(0), n_}; }
  std::span<const float> s0() const noexcept { return {column(1), n_}; }
  std::span<const float> k() const noexcept { return {column(2), n_}; }
  std::span<const float> c() const noexcept { return {column(3), n_}; }

  OptionColumns columns() noexcept;

  // Partition used by the last init_batch, if any. A batch without one is
  // placement-agnostic.
  const std::optional<ChunkPartition>& first_touch_partition() const noexcept {
    return first_touch_;
  }
  void set_first_touch_partition(std::optional<ChunkPartition> p) { first_touch_ = std::move(p); }

  OptionBatchSoA clone() const;

 private:
  float* column(std::size_t idx) const noexcept {
    return n_ == 0 ? nullptr : const_cast<float*>(storage_.data()) + idx * stride_;
  }

  AlignedArray<float> storage_;
  std::size_t n_ = 0;
  std::size_t stride_ = 0;  // padded column length in floats
  std::optional<ChunkPartition> first_touch_;
};

struct OptionRecord {
  float t;
  float s0;
  float k;
  float c;
};
static_assert(sizeof(OptionRecord) == 4 * sizeof(float));

// Array of structures: one 16-byte record per option.
class OptionBatchAoS {
 public:
  OptionBatchAoS() = default;
  explicit OptionBatchAoS(std::size_t n);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.size() == 0; }

  std::span<OptionRecord> records() noexcept { return {records_.data(), records_.size()}; }
  std::span<const OptionRecord> records() const noexcept {
    return {records_.data(), records_.size()};
  }

  OptionColumns columns() noexcept;

  const std::optional<ChunkPartition>& first_touch_partition() const noexcept {
    return first_touch_;
  }
  void set_first_touch_partition(std::optional<ChunkPartition> p) { first_touch_ = std::move(p); }

  OptionBatchAoS clone() const;

 private:
  AlignedArray<OptionRecord> records_;
  std::optional<ChunkPartition> first_touch_;
};

OptionBatchAoS soa_to_aos(const OptionBatchSoA& batch);
OptionBatchSoA aos_to_soa(const OptionBatchAoS& batch);

// Indices of elements that are not priceable (non-finite or non-positive
// s0, k or t), in ascending order. Empty means the batch may be priced.
std::vector<std::size_t> validate_batch(const OptionBatchSoA& batch);
std::vector<std::size_t> validate_batch(const OptionBatchAoS& batch);

// Fills every chunk of the partition. With a pool, chunk j runs on the worker
// the partition assigns it to, which is the worker that later prices it when
// the same partition is reused. Without a pool the chunks run on the caller.
// Records the partition on the batch and the executing workers in trace.
// Throws StructuralError if the partition does not exactly cover the batch.
void init_batch(OptionBatchSoA& batch, const ChunkPartition& partition, const BatchFill& fill,
                WorkerPool* pool = nullptr, ChunkTrace* trace = nullptr);

// Constant fill: t = t0, s0 = s00, k = k0, c = 0 everywhere.
void init_batch(OptionBatchSoA& batch, float t0, float s00, float k0,
                const ChunkPartition& partition, WorkerPool* pool = nullptr,
                ChunkTrace* trace = nullptr);

void init_batch(OptionBatchAoS& batch, const ChunkPartition& partition, const BatchFill& fill,
                WorkerPool* pool = nullptr, ChunkTrace* trace = nullptr);

BatchFill constant_fill(float t0, float s00, float k0);

}  // namespace bsopt
