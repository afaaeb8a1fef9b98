#include "bsopt/batch.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "bsopt/error.hpp"
#include "bsopt/market.hpp"
#include "bsopt/worker_pool.hpp"

namespace bsopt {

namespace detail {
void AlignedFree::operator()(void* p) const noexcept { std::free(p); }
}  // namespace detail

void* aligned_allocate(std::size_t bytes) {
  const std::size_t rounded = (bytes + kBatchAlignment - 1) / kBatchAlignment * kBatchAlignment;
  if (rounded < bytes) {
    throw ResourceError("allocation size overflow", bytes);
  }
  void* p = std::aligned_alloc(kBatchAlignment, rounded);
  if (p == nullptr) {
    throw ResourceError("failed to allocate " + std::to_string(bytes) + " bytes", bytes);
  }
  return p;
}

namespace {

constexpr std::size_t kFloatsPerLine = kBatchAlignment / sizeof(float);

std::size_t padded(std::size_t n) { return (n + kFloatsPerLine - 1) / kFloatsPerLine * kFloatsPerLine; }

template <class Batch>
std::vector<std::size_t> invalid_indices(const Batch& batch, auto&& get) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto [s0, k, t] = get(i);
    if (!is_priceable(s0, k, t)) bad.push_back(i);
  }
  return bad;
}

template <class Batch>
void init_impl(Batch& batch, const ChunkPartition& partition, const BatchFill& fill,
               WorkerPool* pool, ChunkTrace* trace) {
  if (partition.element_count() != batch.size()) {
    throw StructuralError("partition covers " + std::to_string(partition.element_count()) +
                          " elements but batch holds " + std::to_string(batch.size()));
  }
  partition.validate();
  if (trace != nullptr) trace->reset(partition.chunk_count());

  const OptionColumns cols = batch.columns();
  auto run_chunk = [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    fill(begin, end, cols);
    if (trace != nullptr) trace->init_worker[chunk] = current_worker_id();
  };
  if (pool != nullptr) {
    pool->run(partition, run_chunk);
  } else {
    const auto& chunks = partition.chunks();
    for (std::size_t j = 0; j < chunks.size(); ++j) run_chunk(j, chunks[j].begin, chunks[j].end);
  }
  batch.set_first_touch_partition(partition);
}

}  // namespace

OptionBatchSoA::OptionBatchSoA(std::size_t n)
    : storage_(4 * padded(n)), n_(n), stride_(padded(n)) {}

OptionColumns OptionBatchSoA::columns() noexcept {
  return {column(0), column(1), column(2), column(3), 1};
}

OptionBatchSoA OptionBatchSoA::clone() const {
  OptionBatchSoA out(n_);
  if (n_ != 0) std::memcpy(out.storage_.data(), storage_.data(), 4 * stride_ * sizeof(float));
  out.first_touch_ = first_touch_;
  return out;
}

OptionBatchAoS::OptionBatchAoS(std::size_t n) : records_(n) {}

OptionColumns OptionBatchAoS::columns() noexcept {
  OptionRecord* r = records_.data();
  if (r == nullptr) return {nullptr, nullptr, nullptr, nullptr, 4};
  return {&r->t, &r->s0, &r->k, &r->c, 4};
}

OptionBatchAoS OptionBatchAoS::clone() const {
  OptionBatchAoS out(size());
  if (size() != 0) std::memcpy(out.records_.data(), records_.data(), size() * sizeof(OptionRecord));
  out.first_touch_ = first_touch_;
  return out;
}

OptionBatchAoS soa_to_aos(const OptionBatchSoA& batch) {
  OptionBatchAoS out(batch.size());
  auto rec = out.records();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    rec[i] = {batch.t()[i], batch.s0()[i], batch.k()[i], batch.c()[i]};
  }
  return out;
}

OptionBatchSoA aos_to_soa(const OptionBatchAoS& batch) {
  OptionBatchSoA out(batch.size());
  const auto rec = batch.records();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.t()[i] = rec[i].t;
    out.s0()[i] = rec[i].s0;
    out.k()[i] = rec[i].k;
    out.c()[i] = rec[i].c;
  }
  return out;
}

std::vector<std::size_t> validate_batch(const OptionBatchSoA& batch) {
  return invalid_indices(batch, [&](std::size_t i) {
    return std::tuple{batch.s0()[i], batch.k()[i], batch.t()[i]};
  });
}

std::vector<std::size_t> validate_batch(const OptionBatchAoS& batch) {
  const auto rec = batch.records();
  return invalid_indices(batch, [&](std::size_t i) {
    return std::tuple{rec[i].s0, rec[i].k, rec[i].t};
  });
}

BatchFill constant_fill(float t0, float s00, float k0) {
  return [=](std::size_t begin, std::size_t end, OptionColumns out) {
    const std::size_t s = out.stride;
    for (std::size_t i = begin; i < end; ++i) {
      out.t[i * s] = t0;
      out.s0[i * s] = s00;
      out.k[i * s] = k0;
      out.c[i * s] = 0.0f;
    }
  };
}

void init_batch(OptionBatchSoA& batch, const ChunkPartition& partition, const BatchFill& fill,
                WorkerPool* pool, ChunkTrace* trace) {
  init_impl(batch, partition, fill, pool, trace);
}

void init_batch(OptionBatchSoA& batch, float t0, float s00, float k0,
                const ChunkPartition& partition, WorkerPool* pool, ChunkTrace* trace) {
  init_impl(batch, partition, constant_fill(t0, s00, k0), pool, trace);
}

void init_batch(OptionBatchAoS& batch, const ChunkPartition& partition, const BatchFill& fill,
                WorkerPool* pool, ChunkTrace* trace) {
  init_impl(batch, partition, fill, pool, trace);
}

}  // namespace bsopt
