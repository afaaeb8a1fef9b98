#include "bsopt/partition.hpp"

#include <algorithm>
#include <string>

#include "bsopt/error.hpp"

namespace bsopt {

ChunkPartition::ChunkPartition(std::size_t n, std::size_t worker_count, std::vector<Chunk> chunks)
    : n_(n), worker_count_(worker_count), chunks_(std::move(chunks)) {}

void ChunkPartition::validate() const {
  if (worker_count_ == 0) throw StructuralError("partition has no workers");
  std::vector<Chunk> sorted = chunks_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Chunk& a, const Chunk& b) { return a.begin < b.begin; });
  std::size_t next = 0;
  for (const Chunk& c : sorted) {
    if (c.begin > c.end) {
      throw StructuralError("chunk [" + std::to_string(c.begin) + ", " + std::to_string(c.end) +
                            ") is reversed");
    }
    if (c.begin < next) {
      throw StructuralError("chunks overlap at index " + std::to_string(c.begin));
    }
    if (c.begin > next) {
      throw StructuralError("gap in partition at [" + std::to_string(next) + ", " +
                            std::to_string(c.begin) + ")");
    }
    if (c.worker >= worker_count_) {
      throw StructuralError("chunk assigned to worker " + std::to_string(c.worker) + " of " +
                            std::to_string(worker_count_));
    }
    next = c.end;
  }
  if (next != n_) {
    throw StructuralError("partition ends at " + std::to_string(next) + ", expected " +
                          std::to_string(n_));
  }
}

ChunkPartition make_partition(std::size_t n, const ExecConfig& cfg) {
  if (cfg.worker_count == 0) throw ConfigError("worker_count must be positive");
  if (cfg.chunk_size && *cfg.chunk_size == 0) throw ConfigError("chunk_size must be positive");

  std::vector<Chunk> chunks;
  if (!cfg.chunk_size) {
    const std::size_t parts = std::min(n, cfg.worker_count);
    if (parts > 0) {
      const std::size_t base = n / parts;
      const std::size_t extra = n % parts;
      std::size_t begin = 0;
      for (std::size_t w = 0; w < parts; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        chunks.push_back({begin, begin + len, w});
        begin += len;
      }
    }
  } else {
    const std::size_t step = *cfg.chunk_size;
    std::size_t j = 0;
    for (std::size_t begin = 0; begin < n; begin += step, ++j) {
      chunks.push_back({begin, std::min(n, begin + step), j % cfg.worker_count});
    }
  }
  return ChunkPartition(n, cfg.worker_count, std::move(chunks));
}

}  // namespace bsopt
