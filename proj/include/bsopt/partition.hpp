#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace bsopt {

enum class Placement { None, SpreadAcrossDomains };

struct ExecConfig {
  std::size_t worker_count = 1;
  // nullopt means "auto": one contiguous chunk per worker.
  std::optional<std::size_t> chunk_size;
  Placement placement = Placement::None;
};

struct Chunk {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open
  std::size_t worker = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const Chunk&) const = default;
};

// Static assignment of contiguous index ranges to workers. The same partition
// is used to initialize a batch and to price it, so each worker touches first
// the pages it later computes on.
class ChunkPartition {
 public:
  ChunkPartition() = default;
  ChunkPartition(std::size_t n, std::size_t worker_count, std::vector<Chunk> chunks);

  std::size_t element_count() const noexcept { return n_; }
  std::size_t worker_count() const noexcept { return worker_count_; }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  std::size_t chunk_count() const noexcept { return chunks_.size(); }

  // Throws StructuralError unless the chunks are disjoint, cover [0, n) and
  // name workers below worker_count.
  void validate() const;

  bool operator==(const ChunkPartition&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t worker_count_ = 1;
  std::vector<Chunk> chunks_;
};

// Pure function of (n, cfg). With an automatic chunk size the sizes differ by
// at most one and the larger chunks come first; with an explicit chunk size,
// chunk j goes to worker j % worker_count. Throws ConfigError for zero workers
// or a zero chunk size.
ChunkPartition make_partition(std::size_t n, const ExecConfig& cfg);

}  // namespace bsopt
