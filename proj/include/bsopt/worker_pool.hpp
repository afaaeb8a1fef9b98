#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bsopt/partition.hpp"

namespace bsopt {

inline constexpr int kNoWorker = -1;

// Id of the pool worker running the calling thread, kNoWorker elsewhere.
int current_worker_id() noexcept;

// Records which worker executed each chunk during initialization and during
// pricing. Indexed by chunk; each slot is written by exactly one worker.
struct ChunkTrace {
  std::vector<int> init_worker;
  std::vector<int> price_worker;

  void reset(std::size_t chunk_count);
  // True when every chunk was priced by the worker that initialized it.
  bool paired() const;
};

// CPU sets of the machine's memory domains, read from sysfs. Falls back to a
// single domain holding every CPU this process may run on.
std::vector<std::vector<int>> memory_domains();

// Fixed set of worker threads that execute a ChunkPartition statically: the
// chunks assigned to worker w always run on thread w. The caller blocks in
// run() until every chunk is done. Not reentrant.
class WorkerPool {
 public:
  using ChunkFn = std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>;

  explicit WorkerPool(std::size_t worker_count, Placement placement = Placement::None);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const noexcept { return threads_.size(); }
  Placement placement() const noexcept { return placement_; }

  // Pinning problems; empty when placement is None or pinning succeeded.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Runs fn on every chunk. Rethrows the first exception raised by a chunk.
  void run(const ChunkPartition& partition, const ChunkFn& fn);

 private:
  void worker_loop(std::size_t id);

  Placement placement_;
  std::vector<std::thread> threads_;
  std::vector<std::string> warnings_;

  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;
  const ChunkPartition* partition_ = nullptr;
  const ChunkFn* fn_ = nullptr;
  std::exception_ptr error_;
};

}  // namespace bsopt
