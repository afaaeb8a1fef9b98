#include "bsopt/worker_pool.hpp"

#include <pthread.h>
#include <sched.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bsopt/error.hpp"

namespace bsopt {

namespace {

thread_local int t_worker_id = kNoWorker;

// Parses sysfs cpulist syntax, e.g. "0-3,8,10-11".
std::vector<int> parse_cpulist(const std::string& text) {
  std::vector<int> cpus;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item == "\n") continue;
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        cpus.push_back(std::stoi(item));
      } else {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        for (int c = lo; c <= hi; ++c) cpus.push_back(c);
      }
    } catch (const std::exception&) {
      return {};
    }
  }
  return cpus;
}

std::vector<int> allowed_cpus() {
  std::vector<int> cpus;
  cpu_set_t set;
  CPU_ZERO(&set);
  if (sched_getaffinity(0, sizeof(set), &set) == 0) {
    for (int c = 0; c < CPU_SETSIZE; ++c) {
      if (CPU_ISSET(c, &set)) cpus.push_back(c);
    }
  }
  return cpus;
}

}  // namespace

int current_worker_id() noexcept { return t_worker_id; }

void ChunkTrace::reset(std::size_t chunk_count) {
  init_worker.assign(chunk_count, kNoWorker);
  price_worker.assign(chunk_count, kNoWorker);
}

bool ChunkTrace::paired() const {
  if (init_worker.size() != price_worker.size()) return false;
  for (std::size_t j = 0; j < init_worker.size(); ++j) {
    if (init_worker[j] == kNoWorker || init_worker[j] != price_worker[j]) return false;
  }
  return true;
}

std::vector<std::vector<int>> memory_domains() {
  namespace fs = std::filesystem;
  std::vector<std::vector<int>> domains;
  const fs::path root = "/sys/devices/system/node";
  std::error_code ec;
  if (fs::is_directory(root, ec)) {
    std::vector<fs::path> nodes;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("node", 0) == 0 && name.size() > 4 &&
          std::all_of(name.begin() + 4, name.end(), ::isdigit)) {
        nodes.push_back(entry.path());
      }
    }
    std::sort(nodes.begin(), nodes.end(), [](const fs::path& a, const fs::path& b) {
      return std::stoi(a.filename().string().substr(4)) < std::stoi(b.filename().string().substr(4));
    });
    const std::vector<int> allowed = allowed_cpus();
    for (const auto& node : nodes) {
      std::ifstream in(node / "cpulist");
      std::string text;
      std::getline(in, text);
      std::vector<int> cpus = parse_cpulist(text);
      if (!allowed.empty()) {
        std::erase_if(cpus, [&](int c) {
          return std::find(allowed.begin(), allowed.end(), c) == allowed.end();
        });
      }
      if (!cpus.empty()) domains.push_back(std::move(cpus));
    }
  }
  if (domains.empty()) {
    std::vector<int> all = allowed_cpus();
    if (!all.empty()) domains.push_back(std::move(all));
  }
  return domains;
}

WorkerPool::WorkerPool(std::size_t worker_count, Placement placement) : placement_(placement) {
  if (worker_count == 0) throw ConfigError("worker pool needs at least one worker");
  if (placement == Placement::SpreadAcrossDomains) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (worker_count > hw) {
      throw ConfigError("placement 'spread' allows at most " + std::to_string(hw) +
                        " workers, got " + std::to_string(worker_count));
    }
  }

  threads_.reserve(worker_count);
  for (std::size_t id = 0; id < worker_count; ++id) {
    threads_.emplace_back([this, id] { worker_loop(id); });
  }

  if (placement == Placement::SpreadAcrossDomains) {
    const auto domains = memory_domains();
    if (domains.empty()) {
      warnings_.push_back("no memory domain information; workers left unpinned");
      return;
    }
    for (std::size_t id = 0; id < threads_.size(); ++id) {
      const auto& cpus = domains[id % domains.size()];
      cpu_set_t set;
      CPU_ZERO(&set);
      for (int c : cpus) CPU_SET(c, &set);
      const int rc = pthread_setaffinity_np(threads_[id].native_handle(), sizeof(set), &set);
      if (rc != 0) {
        warnings_.push_back("failed to pin worker " + std::to_string(id) + " (error " +
                            std::to_string(rc) + ")");
      }
    }
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(const ChunkPartition& partition, const ChunkFn& fn) {
  if (partition.worker_count() > threads_.size()) {
    throw ConfigError("partition expects " + std::to_string(partition.worker_count()) +
                      " workers but the pool has " + std::to_string(threads_.size()));
  }
  std::unique_lock lock(mutex_);
  partition_ = &partition;
  fn_ = &fn;
  error_ = nullptr;
  pending_ = threads_.size();
  ++generation_;
  wake_.notify_all();
  done_.wait(lock, [this] { return pending_ == 0; });
  partition_ = nullptr;
  fn_ = nullptr;
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

void WorkerPool::worker_loop(std::size_t id) {
  t_worker_id = static_cast<int>(id);
  std::size_t seen = 0;
  for (;;) {
    const ChunkPartition* partition;
    const ChunkFn* fn;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
      partition = partition_;
      fn = fn_;
    }

    std::exception_ptr failure;
    try {
      const auto& chunks = partition->chunks();
      for (std::size_t j = 0; j < chunks.size(); ++j) {
        if (chunks[j].worker == id) (*fn)(j, chunks[j].begin, chunks[j].end);
      }
    } catch (...) {
      failure = std::current_exception();
    }

    std::lock_guard lock(mutex_);
    if (failure && !error_) error_ = failure;
    if (--pending_ == 0) done_.notify_one();
  }
}

}  // namespace bsopt
