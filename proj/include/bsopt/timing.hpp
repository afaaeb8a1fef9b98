#pragma once

#include <chrono>
#include <cstddef>
#include <span>

namespace bsopt {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  void restart() { start_ = std::chrono::steady_clock::now(); }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Result of the min-over-batches rule: the first batch is a warm-up and is
// dropped whenever there are at least two; the reported time is the minimum
// of the remaining ones.
struct TimingSummary {
  double min_seconds = 0.0;
  std::size_t first_included = 0;  // index of the first batch considered
  bool warm_up_excluded = false;
};

// Empty input yields a zero summary.
TimingSummary summarize_batches(std::span<const double> per_batch_seconds);

}  // namespace bsopt
