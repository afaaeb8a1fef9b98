#include "bsopt/timing.hpp"

#include <algorithm>

namespace bsopt {

TimingSummary summarize_batches(std::span<const double> per_batch_seconds) {
  TimingSummary out;
  if (per_batch_seconds.empty()) return out;
  out.warm_up_excluded = per_batch_seconds.size() >= 2;
  out.first_included = out.warm_up_excluded ? 1 : 0;
  const auto included = per_batch_seconds.subspan(out.first_included);
  out.min_seconds = *std::min_element(included.begin(), included.end());
  return out;
}

}  // namespace bsopt
