#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "concord/partition.hpp"

namespace concord {

// Result of a consensus solver: the fused partition, the per-iteration
// objective values of the winning restart, and diagnostics. For outlier-aware
// methods the outlier points are listed here and carry missing_label in the
// partition.
struct consensus_outcome {
  partition result;
  std::vector<double> objective_trace;
  std::optional<std::vector<std::int32_t>> outliers;
  std::uint64_t seed = 0;
  int empty_cluster_repairs = 0;

  double final_objective() const {
    return objective_trace.empty() ? 0.0 : objective_trace.back();
  }
};

}  // namespace concord
