#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "concord/errors.hpp"

namespace concord {

// Sentinel for points a basic partition does not cover. Labels are 0-based
// in memory; external CSV files use 1-based labels with 0 meaning missing.
inline constexpr std::int32_t missing_label = -1;

// Cluster labels for n points. Immutable after construction.
class partition {
 public:
  partition(std::vector<std::int32_t> labels, std::int32_t k)
      : labels_(std::move(labels)), k_(k) {
    if (labels_.empty()) throw error("partition: no points");
    if (k_ < 1) throw error("partition: k must be >= 1");
    bool any = false;
    for (const std::int32_t v : labels_) {
      if (v == missing_label) continue;
      if (v < 0 || v >= k_) throw error("partition: label out of range");
      any = true;
    }
    if (!any) throw error("partition: all labels missing");
  }

  std::size_t size() const { return labels_.size(); }
  std::int32_t k() const { return k_; }
  std::int32_t label(std::size_t i) const { return labels_[i]; }
  bool covers(std::size_t i) const { return labels_[i] != missing_label; }
  const std::vector<std::int32_t>& labels() const { return labels_; }

  std::size_t coverage() const {
    std::size_t c = 0;
    for (const std::int32_t v : labels_)
      if (v != missing_label) ++c;
    return c;
  }

  // Per-cluster point counts over covered points.
  std::vector<std::int64_t> cluster_sizes() const {
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k_), 0);
    for (const std::int32_t v : labels_)
      if (v != missing_label) ++sizes[static_cast<std::size_t>(v)];
    return sizes;
  }

 private:
  std::vector<std::int32_t> labels_;
  std::int32_t k_;
};

// A set of r basic partitions over the same n points.
class partition_set {
 public:
  explicit partition_set(std::vector<partition> parts)
      : parts_(std::move(parts)) {
    if (parts_.empty()) throw error("partition_set: empty");
    const std::size_t n = parts_.front().size();
    for (const partition& p : parts_)
      if (p.size() != n) throw error("partition_set: length mismatch");
  }

  std::size_t count() const { return parts_.size(); }
  std::size_t n() const { return parts_.front().size(); }
  const partition& operator[](std::size_t i) const { return parts_[i]; }
  const std::vector<partition>& parts() const { return parts_; }

  // Number of basic partitions covering point l.
  std::size_t point_coverage(std::size_t l) const {
    std::size_t c = 0;
    for (const partition& p : parts_)
      if (p.covers(l)) ++c;
    return c;
  }

 private:
  std::vector<partition> parts_;
};

}  // namespace concord
