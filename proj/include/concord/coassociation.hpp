#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "concord/errors.hpp"
#include "concord/partition.hpp"

namespace concord {

// Dense n x n matrices above this many points are refused unless the caller
// raises the cap explicitly.
inline constexpr std::size_t default_dense_cap = 5000;

// Symmetric n x n co-occurrence counts: entry (x, y) is the number of basic
// partitions placing x and y in the same cluster. Raw counts in 0..r;
// consumers normalize as needed.
class coassociation {
 public:
  coassociation(std::size_t n, std::vector<std::int32_t> counts)
      : n_(n), counts_(std::move(counts)) {
    if (counts_.size() != n_ * n_)
      throw shape_mismatch("coassociation: size mismatch");
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = x + 1; y < n_; ++y)
        if (at(x, y) != at(y, x))
          throw error("coassociation: not symmetric");
  }

  std::size_t n() const { return n_; }
  std::int32_t at(std::size_t x, std::size_t y) const {
    return counts_[x * n_ + y];
  }
  const std::vector<std::int32_t>& counts() const { return counts_; }

  std::int64_t row_sum(std::size_t x) const {
    std::int64_t s = 0;
    for (std::size_t y = 0; y < n_; ++y) s += at(x, y);
    return s;
  }

 private:
  std::size_t n_;
  std::vector<std::int32_t> counts_;
};

// Pairwise co-cluster counts; pairs where either point is unlabeled
// contribute nothing, so the B*B^T factorization stays exact for
// incomplete basic partitions.
inline coassociation build_coassociation(
    const partition_set& bps, std::size_t dense_cap = default_dense_cap) {
  const std::size_t n = bps.n();
  if (n > dense_cap)
    throw dense_cap_exceeded("co-association needs n <= " +
                             std::to_string(dense_cap) + ", got n = " +
                             std::to_string(n));
  std::vector<std::int32_t> counts(n * n, 0);
  std::vector<std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < bps.count(); ++i) {
    const partition& p = bps[i];
    buckets.assign(static_cast<std::size_t>(p.k()), {});
    for (std::size_t l = 0; l < n; ++l)
      if (p.covers(l)) buckets[static_cast<std::size_t>(p.label(l))].push_back(l);
    for (const auto& members : buckets) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        counts[members[a] * n + members[a]] += 1;
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          counts[members[a] * n + members[b]] += 1;
          counts[members[b] * n + members[a]] += 1;
        }
      }
    }
  }
  return coassociation(n, std::move(counts));
}

// Row sums of the co-association matrix, computed from per-cluster sizes
// without materializing it: w_l = sum over covering partitions of the size
// of x_l's cluster.
inline std::vector<double> degree_weights(const partition_set& bps) {
  const std::size_t n = bps.n();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < bps.count(); ++i) {
    const partition& p = bps[i];
    const std::vector<std::int64_t> sizes = p.cluster_sizes();
    for (std::size_t l = 0; l < n; ++l)
      if (p.covers(l))
        w[l] += static_cast<double>(sizes[static_cast<std::size_t>(p.label(l))]);
  }
  for (std::size_t l = 0; l < n; ++l)
    if (w[l] <= 0.0)
      throw zero_weight("point " + std::to_string(l) +
                        " is unlabeled in every basic partition");
  return w;
}

}  // namespace concord
