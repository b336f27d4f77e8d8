#pragma once

#include <cstdint>
#include <vector>

#include "concord/errors.hpp"
#include "concord/partition.hpp"

namespace concord::detail {

struct contingency {
  std::vector<std::int64_t> counts;  // ka x kb
  std::vector<std::int64_t> row, col;
  std::int64_t total = 0;
  std::size_t ka = 0, kb = 0;

  std::int64_t at(std::size_t i, std::size_t j) const {
    return counts[i * kb + j];
  }
};

// Joint label counts over points labeled in both partitions.
inline contingency cross_counts(const partition& a, const partition& b) {
  if (a.size() != b.size()) throw shape_mismatch("metrics: length mismatch");
  contingency t;
  t.ka = static_cast<std::size_t>(a.k());
  t.kb = static_cast<std::size_t>(b.k());
  t.counts.assign(t.ka * t.kb, 0);
  t.row.assign(t.ka, 0);
  t.col.assign(t.kb, 0);
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (!a.covers(l) || !b.covers(l)) continue;
    const auto i = static_cast<std::size_t>(a.label(l));
    const auto j = static_cast<std::size_t>(b.label(l));
    ++t.counts[i * t.kb + j];
    ++t.row[i];
    ++t.col[j];
    ++t.total;
  }
  if (t.total == 0) throw no_overlap("no point labeled in both partitions");
  return t;
}

}  // namespace concord::detail
