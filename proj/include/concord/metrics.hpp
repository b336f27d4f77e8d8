#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "concord/contingency.hpp"
#include "concord/kcc.hpp"
#include "concord/partition.hpp"

namespace concord {

namespace detail {

inline double entropy(const std::vector<std::int64_t>& counts,
                      std::int64_t total) {
  double h = 0.0;
  for (const std::int64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace detail

// Mutual information with sqrt normalization, natural log, restricted to the
// points labeled in both partitions. Returns 0 when either side has zero
// entropy.
inline double nmi(const partition& a, const partition& b) {
  const detail::contingency t = detail::cross_counts(a, b);
  const double ha = detail::entropy(t.row, t.total);
  const double hb = detail::entropy(t.col, t.total);
  if (ha <= 0.0 || hb <= 0.0) return 0.0;
  double mi = 0.0;
  const double n = static_cast<double>(t.total);
  for (std::size_t i = 0; i < t.ka; ++i) {
    for (std::size_t j = 0; j < t.kb; ++j) {
      const std::int64_t c = t.at(i, j);
      if (c == 0) continue;
      const double pij = static_cast<double>(c) / n;
      const double pi = static_cast<double>(t.row[i]) / n;
      const double pj = static_cast<double>(t.col[j]) / n;
      mi += pij * std::log(pij / (pi * pj));
    }
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

// Hubert-Arabie adjusted Rand index over the overlap. Both-degenerate
// contingencies (zero denominator) score 1: the partitions agree trivially.
inline double ari(const partition& a, const partition& b) {
  const detail::contingency t = detail::cross_counts(a, b);
  auto comb2 = [](std::int64_t m) { return m * (m - 1) / 2; };
  std::int64_t sum_ij = 0, sum_i = 0, sum_j = 0;
  for (const std::int64_t c : t.counts) sum_ij += comb2(c);
  for (const std::int64_t c : t.row) sum_i += comb2(c);
  for (const std::int64_t c : t.col) sum_j += comb2(c);
  const double pairs = static_cast<double>(comb2(t.total));
  const double expected =
      pairs > 0.0 ? static_cast<double>(sum_i) * static_cast<double>(sum_j) /
                        pairs
                  : 0.0;
  const double denom =
      0.5 * static_cast<double>(sum_i + sum_j) - expected;
  if (denom == 0.0) return 1.0;
  return (static_cast<double>(sum_ij) - expected) / denom;
}

// Fraction of overlap points whose cluster's majority truth label matches.
inline double purity(const partition& p, const partition& truth) {
  const detail::contingency t = detail::cross_counts(p, truth);
  std::int64_t agree = 0;
  for (std::size_t i = 0; i < t.ka; ++i) {
    std::int64_t best = 0;
    for (std::size_t j = 0; j < t.kb; ++j) best = std::max(best, t.at(i, j));
    agree += best;
  }
  return static_cast<double>(agree) / static_cast<double>(t.total);
}

// Total utility of a candidate consensus against every basic partition: the
// quantity consensus clustering maximizes.
inline double ensemble_agreement(const partition& p, const partition_set& bps,
                                 const utility_kind& kind) {
  double total = 0.0;
  for (std::size_t i = 0; i < bps.count(); ++i)
    total += utility(p, bps[i], kind);
  return total;
}

}  // namespace concord
