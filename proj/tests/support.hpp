#pragma once

// Shared fixtures for the test suites: synthetic datasets, random ensembles,
// and exhaustive partition enumeration used by the brute-force oracles.

#include <cstdint>
#include <vector>

#include "concord/matrix.hpp"
#include "concord/partition.hpp"
#include "concord/rng.hpp"

namespace testsupport {

struct labeled_data {
  concord::matrix x;
  concord::partition truth;
};

// K isotropic Gaussian blobs on a circle of radius `sep`, n_per points each.
inline labeled_data make_gaussians(std::size_t n_per, int k, double sep,
                                   std::uint64_t seed, double noise = 1.0) {
  concord::rng g(seed);
  const std::size_t n = n_per * static_cast<std::size_t>(k);
  concord::matrix x(n, 2);
  std::vector<std::int32_t> labels(n);
  std::size_t row = 0;
  for (int c = 0; c < k; ++c) {
    const double angle = 6.283185307179586 * c / k;
    const double cx = sep * std::cos(angle);
    const double cy = sep * std::sin(angle);
    for (std::size_t i = 0; i < n_per; ++i, ++row) {
      x(row, 0) = cx + noise * g.normal();
      x(row, 1) = cy + noise * g.normal();
      labels[row] = c;
    }
  }
  return {std::move(x), concord::partition(std::move(labels), k)};
}

// Two interleaved half circles.
inline labeled_data make_moons(std::size_t n_per, double noise,
                               std::uint64_t seed) {
  concord::rng g(seed);
  const std::size_t n = 2 * n_per;
  concord::matrix x(n, 2);
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n_per; ++i) {
    const double t = 3.141592653589793 * static_cast<double>(i) /
                     static_cast<double>(n_per - 1);
    x(i, 0) = std::cos(t) + noise * g.normal();
    x(i, 1) = std::sin(t) + noise * g.normal();
    labels[i] = 0;
    x(n_per + i, 0) = 1.0 - std::cos(t) + noise * g.normal();
    x(n_per + i, 1) = 0.5 - std::sin(t) + noise * g.normal();
    labels[n_per + i] = 1;
  }
  return {std::move(x), concord::partition(std::move(labels), 2)};
}

// Random complete partition; every cluster id below k may appear.
inline concord::partition random_partition(std::size_t n, std::int32_t k,
                                           concord::rng& g) {
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = static_cast<std::int32_t>(g.below(static_cast<std::uint64_t>(k)));
  return concord::partition(std::move(labels), k);
}

// Random ensemble of r partitions with cluster counts in [2, k_max]; each
// label independently dropped with probability missing_frac (keeping at
// least one label per partition and per point).
inline concord::partition_set random_ensemble(std::size_t n, std::size_t r,
                                              std::int32_t k_max,
                                              double missing_frac,
                                              concord::rng& g) {
  std::vector<concord::partition> parts;
  for (std::size_t i = 0; i < r; ++i) {
    const auto k =
        static_cast<std::int32_t>(2 + g.below(static_cast<std::uint64_t>(
                                          k_max > 2 ? k_max - 1 : 1)));
    std::vector<std::int32_t> labels(n);
    for (std::size_t l = 0; l < n; ++l) {
      const bool drop = missing_frac > 0.0 && g.unit() < missing_frac &&
                        !(i == 0);  // partition 0 stays complete
      labels[l] = drop ? concord::missing_label
                       : static_cast<std::int32_t>(
                             g.below(static_cast<std::uint64_t>(k)));
    }
    bool any = false;
    for (const auto v : labels) any = any || v != concord::missing_label;
    if (!any) labels[0] = 0;
    parts.emplace_back(std::move(labels), k);
  }
  return concord::partition_set(std::move(parts));
}

// All set partitions of n items (restricted growth strings), each returned
// as a label vector with clusters numbered by first appearance.
inline std::vector<std::vector<std::int32_t>> all_set_partitions(
    std::size_t n, std::int32_t max_clusters) {
  std::vector<std::vector<std::int32_t>> out;
  std::vector<std::int32_t> a(n, 0);
  auto rec = [&](auto&& self, std::size_t i, std::int32_t used) -> void {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (std::int32_t c = 0; c <= used && c < max_clusters; ++c) {
      a[i] = c;
      self(self, i + 1, c == used ? used + 1 : used);
    }
  };
  rec(rec, 0, 0);
  return out;
}

// All 2-labelings with both clusters non-empty, canonicalized so the first
// point is in cluster 0 (one representative per unordered 2-partition).
inline std::vector<std::vector<std::int32_t>> all_two_partitions(
    std::size_t n) {
  std::vector<std::vector<std::int32_t>> out;
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    std::vector<std::int32_t> labels(n, 0);
    for (std::size_t i = 1; i < n; ++i)
      labels[i] = (mask >> (i - 1)) & 1 ? 1 : 0;
    out.push_back(std::move(labels));
  }
  return out;
}

// Cluster ids of `p` permuted by `perm` (perm[old] = new).
inline concord::partition relabel(const concord::partition& p,
                                  const std::vector<std::int32_t>& perm) {
  std::vector<std::int32_t> labels(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    labels[i] = p.covers(i) ? perm[static_cast<std::size_t>(p.label(i))]
                            : concord::missing_label;
  return concord::partition(std::move(labels), p.k());
}

}  // namespace testsupport
