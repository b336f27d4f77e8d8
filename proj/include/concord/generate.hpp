#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "concord/errors.hpp"
#include "concord/kmeans.hpp"
#include "concord/matrix.hpp"
#include "concord/parallel.hpp"
#include "concord/partition.hpp"
#include "concord/rng.hpp"

namespace concord {

enum class generation_strategy { rps, rfs, subsample };

inline generation_strategy parse_strategy(const std::string& s) {
  if (s == "rps") return generation_strategy::rps;
  if (s == "rfs") return generation_strategy::rfs;
  if (s == "subsample") return generation_strategy::subsample;
  throw config_error("unknown strategy '" + s + "'");
}

struct generation_config {
  generation_strategy strategy = generation_strategy::rps;
  int r = 100;              // ensemble size; 100 is a robust default
  int k_min = 2;            // rps draws k uniformly from [k_min, k_max]
  int k_max = 0;            // 0 = ceil(sqrt(n))
  double feature_fraction = 0.5;  // rfs
  double row_fraction = 0.5;      // subsample
  int fixed_k = 2;                // rfs / subsample
  std::uint64_t seed = 0;
  int max_iter = 100;
  int restarts = 1;
  bool standardize = true;

  int effective_k_max(std::size_t n) const {
    return k_max > 0
               ? k_max
               : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  }

  void validate(std::size_t n, std::size_t d) const {
    if (r < 1) throw config_error("generation: r must be >= 1");
    if (n < 2) throw config_error("generation: need at least 2 points");
    if (d < 1) throw config_error("generation: need at least 1 feature");
    if (strategy == generation_strategy::rps) {
      if (k_min < 2) throw config_error("generation: k_min must be >= 2");
      const int hi = effective_k_max(n);
      if (hi < k_min) throw config_error("generation: k_max < k_min");
      if (static_cast<std::size_t>(hi) > n)
        throw config_error("generation: k_max exceeds point count");
    } else {
      if (fixed_k < 1) throw config_error("generation: k must be >= 1");
      if (static_cast<std::size_t>(fixed_k) > n)
        throw config_error("generation: k exceeds point count");
    }
    if (strategy == generation_strategy::rfs) {
      if (!(feature_fraction > 0.0 && feature_fraction <= 1.0))
        throw config_error("generation: feature fraction must be in (0,1]");
    }
    if (strategy == generation_strategy::subsample) {
      if (!(row_fraction > 0.0 && row_fraction <= 1.0))
        throw config_error("generation: row fraction must be in (0,1]");
      const auto m = static_cast<std::size_t>(std::ceil(
          row_fraction * static_cast<double>(n)));
      if (m < static_cast<std::size_t>(fixed_k))
        throw config_error("generation: row sample smaller than k");
    }
  }
};

// Plain seeded K-means on raw features: Lloyd's with squared-Euclidean
// distance, k-means++ start, best SSE over restarts. Deterministic for a
// fixed (x, k, seed).
inline partition base_kmeans(const matrix& x, int k, std::uint64_t seed,
                             int max_iter = 100, int restarts = 1) {
  kmeans_options opt;
  opt.k = k;
  opt.seed = seed;
  opt.max_iter = max_iter;
  opt.restarts = restarts;
  kmeans_result run = kmeans_euclidean(x, {}, nullptr, opt);
  return partition(std::move(run.labels), k);
}

namespace detail {

inline matrix prepared(const matrix& x, const generation_config& cfg) {
  return cfg.standardize ? standardize_columns(x) : x;
}

}  // namespace detail

// Random Parameter Selection: r runs with k drawn uniformly from the
// configured range, one derived sub-seed per run.
inline partition_set generate_rps(const matrix& x,
                                  const generation_config& cfg) {
  cfg.validate(x.rows(), x.cols());
  const matrix xs = detail::prepared(x, cfg);
  const int k_hi = cfg.effective_k_max(x.rows());
  std::vector<partition> parts(
      static_cast<std::size_t>(cfg.r),
      partition(std::vector<std::int32_t>{0}, 1));
  parallel_for(static_cast<std::size_t>(cfg.r), [&](std::size_t i) {
    rng g = rng::derived(cfg.seed, i);
    const int k = static_cast<int>(g.int_range(cfg.k_min, k_hi));
    parts[i] = base_kmeans(xs, k, g.next(), cfg.max_iter, cfg.restarts);
  });
  return partition_set(std::move(parts));
}

// Random Feature Selection: fixed k, each run clusters a random feature
// subset of size ceil(fraction * d).
inline partition_set generate_rfs(const matrix& x,
                                  const generation_config& cfg) {
  cfg.validate(x.rows(), x.cols());
  const matrix xs = detail::prepared(x, cfg);
  const auto d = xs.cols();
  const auto m = static_cast<std::size_t>(
      std::ceil(cfg.feature_fraction * static_cast<double>(d)));
  std::vector<partition> parts(
      static_cast<std::size_t>(cfg.r),
      partition(std::vector<std::int32_t>{0}, 1));
  parallel_for(static_cast<std::size_t>(cfg.r), [&](std::size_t i) {
    rng g = rng::derived(cfg.seed, i);
    const std::vector<std::size_t> feats = g.sample_indices(d, m);
    const matrix sub = select_columns(xs, feats);
    parts[i] = base_kmeans(sub, cfg.fixed_k, g.next(), cfg.max_iter,
                           cfg.restarts);
  });
  return partition_set(std::move(parts));
}

// Row subsampling: each run clusters ceil(fraction * n) random rows; the
// rest stay unlabeled, yielding incomplete basic partitions.
inline partition_set generate_subsample(const matrix& x,
                                        const generation_config& cfg) {
  cfg.validate(x.rows(), x.cols());
  const matrix xs = detail::prepared(x, cfg);
  const std::size_t n = xs.rows();
  const auto m = static_cast<std::size_t>(
      std::ceil(cfg.row_fraction * static_cast<double>(n)));
  std::vector<partition> parts(
      static_cast<std::size_t>(cfg.r),
      partition(std::vector<std::int32_t>{0}, 1));
  parallel_for(static_cast<std::size_t>(cfg.r), [&](std::size_t i) {
    rng g = rng::derived(cfg.seed, i);
    const std::vector<std::size_t> rows = g.sample_indices(n, m);
    const matrix sub = select_rows(xs, rows);
    const partition local = base_kmeans(sub, cfg.fixed_k, g.next(),
                                        cfg.max_iter, cfg.restarts);
    std::vector<std::int32_t> labels(n, missing_label);
    for (std::size_t j = 0; j < rows.size(); ++j)
      labels[rows[j]] = local.label(j);
    parts[i] = partition(std::move(labels), cfg.fixed_k);
  });
  return partition_set(std::move(parts));
}

inline partition_set generate(const matrix& x, const generation_config& cfg) {
  switch (cfg.strategy) {
    case generation_strategy::rps: return generate_rps(x, cfg);
    case generation_strategy::rfs: return generate_rfs(x, cfg);
    case generation_strategy::subsample: return generate_subsample(x, cfg);
  }
  throw config_error("generation: bad strategy");
}

}  // namespace concord
