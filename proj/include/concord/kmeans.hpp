#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "concord/errors.hpp"
#include "concord/matrix.hpp"
#include "concord/parallel.hpp"
#include "concord/rng.hpp"

namespace concord {

struct kmeans_options {
  int k = 2;
  std::uint64_t seed = 0;
  int max_iter = 100;
  int restarts = 1;
};

// Rows whose trailing coordinates (from `split` on) only exist for flagged
// points. Unflagged rows skip those coordinates in distances and centroid
// denominators.
struct masked_tail {
  std::size_t split = 0;
  std::vector<std::uint8_t> row_has_tail;
};

struct kmeans_result {
  std::vector<std::int32_t> labels;
  matrix centroids;
  std::vector<double> trace;  // objective after each accepted iteration
  int repairs = 0;
};

namespace detail {

inline double sq_dist_masked(std::span<const double> x,
                             std::span<const double> c, std::size_t split,
                             bool has_tail) {
  double s = 0.0;
  const std::size_t head = has_tail ? x.size() : split;
  for (std::size_t j = 0; j < head; ++j) {
    const double d = x[j] - c[j];
    s += d * d;
  }
  return s;
}

// One seeded Lloyd run: k-means++ start, lowest-index tie-breaks, empty
// clusters re-seeded from the worst-fit point only when that strictly
// helps, and iterations that fail to lower the objective are rolled back so
// the reported trace is non-increasing by construction.
inline kmeans_result lloyd_run(const matrix& x,
                               const std::vector<double>& weights,
                               const masked_tail* mask,
                               const kmeans_options& opt, rng g) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  const std::size_t k = static_cast<std::size_t>(opt.k);
  const std::size_t split = mask ? mask->split : dim;
  auto has_tail = [&](std::size_t l) {
    return mask == nullptr || mask->row_has_tail[l] != 0;
  };
  auto wt = [&](std::size_t l) {
    return weights.empty() ? 1.0 : weights[l];
  };

  // k-means++ seeding; when all remaining mass is zero (duplicate rows),
  // fall back to the lowest unchosen index.
  matrix centroids(k, dim);
  std::vector<std::uint8_t> chosen(n, 0);
  std::vector<double> best_d(n, 0.0);
  std::vector<double> mass(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) mass[l] = wt(l);
  for (std::size_t c = 0; c < k; ++c) {
    double total = 0.0;
    for (std::size_t l = 0; l < n; ++l) total += chosen[l] ? 0.0 : mass[l];
    std::size_t pick = n;
    if (total > 0.0) {
      double u = g.unit() * total;
      for (std::size_t l = 0; l < n; ++l) {
        if (chosen[l]) continue;
        u -= mass[l];
        if (u < 0.0 && mass[l] > 0.0) {
          pick = l;
          break;
        }
      }
    }
    if (pick == n) {
      for (std::size_t l = 0; l < n; ++l)
        if (!chosen[l]) {
          pick = l;
          break;
        }
    }
    chosen[pick] = 1;
    for (std::size_t j = 0; j < dim; ++j) centroids(c, j) = x(pick, j);
    for (std::size_t l = 0; l < n; ++l) {
      const double d =
          sq_dist_masked(x.row(l), centroids.row(c), split, has_tail(l));
      if (c == 0 || d < best_d[l]) best_d[l] = d;
      mass[l] = wt(l) * best_d[l];
    }
  }

  std::vector<std::int32_t> labels(n, 0), prev_labels(n, -1);
  std::vector<double> trace;
  std::vector<std::int64_t> sizes(k, 0);
  int repairs = 0;
  double prev_obj = std::numeric_limits<double>::infinity();

  const int max_iter = std::max(1, opt.max_iter);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment, ties to the lowest cluster index.
    for (std::size_t l = 0; l < n; ++l) {
      double best = std::numeric_limits<double>::infinity();
      std::int32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d =
            sq_dist_masked(x.row(l), centroids.row(c), split, has_tail(l));
        if (d < best) {
          best = d;
          arg = static_cast<std::int32_t>(c);
        }
      }
      labels[l] = arg;
    }

    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t l = 0; l < n; ++l)
      ++sizes[static_cast<std::size_t>(labels[l])];

    // Re-seed empty clusters from the worst-fit point when moving it
    // strictly lowers its own cost; otherwise the cluster stays empty.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t worst = n;
      double worst_d = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        if (sizes[static_cast<std::size_t>(labels[l])] < 2) continue;
        const double d = sq_dist_masked(
            x.row(l), centroids.row(static_cast<std::size_t>(labels[l])),
            split, has_tail(l));
        if (d > worst_d) {
          worst_d = d;
          worst = l;
        }
      }
      if (worst == n) continue;
      --sizes[static_cast<std::size_t>(labels[worst])];
      labels[worst] = static_cast<std::int32_t>(c);
      sizes[c] = 1;
      ++repairs;
    }

    if (labels == prev_labels) break;

    // Centroid update: weighted means; tail coordinates average flagged
    // members only.
    matrix next(k, dim);
    std::vector<double> head_mass(k, 0.0), tail_mass(k, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t c = static_cast<std::size_t>(labels[l]);
      const double w = wt(l);
      head_mass[c] += w;
      const std::size_t upto = has_tail(l) ? dim : split;
      if (has_tail(l)) tail_mass[c] += w;
      for (std::size_t j = 0; j < upto; ++j) next(c, j) += w * x(l, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < split; ++j)
        if (head_mass[c] > 0.0) next(c, j) /= head_mass[c];
      for (std::size_t j = split; j < dim; ++j)
        if (tail_mass[c] > 0.0) next(c, j) /= tail_mass[c];
    }

    double obj = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      obj += wt(l) * sq_dist_masked(
                         x.row(l),
                         next.row(static_cast<std::size_t>(labels[l])),
                         split, has_tail(l));

    if (obj > prev_obj) {  // numerically possible only at convergence noise
      labels = prev_labels;
      break;
    }
    centroids = next;
    trace.push_back(obj);
    const bool improved = obj < prev_obj;
    prev_obj = obj;
    prev_labels = labels;
    if (!improved) break;
  }

  kmeans_result res;
  res.labels = std::move(prev_labels);
  res.centroids = std::move(centroids);
  res.trace = std::move(trace);
  res.repairs = repairs;
  return res;
}

}  // namespace detail

// Weighted Lloyd's with squared-Euclidean distance; best of opt.restarts
// independently seeded runs (ties to the lowest restart index). Restarts run
// in parallel with results identical to sequential execution.
inline kmeans_result kmeans_euclidean(const matrix& x,
                                      const std::vector<double>& weights,
                                      const masked_tail* mask,
                                      const kmeans_options& opt) {
  const std::size_t n = x.rows();
  if (opt.k < 1) throw config_error("kmeans: k must be >= 1");
  if (static_cast<std::size_t>(opt.k) > n)
    throw k_too_large("kmeans: k = " + std::to_string(opt.k) + " > n = " +
                      std::to_string(n));
  if (!weights.empty() && weights.size() != n)
    throw shape_mismatch("kmeans: weight length mismatch");
  if (mask && mask->row_has_tail.size() != n)
    throw shape_mismatch("kmeans: mask length mismatch");
  const int restarts = std::max(1, opt.restarts);
  std::vector<kmeans_result> runs(static_cast<std::size_t>(restarts));
  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t rep) {
    runs[rep] =
        detail::lloyd_run(x, weights, mask, opt, rng::derived(opt.seed, rep));
  });
  std::size_t best = 0;
  for (std::size_t rep = 1; rep < runs.size(); ++rep) {
    const double a = runs[rep].trace.empty()
                         ? std::numeric_limits<double>::infinity()
                         : runs[rep].trace.back();
    const double b = runs[best].trace.empty()
                         ? std::numeric_limits<double>::infinity()
                         : runs[best].trace.back();
    if (a < b) best = rep;
  }
  return std::move(runs[best]);
}

}  // namespace concord
