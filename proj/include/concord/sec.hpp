#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "concord/coassociation.hpp"
#include "concord/coding.hpp"
#include "concord/errors.hpp"
#include "concord/kcc.hpp"
#include "concord/kmeans.hpp"
#include "concord/matrix.hpp"
#include "concord/outcome.hpp"
#include "concord/parallel.hpp"
#include "concord/partition.hpp"

namespace concord {

// Top-k eigenpairs of D^{-1/2} S D^{-1/2}, eigenvalues sorted descending.
struct spectral_embedding {
  matrix z;                        // n x k eigenvector matrix
  std::vector<double> eigenvalues;
};

inline spectral_embedding compute_spectral_embedding(const coassociation& s,
                                                     int k) {
  const std::size_t n = s.n();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw config_error("spectral embedding: bad k");
  Eigen::VectorXd dinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = static_cast<double>(s.row_sum(i));
    if (w <= 0.0)
      throw disconnected_degree("zero degree at point " + std::to_string(i));
    dinv[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(w);
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          dinv[static_cast<Eigen::Index>(i)] *
          static_cast<double>(s.at(i, j)) *
          dinv[static_cast<Eigen::Index>(j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw error("spectral embedding: eigendecomposition failed");
  spectral_embedding out;
  out.z = matrix(n, static_cast<std::size_t>(k));
  out.eigenvalues.resize(static_cast<std::size_t>(k));
  // Eigen returns ascending order; take the top k, largest first.
  for (int c = 0; c < k; ++c) {
    const auto src = static_cast<Eigen::Index>(n) - 1 - c;
    out.eigenvalues[static_cast<std::size_t>(c)] = es.eigenvalues()[src];
    for (std::size_t i = 0; i < n; ++i)
      out.z(i, static_cast<std::size_t>(c)) =
          es.eigenvectors()(static_cast<Eigen::Index>(i), src);
  }
  return out;
}

// Weighted Lloyd's on dense rows; uniform weights reduce it to plain
// K-means.
inline consensus_outcome weighted_kmeans(const matrix& q,
                                         const std::vector<double>& weights,
                                         int k, std::uint64_t seed,
                                         int restarts = 10,
                                         int max_iter = 100) {
  for (const double w : weights)
    if (!(w > 0.0)) throw zero_weight("weighted_kmeans: weights must be > 0");
  kmeans_options opt;
  opt.k = k;
  opt.seed = seed;
  opt.max_iter = max_iter;
  opt.restarts = restarts;
  kmeans_result run = kmeans_euclidean(q, weights, nullptr, opt);
  return consensus_outcome{partition(std::move(run.labels), k),
                           std::move(run.trace), std::nullopt, seed,
                           run.repairs};
}

// Dense route: K-means on the rows of the top-K eigenvector matrix of the
// degree-normalized co-association matrix. Cubic in n; kept as the oracle
// the sparse route is checked against.
inline consensus_outcome sec_fuse_dense(const partition_set& bps, int k,
                                        std::uint64_t seed, int restarts = 10,
                                        int max_iter = 100,
                                        std::size_t dense_cap =
                                            default_dense_cap,
                                        bool row_normalize = false) {
  if (k < 2) throw config_error("sec_fuse_dense: k must be >= 2");
  const coassociation s = build_coassociation(bps, dense_cap);
  spectral_embedding emb = compute_spectral_embedding(s, k);
  if (row_normalize) {
    for (std::size_t i = 0; i < emb.z.rows(); ++i) {
      double norm = 0.0;
      for (std::size_t j = 0; j < emb.z.cols(); ++j)
        norm += emb.z(i, j) * emb.z(i, j);
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (std::size_t j = 0; j < emb.z.cols(); ++j) emb.z(i, j) /= norm;
    }
  }
  kmeans_options opt;
  opt.k = k;
  opt.seed = seed;
  opt.max_iter = max_iter;
  opt.restarts = restarts;
  kmeans_result run = kmeans_euclidean(emb.z, {}, nullptr, opt);
  return consensus_outcome{partition(std::move(run.labels), k),
                           std::move(run.trace), std::nullopt, seed,
                           run.repairs};
}

// Sparse embedding rows b_l / w_l with attached weights w_l; at most r
// nonzeros per row.
struct sparse_sec_embedding {
  binary_coding coding;
  std::vector<double> weights;

  explicit sparse_sec_embedding(const partition_set& bps)
      : coding(bps), weights(degree_weights(bps)) {}
};

namespace detail {

// Weighted K-means objective for the sparse embedding at a fixed labeling,
// with centroids m_k = sum_{l in C_k} b_l / sum_{l in C_k} w_l. Used both by
// the solver and by tests probing the objective directly.
inline double sparse_sec_objective(const sparse_sec_embedding& e,
                                   const std::vector<std::int32_t>& labels,
                                   std::size_t k) {
  const binary_coding& b = e.coding;
  const std::size_t n = b.rows();
  const std::size_t d = b.width();
  std::vector<double> centroid(k * d, 0.0);
  std::vector<double> vol(k, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const auto c = static_cast<std::size_t>(labels[l]);
    vol[c] += e.weights[l];
    for (std::size_t i = 0; i < b.blocks(); ++i) {
      const std::int32_t col = b.column(l, i);
      if (col != missing_label)
        centroid[c * d + static_cast<std::size_t>(col)] += 1.0;
    }
  }
  std::vector<double> norm2(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    if (vol[c] <= 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      centroid[c * d + j] /= vol[c];
      norm2[c] += centroid[c * d + j] * centroid[c * d + j];
    }
  }
  double obj = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const auto c = static_cast<std::size_t>(labels[l]);
    const double w = e.weights[l];
    double dot = 0.0;
    double qq = 0.0;
    for (std::size_t i = 0; i < b.blocks(); ++i) {
      const std::int32_t col = b.column(l, i);
      if (col == missing_label) continue;
      dot += centroid[c * d + static_cast<std::size_t>(col)];
      qq += 1.0;
    }
    // w * ||b/w - m||^2 = ||b||^2/w - 2 b.m + w ||m||^2
    obj += qq / w - 2.0 * dot + w * norm2[c];
  }
  return obj;
}

struct sparse_sec_result {
  std::vector<std::int32_t> labels;
  std::vector<double> trace;
  int repairs = 0;

  double final_objective() const {
    return trace.empty() ? std::numeric_limits<double>::infinity()
                         : trace.back();
  }
};

inline sparse_sec_result sparse_sec_run(const sparse_sec_embedding& e,
                                        std::size_t k, int max_iter, rng g) {
  const binary_coding& b = e.coding;
  const std::size_t n = b.rows();
  const std::size_t d = b.width();

  // Distance of row l to centroid c, up to the additive per-point constant
  // ||b_l||^2 / w_l:  w_l ||m_c||^2 - 2 b_l . m_c.
  std::vector<double> centroid(k * d, 0.0);
  std::vector<double> norm2(k, 0.0);
  auto dist = [&](std::size_t l, std::size_t c) {
    double dot = 0.0;
    for (std::size_t i = 0; i < b.blocks(); ++i) {
      const std::int32_t col = b.column(l, i);
      if (col != missing_label)
        dot += centroid[c * d + static_cast<std::size_t>(col)];
    }
    return e.weights[l] * norm2[c] - 2.0 * dot;
  };
  auto set_centroid_from_row = [&](std::size_t c, std::size_t l) {
    for (std::size_t j = 0; j < d; ++j) centroid[c * d + j] = 0.0;
    norm2[c] = 0.0;
    const double inv = 1.0 / e.weights[l];
    for (std::size_t i = 0; i < b.blocks(); ++i) {
      const std::int32_t col = b.column(l, i);
      if (col == missing_label) continue;
      centroid[c * d + static_cast<std::size_t>(col)] = inv;
      norm2[c] += inv * inv;
    }
  };

  // k-means++ with weight-aware sampling; the true squared residual is the
  // table distance plus ||b_l||^2 / w_l.
  std::vector<double> self(n);
  for (std::size_t l = 0; l < n; ++l)
    self[l] = static_cast<double>(b.row_coverage(l)) / e.weights[l];
  std::vector<std::uint8_t> chosen(n, 0);
  std::vector<double> best_d(n, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pick = n;
    if (c == 0) {
      double total = 0.0;
      for (std::size_t l = 0; l < n; ++l) total += e.weights[l];
      double u = g.unit() * total;
      for (std::size_t l = 0; l < n; ++l) {
        u -= e.weights[l];
        if (u < 0.0) {
          pick = l;
          break;
        }
      }
    } else {
      double total = 0.0;
      for (std::size_t l = 0; l < n; ++l)
        if (!chosen[l] && best_d[l] > 0.0) total += best_d[l];
      if (total > 0.0) {
        double u = g.unit() * total;
        for (std::size_t l = 0; l < n; ++l) {
          if (chosen[l] || best_d[l] <= 0.0) continue;
          u -= best_d[l];
          if (u < 0.0) {
            pick = l;
            break;
          }
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
    set_centroid_from_row(c, pick);
    for (std::size_t l = 0; l < n; ++l) {
      const double dl = std::max(0.0, dist(l, c) + self[l]);
      if (c == 0 || dl < best_d[l]) best_d[l] = dl;
    }
  }

  std::vector<std::int32_t> labels(n, 0), prev_labels(n, -1);
  std::vector<double> trace;
  int repairs = 0;
  double prev_obj = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < std::max(1, max_iter); ++iter) {
    for (std::size_t l = 0; l < n; ++l) {
      double best = std::numeric_limits<double>::infinity();
      std::int32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double dl = dist(l, c);
        if (dl < best) {
          best = dl;
          arg = static_cast<std::int32_t>(c);
        }
      }
      labels[l] = arg;
    }

    std::vector<std::int64_t> sizes(k, 0);
    for (std::size_t l = 0; l < n; ++l)
      ++sizes[static_cast<std::size_t>(labels[l])];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t worst = n;
      double worst_d = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        if (sizes[static_cast<std::size_t>(labels[l])] < 2) continue;
        const double dl =
            dist(l, static_cast<std::size_t>(labels[l])) + self[l];
        if (dl > worst_d) {
          worst_d = dl;
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

    // Weighted centroid update.
    std::vector<double> counts(k * d, 0.0), vol(k, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      const auto c = static_cast<std::size_t>(labels[l]);
      vol[c] += e.weights[l];
      for (std::size_t i = 0; i < b.blocks(); ++i) {
        const std::int32_t col = b.column(l, i);
        if (col != missing_label)
          counts[c * d + static_cast<std::size_t>(col)] += 1.0;
      }
    }
    std::vector<double> next(k * d, 0.0), next_norm2(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      if (vol[c] <= 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        next[c * d + j] = counts[c * d + j] / vol[c];
        next_norm2[c] += next[c * d + j] * next[c * d + j];
      }
    }
    std::swap(centroid, next);
    std::swap(norm2, next_norm2);

    double obj = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      obj += dist(l, static_cast<std::size_t>(labels[l])) + self[l];

    if (obj > prev_obj) {
      labels = prev_labels;
      break;
    }
    trace.push_back(obj);
    const bool improved = obj < prev_obj;
    prev_obj = obj;
    prev_labels = labels;
    if (!improved) break;
  }

  sparse_sec_result res;
  res.labels = std::move(prev_labels);
  res.trace = std::move(trace);
  res.repairs = repairs;
  return res;
}

}  // namespace detail

// Sparse route: weighted K-means directly on rows b_l / w_l, equivalent in
// objective to the normalized-cut trace maximization on the co-association
// graph, with time and memory linear in n * r.
inline consensus_outcome sec_fuse_sparse(const partition_set& bps, int k,
                                         std::uint64_t seed,
                                         int restarts = 10,
                                         int max_iter = 100) {
  if (k < 2) throw config_error("sec_fuse_sparse: k must be >= 2");
  detail::require_full_point_coverage(bps);
  const sparse_sec_embedding emb(bps);
  const int reps = std::max(1, restarts);
  std::vector<detail::sparse_sec_result> runs(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
    runs[rep] = detail::sparse_sec_run(emb, static_cast<std::size_t>(k),
                                       max_iter, rng::derived(seed, rep));
  });
  std::size_t best = 0;
  for (std::size_t rep = 1; rep < runs.size(); ++rep)
    if (runs[rep].final_objective() < runs[best].final_objective()) best = rep;
  detail::sparse_sec_result& run = runs[best];
  return consensus_outcome{partition(std::move(run.labels), k),
                           std::move(run.trace), std::nullopt, seed,
                           run.repairs};
}

}  // namespace concord
