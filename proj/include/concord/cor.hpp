#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "concord/coding.hpp"
#include "concord/errors.hpp"
#include "concord/kcc.hpp"
#include "concord/matrix.hpp"
#include "concord/outcome.hpp"
#include "concord/partition.hpp"

namespace concord {

// [B | B-flipped]: the complement is taken inside covered blocks only, so a
// missing block is all-zero in both halves. Every covered block carries
// exactly one 1 in the left half and K_i - 1 ones in the right half.
class augmented_coding {
 public:
  explicit augmented_coding(binary_coding b) : base_(std::move(b)) {}

  const binary_coding& base() const { return base_; }
  std::size_t rows() const { return base_.rows(); }
  std::size_t width() const { return 2 * base_.width(); }

  double at(std::size_t l, std::size_t col) const {
    const std::size_t d = base_.width();
    const std::size_t c = col < d ? col : col - d;
    const std::size_t i = base_.block_of_column(c);
    const std::int32_t hit = base_.column(l, i);
    if (hit == missing_label) return 0.0;
    const bool is_one = static_cast<std::size_t>(hit) == c;
    return (col < d ? is_one : !is_one) ? 1.0 : 0.0;
  }

  std::size_t nonzero_count() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < rows(); ++l)
      for (std::size_t i = 0; i < base_.blocks(); ++i)
        if (base_.covered(l, i))
          total += static_cast<std::size_t>(base_.block_width(i));
    return total;
  }

  matrix to_dense() const {
    matrix out(rows(), width());
    for (std::size_t l = 0; l < rows(); ++l)
      for (std::size_t j = 0; j < width(); ++j) out(l, j) = at(l, j);
    return out;
  }

 private:
  binary_coding base_;
};

inline augmented_coding augment_flip(const binary_coding& b) {
  return augmented_coding(b);
}

// Holoentropy of a point set: sum over coding columns of the binary entropy
// of the within-set column mean (natural log, missing blocks read as
// zeros).
inline double holoentropy(const binary_coding& b,
                          const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw error("holoentropy: empty cluster");
  auto h2 = [](double x) {
    double h = 0.0;
    if (x > 0.0) h -= x * std::log(x);
    if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x);
    return h;
  };
  std::vector<double> counts(b.width(), 0.0);
  for (const std::size_t l : rows)
    for (std::size_t i = 0; i < b.blocks(); ++i) {
      const std::int32_t col = b.column(l, i);
      if (col != missing_label) counts[static_cast<std::size_t>(col)] += 1.0;
    }
  double total = 0.0;
  for (const double c : counts)
    total += h2(c / static_cast<double>(rows.size()));
  return total;
}

namespace detail {

// KL distance tables over the flip-augmented coding. For a point covered at
// block i with one-hot column j*:
//   D contribution = -log m~_B[j*] - sum_{j != j*} log m~_flip[j]
// which folds into the engine's coord/block-const form. m values are
// coverage-normalized block means; m~ applies the evaluation-time smoothing
// (m + eps) / (1 + 2 eps). A block nobody in the cluster covers falls back
// to the uniform profile.
struct cor_table_builder {
  double eps = 1e-6;

  void operator()(const binary_coding& b, const cat_stats& st,
                  cat_tables& out) const {
    const std::size_t r = b.blocks();
    const std::size_t d = b.width();
    out.resize(st.k, r, d);
    const double denom = 1.0 + 2.0 * eps;
    for (std::size_t c = 0; c < st.k; ++c) {
      const double* counts = st.counts.data() + c * d;
      double* t = out.coord.data() + c * d;
      double* a = out.block_const.data() + c * r;
      for (std::size_t i = 0; i < r; ++i) {
        const std::size_t off = static_cast<std::size_t>(b.block_offset(i));
        const std::size_t w = static_cast<std::size_t>(b.block_width(i));
        const std::int64_t cov = st.cov[c * r + i];
        double flip_log_sum = 0.0;
        for (std::size_t j = off; j < off + w; ++j) {
          const double m = cov > 0 ? counts[j] / static_cast<double>(cov)
                                   : 1.0 / static_cast<double>(w);
          const double smooth_one = (m + eps) / denom;
          const double smooth_zero = (1.0 - m + eps) / denom;
          flip_log_sum += std::log(smooth_zero);
          t[j] = -std::log(smooth_one) + std::log(smooth_zero);
        }
        a[i] = -flip_log_sum;
      }
    }
  }
};

}  // namespace detail

// Joint consensus clustering and outlier removal: KL-distance K-means with
// k+1 clusters on the flip-augmented coding; the converged cluster with the
// highest per-point holoentropy is emitted as the outlier set. Outliers are
// unlabeled in the returned partition (0 in partition files).
inline consensus_outcome cor_fuse(const partition_set& bps, int k,
                                  std::uint64_t seed, int restarts = 10,
                                  int max_iter = 100, double eps = 1e-6) {
  if (k < 2) throw config_error("cor_fuse: k must be >= 2");
  detail::require_full_point_coverage(bps);
  const binary_coding b = encode_binary(bps);
  detail::cor_table_builder builder{eps};
  detail::cat_result run = detail::categorical_lloyd(
      b, static_cast<std::size_t>(k) + 1, seed, restarts, max_iter, builder,
      detail::cat_init::random_assignment);

  const std::size_t n = b.rows();
  const std::size_t groups = static_cast<std::size_t>(k) + 1;
  std::vector<std::vector<std::size_t>> members(groups);
  for (std::size_t l = 0; l < n; ++l)
    members[static_cast<std::size_t>(run.labels[l])].push_back(l);

  // The surplus cluster absorbs the incoherent profiles; it is identified
  // after convergence as the one with maximal per-point holoentropy. When
  // at most k clusters are occupied there is no surplus and the outlier set
  // is empty.
  std::size_t occupied = 0;
  for (const auto& m : members) occupied += m.empty() ? 0 : 1;
  std::size_t outlier_cluster = groups;
  if (occupied > static_cast<std::size_t>(k)) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < groups; ++c) {
      if (members[c].empty() || members[c].size() == n) continue;
      const double hl = holoentropy(b, members[c]);
      if (hl > worst) {
        worst = hl;
        outlier_cluster = c;
      }
    }
  }

  std::vector<std::int32_t> labels(n, missing_label);
  std::vector<std::int32_t> remap(groups, -1);
  std::int32_t next = 0;
  for (std::size_t c = 0; c < groups; ++c) {
    if (c == outlier_cluster || members[c].empty()) continue;
    remap[c] = next++;
  }
  std::vector<std::int32_t> outliers;
  for (std::size_t l = 0; l < n; ++l) {
    const auto c = static_cast<std::size_t>(run.labels[l]);
    if (c == outlier_cluster)
      outliers.push_back(static_cast<std::int32_t>(l));
    else
      labels[l] = remap[c];
  }
  return consensus_outcome{partition(std::move(labels), k),
                           std::move(run.trace), std::move(outliers), seed,
                           run.repairs};
}

}  // namespace concord
