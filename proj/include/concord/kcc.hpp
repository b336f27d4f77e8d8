#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "concord/coding.hpp"
#include "concord/contingency.hpp"
#include "concord/errors.hpp"
#include "concord/kmeans.hpp"
#include "concord/matrix.hpp"
#include "concord/outcome.hpp"
#include "concord/parallel.hpp"
#include "concord/partition.hpp"
#include "concord/rng.hpp"

namespace concord {

// Utility family selector. Each member pairs a partition-level utility with
// the point-to-centroid distance that turns consensus maximization into
// K-means minimization on binary codes:
//   uc   <-> squared Euclidean
//   uh   <-> KL divergence (entropy utility, smoothed centroids)
//   ucos <-> cosine distance
//   ulp  <-> L_p norm utility, p > 1 (p = 2 coincides with ucos)
struct utility_kind {
  enum class family { uc, uh, ucos, ulp };

  family fam = family::uc;
  double p = 2.0;
  double eps = 1e-6;

  static utility_kind uc() { return {family::uc, 2.0, 1e-6}; }
  static utility_kind uh(double eps = 1e-6) {
    if (!(eps > 0.0 && eps <= 1e-3))
      throw config_error("uh: eps must be in (0, 1e-3]");
    return {family::uh, 2.0, eps};
  }
  static utility_kind ucos() { return {family::ucos, 2.0, 1e-6}; }
  static utility_kind ulp(double p) {
    if (!(p > 1.0)) throw config_error("ulp: p must be > 1");
    return {family::ulp, p, 1e-6};
  }

  // Accepts "uc", "uh", "ucos", "ulp:<p>".
  static utility_kind parse(const std::string& s) {
    if (s == "uc") return uc();
    if (s == "uh") return uh();
    if (s == "ucos") return ucos();
    if (s.rfind("ulp:", 0) == 0) {
      try {
        return ulp(std::stod(s.substr(4)));
      } catch (const std::logic_error&) {
        throw config_error("bad ulp exponent in '" + s + "'");
      }
    }
    throw config_error("unknown utility '" + s + "'");
  }

  std::string name() const {
    switch (fam) {
      case family::uc: return "uc";
      case family::uh: return "uh";
      case family::ucos: return "ucos";
      case family::ulp: return "ulp:" + std::to_string(p);
    }
    return "?";
  }
};

namespace detail {

// The convex core mu evaluated on a block distribution.
inline double mu_core(const utility_kind& kind, const double* m,
                      std::size_t width) {
  switch (kind.fam) {
    case utility_kind::family::uc: {
      double s = 0.0;
      for (std::size_t j = 0; j < width; ++j) s += m[j] * m[j];
      return s;
    }
    case utility_kind::family::uh: {
      double s = 0.0;  // -H(m), natural log, 0 log 0 = 0
      for (std::size_t j = 0; j < width; ++j)
        if (m[j] > 0.0) s += m[j] * std::log(m[j]);
      return s;
    }
    case utility_kind::family::ucos: {
      double s = 0.0;
      for (std::size_t j = 0; j < width; ++j) s += m[j] * m[j];
      return std::sqrt(s);
    }
    case utility_kind::family::ulp: {
      double s = 0.0;
      for (std::size_t j = 0; j < width; ++j) s += std::pow(m[j], kind.p);
      return std::pow(s, 1.0 / kind.p);
    }
  }
  return 0.0;
}

}  // namespace detail

// Partition-level utility U(pi, pi_i) over the points labeled in both
// arguments: sum_k p_k+ mu(m_k) - mu(P). Empty clusters of pi contribute
// nothing.
inline double utility(const partition& p, const partition& bp,
                      const utility_kind& kind) {
  const detail::contingency t = detail::cross_counts(p, bp);
  const double n = static_cast<double>(t.total);
  std::vector<double> m(t.kb);
  double acc = 0.0;
  for (std::size_t k = 0; k < t.ka; ++k) {
    if (t.row[k] == 0) continue;
    const double nk = static_cast<double>(t.row[k]);
    for (std::size_t j = 0; j < t.kb; ++j)
      m[j] = static_cast<double>(t.at(k, j)) / nk;
    acc += (nk / n) * detail::mu_core(kind, m.data(), t.kb);
  }
  std::vector<double> global(t.kb);
  for (std::size_t j = 0; j < t.kb; ++j)
    global[j] = static_cast<double>(t.col[j]) / n;
  return acc - detail::mu_core(kind, global.data(), t.kb);
}

// Per-block centroid of binary codes: block means laid out over the coding
// width, plus per-block coverage so incomplete ensembles normalize over
// covered points only.
struct kcc_centroid {
  std::vector<double> m;  // width d, concatenated block means

  static kcc_centroid from_rows(const binary_coding& b,
                                const std::vector<std::size_t>& rows) {
    kcc_centroid c;
    c.m.assign(b.width(), 0.0);
    for (std::size_t i = 0; i < b.blocks(); ++i) {
      std::int64_t cov = 0;
      for (const std::size_t l : rows)
        if (b.covered(l, i)) {
          ++cov;
          c.m[static_cast<std::size_t>(b.column(l, i))] += 1.0;
        }
      if (cov > 0) {
        const std::size_t off = static_cast<std::size_t>(b.block_offset(i));
        const std::size_t w = static_cast<std::size_t>(b.block_width(i));
        for (std::size_t j = off; j < off + w; ++j)
          c.m[j] /= static_cast<double>(cov);
      }
    }
    return c;
  }
};

// K-means distance f(b_l, m_k) per utility family, summed over the blocks
// covering point l; blocks with a missing label contribute nothing.
inline double kcc_distance(const binary_coding& b, std::size_t row,
                           const kcc_centroid& c, const utility_kind& kind) {
  double f = 0.0;
  for (std::size_t i = 0; i < b.blocks(); ++i) {
    const std::int32_t col = b.column(row, i);
    if (col == missing_label) continue;
    const std::size_t off = static_cast<std::size_t>(b.block_offset(i));
    const std::size_t w = static_cast<std::size_t>(b.block_width(i));
    const double* m = c.m.data() + off;
    const std::size_t j = static_cast<std::size_t>(col) - off;
    switch (kind.fam) {
      case utility_kind::family::uc: {
        double s = 0.0;
        for (std::size_t q = 0; q < w; ++q) {
          const double d = (q == j ? 1.0 : 0.0) - m[q];
          s += d * d;
        }
        f += s;
        break;
      }
      case utility_kind::family::uh: {
        const double denom = 1.0 + static_cast<double>(w) * kind.eps;
        f += -std::log((m[j] + kind.eps) / denom);
        break;
      }
      case utility_kind::family::ucos: {
        double s = 0.0;
        for (std::size_t q = 0; q < w; ++q) s += m[q] * m[q];
        const double norm = std::sqrt(s);
        f += 1.0 - (norm > 0.0 ? m[j] / norm : 0.0);
        break;
      }
      case utility_kind::family::ulp: {
        double s = 0.0;
        for (std::size_t q = 0; q < w; ++q) s += std::pow(m[q], kind.p);
        const double denom = std::pow(s, (kind.p - 1.0) / kind.p);
        f += 1.0 - (denom > 0.0 ? std::pow(m[j], kind.p - 1.0) / denom : 0.0);
        break;
      }
    }
  }
  return f;
}

namespace detail {

// Assignment tables for K-means over block-structured one-hot rows. The
// distance from row l to cluster c is
//   sum over covered blocks i of  block_const[c*r+i] + coord[c*d+col(l,i)]
// which every supported distance family fits.
struct cat_tables {
  std::size_t blocks = 0, width = 0;
  std::vector<double> block_const;  // K x r
  std::vector<double> coord;        // K x d

  void resize(std::size_t k, std::size_t r, std::size_t d) {
    blocks = r;
    width = d;
    block_const.assign(k * r, 0.0);
    coord.assign(k * d, 0.0);
  }

  double dist(const binary_coding& b, std::size_t l, std::size_t c) const {
    double f = 0.0;
    const double* a = block_const.data() + c * blocks;
    const double* t = coord.data() + c * width;
    for (std::size_t i = 0; i < blocks; ++i) {
      const std::int32_t col = b.column(l, i);
      if (col == missing_label) continue;
      f += a[i] + t[static_cast<std::size_t>(col)];
    }
    return f;
  }
};

// Per-cluster sufficient statistics: column counts, per-block coverage,
// member count.
struct cat_stats {
  std::size_t k = 0;
  std::vector<double> counts;        // K x d
  std::vector<std::int64_t> cov;     // K x r
  std::vector<std::int64_t> sizes;   // K

  void resize(std::size_t kk, std::size_t r, std::size_t d) {
    k = kk;
    counts.assign(kk * d, 0.0);
    cov.assign(kk * r, 0);
    sizes.assign(kk, 0);
  }

  void add_row(const binary_coding& b, std::size_t l, std::size_t c) {
    ++sizes[c];
    for (std::size_t i = 0; i < b.blocks(); ++i) {
      const std::int32_t col = b.column(l, i);
      if (col == missing_label) continue;
      ++cov[c * b.blocks() + i];
      counts[c * b.width() + static_cast<std::size_t>(col)] += 1.0;
    }
  }
};

// Fills tables for the four utility distances from cluster statistics.
// Blocks with zero coverage inside a cluster fall back to a fixed convention
// (distance 1 for uc/ucos/ulp, cross-entropy against the smoothed zero
// vector for uh); such blocks never contribute to the reported objective
// because no member covers them.
struct kcc_table_builder {
  utility_kind kind;

  void operator()(const binary_coding& b, const cat_stats& st,
                  cat_tables& out) const {
    const std::size_t r = b.blocks();
    const std::size_t d = b.width();
    out.resize(st.k, r, d);
    for (std::size_t c = 0; c < st.k; ++c) {
      const double* counts = st.counts.data() + c * d;
      double* t = out.coord.data() + c * d;
      double* a = out.block_const.data() + c * r;
      for (std::size_t i = 0; i < r; ++i) {
        const std::size_t off = static_cast<std::size_t>(b.block_offset(i));
        const std::size_t w = static_cast<std::size_t>(b.block_width(i));
        const std::int64_t cov = st.cov[c * r + i];
        const double inv = cov > 0 ? 1.0 / static_cast<double>(cov) : 0.0;
        switch (kind.fam) {
          case utility_kind::family::uc: {
            double norm2 = 0.0;
            for (std::size_t j = off; j < off + w; ++j) {
              const double m = counts[j] * inv;
              norm2 += m * m;
              t[j] = -2.0 * m;
            }
            a[i] = 1.0 + norm2;
            break;
          }
          case utility_kind::family::uh: {
            const double denom = 1.0 + static_cast<double>(w) * kind.eps;
            for (std::size_t j = off; j < off + w; ++j) {
              const double m = counts[j] * inv;
              t[j] = -std::log((m + kind.eps) / denom);
            }
            a[i] = 0.0;
            break;
          }
          case utility_kind::family::ucos: {
            double norm2 = 0.0;
            for (std::size_t j = off; j < off + w; ++j) {
              const double m = counts[j] * inv;
              norm2 += m * m;
            }
            const double norm = std::sqrt(norm2);
            for (std::size_t j = off; j < off + w; ++j)
              t[j] = norm > 0.0 ? -(counts[j] * inv) / norm : 0.0;
            a[i] = 1.0;
            break;
          }
          case utility_kind::family::ulp: {
            double s = 0.0;
            for (std::size_t j = off; j < off + w; ++j)
              s += std::pow(counts[j] * inv, kind.p);
            const double denom = std::pow(s, (kind.p - 1.0) / kind.p);
            for (std::size_t j = off; j < off + w; ++j)
              t[j] = denom > 0.0
                         ? -std::pow(counts[j] * inv, kind.p - 1.0) / denom
                         : 0.0;
            a[i] = 1.0;
            break;
          }
        }
      }
    }
  }
};

struct cat_result {
  std::vector<std::int32_t> labels;
  std::vector<double> trace;
  int repairs = 0;

  double final_objective() const {
    return trace.empty() ? std::numeric_limits<double>::infinity()
                         : trace.back();
  }
};

// Initial centroids: k-means++ over data rows, or tables built from a
// uniformly random assignment. The latter is the reliable start for the
// KL-distance solver, where a singleton seed prices every mismatch at
// -log(eps) and gluing stray points onto large clusters looks locally
// cheap.
enum class cat_init { plusplus, random_assignment };

// Lloyd's over block-structured one-hot rows with a pluggable distance
// table builder. Same acceptance discipline as the dense engine: ties to the
// lowest cluster index, guarded empty-cluster re-seeding, non-improving
// iterations rolled back.
template <typename TableBuilder>
cat_result categorical_lloyd_run(const binary_coding& b, std::size_t k,
                                 int max_iter, const TableBuilder& build,
                                 cat_init init, rng g) {
  const std::size_t n = b.rows();
  const std::size_t r = b.blocks();
  const std::size_t d = b.width();

  cat_tables seed_tables;
  seed_tables.resize(k, r, d);
  if (init == cat_init::random_assignment) {
    cat_stats st;
    st.resize(k, r, d);
    for (std::size_t l = 0; l < n; ++l)
      st.add_row(b, l, static_cast<std::size_t>(g.below(k)));
    build(b, st, seed_tables);
  } else {
    // k-means++ seeding in the table distance.
    std::vector<std::uint8_t> chosen(n, 0);
    std::vector<double> best_d(n, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      double total = 0.0;
      if (c > 0)
        for (std::size_t l = 0; l < n; ++l)
          if (!chosen[l]) total += best_d[l];
      std::size_t pick = n;
      if (c == 0) {
        pick = static_cast<std::size_t>(g.below(n));
      } else if (total > 0.0) {
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
      if (pick == n) {
        for (std::size_t l = 0; l < n; ++l)
          if (!chosen[l]) {
            pick = l;
            break;
          }
      }
      chosen[pick] = 1;
      cat_stats one;
      one.resize(1, r, d);
      one.add_row(b, pick, 0);
      cat_tables t1;
      build(b, one, t1);
      std::copy(t1.block_const.begin(), t1.block_const.end(),
                seed_tables.block_const.begin() + c * r);
      std::copy(t1.coord.begin(), t1.coord.end(),
                seed_tables.coord.begin() + c * d);
      for (std::size_t l = 0; l < n; ++l) {
        const double dist = seed_tables.dist(b, l, c);
        if (c == 0 || dist < best_d[l]) best_d[l] = dist;
      }
    }
  }

  cat_tables tables = std::move(seed_tables);
  std::vector<std::int32_t> labels(n, 0), prev_labels(n, -1);
  std::vector<double> trace;
  cat_stats stats;
  int repairs = 0;
  double prev_obj = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < std::max(1, max_iter); ++iter) {
    for (std::size_t l = 0; l < n; ++l) {
      double best = std::numeric_limits<double>::infinity();
      std::int32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = tables.dist(b, l, c);
        if (dist < best) {
          best = dist;
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
      double worst_d = -1.0;
      for (std::size_t l = 0; l < n; ++l) {
        if (sizes[static_cast<std::size_t>(labels[l])] < 2) continue;
        const double dist =
            tables.dist(b, l, static_cast<std::size_t>(labels[l]));
        if (dist > worst_d) {
          worst_d = dist;
          worst = l;
        }
      }
      if (worst == n) continue;
      // Move only if the point is strictly better off alone.
      cat_stats one;
      one.resize(1, r, d);
      one.add_row(b, worst, 0);
      cat_tables t1;
      build(b, one, t1);
      if (t1.dist(b, worst, 0) >= worst_d) continue;
      --sizes[static_cast<std::size_t>(labels[worst])];
      labels[worst] = static_cast<std::int32_t>(c);
      sizes[c] = 1;
      ++repairs;
    }

    if (labels == prev_labels) break;

    stats.resize(k, r, d);
    for (std::size_t l = 0; l < n; ++l)
      stats.add_row(b, l, static_cast<std::size_t>(labels[l]));
    cat_tables next;
    build(b, stats, next);

    double obj = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      obj += next.dist(b, l, static_cast<std::size_t>(labels[l]));

    if (obj > prev_obj) {
      labels = prev_labels;
      break;
    }
    tables = std::move(next);
    trace.push_back(obj);
    const bool improved = obj < prev_obj;
    prev_obj = obj;
    prev_labels = labels;
    if (!improved) break;
  }

  cat_result res;
  res.labels = std::move(prev_labels);
  res.trace = std::move(trace);
  res.repairs = repairs;
  return res;
}

template <typename TableBuilder>
cat_result categorical_lloyd(const binary_coding& b, std::size_t k,
                             std::uint64_t seed, int restarts, int max_iter,
                             const TableBuilder& build,
                             cat_init init = cat_init::plusplus) {
  const int reps = std::max(1, restarts);
  std::vector<cat_result> runs(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
    runs[rep] = categorical_lloyd_run(b, k, max_iter, build, init,
                                      rng::derived(seed, rep));
  });
  std::size_t best = 0;
  for (std::size_t rep = 1; rep < runs.size(); ++rep)
    if (runs[rep].final_objective() < runs[best].final_objective()) best = rep;
  return std::move(runs[best]);
}

inline void require_full_point_coverage(const partition_set& bps) {
  for (std::size_t l = 0; l < bps.n(); ++l)
    if (bps.point_coverage(l) == 0)
      throw all_missing_point("point " + std::to_string(l) +
                              " is unlabeled in every basic partition");
}

}  // namespace detail

// Utility-maximizing consensus as K-means over the binary coding.
inline consensus_outcome kcc_fuse(const partition_set& bps, int k,
                                  const utility_kind& kind,
                                  std::uint64_t seed, int restarts = 10,
                                  int max_iter = 100) {
  if (k < 2) throw config_error("kcc_fuse: k must be >= 2");
  detail::require_full_point_coverage(bps);
  const binary_coding b = encode_binary(bps);
  detail::kcc_table_builder builder{kind};
  detail::cat_result run = detail::categorical_lloyd(
      b, static_cast<std::size_t>(k), seed, restarts, max_iter, builder);
  return consensus_outcome{partition(std::move(run.labels), k),
                           std::move(run.trace), std::nullopt, seed,
                           run.repairs};
}

// Partition-level constrained clustering: K-means on standardized features
// concatenated with a sqrt(lambda)-scaled one-hot coding of the partial
// labels; rows without side information skip that block entirely, so the
// coding acts as a categorical-utility regularizer toward the given labels.
inline consensus_outcome constrained_fuse(const matrix& x, const partition& p,
                                          int k, double lambda,
                                          std::uint64_t seed,
                                          int restarts = 10,
                                          int max_iter = 100) {
  if (x.rows() != p.size())
    throw shape_mismatch("constrained_fuse: rows vs labels");
  if (lambda < 0.0) throw config_error("constrained_fuse: lambda < 0");
  if (k < 1) throw config_error("constrained_fuse: k must be >= 1");
  const matrix xs = standardize_columns(x);
  const std::size_t kp = static_cast<std::size_t>(p.k());
  const std::size_t n = x.rows();
  const std::size_t head = x.cols();
  matrix concat(n, head + kp);
  masked_tail mask;
  mask.split = head;
  mask.row_has_tail.assign(n, 0);
  const double scale = std::sqrt(lambda);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < head; ++j) concat(l, j) = xs(l, j);
    if (p.covers(l)) {
      mask.row_has_tail[l] = 1;
      concat(l, head + static_cast<std::size_t>(p.label(l))) = scale;
    }
  }
  kmeans_options opt;
  opt.k = k;
  opt.seed = seed;
  opt.max_iter = max_iter;
  opt.restarts = restarts;
  kmeans_result run = kmeans_euclidean(concat, {}, &mask, opt);
  return consensus_outcome{partition(std::move(run.labels), k),
                           std::move(run.trace), std::nullopt, seed,
                           run.repairs};
}

}  // namespace concord
