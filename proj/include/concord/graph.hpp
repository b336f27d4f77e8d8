#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "concord/coassociation.hpp"
#include "concord/errors.hpp"
#include "concord/matrix.hpp"
#include "concord/partition.hpp"

namespace concord {

enum class linkage_rule { average, single };

inline linkage_rule parse_linkage(const std::string& s) {
  if (s == "average") return linkage_rule::average;
  if (s == "single") return linkage_rule::single;
  throw config_error("unknown linkage '" + s + "'");
}

// Evidence-accumulation consensus: agglomerative merging on co-association
// similarity, cut at k clusters. Ties are broken toward the pair with the
// smallest (first member) indices, and output clusters are numbered by
// their smallest member, so results are deterministic and invariant to a
// positive rescaling of S.
inline partition hac_consensus(const coassociation& s, int k,
                               linkage_rule rule = linkage_rule::average) {
  const std::size_t n = s.n();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw config_error("hac: k must be in [1, n]");

  // Active clusters keyed by their smallest member index.
  std::vector<double> sim(n * n);
  for (std::size_t i = 0; i < n * n; ++i)
    sim[i] = static_cast<double>(s.counts()[i]);
  std::vector<std::int64_t> size(n, 1);
  std::vector<std::uint8_t> active(n, 1);
  std::vector<std::int32_t> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[i] = static_cast<std::int32_t>(i);

  for (std::size_t merges = 0; merges + k < n; ++merges) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t ba = n, bb = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        if (sim[a * n + b] > best) {
          best = sim[a * n + b];
          ba = a;
          bb = b;
        }
      }
    }
    // Merge bb into ba (ba keeps the smaller representative index).
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == ba || c == bb) continue;
      const double sac = sim[ba * n + c];
      const double sbc = sim[bb * n + c];
      double merged;
      if (rule == linkage_rule::average) {
        merged = (static_cast<double>(size[ba]) * sac +
                  static_cast<double>(size[bb]) * sbc) /
                 static_cast<double>(size[ba] + size[bb]);
      } else {
        merged = std::max(sac, sbc);
      }
      sim[ba * n + c] = merged;
      sim[c * n + ba] = merged;
    }
    size[ba] += size[bb];
    active[bb] = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (owner[i] == static_cast<std::int32_t>(bb))
        owner[i] = static_cast<std::int32_t>(ba);
  }

  // Renumber surviving clusters by representative order.
  std::vector<std::int32_t> remap(n, -1);
  std::int32_t next = 0;
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto rep = static_cast<std::size_t>(owner[i]);
    if (remap[rep] < 0) remap[rep] = next++;
    labels[i] = remap[rep];
  }
  return partition(std::move(labels), k);
}

enum class activation { relu, sigmoid, none };

inline activation parse_activation(const std::string& s) {
  if (s == "relu") return activation::relu;
  if (s == "sigmoid") return activation::sigmoid;
  if (s == "none") return activation::none;
  throw config_error("unknown activation '" + s + "'");
}

// Forward pass of a consensus-graph convolution stack:
//   S^ = I + S,  D^_ii = sum_j S^_ij,
//   Z^{(l+1)} = phi(D^{-1/2} S^ D^{-1/2} Z^{(l)} W^{(l)}),  Z^{(0)} = X.
// Weights are supplied by the caller; nothing is trained here.
inline matrix consensus_propagate(const coassociation& s, const matrix& x,
                                  const std::vector<matrix>& weight_stack,
                                  activation act) {
  const std::size_t n = s.n();
  if (x.rows() != n) throw shape_mismatch("propagate: X row count != n");
  Eigen::MatrixXd norm(n, n);
  Eigen::VectorXd dinv(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double deg = static_cast<double>(s.row_sum(i)) + 1.0;
    dinv[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double shat =
          static_cast<double>(s.at(i, j)) + (i == j ? 1.0 : 0.0);
      norm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          dinv[static_cast<Eigen::Index>(i)] * shat *
          dinv[static_cast<Eigen::Index>(j)];
    }
  }

  Eigen::MatrixXd z(n, x.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);

  for (const matrix& w : weight_stack) {
    if (w.rows() != static_cast<std::size_t>(z.cols()))
      throw shape_mismatch("propagate: weight rows " + std::to_string(w.rows()) +
                           " != layer width " + std::to_string(z.cols()));
    Eigen::MatrixXd we(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j)
        we(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            w(i, j);
    z = norm * z * we;
    switch (act) {
      case activation::relu:
        z = z.cwiseMax(0.0);
        break;
      case activation::sigmoid:
        z = (1.0 + (-z.array()).exp()).inverse().matrix();
        break;
      case activation::none:
        break;
    }
  }

  matrix out(n, static_cast<std::size_t>(z.cols()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace concord
