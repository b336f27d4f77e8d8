#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "concord/coding.hpp"
#include "concord/errors.hpp"
#include "concord/kcc.hpp"
#include "concord/kmeans.hpp"
#include "concord/matrix.hpp"
#include "concord/outcome.hpp"
#include "concord/partition.hpp"

namespace concord {

// Closed-form linear denoiser for dropout-corrupted binary codes. With
// v = [1-s, ..., 1-s, 1] over the d+1 bias-augmented columns and
// Sigma = B_aug^T B_aug:
//   E[U]_ij = Sigma_ij v_j
//   E[V]_ij = Sigma_ij v_i v_j   (i != j),   Sigma_ii v_i   (i = j)
// and W solves W (E[V] + ridge I) = E[U]. The expectation integrates over
// every possible corruption, so the map stands in for an unbounded ensemble.
struct marginalized_map {
  matrix w;  // (d+1) x (d+1)
  double dropout = 0.0;
  double ridge = 0.0;
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(i, j);
  return out;
}

inline matrix from_eigen(const Eigen::MatrixXd& m) {
  matrix out(static_cast<std::size_t>(m.rows()),
             static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

// Expected scatter matrices under dropout level s; exposed for tests.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> expected_scatters(
    const Eigen::MatrixXd& sigma, double s) {
  const Eigen::Index dd = sigma.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(dd, 1.0 - s);
  v[dd - 1] = 1.0;  // bias column is never dropped
  Eigen::MatrixXd eu(dd, dd), ev(dd, dd);
  for (Eigen::Index i = 0; i < dd; ++i) {
    for (Eigen::Index j = 0; j < dd; ++j) {
      eu(i, j) = sigma(i, j) * v[j];
      ev(i, j) = i == j ? sigma(i, j) * v[i] : sigma(i, j) * v[i] * v[j];
    }
  }
  return {eu, ev};
}

}  // namespace detail

inline marginalized_map make_marginalized_map(const binary_coding& b,
                                              double s, double ridge) {
  if (!(s >= 0.0 && s < 1.0))
    throw config_error("marginalized map: dropout must be in [0,1)");
  if (ridge < 0.0) throw config_error("marginalized map: ridge < 0");
  const matrix baug = b.to_dense_with_bias();
  const Eigen::MatrixXd a = detail::to_eigen(baug);
  const Eigen::MatrixXd sigma = a.transpose() * a;
  auto [eu, ev] = detail::expected_scatters(sigma, s);
  const Eigen::Index dd = sigma.rows();
  Eigen::MatrixXd lhs = ev + ridge * Eigen::MatrixXd::Identity(dd, dd);
  Eigen::MatrixXd wt;
  if (ridge == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (!lu.isInvertible())
      throw singular_system(
          "marginalized map: E[V] is singular; use a positive ridge");
    wt = lu.solve(eu.transpose());
  } else {
    // E[V] is a PSD expectation of a scatter matrix; the ridge makes the
    // system positive definite.
    wt = lhs.ldlt().solve(eu.transpose());
  }
  marginalized_map out;
  out.w = detail::from_eigen(Eigen::MatrixXd(wt.transpose()));
  out.dropout = s;
  out.ridge = ridge;
  return out;
}

// Marginalized representation Q = B_aug W^T.
inline matrix marginalized_representation(const binary_coding& b,
                                          const marginalized_map& map,
                                          bool drop_bias = false) {
  const Eigen::MatrixXd a = detail::to_eigen(b.to_dense_with_bias());
  const Eigen::MatrixXd w = detail::to_eigen(map.w);
  Eigen::MatrixXd q = a * w.transpose();
  if (drop_bias) q.conservativeResize(q.rows(), q.cols() - 1);
  return detail::from_eigen(q);
}

// Marginalized-denoising consensus: K-means on the rows of Q. The bias
// column is kept by default; drop_bias removes it before clustering.
inline consensus_outcome iec_fuse(const partition_set& bps, int k, double s,
                                  double ridge, std::uint64_t seed,
                                  int restarts = 10, int max_iter = 100,
                                  bool drop_bias = false) {
  if (k < 2) throw config_error("iec_fuse: k must be >= 2");
  detail::require_full_point_coverage(bps);
  const binary_coding b = encode_binary(bps);
  const marginalized_map map = make_marginalized_map(b, s, ridge);
  const matrix q = marginalized_representation(b, map, drop_bias);
  kmeans_options opt;
  opt.k = k;
  opt.seed = seed;
  opt.max_iter = max_iter;
  opt.restarts = restarts;
  kmeans_result run = kmeans_euclidean(q, {}, nullptr, opt);
  return consensus_outcome{partition(std::move(run.labels), k),
                           std::move(run.trace), std::nullopt, seed,
                           run.repairs};
}

}  // namespace concord
