#include <cmath>
#include <vector>

#include "concord/coassociation.hpp"
#include "concord/generate.hpp"
#include "concord/metrics.hpp"
#include "concord/rng.hpp"
#include "concord/sec.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace concord;
namespace ts = testsupport;

namespace {

// Normalized-cut trace term at a discrete partition, computed directly from
// S: sum_k (within-cluster mass of S) / (cluster degree volume).
double ncut_trace(const coassociation& s, const partition& p) {
  const std::size_t k = static_cast<std::size_t>(p.k());
  std::vector<double> mass(k, 0.0), vol(k, 0.0);
  for (std::size_t x = 0; x < s.n(); ++x) {
    const auto cx = static_cast<std::size_t>(p.label(x));
    vol[cx] += static_cast<double>(s.row_sum(x));
    for (std::size_t y = 0; y < s.n(); ++y)
      if (p.label(y) == p.label(x))
        mass[cx] += static_cast<double>(s.at(x, y));
  }
  double t = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    if (vol[c] > 0.0) t += mass[c] / vol[c];
  return t;
}

partition_set identical_bps(const partition& base, std::size_t r) {
  return partition_set(std::vector<partition>(r, base));
}

}  // namespace

TEST_SUITE_BEGIN("sec");

TEST_CASE("dense route recovers an ideal block graph") {
  const partition base({0, 0, 0, 1, 1, 1, 2, 2, 2}, 3);
  const partition_set bps = identical_bps(base, 5);
  const consensus_outcome out = sec_fuse_dense(bps, 3, 21, 4, 60);
  CHECK(nmi(out.result, base) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embedding invariants") {
  rng g(44);
  const partition_set bps = ts::random_ensemble(20, 6, 4, 0.0, g);
  const coassociation s = build_coassociation(bps);
  const spectral_embedding emb = compute_spectral_embedding(s, 4);

  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 20; ++i) dot += emb.z(i, a) * emb.z(i, b);
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8));
    }
  }
  for (std::size_t c = 1; c < 4; ++c)
    CHECK(emb.eigenvalues[c] <= emb.eigenvalues[c - 1] + 1e-12);
  for (const double ev : emb.eigenvalues) {
    CHECK(ev <= 1.0 + 1e-8);
    CHECK(ev >= -1.0 - 1e-8);
  }
}

TEST_CASE("top eigenpair of a complete ensemble") {
  rng g(45);
  const partition_set bps = ts::random_ensemble(15, 5, 4, 0.0, g);
  const coassociation s = build_coassociation(bps);
  const spectral_embedding emb = compute_spectral_embedding(s, 2);
  CHECK(emb.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  // Eigenvector for eigenvalue 1 is D^{1/2} * ones, up to sign and norm.
  std::vector<double> want(15);
  double norm = 0.0;
  for (std::size_t i = 0; i < 15; ++i) {
    want[i] = std::sqrt(static_cast<double>(s.row_sum(i)));
    norm += want[i] * want[i];
  }
  norm = std::sqrt(norm);
  const double sign = emb.z(0, 0) >= 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < 15; ++i)
    CHECK(sign * emb.z(i, 0) == doctest::Approx(want[i] / norm).epsilon(1e-8));
}

TEST_CASE("scaling S leaves the embedding unchanged") {
  rng g(46);
  const partition_set bps = ts::random_ensemble(12, 4, 3, 0.0, g);
  const coassociation s = build_coassociation(bps);
  std::vector<std::int32_t> tripled = s.counts();
  for (auto& v : tripled) v *= 3;
  const coassociation s3(12, std::move(tripled));
  const spectral_embedding a = compute_spectral_embedding(s, 3);
  const spectral_embedding b = compute_spectral_embedding(s3, 3);
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(a.eigenvalues[c] == doctest::Approx(b.eigenvalues[c]).epsilon(1e-10));
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(std::abs(a.z(i, c)) ==
            doctest::Approx(std::abs(b.z(i, c))).epsilon(1e-9));
}

TEST_CASE("zero-degree points are refused") {
  std::vector<std::int32_t> counts(9, 0);
  counts[0] = 2;  // only point 0 has mass
  const coassociation s(3, std::move(counts));
  CHECK_THROWS_AS(compute_spectral_embedding(s, 2), disconnected_degree);
}

TEST_CASE("sparse route recovers perfect consensus") {
  const partition base({0, 0, 1, 1, 2, 2}, 3);
  const partition_set bps = identical_bps(base, 4);
  const consensus_outcome out = sec_fuse_sparse(bps, 3, 5, 6, 60);
  CHECK(nmi(out.result, base) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t t = 1; t < out.objective_trace.size(); ++t)
    CHECK(out.objective_trace[t] <= out.objective_trace[t - 1] + 1e-9);
}

TEST_CASE("weighted objective plus trace term is partition-independent") {
  rng g(47);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 6;
    const double miss = rep % 2 == 0 ? 0.0 : 0.25;
    const partition_set bps = ts::random_ensemble(n, 3, 3, miss, g);
    const coassociation s = build_coassociation(bps);
    const sparse_sec_embedding emb(bps);
    // The predicted constant: sum_l S_ll / w_l.
    double expect = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      expect += static_cast<double>(s.at(l, l)) / emb.weights[l];
    for (const auto& labels : ts::all_set_partitions(n, 4)) {
      std::int32_t k = 1;
      for (const auto v : labels) k = std::max(k, v + 1);
      const double w = detail::sparse_sec_objective(
          emb, labels, static_cast<std::size_t>(k));
      const double t = ncut_trace(s, partition(labels, k));
      CHECK(w + t == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("sparse and dense routes agree on three gaussians") {
  const auto data = ts::make_gaussians(60, 3, 5.0, 97);
  generation_config cfg;
  cfg.strategy = generation_strategy::rps;
  cfg.r = 60;
  cfg.k_min = 2;
  cfg.k_max = 12;
  cfg.seed = 31;
  const partition_set bps = generate(data.x, cfg);
  const consensus_outcome dense = sec_fuse_dense(bps, 3, 7, 6, 80);
  const consensus_outcome sparse = sec_fuse_sparse(bps, 3, 7, 6, 80);
  CHECK(nmi(dense.result, data.truth) >= 0.9);
  CHECK(nmi(sparse.result, data.truth) >= 0.9);
  const coassociation s = build_coassociation(bps);
  const double td = ncut_trace(s, dense.result);
  const double tsp = ncut_trace(s, sparse.result);
  CHECK(std::abs(td - tsp) <= 0.02 * std::max(std::abs(td), std::abs(tsp)));
}

TEST_CASE("two moons dissolve under ensemble evidence") {
  const auto data = ts::make_moons(150, 0.06, 7);
  generation_config cfg;
  cfg.strategy = generation_strategy::rps;
  cfg.r = 100;
  cfg.k_min = 8;
  cfg.k_max = 25;
  cfg.seed = 3;
  const partition_set bps = generate(data.x, cfg);
  const consensus_outcome out = sec_fuse_dense(bps, 2, 11, 8, 80);
  CHECK(nmi(out.result, data.truth) >= 0.9);
}

TEST_CASE("weighted k-means basics") {
  rng g(48);
  matrix q(12, 2);
  for (auto& v : q.data()) v = g.normal();

  const std::vector<double> uniform(12, 1.0);
  const consensus_outcome weighted = weighted_kmeans(q, uniform, 3, 9, 4, 50);
  kmeans_options opt;
  opt.k = 3;
  opt.seed = 9;
  opt.restarts = 4;
  opt.max_iter = 50;
  const kmeans_result plain = kmeans_euclidean(q, {}, nullptr, opt);
  CHECK(weighted.result.labels() == plain.labels);

  std::vector<double> heavy(12, 1.0);
  heavy[4] = 1e6;
  const consensus_outcome out = weighted_kmeans(q, heavy, 3, 9, 4, 50);
  // The heavy point dominates its cluster mean.
  const auto c = static_cast<std::size_t>(out.result.label(4));
  std::vector<double> mean(2, 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < 12; ++i) {
    if (static_cast<std::size_t>(out.result.label(i)) != c) continue;
    mass += heavy[i];
    mean[0] += heavy[i] * q(i, 0);
    mean[1] += heavy[i] * q(i, 1);
  }
  CHECK(mean[0] / mass == doctest::Approx(q(4, 0)).epsilon(1e-4));
  CHECK(mean[1] / mass == doctest::Approx(q(4, 1)).epsilon(1e-4));

  for (std::size_t t = 1; t < out.objective_trace.size(); ++t)
    CHECK(out.objective_trace[t] <= out.objective_trace[t - 1] + 1e-9);

  std::vector<double> bad(12, 1.0);
  bad[0] = 0.0;
  CHECK_THROWS_AS(weighted_kmeans(q, bad, 2, 1), zero_weight);
}

TEST_CASE("sparse embedding is row-sparse") {
  rng g(49);
  const partition_set bps = ts::random_ensemble(18, 7, 4, 0.3, g);
  const sparse_sec_embedding emb(bps);
  for (std::size_t l = 0; l < 18; ++l) {
    CHECK(emb.coding.row_coverage(l) == bps.point_coverage(l));
    CHECK(emb.coding.row_coverage(l) <= bps.count());
  }
}

TEST_SUITE_END();
