#include <cmath>
#include <set>
#include <vector>

#include "concord/cor.hpp"
#include "concord/metrics.hpp"
#include "concord/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace concord;
namespace ts = testsupport;

namespace {

// Unsmoothed KL K-means objective over the flip-augmented coding at a fixed
// labeling, with centroids set to cluster means; 0 log 0 = 0. Evaluated from
// the dense realization, independently of the solver's tables.
double kl_objective(const augmented_coding& aug,
                    const std::vector<std::int32_t>& labels, std::size_t k) {
  const matrix dense = aug.to_dense();
  const std::size_t n = dense.rows(), w = dense.cols();
  std::vector<double> mean(k * w, 0.0);
  std::vector<double> count(k, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const auto c = static_cast<std::size_t>(labels[l]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < w; ++j) mean[c * w + j] += dense(l, j);
  }
  for (std::size_t c = 0; c < k; ++c)
    if (count[c] > 0)
      for (std::size_t j = 0; j < w; ++j) mean[c * w + j] /= count[c];
  double obj = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const auto c = static_cast<std::size_t>(labels[l]);
    for (std::size_t j = 0; j < w; ++j) {
      if (dense(l, j) == 0.0) continue;  // 0 log 0 = 0
      obj += std::log(1.0 / mean[c * w + j]);
    }
  }
  return obj;
}

// Planted-outlier ensemble: r copies of a 3-cluster structure over n points,
// with the listed points relabeled uniformly at random in every copy.
partition_set planted_outlier_bps(std::size_t n, std::size_t r,
                                  const std::set<std::size_t>& outliers,
                                  std::uint64_t seed) {
  rng g(seed);
  std::vector<partition> parts;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<std::int32_t> labels(n);
    for (std::size_t l = 0; l < n; ++l)
      labels[l] = outliers.count(l)
                      ? static_cast<std::int32_t>(g.below(3))
                      : static_cast<std::int32_t>(l % 3);
    parts.emplace_back(std::move(labels), 3);
  }
  return partition_set(std::move(parts));
}

}  // namespace

TEST_SUITE_BEGIN("cor");

TEST_CASE("flip augmentation of the worked row") {
  const partition_set bps({partition({0, 1}, 2), partition({1, 0}, 2)});
  const augmented_coding aug = augment_flip(encode_binary(bps));
  // Row 0 of B is [1,0 | 0,1]; its augmentation is [1,0,0,1 | 0,1,1,0].
  const std::vector<double> expect = {1, 0, 0, 1, 0, 1, 1, 0};
  for (std::size_t j = 0; j < 8; ++j) CHECK(aug.at(0, j) == expect[j]);
}

TEST_CASE("single-column blocks flip to all zeros") {
  const partition_set bps({partition({0, 0, 0}, 1)});
  const augmented_coding aug = augment_flip(encode_binary(bps));
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(aug.at(l, 0) == 1.0);
    CHECK(aug.at(l, 1) == 0.0);
  }
}

TEST_CASE("augmented nonzero census") {
  rng g(71);
  const partition_set bps = ts::random_ensemble(20, 5, 4, 0.3, g);
  const binary_coding b = encode_binary(bps);
  const augmented_coding aug = augment_flip(b);
  std::size_t expect = 0;
  for (std::size_t l = 0; l < b.rows(); ++l)
    for (std::size_t i = 0; i < b.blocks(); ++i)
      if (b.covered(l, i))
        expect += static_cast<std::size_t>(b.block_width(i));
  CHECK(aug.nonzero_count() == expect);
  // The dense realization agrees, and its left half is B itself.
  const matrix dense = aug.to_dense();
  const matrix left = b.to_dense();
  std::size_t ones = 0;
  for (const double v : dense.data()) ones += v == 1.0 ? 1 : 0;
  CHECK(ones == expect);
  for (std::size_t l = 0; l < b.rows(); ++l)
    for (std::size_t j = 0; j < b.width(); ++j)
      CHECK(dense(l, j) == left(l, j));
}

TEST_CASE("holoentropy base cases") {
  const partition_set pure_bps(
      std::vector<partition>(3, partition({0, 0, 1}, 2)));
  const binary_coding pure = encode_binary(pure_bps);
  CHECK(holoentropy(pure, {0, 1}) == doctest::Approx(0.0));

  // Two points differing in a single 2-wide block: both coding columns of
  // that block carry one fair bit each under the flip view, but holoentropy
  // reads B's columns directly: two columns at mean 1/2.
  const partition_set two({partition({0, 1}, 2)});
  const binary_coding b = encode_binary(two);
  CHECK(holoentropy(b, {0, 1}) == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("a single split column contributes ln 2") {
  // One-column coding where the rows differ only there (the second point is
  // unlabeled, so its block reads zero): column mean 1/2, entropy ln 2.
  const partition_set bps({partition({0, missing_label}, 1)});
  const binary_coding b = encode_binary(bps);
  CHECK(holoentropy(b, {0, 1}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("flip bridge: kl objective equals size-weighted holoentropy") {
  rng g(73);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 10;
    const std::size_t k = 2 + g.below(2);
    const partition_set bps = ts::random_ensemble(n, 3, 4, 0.0, g);
    const binary_coding b = encode_binary(bps);
    const augmented_coding aug = augment_flip(b);
    std::vector<std::int32_t> labels(n);
    for (std::size_t l = 0; l < n; ++l)
      labels[l] = static_cast<std::int32_t>(g.below(k));
    const double kl = kl_objective(aug, labels, k);
    double hl_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t l = 0; l < n; ++l)
        if (labels[l] == static_cast<std::int32_t>(c)) members.push_back(l);
      if (!members.empty())
        hl_sum += static_cast<double>(members.size()) * holoentropy(b, members);
    }
    CHECK(kl == doctest::Approx(hl_sum).epsilon(1e-9));
  }
}

TEST_CASE("planted outliers are isolated") {
  const std::set<std::size_t> planted = {7, 31};
  const partition_set bps = planted_outlier_bps(60, 50, planted, 5);
  const consensus_outcome out = cor_fuse(bps, 3, 99, 40, 100);
  REQUIRE(out.outliers.has_value());
  const std::set<std::size_t> got(out.outliers->begin(),
                                  out.outliers->end());
  CHECK(got == planted);
  // Inliers recover the planted three-way structure exactly.
  std::vector<std::int32_t> got_inliers, want_inliers;
  for (std::size_t l = 0; l < 60; ++l) {
    if (planted.count(l)) {
      CHECK(!out.result.covers(l));
      continue;
    }
    got_inliers.push_back(out.result.label(l));
    want_inliers.push_back(static_cast<std::int32_t>(l % 3));
  }
  CHECK(nmi(partition(got_inliers, 3), partition(want_inliers, 3)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("clean ensembles yield a small or empty outlier set") {
  const partition_set bps = planted_outlier_bps(60, 50, {}, 8);
  const consensus_outcome out = cor_fuse(bps, 3, 4, 10, 100);
  REQUIRE(out.outliers.has_value());
  CHECK(out.outliers->size() <= 6);
  std::vector<std::int32_t> got, want;
  for (std::size_t l = 0; l < 60; ++l) {
    if (!out.result.covers(l)) continue;
    got.push_back(out.result.label(l));
    want.push_back(static_cast<std::int32_t>(l % 3));
  }
  CHECK(nmi(partition(got, 3), partition(want, 3)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("outcome partitions all points and keeps traces monotone") {
  rng g(74);
  for (int rep = 0; rep < 5; ++rep) {
    const partition_set bps = ts::random_ensemble(25, 6, 4, 0.0, g);
    const consensus_outcome out = cor_fuse(bps, 3, g.next(), 6, 80);
    REQUIRE(out.outliers.has_value());
    CHECK(out.outliers->size() < 25);
    std::set<std::int32_t> o(out.outliers->begin(), out.outliers->end());
    for (std::size_t l = 0; l < 25; ++l)
      CHECK(out.result.covers(l) == (o.count(static_cast<std::int32_t>(l)) ==
                                     0));
    for (std::size_t t = 1; t < out.objective_trace.size(); ++t)
      CHECK(out.objective_trace[t] <= out.objective_trace[t - 1] + 1e-9);
  }
}

TEST_CASE("kl distance is near zero only on a pattern match") {
  rng g(75);
  const partition_set bps = ts::random_ensemble(12, 4, 3, 0.0, g);
  const binary_coding b = encode_binary(bps);
  // A singleton cluster's centroid is its member's own pattern.
  detail::cat_stats single;
  single.resize(1, b.blocks(), b.width());
  single.add_row(b, 0, 0);
  detail::cat_tables t1;
  detail::cor_table_builder{1e-6}(b, single, t1);
  CHECK(t1.dist(b, 0, 0) == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(t1.dist(b, 0, 0) < 1e-4);
  for (std::size_t l = 1; l < 12; ++l) {
    bool same = true;
    for (std::size_t i = 0; i < b.blocks(); ++i)
      same = same && b.column(l, i) == b.column(0, i);
    if (!same) CHECK(t1.dist(b, l, 0) > 0.01);
  }
}

TEST_SUITE_END();
