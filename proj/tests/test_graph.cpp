#include <Eigen/Dense>
#include <cmath>

#include "concord/coassociation.hpp"
#include "concord/graph.hpp"
#include "concord/metrics.hpp"
#include "concord/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace concord;
namespace ts = testsupport;

namespace {

coassociation planted_blocks(std::size_t n, std::size_t blocks,
                             std::int32_t r) {
  std::vector<std::int32_t> counts(n * n, 0);
  const std::size_t per = n / blocks;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x / per == y / per && x / per < blocks)
        counts[x * n + y] = x == y ? r : r;
  for (std::size_t x = 0; x < n; ++x) counts[x * n + x] = r;
  return coassociation(n, std::move(counts));
}

partition planted_truth(std::size_t n, std::size_t blocks) {
  std::vector<std::int32_t> labels(n);
  const std::size_t per = n / blocks;
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = static_cast<std::int32_t>(std::min(i / per, blocks - 1));
  return partition(std::move(labels), static_cast<std::int32_t>(blocks));
}

}  // namespace

TEST_SUITE_BEGIN("graph");

TEST_CASE("hac recovers ideal blocks") {
  const coassociation s = planted_blocks(12, 3, 7);
  const partition out = hac_consensus(s, 3);
  CHECK(nmi(out, planted_truth(12, 3)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dendrogram extremes") {
  const coassociation s = planted_blocks(8, 2, 3);
  const partition singletons = hac_consensus(s, 8);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(singletons.label(i) == static_cast<std::int32_t>(i));
  const partition whole = hac_consensus(s, 1);
  for (std::size_t i = 0; i < 8; ++i) CHECK(whole.label(i) == 0);
  CHECK_THROWS_AS(hac_consensus(s, 9), config_error);
}

TEST_CASE("hac shrugs off flipped pairs on average") {
  // Greedy merging can hand one or two points to a flip-induced bridge on
  // any single draw, so the robustness claim is checked in expectation.
  const std::size_t n = 150, blocks = 3;
  const std::int32_t r = 20;
  const partition truth = planted_truth(n, blocks);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    rng g(seed);
    std::vector<std::int32_t> counts = planted_blocks(n, blocks, r).counts();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y)
        if (g.unit() < 0.05) {
          const std::int32_t v = counts[x * n + y] > 0 ? 0 : r;
          counts[x * n + y] = v;
          counts[y * n + x] = v;
        }
    const coassociation noisy(n, std::move(counts));
    const double score = nmi(hac_consensus(noisy, 3), truth);
    CHECK(score >= 0.9);
    total += score;
  }
  CHECK(total / 10.0 >= 0.95);
}

TEST_CASE("hac is invariant to uniform scaling") {
  rng g(53);
  const partition_set bps = ts::random_ensemble(20, 6, 4, 0.0, g);
  const coassociation s = build_coassociation(bps);
  std::vector<std::int32_t> doubled = s.counts();
  for (auto& v : doubled) v *= 2;
  const coassociation s2(20, std::move(doubled));
  for (const int k : {2, 4, 7})
    CHECK(hac_consensus(s, k).labels() == hac_consensus(s2, k).labels());
}

TEST_CASE("single linkage differs but stays valid") {
  rng g(54);
  const partition_set bps = ts::random_ensemble(15, 5, 4, 0.0, g);
  const coassociation s = build_coassociation(bps);
  const partition avg = hac_consensus(s, 3, linkage_rule::average);
  const partition single = hac_consensus(s, 3, linkage_rule::single);
  CHECK(avg.size() == single.size());
  CHECK(single.k() == 3);
}

TEST_CASE("block-averaging propagation fixes block indicators") {
  // Equal-count blocks, X = block one-hot indicators, W = I, no activation:
  // each row's degree equals its block mass, so propagation returns X.
  const std::size_t n = 9, blocks = 3;
  const coassociation s = planted_blocks(n, blocks, 5);
  matrix x(n, blocks);
  for (std::size_t i = 0; i < n; ++i) x(i, i / 3) = 1.0;
  matrix eye(blocks, blocks);
  for (std::size_t i = 0; i < blocks; ++i) eye(i, i) = 1.0;
  const matrix z = consensus_propagate(s, x, {eye}, activation::none);
  REQUIRE(z.rows() == n);
  REQUIRE(z.cols() == blocks);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < blocks; ++j)
      CHECK(z(i, j) == doctest::Approx(x(i, j)).epsilon(1e-12));
  // Rows within a block are identical.
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 3 * b + 1; i < 3 * b + 3; ++i)
      for (std::size_t j = 0; j < blocks; ++j)
        CHECK(z(i, j) == doctest::Approx(z(3 * b, j)).epsilon(1e-12));
}

TEST_CASE("an empty graph reduces to a dense layer") {
  rng g(55);
  const std::size_t n = 6;
  const coassociation s(n, std::vector<std::int32_t>(n * n, 0));
  matrix x(n, 4);
  for (auto& v : x.data()) v = g.normal();
  matrix w(4, 2);
  for (auto& v : w.data()) v = g.normal();
  const matrix z = consensus_propagate(s, x, {w}, activation::relu);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < 4; ++c) dot += x(i, c) * w(c, j);
      CHECK(z(i, j) == doctest::Approx(std::max(0.0, dot)).epsilon(1e-12));
    }
}

TEST_CASE("normalized operator has spectral radius at most one") {
  rng g(56);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 15;
    const partition_set bps = ts::random_ensemble(n, 5, 4, 0.2, g);
    const coassociation s = build_coassociation(bps);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double di = std::sqrt(static_cast<double>(s.row_sum(i)) + 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double dj = std::sqrt(static_cast<double>(s.row_sum(j)) + 1.0);
        const double shat =
            static_cast<double>(s.at(i, j)) + (i == j ? 1.0 : 0.0);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            shat / (di * dj);
      }
    }
    // Power iteration oracle.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double radius = 0.0;
    for (int it = 0; it < 300; ++it) {
      v = (m * v).normalized();
      radius = std::abs(double(v.transpose() * m * v));
    }
    CHECK(radius <= 1.0 + 1e-8);
  }
}

TEST_CASE("stacked layers chain shapes and stay linear without activation") {
  rng g(57);
  const std::size_t n = 8;
  const partition_set bps = ts::random_ensemble(n, 3, 3, 0.0, g);
  const coassociation s = build_coassociation(bps);
  matrix x(n, 5);
  for (auto& v : x.data()) v = g.normal();
  matrix w0(5, 4), w1(4, 2);
  for (auto& v : w0.data()) v = g.normal();
  for (auto& v : w1.data()) v = g.normal();
  const matrix z = consensus_propagate(s, x, {w0, w1}, activation::none);
  REQUIRE(z.cols() == 2);
  matrix x2 = x;
  for (auto& v : x2.data()) v *= 2.0;
  const matrix z2 = consensus_propagate(s, x2, {w0, w1}, activation::none);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(z2(i, j) == doctest::Approx(2.0 * z(i, j)).epsilon(1e-9));

  matrix bad(3, 2);
  CHECK_THROWS_AS(consensus_propagate(s, x, {bad}, activation::none),
                  shape_mismatch);

  const matrix sig = consensus_propagate(s, x, {w0}, activation::sigmoid);
  for (const double v : sig.data()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_SUITE_END();
