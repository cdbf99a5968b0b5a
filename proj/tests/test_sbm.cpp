#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "nps/sbm.hpp"

using namespace nps;

TEST_CASE("cycle model matches its two-probability construction") {
  auto m = cycle_model(0.6);
  CHECK(m.q == 3);
  CHECK(m.m == doctest::Approx(30.0));
  CHECK(m.fractions(0) == 10.0);

  // probabilities are p on the cycle pattern and 1-p elsewhere
  Matd P = m.probabilities(1);
  Matd expected(3, 3);
  expected << 0.4, 0.6, 0.4, 0.4, 0.4, 0.6, 0.6, 0.4, 0.4;
  CHECK((P - expected).cwiseAbs().maxCoeff() < 1e-14);

  // normalization folds the peak into the density
  CHECK(m.density(1) == doctest::Approx(0.6));
  CHECK(m.upsilon.maxCoeff() == doctest::Approx(1.0));

  CHECK(m.s == 3);
  CHECK(m.r == 3);
  CHECK(m.delta2(50) == doctest::Approx(3600.0)); // 4*30*50*0.6

  auto degenerate = cycle_model(0.5);
  CHECK(degenerate.s == 1);
  CHECK(degenerate.r == 1);

  CHECK_THROWS_AS(cycle_model(0.0), std::invalid_argument);
  CHECK_THROWS_AS(cycle_model(1.0), std::invalid_argument);
}

TEST_CASE("sizes and block assignment") {
  auto m = cycle_model(0.6);
  auto sz = m.sizes(2);
  CHECK(sz == std::vector<int>{20, 20, 20});
  CHECK(m.n_nodes(2) == 60);

  Assignment a = block_assignment(m, 2);
  CHECK(a.q == 3);
  CHECK(a.labels.front() == 1);
  CHECK(a.labels[19] == 1);
  CHECK(a.labels[20] == 2);
  CHECK(a.labels.back() == 3);

  CHECK_THROWS_AS(m.sizes(0), std::invalid_argument);
}

TEST_CASE("sampling is a pure function of the seed") {
  auto m = cycle_model(0.6);
  auto [g1, t1] = sample_adjacency(m, 1, 77);
  auto [g2, t2] = sample_adjacency(m, 1, 77);
  auto [g3, t3] = sample_adjacency(m, 1, 78);
  CHECK(g1.n_nodes == 30);
  CHECK(g1.edges == g2.edges);
  CHECK((g1.dense() - g2.dense()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.dense() - g3.dense()).cwiseAbs().maxCoeff() > 0.0);
  CHECK(t1.labels == t2.labels);
}

TEST_CASE("block densities concentrate on the model probabilities") {
  auto m = cycle_model(0.6);
  Matd P = m.probabilities(1);
  Matd acc = Matd::Zero(3, 3);
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto [g, truth] = sample_adjacency(m, 1, 1000 + t);
    acc += block_density(g, truth);
  }
  acc /= trials;
  CHECK((acc - P).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("within-cluster permutations leave block densities unchanged") {
  auto m = cycle_model(0.7);
  auto [g, truth] = sample_adjacency(m, 1, 5);
  Matd before = block_density(g, truth);

  // permute node indices inside each cluster
  const int N = static_cast<int>(g.n_nodes);
  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(99);
  for (int blockstart : {0, 10, 20})
    for (int i = 9; i > 0; --i) {
      int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(perm[blockstart + i], perm[blockstart + j]);
    }
  Matd A = g.dense();
  Matd B(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) B(perm[i], perm[j]) = A(i, j);
  Digraph h;
  h.n_nodes = N;
  h.adj = B.sparseView();
  h.edges = g.edges;

  Matd after = block_density(h, truth);
  CHECK((before - after).cwiseAbs().maxCoeff() == 0.0); // integer block sums, exact
}

TEST_CASE("expected adjacency factors and its singular values") {
  auto m = cycle_model(0.6);
  auto e = expected_adjacency(m, 2);
  Matd M = e.dense();
  CHECK(M.rows() == 60);

  // factored applications agree with the dense matrix
  Matd X = Matd::Random(60, 3);
  CHECK((e.apply(X) - M * X).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((e.apply_transposed(X) - M.transpose() * X).cwiseAbs().maxCoeff() < 1e-10);

  // nonzero singular values come out of the q×q core
  Eigen::JacobiSVD<Matd> svd(M);
  auto sv = e.singular_values();
  for (int i = 0; i < 3; ++i) CHECK(sv(i) == doctest::Approx(svd.singularValues()(i)));
  CHECK(svd.singularValues()(3) < 1e-10 * svd.singularValues()(0));

  // singular-value count equals rank of the core pattern
  CHECK(numerical_rank(M) == m.s);
}

TEST_CASE("three-node variant reduces the expectation to the core") {
  // fractions of 1 make the block indicator the identity
  Matd ups(3, 3);
  ups << 0.4, 0.6, 0.4, 0.4, 0.4, 0.6, 0.6, 0.4, 0.4;
  Vecd fr(3);
  fr << 1, 1, 1;
  RoleModel<double> tiny(ups, fr);
  auto e = expected_adjacency(tiny, 1);
  CHECK(e.Z.isApprox(Matd::Identity(3, 3)));
  CHECK((e.dense() - tiny.density(1) * tiny.upsilon).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("all-ones degenerate model") {
  Matd ups = Matd::Ones(1, 1);
  Vecd fr = Vecd::Ones(1);
  RoleModel<double> m(ups, fr);
  auto e = expected_adjacency(m, 4);
  CHECK((e.dense() - Matd::Ones(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

// random valid model with integer fractions so cluster sizes are exact
RoleModel<double> random_model(Rng& rng) {
  int q = 1 + static_cast<int>(rng.below(4));
  Matd ups(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) ups(i, j) = 0.05 + 0.95 * rng.uniform01();
  Vecd fr(q);
  for (int i = 0; i < q; ++i) fr(i) = 1.0 + double(rng.below(5));
  return RoleModel<double>(ups, fr);
}

} // namespace

TEST_CASE("singular values of the expectation are sandwiched by cluster sizes") {
  Rng rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_model(rng);
    int n = 1 + static_cast<int>(rng.below(5));
    double f = m.density(n);
    Matd M = expected_adjacency(m, n).dense();
    double mmin = m.fractions.minCoeff(), mmax = m.fractions.maxCoeff();

    Eigen::JacobiSVD<Matd> svd_m(M);
    Eigen::JacobiSVD<Matd> svd_u(m.upsilon);
    for (int i = 0; i < m.s; ++i) {
      double ratio = svd_m.singularValues()(i) / (n * f * svd_u.singularValues()(i));
      CHECK(ratio >= mmin * (1 - 1e-9));
      CHECK(ratio <= mmax * (1 + 1e-9));
    }
    for (int i = m.s; i < svd_m.singularValues().size(); ++i)
      CHECK(svd_m.singularValues()(i) < 1e-10 * svd_m.singularValues()(0));

    // the same sandwich holds for the side-by-side compounds
    Eigen::JacobiSVD<Matd> svd_cm(compound(M));
    Eigen::JacobiSVD<Matd> svd_cu(compound(m.upsilon));
    for (int i = 0; i < m.r; ++i) {
      double ratio = svd_cm.singularValues()(i) / (n * f * svd_cu.singularValues()(i));
      CHECK(ratio >= mmin * (1 - 1e-9));
      CHECK(ratio <= mmax * (1 + 1e-9));
    }
  }
}

TEST_CASE("ideal adjacency renders block-constant graphs") {
  Assignment a;
  a.q = 2;
  a.labels = {1, 1, 2, 2};
  Eigen::MatrixXi roles = Eigen::MatrixXi::Identity(2, 2);
  Digraph g = ideal_adjacency(a, roles);
  Matd want = Matd::Zero(4, 4);
  want.block(0, 0, 2, 2).setOnes();
  want.block(2, 2, 2, 2).setOnes();
  CHECK((g.dense() - want).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXi none = Eigen::MatrixXi::Zero(2, 2);
  CHECK(ideal_adjacency(a, none).edges == 0);
}

TEST_CASE("thresholded block means recover the binary pattern at p=0.9") {
  auto m = cycle_model(0.9);
  // the cycle pattern: entries above 0.5 are exactly the p-positions
  Eigen::MatrixXi want(3, 3);
  want << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  for (int t = 0; t < 50; ++t) {
    auto [g, truth] = sample_adjacency(m, 20, 4000 + t);
    Matd dens = block_density(g, truth);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) CHECK((dens(a, b) > 0.5 ? 1 : 0) == want(a, b));
  }
}

TEST_CASE("assignment validation") {
  Assignment a;
  a.q = 2;
  a.labels = {1, 2, 2};
  CHECK_NOTHROW(a.validate());
  auto clusters = a.clusters();
  CHECK(clusters.size() == 2);
  CHECK(clusters[0] == std::vector<int>{0});
  auto counts = a.counts();
  CHECK(counts[1] == 2);

  Assignment bad;
  bad.q = 2;
  bad.labels = {1, 3};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
