#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nps/rng.hpp"
#include "nps/sbm.hpp"
#include "nps/similarity.hpp"

using namespace nps;

namespace {

Matd random_square(int n, Rng& rng, double density = 1.0) {
  Matd W(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      W(i, j) = (rng.uniform01() < density) ? rng.normal() : 0.0;
  return W;
}

Matd random_digraph_matrix(int n, Rng& rng, double p = 0.4) {
  Matd W(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) W(i, j) = rng.bernoulli(p) ? 1.0 : 0.0;
  return W;
}

} // namespace

TEST_CASE("two-sided conjugation on pinned inputs") {
  Matd I2 = Matd::Identity(2, 2);
  CHECK((gamma_apply(I2, I2) - 2.0 * I2).cwiseAbs().maxCoeff() == 0.0);

  Matd nil(2, 2);
  nil << 0, 1, 0, 0;
  CHECK((gamma_apply(nil, I2) - I2).cwiseAbs().maxCoeff() == 0.0);

  Matd W(2, 2), X(2, 2);
  W << 1, 2, 3, 4;
  X << 5, 6, 7, 8;
  Matd want = W * X * W.transpose() + W.transpose() * X * W;
  CHECK((gamma_apply(W, X) - want).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(gamma_apply(W, Matd::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("vec identity against the explicit Kronecker build") {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    Matd W = random_square(5, rng);
    Matd X = random_square(5, rng);
    Matd K = gamma_kron(W);
    Matd Y = gamma_apply(W, X);
    Eigen::Map<Vecd> vx(X.data(), 25);
    Eigen::Map<Vecd> vy(Y.data(), 25);
    CHECK((K * vx - vy).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + vy.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("operator norm of the conjugation map") {
  CHECK(gamma_norm(Matd::Identity(4, 4)) == doctest::Approx(2.0));

  // symmetric W attains the 2|W|^2 ceiling
  Rng rng(2);
  Matd W = random_square(5, rng);
  Matd sym = (W + W.transpose()) / 2.0;
  Eigen::JacobiSVD<Matd> svd(sym);
  double n2 = svd.singularValues()(0);
  CHECK(gamma_norm(sym) == doctest::Approx(2.0 * n2 * n2).epsilon(1e-10));

  for (int t = 0; t < 10; ++t) {
    Matd A = random_square(6, rng);
    // Kronecker spectral radius never exceeds the I-attained norm, which
    // never exceeds the crude 2|W|^2 ceiling
    Matd K = gamma_kron(A);
    Eigen::SelfAdjointEigenSolver<Matd> es(K, Eigen::EigenvaluesOnly);
    double kron = es.eigenvalues().cwiseAbs().maxCoeff();
    double gn = gamma_norm(A);
    Eigen::JacobiSVD<Matd> sa(A);
    double a2 = sa.singularValues()(0);
    CHECK(kron <= gn * (1 + 1e-10));
    CHECK(gn <= 2.0 * a2 * a2 * (1 + 1e-10));
    CHECK(gamma_norm_bound(A) == doctest::Approx(2.0 * a2 * a2));
  }
}

TEST_CASE("norm equals the conjugation applied to the identity") {
  // the operator norm is attained at X = I, so it equals |Gamma_W[I]|
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    Matd W = random_digraph_matrix(6, rng);
    double gn = gamma_norm(W);
    Matd GI = gamma_apply(W, Matd(Matd::Identity(6, 6)));
    Eigen::SelfAdjointEigenSolver<Matd> es(GI, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(gn).epsilon(1e-10));
  }
}

TEST_CASE("beta policies") {
  Matd I5 = Matd::Identity(5, 5);

  auto safe = choose_beta(I5, BetaPolicy::safe());
  CHECK(safe.beta2 == doctest::Approx(0.25));

  auto half = choose_beta(I5, BetaPolicy::half_gamma());
  CHECK(half.beta2 == doctest::Approx(0.25)); // gamma_norm(I) = 2
  CHECK(half.gamma_a == doctest::Approx(0.5));

  auto lit = choose_beta(I5, BetaPolicy::fig4_literal());
  CHECK(lit.beta == doctest::Approx(0.25)); // beta itself is (2*2)^{-1}
  CHECK(lit.beta2 == doctest::Approx(0.0625));

  auto expl = choose_beta(I5, BetaPolicy::explicit_value(0.5));
  CHECK(expl.beta2 == doctest::Approx(0.25));
  CHECK_THROWS_AS(choose_beta(I5, BetaPolicy::explicit_value(0.8)), std::invalid_argument);
  CHECK_THROWS_AS(choose_beta(Matd(Matd::Zero(3, 3)), BetaPolicy::safe()),
                  std::invalid_argument);

  // every policy keeps the convergence product strictly below one on samples
  auto model = cycle_model(0.6);
  for (int t = 0; t < 20; ++t) {
    auto [g, truth] = sample_adjacency(model, 1, 600 + t);
    for (auto policy :
         {BetaPolicy::safe(), BetaPolicy::half_gamma(), BetaPolicy::fig4_literal()}) {
      auto b = choose_beta(g, policy);
      CHECK(b.gamma_a < 1.0);
      CHECK(b.gamma_a > 0.0);
    }
  }
}

TEST_CASE("sparse and dense beta agree") {
  auto model = cycle_model(0.6);
  auto [g, truth] = sample_adjacency(model, 1, 9);
  auto from_graph = choose_beta(g, BetaPolicy::half_gamma());
  auto from_dense = choose_beta(g.dense(), BetaPolicy::half_gamma());
  CHECK(from_graph.beta2 == doctest::Approx(from_dense.beta2).epsilon(1e-8));
}

TEST_CASE("recurrence basics") {
  Rng rng(4);
  Matd A = random_digraph_matrix(6, rng);
  auto b = choose_beta(A, BetaPolicy::safe());

  CHECK(similarity_recurrence(A, b.beta2, 0).matrix.cwiseAbs().maxCoeff() == 0.0);

  // one step never sees beta
  Matd s1a = similarity_recurrence(A, b.beta2, 1).matrix;
  Matd s1b = similarity_recurrence(A, 0.0, 1).matrix;
  Matd direct = A * A.transpose() + A.transpose() * A;
  CHECK((s1a - direct).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s1a - s1b).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(similarity_recurrence(A, 10.0, 2), std::invalid_argument);
}

TEST_CASE("nilpotent pattern has a closed-form limit") {
  // For W=[[0,1],[0,0]], Gamma_W[diag(a,d)] = diag(d,a), so the fixed point
  // is s*I with s = 1 + beta^2*s, i.e. s = 1/(1-beta^2) = 4/3 at beta = 1/2.
  Matd W(2, 2);
  W << 0, 1, 0, 0;
  double beta = 0.5;
  auto oracle = similarity_limit_oracle(W, beta);
  double s = 1.0 / (1.0 - beta * beta);
  Matd want = s * Matd::Identity(2, 2);
  CHECK((oracle.matrix - want).cwiseAbs().maxCoeff() < 1e-12);

  auto iterated = similarity_limit(W, beta * beta);
  CHECK((iterated.matrix - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("deep recurrence meets the fixed-point oracle") {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    Matd A = random_digraph_matrix(6, rng);
    if (A.cwiseAbs().maxCoeff() == 0.0) A(0, 1) = 1.0;
    auto b = choose_beta(A, BetaPolicy::safe());
    Matd deep = similarity_recurrence(A, b.beta2, 60).matrix;
    Matd oracle = similarity_limit_oracle(A, b.beta).matrix;
    double scale = oracle.norm();
    CHECK((deep - oracle).norm() <= 1e-8 * scale);

    Matd lim = similarity_limit(A, b.beta2).matrix;
    CHECK((lim - oracle).norm() <= 1e-8 * scale);
  }
}

TEST_CASE("limit oracle refuses divergent configurations") {
  Matd I3 = Matd::Identity(3, 3);
  CHECK_THROWS_AS(similarity_limit_oracle(I3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(similarity_limit(I3, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(similarity_limit_oracle(Matd(Matd::Zero(70, 70)), 0.1),
                  std::invalid_argument); // above the oracle cap
}

TEST_CASE("similarity states stay symmetric and positive semidefinite") {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    Matd A = random_digraph_matrix(7, rng);
    auto b = choose_beta(A, (t % 2) ? BetaPolicy::safe() : BetaPolicy::half_gamma());
    Matd S = similarity_recurrence(A, b.beta2, 5).matrix;
    CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + S.cwiseAbs().maxCoeff()));
    Eigen::SelfAdjointEigenSolver<Matd> es(S, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("compressed expectation recurrence matches the dense one") {
  auto model = cycle_model(0.6);
  const int n = 1; // 30 nodes;  dense reference is cheap
  Matd M = expected_adjacency(model, n).dense();
  for (double beta2 : {0.0, 1e-6, 3e-6}) {
    for (int k : {1, 3, 10}) {
      if (beta2 * gamma_norm(M) >= 1.0) continue;
      Matd dense = similarity_recurrence(M, beta2, k, StateSource::FromExpectation).matrix;
      Matd fast = t_recurrence(model, n, k, beta2).dense();
      CHECK((dense - fast).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + dense.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("compressed eigenvalues agree with the dense spectrum") {
  auto model = cycle_model(0.6);
  const int n = 2;
  double beta2 = 1e-6;
  auto T = t_recurrence(model, n, 10, beta2);
  Matd dense = T.dense();
  Eigen::SelfAdjointEigenSolver<Matd> es(dense, Eigen::EigenvaluesOnly);
  Vecd full = es.eigenvalues().reverse();
  Vecd fast = T.eigenvalues();
  for (int i = 0; i < 3; ++i)
    CHECK(fast(i) == doctest::Approx(full(i)).epsilon(1e-9));
  // everything after the compressed rank is numerically zero
  for (int i = 3; i < 10; ++i) CHECK(std::abs(full(i)) < 1e-8 * full(0));

  // the padded view appends exact trailing zeros
  Vecd padded = T.eigenvalues_padded(6);
  CHECK(padded.size() == 6);
  CHECK(padded(5) == 0.0);

  // basis columns are orthonormal and block-constant
  Matd basis = T.dominant_basis(3);
  CHECK((basis.transpose() * basis - Matd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((basis.row(0) - basis.row(1)).cwiseAbs().maxCoeff() == 0.0);

  auto lim = t_limit(model, n, beta2);
  CHECK(lim.is_limit);
  CHECK(lim.eigenvalues()(0) >= fast(0) * (1 - 1e-12)); // limit dominates every iterate
}
