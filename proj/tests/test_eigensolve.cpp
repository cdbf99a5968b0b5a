#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nps/eigensolve.hpp"
#include "nps/sbm.hpp"

using namespace nps;

namespace {

// symmetric matrix with a prescribed spectrum, random orthogonal frame
Matd with_spectrum(const Vecd& eigs, Rng& rng) {
  const int N = static_cast<int>(eigs.size());
  Matd G(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Matd> qr(G);
  Matd Q = qr.householderQ() * Matd::Identity(N, N);
  return Q * eigs.asDiagonal() * Q.transpose();
}

} // namespace

TEST_CASE("lanczos recovers a prescribed leading window") {
  Rng rng(21);
  Vecd eigs(40);
  for (int i = 0; i < 40; ++i) eigs(i) = 100.0 - 2.5 * i;
  Matd S = with_spectrum(eigs, rng);
  auto op = [&](const Vecd& v) -> Vecd { return S * v; };
  auto pairs = lanczos_sym(op, 40, 5, 5, Rng(5));
  REQUIRE(pairs.converged);
  for (int i = 0; i < 5; ++i)
    CHECK(pairs.values(i) == doctest::Approx(100.0 - 2.5 * i).epsilon(1e-9));
  // Ritz vectors are true eigenvectors: residual check
  for (int i = 0; i < 5; ++i) {
    Vecd v = pairs.vectors.col(i);
    CHECK((S * v - pairs.values(i) * v).norm() < 1e-7 * 100.0);
  }
}

TEST_CASE("lanczos pins the leading value of a degenerate eigenspace") {
  // a single Krylov sequence sees one copy of a repeated eigenvalue, so only
  // the leading value and its vector are contract here; multiplicity is the
  // block solver's job (next test)
  Rng rng(22);
  Vecd eigs(30);
  for (int i = 0; i < 30; ++i) eigs(i) = (i < 3) ? 50.0 : 10.0 - 0.3 * i;
  Matd S = with_spectrum(eigs, rng);
  auto op = [&](const Vecd& v) -> Vecd { return S * v; };
  auto pairs = lanczos_sym(op, 30, 1, 1, Rng(77));
  CHECK(pairs.values(0) == doctest::Approx(50.0).epsilon(1e-9));
  Vecd v0 = pairs.vectors.col(0);
  CHECK((S * v0 - 50.0 * v0).norm() < 1e-7 * 50.0);
}

TEST_CASE("subspace iteration resolves repeated eigenvalues") {
  Rng rng(25);
  Vecd eigs(30);
  for (int i = 0; i < 30; ++i) eigs(i) = (i < 3) ? 50.0 : 10.0 - 0.3 * i;
  Matd S = with_spectrum(eigs, rng);
  auto op = [&](const Matd& X) -> Matd { return S * X; };
  auto pairs = subspace_iteration(op, 30, 3, Rng(8));
  REQUIRE(pairs.converged);
  for (int i = 0; i < 3; ++i) CHECK(pairs.values(i) == doctest::Approx(50.0).epsilon(1e-9));
  // the returned basis lies inside the three-dimensional eigenspace
  CHECK((S * pairs.vectors - 50.0 * pairs.vectors).cwiseAbs().maxCoeff() < 1e-7 * 50.0);
}

TEST_CASE("subspace iteration matches the dense eigensolver") {
  Rng rng(23);
  Vecd eigs(35);
  for (int i = 0; i < 35; ++i) eigs(i) = 200.0 / (1 + i);
  Matd S = with_spectrum(eigs, rng);
  auto op = [&](const Matd& X) -> Matd { return S * X; };
  auto pairs = subspace_iteration(op, 35, 4, Rng(4));
  REQUIRE(pairs.converged);
  for (int i = 0; i < 4; ++i)
    CHECK(pairs.values(i) == doctest::Approx(eigs(i)).epsilon(1e-8));
  // returned basis spans the leading eigenspace
  Eigen::SelfAdjointEigenSolver<Matd> es(S);
  Matd U = es.eigenvectors().rightCols(4);
  Eigen::JacobiSVD<Matd> overlap(U.transpose() * pairs.vectors);
  CHECK(overlap.singularValues().minCoeff() > 1.0 - 1e-8);
}

TEST_CASE("dense window returns a descending spectrum slice") {
  Rng rng(24);
  Vecd eigs(12);
  for (int i = 0; i < 12; ++i) eigs(i) = double(12 - i);
  Matd S = with_spectrum(eigs, rng);
  auto w = dense_window(S, 3, 6);
  CHECK(w.values.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(w.values(i) == doctest::Approx(12.0 - i));
  CHECK(w.vectors.cols() == 3);
}

TEST_CASE("single-step operator equals its dense expansion") {
  auto model = cycle_model(0.6);
  auto [g, truth] = sample_adjacency(model, 1, 31);
  Matd A = g.dense();
  Matd direct = A * A.transpose() + A.transpose() * A;

  auto op = s1_operator(g);
  Matd X = Matd::Random(30, 4);
  CHECK((op(X) - direct * X).cwiseAbs().maxCoeff() < 1e-10);

  auto opd = s1_operator(A);
  CHECK((opd(X) - direct * X).cwiseAbs().maxCoeff() < 1e-10);

  auto vop = as_vector_op(s1_operator(g));
  Vecd v = X.col(0);
  CHECK((vop(v) - direct * v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sparse spectral norm matches the dense SVD") {
  auto model = cycle_model(0.7);
  for (int t = 0; t < 5; ++t) {
    auto [g, truth] = sample_adjacency(model, 1, 50 + t);
    Eigen::JacobiSVD<Matd> svd(g.dense());
    CHECK(spectral_norm(g) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-9));
  }
  Digraph empty;
  empty.n_nodes = 4;
  empty.adj.resize(4, 4);
  CHECK(spectral_norm(empty) == 0.0);
}

TEST_CASE("lanczos on the adjacency conjugation finds the same window as dense") {
  auto model = cycle_model(0.6);
  auto [g, truth] = sample_adjacency(model, 2, 60);
  Matd A = g.dense();
  Matd S1 = A * A.transpose() + A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Matd> es(S1, Eigen::EigenvaluesOnly);
  Vecd dense_eigs = es.eigenvalues().reverse();

  auto pairs = lanczos_sym(as_vector_op(s1_operator(g)), 60, 5, 5, Rng(99));
  for (int i = 0; i < 5; ++i)
    CHECK(pairs.values(i) == doctest::Approx(dense_eigs(i)).epsilon(1e-8));
}
