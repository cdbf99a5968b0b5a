#pragma once
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nps/rng.hpp"
#include "nps/types.hpp"

namespace nps {

// square 0/1 adjacency in sparse row-major form
struct Digraph {
  SparseMatd adj;
  std::int64_t n_nodes = 0;
  std::int64_t edges = 0;

  Matd dense() const { return Matd(adj); }
};

// q×q SVD-based numerical rank at relative tolerance
template <typename Scalar>
int numerical_rank(const Mat<Scalar>& X, Scalar rel_tol = Scalar(1e-12)) {
  Eigen::JacobiSVD<Mat<Scalar>> svd(X);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= Scalar(0)) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

// compound [X Xᵀ] of a square matrix
template <typename Scalar>
Mat<Scalar> compound(const Mat<Scalar>& X) {
  Mat<Scalar> C(X.rows(), 2 * X.cols());
  C << X, X.transpose();
  return C;
}

// Stochastic Block Model generator: cluster i has size fractions[i]*n and the
// edge (u,v) is Bernoulli with probability f(n)*upsilon(label(u), label(v)).
// The largest upsilon entry is normalized to 1 at construction, with the
// scale folded into the density f.
template <typename Scalar = double>
struct RoleModel {
  int q = 0;
  Vec<Scalar> fractions;                  // m_1..m_q
  Mat<Scalar> upsilon;                    // normalized, max entry = 1
  std::function<Scalar(int)> density;     // f(n), includes the folded scale
  Scalar m = 0;                           // sum of fractions
  int s = 0;                              // rank(upsilon)
  int r = 0;                              // rank([upsilon upsilonᵀ])

  RoleModel() = default;

  RoleModel(Mat<Scalar> ups, Vec<Scalar> fracs,
            std::function<Scalar(int)> f = [](int) { return Scalar(1); }) {
    if (ups.rows() != ups.cols()) throw std::invalid_argument("upsilon must be square");
    q = static_cast<int>(ups.rows());
    if (fracs.size() != q) throw std::invalid_argument("fractions size must equal q");
    if ((fracs.array() <= Scalar(0)).any())
      throw std::invalid_argument("fractions must be positive");
    if ((ups.array() < Scalar(0)).any() || (ups.array() > Scalar(1)).any())
      throw std::invalid_argument("upsilon entries must lie in [0,1]");
    Scalar peak = ups.maxCoeff();
    if (peak <= Scalar(0)) throw std::invalid_argument("upsilon must have a positive entry");
    upsilon = ups / peak;
    fractions = std::move(fracs);
    m = fractions.sum();
    density = [base = std::move(f), peak](int n) { return peak * base(n); };
    s = numerical_rank(upsilon);
    r = numerical_rank(compound(upsilon));
  }

  std::vector<int> sizes(int n) const {
    if (n < 1) throw std::invalid_argument("scale n must be >= 1");
    std::vector<int> sz(q);
    for (int i = 0; i < q; ++i) {
      sz[i] = static_cast<int>(std::lround(double(fractions(i)) * n));
      if (sz[i] <= 0) throw std::invalid_argument("cluster size rounds to zero");
    }
    return sz;
  }

  int n_nodes(int n) const {
    auto sz = sizes(n);
    int total = 0;
    for (int v : sz) total += v;
    return total;
  }

  // edge probability matrix f(n)*upsilon, validated against [0,1]
  Mat<Scalar> probabilities(int n) const {
    Scalar f = density(n);
    Mat<Scalar> P = f * upsilon;
    if ((P.array() < Scalar(0)).any() || (P.array() > Scalar(1)).any())
      throw std::invalid_argument("edge probability outside [0,1] after applying density");
    return P;
  }

  // noise scale of the model: delta^2 = 4 m n f(n)
  Scalar delta2(int n) const { return Scalar(4) * m * Scalar(n) * density(n); }
};

using RoleModeld = RoleModel<double>;

// block-contiguous ground-truth labels (cluster 1 first, then 2, ...)
template <typename Scalar>
Assignment block_assignment(const RoleModel<Scalar>& model, int n) {
  auto sz = model.sizes(n);
  Assignment a;
  a.q = model.q;
  for (int c = 0; c < model.q; ++c)
    for (int i = 0; i < sz[c]; ++i) a.labels.push_back(c + 1);
  return a;
}

// samples an SBM digraph; a pure function of (model, n, seed)
template <typename Scalar>
std::pair<Digraph, Assignment> sample_adjacency(const RoleModel<Scalar>& model, int n,
                                                std::uint64_t seed) {
  Mat<Scalar> P = model.probabilities(n);
  Assignment truth = block_assignment(model, n);
  const int N = truth.size();
  Rng rng(seed);

  Digraph g;
  g.n_nodes = N;
  g.adj.resize(N, N);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(double(N) * N * P.mean() * 1.05) + 16);
  for (int i = 0; i < N; ++i) {
    const int ci = truth.labels[i] - 1;
    for (int j = 0; j < N; ++j) {
      const double p = double(P(ci, truth.labels[j] - 1));
      if (rng.uniform01() < p) trips.emplace_back(i, j, 1.0);
    }
  }
  g.adj.setFromTriplets(trips.begin(), trips.end());
  g.adj.makeCompressed();
  g.edges = static_cast<std::int64_t>(trips.size());
  return {std::move(g), std::move(truth)};
}

// expectation M = f(n) Z upsilon Zᵀ kept in factored form
template <typename Scalar>
struct ExpectedAdjacency {
  Mat<Scalar> Z;     // mn×q block indicator
  Mat<Scalar> core;  // f(n)*upsilon
  Vec<Scalar> cluster_sizes;

  Mat<Scalar> dense() const { return Z * core * Z.transpose(); }

  // right-multiply M by a block of vectors without materializing it
  Mat<Scalar> apply(const Mat<Scalar>& X) const { return Z * (core * (Z.transpose() * X)); }
  Mat<Scalar> apply_transposed(const Mat<Scalar>& X) const {
    return Z * (core.transpose() * (Z.transpose() * X));
  }

  // exact nonzero singular values via the q×q form N^{1/2} core N^{1/2}
  Vec<Scalar> singular_values() const {
    Mat<Scalar> half = cluster_sizes.array().sqrt().matrix().asDiagonal();
    Mat<Scalar> small = half * core * half;
    Eigen::JacobiSVD<Mat<Scalar>> svd(small);
    return svd.singularValues();
  }
};

template <typename Scalar>
ExpectedAdjacency<Scalar> expected_adjacency(const RoleModel<Scalar>& model, int n) {
  auto sz = model.sizes(n);
  int N = 0;
  for (int v : sz) N += v;
  ExpectedAdjacency<Scalar> e;
  e.Z = Mat<Scalar>::Zero(N, model.q);
  int row = 0;
  for (int c = 0; c < model.q; ++c)
    for (int i = 0; i < sz[c]; ++i) e.Z(row++, c) = Scalar(1);
  e.core = model.density(n) * model.upsilon;
  e.cluster_sizes = Vec<Scalar>(model.q);
  for (int c = 0; c < model.q; ++c) e.cluster_sizes(c) = Scalar(sz[c]);
  return e;
}

// block-constant 0/1 graph from a role pattern (the regularly equivalent graph)
inline Digraph ideal_adjacency(const Assignment& truth, const Eigen::MatrixXi& binary_roles) {
  truth.validate();
  if (binary_roles.rows() != truth.q || binary_roles.cols() != truth.q)
    throw std::invalid_argument("binary role matrix must be q×q");
  const int N = truth.size();
  Digraph g;
  g.n_nodes = N;
  g.adj.resize(N, N);
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (binary_roles(truth.labels[i] - 1, truth.labels[j] - 1) != 0)
        trips.emplace_back(i, j, 1.0);
  g.adj.setFromTriplets(trips.begin(), trips.end());
  g.adj.makeCompressed();
  g.edges = static_cast<std::int64_t>(trips.size());
  return g;
}

// the paper's three-role cycle family: probability p along the 3-cycle,
// 1-p everywhere else, cluster fractions (10,10,10)
template <typename Scalar = double>
RoleModel<Scalar> cycle_model(Scalar p) {
  if (!(p > Scalar(0) && p < Scalar(1)))
    throw std::invalid_argument("cycle model requires p in (0,1)");
  Mat<Scalar> ups(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) ups(a, b) = (b == (a + 1) % 3) ? p : Scalar(1) - p;
  Vec<Scalar> fracs(3);
  fracs << Scalar(10), Scalar(10), Scalar(10);
  return RoleModel<Scalar>(std::move(ups), std::move(fracs));
}

// empirical per-block edge densities of a sample
inline Matd block_density(const Digraph& g, const Assignment& truth) {
  auto counts = truth.counts();
  Matd sums = Matd::Zero(truth.q, truth.q);
  for (int i = 0; i < g.adj.outerSize(); ++i)
    for (SparseMatd::InnerIterator it(g.adj, i); it; ++it)
      sums(truth.labels[it.row()] - 1, truth.labels[it.col()] - 1) += it.value();
  for (int a = 0; a < truth.q; ++a)
    for (int b = 0; b < truth.q; ++b) sums(a, b) /= double(counts[a]) * double(counts[b]);
  return sums;
}

} // namespace nps
