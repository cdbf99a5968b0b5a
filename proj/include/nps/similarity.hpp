#pragma once
#include <cmath>
#include <stdexcept>

#include "nps/eigensolve.hpp"
#include "nps/sbm.hpp"
#include "nps/types.hpp"

namespace nps {

// Γ_W[X] = W X Wᵀ + Wᵀ X W
template <typename DW, typename DX>
Mat<typename DW::Scalar> gamma_apply(const Eigen::MatrixBase<DW>& W,
                                     const Eigen::MatrixBase<DX>& X) {
  if (W.rows() != W.cols() || X.rows() != X.cols() || W.rows() != X.rows())
    throw std::invalid_argument("gamma_apply needs square matrices of equal size");
  return W * X * W.transpose() + W.transpose() * X * W;
}

// ‖Γ_W‖ = ‖[W Wᵀ]‖² = ‖WWᵀ + WᵀW‖, the attained operator norm of the map
template <typename Derived>
typename Derived::Scalar gamma_norm(const Eigen::MatrixBase<Derived>& W) {
  using S = typename Derived::Scalar;
  Mat<S> G = W * W.transpose() + W.transpose() * W;
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// matrix-free variant for adjacency matrices
inline double gamma_norm(const Digraph& g, std::uint64_t seed = 20240902ull) {
  if (g.edges == 0) return 0.0;
  auto op = as_vector_op(s1_operator(g));
  auto pairs = lanczos_sym(op, static_cast<int>(g.n_nodes), 1, 1, Rng(seed), 300, 1e-12);
  return pairs.values(0);
}

// cheap upper bound 2‖W‖²
template <typename Derived>
typename Derived::Scalar gamma_norm_bound(const Eigen::MatrixBase<Derived>& W) {
  Eigen::JacobiSVD<Mat<typename Derived::Scalar>> svd(W);
  auto s = svd.singularValues()(0);
  return 2 * s * s;
}

// N²×N² matrix K with K·vec(X) = vec(Γ_W[X]); vec is column-major, so the
// terms W X Wᵀ and Wᵀ X W vectorize to (W⊗W) and (Wᵀ⊗Wᵀ)
template <typename Scalar>
Mat<Scalar> gamma_kron(const Mat<Scalar>& W, int cap = 64) {
  const int N = static_cast<int>(W.rows());
  if (N > cap) throw std::invalid_argument("Kronecker oracle limited to small matrices");
  Mat<Scalar> K(N * N, N * N);
  for (int c = 0; c < N; ++c)
    for (int r = 0; r < N; ++r)
      K.block(r * N, c * N, N, N) =
          W(r, c) * W + W(c, r) * W.transpose(); // (W⊗W + Wᵀ⊗Wᵀ) block (r,c)
  return K;
}

enum class BetaKind { Safe, HalfGamma, Fig4Literal, Explicit };

struct BetaPolicy {
  BetaKind kind = BetaKind::Safe;
  double explicit_beta = 0.0;

  static BetaPolicy safe() { return {BetaKind::Safe, 0.0}; }
  static BetaPolicy half_gamma() { return {BetaKind::HalfGamma, 0.0}; }
  static BetaPolicy fig4_literal() { return {BetaKind::Fig4Literal, 0.0}; }
  static BetaPolicy explicit_value(double beta) { return {BetaKind::Explicit, beta}; }
};

struct Beta {
  double beta = 0.0;
  double beta2 = 0.0;
  double gamma_a = 0.0; // β²‖Γ_A‖ for the input matrix
};

namespace detail {

inline Beta resolve_beta(BetaPolicy policy, double norm2A, double gammaA) {
  if (norm2A <= 0.0) throw std::invalid_argument("beta policy needs a nonzero matrix");
  Beta b;
  switch (policy.kind) {
    case BetaKind::Safe:
      b.beta2 = 1.0 / (4.0 * norm2A);
      b.beta = std::sqrt(b.beta2);
      break;
    case BetaKind::HalfGamma:
      b.beta2 = 1.0 / (2.0 * gammaA);
      b.beta = std::sqrt(b.beta2);
      break;
    case BetaKind::Fig4Literal:
      // §5 prints beta = (2‖[A Aᵀ]‖²)⁻¹, i.e. the expression defines β itself
      b.beta = 1.0 / (2.0 * gammaA);
      b.beta2 = b.beta * b.beta;
      break;
    case BetaKind::Explicit:
      b.beta = policy.explicit_beta;
      b.beta2 = b.beta * b.beta;
      break;
  }
  b.gamma_a = b.beta2 * gammaA;
  if (b.gamma_a >= 1.0)
    throw std::invalid_argument("beta violates the convergence condition beta^2*|Gamma_A| < 1");
  return b;
}

} // namespace detail

template <typename Derived>
Beta choose_beta(const Eigen::MatrixBase<Derived>& A, BetaPolicy policy) {
  Eigen::JacobiSVD<Matd> svd(A);
  double nrm = svd.singularValues()(0);
  return detail::resolve_beta(policy, nrm * nrm, double(gamma_norm(A)));
}

inline Beta choose_beta(const Digraph& g, BetaPolicy policy) {
  double nrm = spectral_norm(g);
  return detail::resolve_beta(policy, nrm * nrm, gamma_norm(g));
}

enum class StateSource { FromSample, FromExpectation };

// a similarity matrix S_k (or T_k) together with how it was produced
struct SimilarityState {
  Matd matrix;
  int k = 0;          // recurrence depth; -1 when the limit was taken
  double beta2 = 0.0;
  StateSource source = StateSource::FromSample;
  bool is_limit = false;
};

// k dense steps of S_{j+1} = Γ_W[I + β² S_j] starting from S_0 = 0
template <typename Derived>
SimilarityState similarity_recurrence(const Eigen::MatrixBase<Derived>& W, double beta2, int k,
                                      StateSource source = StateSource::FromSample) {
  if (k < 0) throw std::invalid_argument("recurrence depth must be nonnegative");
  if (beta2 > 0 && beta2 * double(gamma_norm(W)) >= 1.0)
    throw std::invalid_argument("beta^2*|Gamma_W| >= 1: recurrence would diverge");
  const int N = static_cast<int>(W.rows());
  Matd S = Matd::Zero(N, N);
  Matd I = Matd::Identity(N, N);
  for (int j = 0; j < k; ++j) S = gamma_apply(W, Matd(I + beta2 * S));
  SimilarityState st;
  st.matrix = std::move(S);
  st.k = k;
  st.beta2 = beta2;
  st.source = source;
  return st;
}

// iterate until ‖S_{k+1}-S_k‖_F ≤ rel·‖S_{k+1}‖_F (geometric decay at rate γ)
template <typename Derived>
SimilarityState similarity_limit(const Eigen::MatrixBase<Derived>& W, double beta2,
                                 int cap = 200, double rel = 1e-12,
                                 StateSource source = StateSource::FromSample) {
  if (beta2 * double(gamma_norm(W)) >= 1.0)
    throw std::invalid_argument("beta^2*|Gamma_W| >= 1: no limit exists");
  const int N = static_cast<int>(W.rows());
  Matd S = Matd::Zero(N, N);
  Matd I = Matd::Identity(N, N);
  int k = 0;
  for (; k < cap; ++k) {
    Matd next = gamma_apply(W, Matd(I + beta2 * S));
    double diff = (next - S).norm();
    S = std::move(next);
    if (diff <= rel * S.norm()) { ++k; break; }
  }
  SimilarityState st;
  st.matrix = std::move(S);
  st.k = -1;
  st.beta2 = beta2;
  st.source = source;
  st.is_limit = true;
  return st;
}

// ground-truth limit from the vec fixed point (I - β²K_W)·vec(S) = vec(Γ_W[I])
template <typename Derived>
SimilarityState similarity_limit_oracle(const Eigen::MatrixBase<Derived>& W, double beta,
                                        int cap = 64) {
  const int N = static_cast<int>(W.rows());
  if (N > cap) throw std::invalid_argument("limit oracle restricted to small matrices");
  Matd K = gamma_kron(Matd(W), cap);
  double beta2 = beta * beta;
  Eigen::SelfAdjointEigenSolver<Matd> es(K, Eigen::EigenvaluesOnly);
  double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (beta2 * rho >= 1.0)
    throw std::invalid_argument("spectral radius >= 1/beta^2: fixed point does not exist");
  Matd S1 = gamma_apply(W, Matd(Matd::Identity(N, N)));
  Eigen::Map<Vecd> rhs(S1.data(), N * N);
  Matd system = Matd::Identity(N * N, N * N) - beta2 * K;
  Vecd x = system.partialPivLu().solve(rhs);
  SimilarityState st;
  st.matrix = Eigen::Map<Matd>(x.data(), N, N);
  st.matrix = ((st.matrix + st.matrix.transpose()) / 2.0).eval();
  st.k = -1;
  st.beta2 = beta2;
  st.is_limit = true;
  return st;
}

// T_k kept in its exact rank-q compression: T_k = Z T̂_k Zᵀ with T̂ q×q.
// One step maps T̂ ↦ B D Bᵀ + Bᵀ D B + β²(B D T̂ D Bᵀ + Bᵀ D T̂ D B)
// where B = f(n)Υ and D = diag(cluster sizes).
template <typename Scalar = double>
struct TCompressed {
  Mat<Scalar> that;   // q×q
  Vec<Scalar> sizes;  // cluster sizes
  int k = 0;
  Scalar beta2 = 0;
  bool is_limit = false;

  // nonzero eigenvalues of T_k, descending (the rest are exactly 0)
  Vec<Scalar> eigenvalues() const {
    Mat<Scalar> half = sizes.array().sqrt().matrix().asDiagonal();
    Mat<Scalar> H = half * that * half;
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(((H + H.transpose()) / 2).eval());
    return es.eigenvalues().reverse();
  }

  Vec<Scalar> eigenvalues_padded(int window) const {
    Vec<Scalar> nz = eigenvalues();
    Vec<Scalar> out = Vec<Scalar>::Zero(window);
    out.head(std::min<int>(window, nz.size())) = nz.head(std::min<int>(window, nz.size()));
    return out;
  }

  // N×r orthonormal dominant basis; rows are constant within each cluster
  Mat<Scalar> dominant_basis(int r) const {
    const int q = static_cast<int>(that.rows());
    Mat<Scalar> half = sizes.array().sqrt().matrix().asDiagonal();
    Mat<Scalar> H = half * that * half;
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(((H + H.transpose()) / 2).eval());
    Mat<Scalar> W = es.eigenvectors().rowwise().reverse().leftCols(r);
    int N = 0;
    for (int c = 0; c < q; ++c) N += static_cast<int>(sizes(c));
    Mat<Scalar> basis(N, r);
    int row = 0;
    for (int c = 0; c < q; ++c) {
      Scalar scale = Scalar(1) / std::sqrt(sizes(c));
      for (int i = 0; i < static_cast<int>(sizes(c)); ++i) basis.row(row++) = scale * W.row(c);
    }
    return basis;
  }

  Mat<Scalar> dense() const {
    const int q = static_cast<int>(that.rows());
    int N = 0;
    for (int c = 0; c < q; ++c) N += static_cast<int>(sizes(c));
    Mat<Scalar> Z = Mat<Scalar>::Zero(N, q);
    int row = 0;
    for (int c = 0; c < q; ++c)
      for (int i = 0; i < static_cast<int>(sizes(c)); ++i) Z(row++, c) = Scalar(1);
    return Z * that * Z.transpose();
  }
};

template <typename Scalar>
TCompressed<Scalar> t_recurrence(const RoleModel<Scalar>& model, int n, int k, Scalar beta2) {
  auto sz = model.sizes(n);
  Mat<Scalar> B = model.density(n) * model.upsilon;
  Vec<Scalar> d(model.q);
  for (int c = 0; c < model.q; ++c) d(c) = Scalar(sz[c]);
  auto D = d.asDiagonal();
  Mat<Scalar> base = B * D * B.transpose() + B.transpose() * D * B;
  Mat<Scalar> that = Mat<Scalar>::Zero(model.q, model.q);
  for (int j = 0; j < k; ++j)
    that = base + beta2 * (B * D * that * D * B.transpose() +
                           B.transpose() * D * that * D * B);
  TCompressed<Scalar> t;
  t.that = std::move(that);
  t.sizes = d;
  t.k = k;
  t.beta2 = beta2;
  return t;
}

template <typename Scalar>
TCompressed<Scalar> t_limit(const RoleModel<Scalar>& model, int n, Scalar beta2,
                            int cap = 200, Scalar rel = Scalar(1e-12)) {
  auto sz = model.sizes(n);
  Mat<Scalar> B = model.density(n) * model.upsilon;
  Vec<Scalar> d(model.q);
  for (int c = 0; c < model.q; ++c) d(c) = Scalar(sz[c]);
  auto D = d.asDiagonal();
  Mat<Scalar> base = B * D * B.transpose() + B.transpose() * D * B;
  Mat<Scalar> that = Mat<Scalar>::Zero(model.q, model.q);
  for (int j = 0; j < cap; ++j) {
    Mat<Scalar> next = base + beta2 * (B * D * that * D * B.transpose() +
                                       B.transpose() * D * that * D * B);
    Scalar diff = (next - that).norm();
    that = std::move(next);
    if (diff <= rel * that.norm()) break;
  }
  TCompressed<Scalar> t;
  t.that = std::move(that);
  t.sizes = d;
  t.k = -1;
  t.beta2 = beta2;
  t.is_limit = true;
  return t;
}

} // namespace nps
