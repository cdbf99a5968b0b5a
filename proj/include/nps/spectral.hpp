#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nps/eigensolve.hpp"
#include "nps/similarity.hpp"
#include "nps/types.hpp"

namespace nps {

// leading spectrum window with gap statistics and the rank estimate
struct SpectralReport {
  Vecd eigenvalues;    // descending window
  Matd basis;          // N×r orthonormal, leading eigenvectors
  int estimated_rank = 0;
  bool rank_ambiguous = false;
  double best_ratio = 0.0;
  double runner_up_ratio = 0.0;
  Vecd abs_gaps;       // λ_i - λ_{i+1}
  Vecd rel_gaps;       // λ_i / λ_{i+1}, floored at 1e-12·λ_1
};

struct RankEstimate {
  int rank = 0;
  double best_ratio = 0.0;
  double runner_up_ratio = 0.0;
  bool ambiguous = false;
};

inline Vecd relative_gaps(const Vecd& eigs) {
  const int w = static_cast<int>(eigs.size());
  if (w < 2) return Vecd();
  double floor = std::max(1e-12 * std::abs(eigs(0)), 1e-300);
  Vecd rel(w - 1);
  for (int i = 0; i + 1 < w; ++i) {
    double hi = std::max(eigs(i), floor);
    double lo = std::max(eigs(i + 1), floor);
    rel(i) = hi / lo;
  }
  return rel;
}

// Rank from the spectrum window: the last index whose relative gap clears the
// threshold wins; when no gap does, fall back to the largest gap (ties toward
// the smaller index) and flag the estimate as ambiguous. Ambiguity is also
// flagged when the two best gaps are within a factor two of each other.
inline RankEstimate estimate_rank(const Vecd& eigenvalues, double threshold = 2.0) {
  const int w = static_cast<int>(eigenvalues.size());
  if (w < 2) throw std::invalid_argument("gap table needs at least two eigenvalues");
  if (eigenvalues.cwiseAbs().maxCoeff() < 1e-12) throw std::domain_error("no signal");
  Vecd rel = relative_gaps(eigenvalues);

  RankEstimate est;
  int arg_best = 0;
  for (int i = 1; i < rel.size(); ++i)
    if (rel(i) > rel(arg_best)) arg_best = i;
  est.best_ratio = rel(arg_best);
  est.runner_up_ratio = 0.0;
  for (int i = 0; i < rel.size(); ++i)
    if (i != arg_best) est.runner_up_ratio = std::max(est.runner_up_ratio, rel(i));

  int last_clearing = -1;
  for (int i = 0; i < rel.size(); ++i)
    if (rel(i) >= threshold) last_clearing = i;

  if (last_clearing >= 0) {
    est.rank = last_clearing + 1;
    est.ambiguous = est.best_ratio <= 2.0 * est.runner_up_ratio;
  } else {
    est.rank = arg_best + 1;
    est.ambiguous = true;
  }
  return est;
}

inline RankEstimate estimate_rank(const SpectralReport& report, double threshold = 2.0) {
  return estimate_rank(report.eigenvalues, threshold);
}

namespace detail {

inline void finish_report(SpectralReport& rep) {
  const int w = static_cast<int>(rep.eigenvalues.size());
  rep.abs_gaps = Vecd(std::max(0, w - 1));
  for (int i = 0; i + 1 < w; ++i) rep.abs_gaps(i) = rep.eigenvalues(i) - rep.eigenvalues(i + 1);
  rep.rel_gaps = relative_gaps(rep.eigenvalues);
  try {
    RankEstimate est = estimate_rank(rep.eigenvalues);
    rep.estimated_rank = est.rank;
    rep.rank_ambiguous = est.ambiguous;
    rep.best_ratio = est.best_ratio;
    rep.runner_up_ratio = est.runner_up_ratio;
  } catch (const std::domain_error&) {
    rep.estimated_rank = 0;
    rep.rank_ambiguous = true;
  }
}

} // namespace detail

// leading r eigenpairs of a dense symmetric matrix plus a gap window of at
// least r+5 values
inline SpectralReport truncated_evd(const Matd& S, int r, int window = 0) {
  const int N = static_cast<int>(S.rows());
  if (r < 1 || r > N) throw std::invalid_argument("rank out of range");
  if (window < r + 5) window = r + 5;
  auto pairs = dense_window(S, r, std::min(window, N));
  SpectralReport rep;
  rep.eigenvalues = pairs.values;
  rep.basis = pairs.vectors;
  detail::finish_report(rep);
  return rep;
}

inline SpectralReport truncated_evd(const SimilarityState& S, int r, int window = 0) {
  return truncated_evd(S.matrix, r, window);
}

// matrix-free window for large instances (Lanczos with full reorthogonalization)
template <class BlockOp>
SpectralReport truncated_evd_op(BlockOp&& op, int N, int r, int window, std::uint64_t seed,
                                int max_iter = 300, double tol = 1e-10) {
  if (r < 1 || r > N) throw std::invalid_argument("rank out of range");
  if (window < r + 5) window = r + 5;
  auto pairs = lanczos_sym(as_vector_op(op), N, r, std::min(window, N), Rng(seed), max_iter, tol);
  SpectralReport rep;
  rep.eigenvalues = pairs.values;
  rep.basis = pairs.vectors;
  detail::finish_report(rep);
  return rep;
}

// sines of principal angles between equal-dimension subspaces
struct SubspaceAngles {
  Vecd sines; // descending, values in [0,1]
  double norm() const { return sines.size() ? sines(0) : 0.0; }
};

template <typename DU, typename DV>
SubspaceAngles principal_angle_sines(const Eigen::MatrixBase<DU>& U,
                                     const Eigen::MatrixBase<DV>& V) {
  if (U.cols() != V.cols()) throw std::invalid_argument("subspace rank mismatch");
  if (U.rows() != V.rows()) throw std::invalid_argument("subspace dimension mismatch");
  const int r = static_cast<int>(U.cols());
  auto check = [&](const Matd& B) {
    Matd G = B.transpose() * B;
    if ((G - Matd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("basis not orthonormal");
  };
  Matd Ud = U, Vd = V;
  check(Ud);
  check(Vd);
  Eigen::JacobiSVD<Matd> svd(Ud.transpose() * Vd);
  Vecd cos = svd.singularValues();
  SubspaceAngles a;
  a.sines = Vecd(r);
  for (int i = 0; i < r; ++i) {
    double c = std::min(1.0, std::max(0.0, cos(i)));
    a.sines(r - 1 - i) = std::sqrt(std::max(0.0, 1.0 - c * c)); // reverse: sines descending
  }
  return a;
}

namespace detail {

// X_h = q dominant left singular vectors of Y via the 3q×3q Gram eigendecomposition
inline Matd dominant_left_from_gram(const Matd& Y, int q) {
  Matd G = Y.transpose() * Y;
  Eigen::SelfAdjointEigenSolver<Matd> es(((G + G.transpose()) / 2.0).eval());
  Vecd lam = es.eigenvalues().reverse();
  Matd V = es.eigenvectors().rowwise().reverse();
  double top = std::max(lam(0), 0.0);
  Matd X(Y.rows(), q);
  bool degenerate = false;
  for (int i = 0; i < q; ++i) {
    double s2 = std::max(lam(i), 0.0);
    if (s2 <= 1e-28 * std::max(top, 1.0)) { degenerate = true; break; }
    X.col(i) = Y * V.col(i) / std::sqrt(s2);
  }
  if (!degenerate &&
      (X.transpose() * X - Matd::Identity(q, q)).cwiseAbs().maxCoeff() <= 1e-10)
    return X;
  // rank-deficient or drifting Gram factor: fall back to a thin QR polish
  Eigen::HouseholderQR<Matd> qr(degenerate ? Y : X);
  return Matd(qr.householderQ() * Matd::Identity(Y.rows(), q));
}

template <class ApplyA, class ApplyAT>
Matd algorithm1_impl(ApplyA&& applyA, ApplyAT&& applyAT, int N, int q, double beta, int k,
                     std::uint64_t seed) {
  if (q > N) throw std::invalid_argument("q exceeds node count");
  if (k < 1) throw std::invalid_argument("depth must be >= 1");
  auto op = [&](const Matd& X) -> Matd { return applyA(applyAT(X)) + applyAT(applyA(X)); };
  auto x1 = subspace_iteration(op, N, q, Rng(seed));
  Matd X1 = x1.vectors;
  Matd X = X1;
  for (int h = 2; h <= k; ++h) {
    Matd Y(N, 3 * q);
    Y.leftCols(q) = beta * applyA(X);
    Y.middleCols(q, q) = beta * applyAT(X);
    Y.rightCols(q) = X1;
    X = dominant_left_from_gram(Y, q);
  }
  return X;
}

} // namespace detail

// Algorithm 1: iterates N×3q sketches [βA X, βAᵀX, X₁] without ever forming S_k
inline Matd algorithm1_subspace(const Digraph& g, int q, double beta, int k,
                                std::uint64_t seed = 20240903ull) {
  const int N = static_cast<int>(g.n_nodes);
  return detail::algorithm1_impl(
      [&](const Matd& X) -> Matd { return g.adj * X; },
      [&](const Matd& X) -> Matd { return g.adj.transpose() * X; }, N, q, beta, k, seed);
}

inline Matd algorithm1_subspace(const Matd& A, int q, double beta, int k,
                                std::uint64_t seed = 20240903ull) {
  const int N = static_cast<int>(A.rows());
  return detail::algorithm1_impl(
      [&](const Matd& X) -> Matd { return A * X; },
      [&](const Matd& X) -> Matd { return A.transpose() * X; }, N, q, beta, k, seed);
}

} // namespace nps
