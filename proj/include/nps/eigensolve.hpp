#pragma once
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "nps/rng.hpp"
#include "nps/sbm.hpp"
#include "nps/types.hpp"

namespace nps {

// leading eigenpairs of a symmetric operator, eigenvalues descending
struct EigenPairs {
  Vecd values;  // leading window
  Matd vectors; // N×want columns for the leading `want` pairs
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline Vecd random_unit(int N, Rng& rng) {
  Vecd v(N);
  for (int i = 0; i < N; ++i) v(i) = rng.normal();
  double nrm = v.norm();
  if (nrm == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / nrm;
}

} // namespace detail

// Lanczos with full reorthogonalization for a symmetric operator given as a
// callable op(const Vecd&) -> Vecd. Returns `window` leading Ritz values and
// the vectors of the leading `want` pairs. Deterministic for a given rng.
template <class Op>
EigenPairs lanczos_sym(Op&& op, int N, int want, int window, Rng rng, int max_iter = 300,
                       double tol = 1e-10) {
  want = std::min(want, N);
  window = std::min(std::max(window, want), N);
  max_iter = std::min(max_iter, N);

  Matd V(N, std::min(max_iter + 1, N));
  std::vector<double> alpha, beta;
  V.col(0) = detail::random_unit(N, rng);

  auto ritz = [&](int j, Vecd& theta, Matd& S) {
    Matd T = Matd::Zero(j, j);
    for (int i = 0; i < j; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < j) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Matd> es(T);
    theta = es.eigenvalues().reverse();
    S = es.eigenvectors().rowwise().reverse();
  };

  EigenPairs out;
  int j = 0;
  for (; j < max_iter; ++j) {
    Vecd w = op(V.col(j));
    double a = V.col(j).dot(w);
    alpha.push_back(a);
    w -= a * V.col(j);
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    // full reorthogonalization (two classical Gram-Schmidt passes)
    auto Vj = V.leftCols(j + 1);
    w -= Vj * (Vj.transpose() * w);
    w -= Vj * (Vj.transpose() * w);
    double b = w.norm();

    bool check = (j + 1 >= window + 2) || (j + 1 == max_iter) || (j + 1 == N);
    if (check || b < 1e-13) {
      Vecd theta;
      Matd S;
      ritz(j + 1, theta, S);
      double scale = std::max(std::abs(theta(0)), 1e-300);
      bool ok = true;
      for (int i = 0; i < want; ++i) {
        if (i >= theta.size()) { ok = false; break; }
        double resid = b * std::abs(S(j, i));
        if (resid > tol * scale) { ok = false; break; }
      }
      if ((ok && j + 1 >= window + 2) || b < 1e-13 || j + 1 == max_iter || j + 1 == N) {
        int w_out = std::min<int>(window, theta.size());
        out.values = theta.head(w_out);
        out.vectors = V.leftCols(j + 1) * S.leftCols(std::min<int>(want, theta.size()));
        out.iterations = j + 1;
        out.converged = ok || b < 1e-13;
        return out;
      }
    }
    if (b < 1e-13) break; // invariant subspace; handled above
    beta.push_back(b);
    if (j + 1 < V.cols()) V.col(j + 1) = w / b;
  }
  // max_iter hit without residual convergence: return best estimate
  Vecd theta;
  Matd S;
  ritz(static_cast<int>(alpha.size()), theta, S);
  int w_out = std::min<int>(window, theta.size());
  out.values = theta.head(w_out);
  out.vectors = V.leftCols(alpha.size()) * S.leftCols(std::min<int>(want, theta.size()));
  out.iterations = static_cast<int>(alpha.size());
  out.converged = false;
  return out;
}

// block subspace iteration for the q dominant eigenpairs of a symmetric
// operator given as a block callable op(const Matd&) -> Matd; block size
// defaults to q+4 and convergence is 1e-10 on relative Ritz residuals
template <class Op>
EigenPairs subspace_iteration(Op&& op, int N, int q, Rng rng, int block = -1,
                              double tol = 1e-10, int max_sweeps = 200) {
  if (q > N) throw std::invalid_argument("requested subspace larger than dimension");
  if (block < q) block = std::min(N, q + 4);

  Matd X(N, block);
  for (int c = 0; c < block; ++c) X.col(c) = detail::random_unit(N, rng);
  Eigen::HouseholderQR<Matd> qr(X);
  Matd Q = qr.householderQ() * Matd::Identity(N, block);

  EigenPairs out;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Matd Y = op(Q);
    Matd H = Q.transpose() * Y;
    H = ((H + H.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Matd> es(H);
    Vecd theta = es.eigenvalues().reverse();
    Matd W = es.eigenvectors().rowwise().reverse();

    Matd R = (Y - Q * H) * W.leftCols(q);
    double scale = std::max(std::abs(theta(0)), 1e-300);
    bool ok = true;
    for (int i = 0; i < q; ++i)
      if (R.col(i).norm() > tol * scale) { ok = false; break; }
    if (ok || sweep + 1 == max_sweeps) {
      out.values = theta.head(std::min<int>(block, theta.size()));
      out.vectors = Q * W.leftCols(q);
      out.iterations = sweep + 1;
      out.converged = ok;
      return out;
    }
    Eigen::HouseholderQR<Matd> step(Y);
    Q = step.householderQ() * Matd::Identity(N, block);
  }
  return out; // unreachable
}

// leading window of a dense symmetric matrix
inline EigenPairs dense_window(const Matd& S, int want, int window) {
  Eigen::SelfAdjointEigenSolver<Matd> es(S);
  const int N = static_cast<int>(S.rows());
  want = std::min(want, N);
  window = std::min(std::max(window, want), N);
  EigenPairs out;
  out.values = es.eigenvalues().reverse().head(window);
  out.vectors = es.eigenvectors().rowwise().reverse().leftCols(want);
  out.iterations = 1;
  out.converged = true;
  return out;
}

// block operator X ↦ A AᵀX + AᵀA X for a sparse adjacency
inline auto s1_operator(const Digraph& g) {
  return [&g](const Matd& X) -> Matd {
    return g.adj * (g.adj.transpose() * X) + g.adj.transpose() * (g.adj * X);
  };
}

inline auto s1_operator(const Matd& A) {
  return [&A](const Matd& X) -> Matd {
    return A * (A.transpose() * X) + A.transpose() * (A * X);
  };
}

// vector wrapper so the block operators may be passed to lanczos_sym
template <class BlockOp>
auto as_vector_op(BlockOp&& op) {
  return [op = std::forward<BlockOp>(op)](const Vecd& v) -> Vecd {
    return op(Matd(v)).col(0);
  };
}

// spectral norm ‖A‖₂ of a sparse adjacency via Lanczos on AᵀA
inline double spectral_norm(const Digraph& g, std::uint64_t seed = 20240901ull) {
  const int N = static_cast<int>(g.n_nodes);
  if (g.edges == 0) return 0.0;
  auto op = [&g](const Vecd& v) -> Vecd { return g.adj.transpose() * (g.adj * v); };
  auto pairs = lanczos_sym(op, N, 1, 1, Rng(seed), 300, 1e-12);
  return std::sqrt(std::max(0.0, pairs.values(0)));
}

} // namespace nps
