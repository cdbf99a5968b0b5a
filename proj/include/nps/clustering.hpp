#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nps/rng.hpp"
#include "nps/spectral.hpp"
#include "nps/types.hpp"

namespace nps {

struct KMeansResult {
  Assignment labels;   // 1..q
  Matd centers;        // q×r
  double inertia = 0.0;
  int restarts_used = 0;
};

namespace detail {

struct LloydOutcome {
  std::vector<int> assign; // 0-based
  Matd centers;
  double inertia;
};

inline int nearest_center(const Matd& rows, const Matd& centers, int i, int q) {
  int best = 0;
  double bestd = (rows.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < q; ++c) {
    double d = (rows.row(i) - centers.row(c)).squaredNorm();
    if (d < bestd) { bestd = d; best = c; } // ties keep the lowest index
  }
  return best;
}

inline LloydOutcome kmeans_single(const Matd& rows, int q, Rng rng, int max_iter = 300) {
  const int N = static_cast<int>(rows.rows());
  const int r = static_cast<int>(rows.cols());
  Matd centers(q, r);

  // k-means++ seeding: first center uniform, the rest D²-sampled
  std::vector<double> mind(N, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.below(N));
  centers.row(0) = rows.row(first);
  for (int c = 1; c < q; ++c) {
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
      double d = (rows.row(i) - centers.row(c - 1)).squaredNorm();
      if (d < mind[i]) mind[i] = d;
      total += mind[i];
    }
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.below(N));
    } else {
      double target = rng.uniform01() * total, acc = 0.0;
      pick = N - 1;
      for (int i = 0; i < N; ++i) {
        acc += mind[i];
        if (acc >= target) { pick = i; break; }
      }
    }
    centers.row(c) = rows.row(pick);
  }

  std::vector<int> assign(N, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < N; ++i) {
      int c = nearest_center(rows, centers, i, q);
      if (c != assign[i]) { assign[i] = c; changed = true; }
    }
    std::vector<int> count(q, 0);
    Matd sums = Matd::Zero(q, r);
    for (int i = 0; i < N; ++i) {
      sums.row(assign[i]) += rows.row(i);
      count[assign[i]]++;
    }
    for (int c = 0; c < q; ++c) {
      if (count[c] > 0) {
        centers.row(c) = sums.row(c) / double(count[c]);
      } else {
        // empty cluster: re-seed at the point farthest from its center
        int far = 0;
        double fard = -1.0;
        for (int i = 0; i < N; ++i) {
          double d = (rows.row(i) - centers.row(assign[i])).squaredNorm();
          if (d > fard) { fard = d; far = i; }
        }
        centers.row(c) = rows.row(far);
        changed = true;
      }
    }
    if (!changed) break;
  }

  double inertia = 0.0;
  for (int i = 0; i < N; ++i) {
    assign[i] = nearest_center(rows, centers, i, q);
    inertia += (rows.row(i) - centers.row(assign[i])).squaredNorm();
  }
  return {std::move(assign), std::move(centers), inertia};
}

} // namespace detail

// Lloyd iterations from k-means++ seeding; best of `restarts` runs by inertia
// (ties resolved toward the lowest restart index)
inline KMeansResult kmeans(const Matd& rows, int q, int restarts, std::uint64_t seed) {
  const int N = static_cast<int>(rows.rows());
  if (q < 1 || q > N) throw std::invalid_argument("cluster count out of range");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  Rng root(seed);
  detail::LloydOutcome best;
  best.inertia = std::numeric_limits<double>::infinity();
  int best_r = -1;
  for (int rs = 0; rs < restarts; ++rs) {
    auto run = detail::kmeans_single(rows, q, root.substream(rs));
    if (run.inertia < best.inertia) {
      best = std::move(run);
      best_r = rs;
    }
  }
  KMeansResult out;
  out.labels.q = q;
  out.labels.labels.resize(N);
  for (int i = 0; i < N; ++i) out.labels.labels[i] = best.assign[i] + 1;
  out.centers = std::move(best.centers);
  out.inertia = best.inertia;
  out.restarts_used = best_r + 1;
  return out;
}

struct MisclassificationScore {
  double value = 0.0;
  std::vector<int> matching; // matching[i] = found label assigned to truth cluster i+1
};

namespace detail {

// cost(i,j) = |T_j Δ C_i| / |C_i| over truth clusters C and found clusters T
inline Matd fhat_costs(const Assignment& truth, const Assignment& found, int q) {
  std::vector<double> csize(q, 0.0), tsize(q, 0.0);
  Matd overlap = Matd::Zero(q, q);
  for (int i = 0; i < truth.size(); ++i) {
    csize[truth.labels[i] - 1] += 1.0;
    tsize[found.labels[i] - 1] += 1.0;
    overlap(truth.labels[i] - 1, found.labels[i] - 1) += 1.0;
  }
  Matd cost(q, q);
  for (int i = 0; i < q; ++i) {
    if (csize[i] == 0.0) throw std::invalid_argument("empty truth cluster");
    for (int j = 0; j < q; ++j)
      cost(i, j) = (tsize[j] + csize[i] - 2.0 * overlap(i, j)) / csize[i];
  }
  return cost;
}

inline MisclassificationScore fhat_exhaustive(const Matd& cost) {
  const int q = static_cast<int>(cost.rows());
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  MisclassificationScore best;
  best.value = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < q; ++i) worst = std::max(worst, cost(i, perm[i]));
    if (worst < best.value) {
      best.value = worst;
      best.matching.assign(perm.begin(), perm.end());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (int& m : best.matching) m += 1;
  return best;
}

// Kuhn's augmenting-path matching on the thresholded cost graph
inline bool perfect_matching(const Matd& cost, double t, std::vector<int>& match_col) {
  const int q = static_cast<int>(cost.rows());
  match_col.assign(q, -1); // match_col[j] = row matched to column j
  for (int i = 0; i < q; ++i) {
    std::vector<char> seen(q, 0);
    // depth-first augmenting search from row i
    std::function<bool(int)> tryrow = [&](int row) -> bool {
      for (int j = 0; j < q; ++j) {
        if (seen[j] || cost(row, j) > t) continue;
        seen[j] = 1;
        if (match_col[j] < 0 || tryrow(match_col[j])) {
          match_col[j] = row;
          return true;
        }
      }
      return false;
    };
    if (!tryrow(i)) return false;
  }
  return true;
}

inline MisclassificationScore fhat_bottleneck(const Matd& cost) {
  const int q = static_cast<int>(cost.rows());
  std::vector<double> levels(cost.data(), cost.data() + q * q);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  int lo = 0, hi = static_cast<int>(levels.size()) - 1;
  std::vector<int> match_col;
  if (!perfect_matching(cost, levels[hi], match_col))
    throw std::logic_error("complete cost matrix must admit a matching");
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (perfect_matching(cost, levels[mid], match_col))
      hi = mid;
    else
      lo = mid + 1;
  }
  perfect_matching(cost, levels[lo], match_col);
  MisclassificationScore out;
  out.value = 0.0;
  out.matching.assign(q, 0);
  for (int j = 0; j < q; ++j) {
    out.matching[match_col[j]] = j + 1;
    out.value = std::max(out.value, cost(match_col[j], j));
  }
  return out;
}

} // namespace detail

// f̂ = min over label permutations of the maximum per-cluster relative
// symmetric difference; exact for any q (exhaustive for q ≤ 8, bottleneck
// assignment above)
inline MisclassificationScore misclassification(const Assignment& truth,
                                                const Assignment& found) {
  if (truth.size() != found.size()) throw std::invalid_argument("assignment length mismatch");
  truth.validate();
  found.validate();
  const int q = std::max(truth.q, found.q);
  Assignment t = truth, f = found;
  t.q = f.q = q;
  Matd cost = detail::fhat_costs(t, f, q);
  return q <= 8 ? detail::fhat_exhaustive(cost) : detail::fhat_bottleneck(cost);
}

inline double fhat(const Assignment& truth, const Assignment& found) {
  return misclassification(truth, found).value;
}

// end-to-end role extraction: β policy → Algorithm 1 subspace → K-means,
// with a rank diagnostic from the leading spectrum of AAᵀ+AᵀA
struct ExtractResult {
  Assignment labels;
  SpectralReport report;
  KMeansResult km;
  Beta beta;
  bool rank_warning = false;
};

inline ExtractResult extract_roles(const Digraph& g, int q, BetaPolicy policy, int k,
                                   int restarts = 20, std::uint64_t seed = 20240904ull) {
  const int N = static_cast<int>(g.n_nodes);
  if (q < 1 || q > N) throw std::invalid_argument("role count out of range");
  ExtractResult out;
  out.beta = (k >= 2) ? choose_beta(g, policy) : Beta{};
  Rng root(seed);
  Matd X = algorithm1_subspace(g, q, out.beta.beta, k, root.substream(1).next_u64());
  out.report = truncated_evd_op(s1_operator(g), N, q, std::min(N, 3 * q + 5),
                                root.substream(2).next_u64());
  out.km = kmeans(X, q, restarts, root.substream(3).next_u64());
  out.labels = out.km.labels;
  out.rank_warning = out.report.estimated_rank != q;
  return out;
}

} // namespace nps
