#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <vector>

namespace nps {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matd = Mat<double>;
using Vecd = Vec<double>;
using SparseMatd = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// role labels for every node, values in 1..q
struct Assignment {
  std::vector<int> labels;
  int q = 0;

  int size() const { return static_cast<int>(labels.size()); }

  void validate() const {
    for (int l : labels)
      if (l < 1 || l > q) throw std::invalid_argument("assignment label out of range");
  }

  std::vector<std::vector<int>> clusters() const {
    std::vector<std::vector<int>> cs(q);
    for (int i = 0; i < size(); ++i) cs[labels[i] - 1].push_back(i);
    return cs;
  }

  std::vector<int> counts() const {
    std::vector<int> c(q, 0);
    for (int l : labels) c[l - 1]++;
    return c;
  }
};

} // namespace nps
