#pragma once

#include <vector>

#include "dpreg/errors.hpp"
#include "dpreg/linalg.hpp"
#include "dpreg/rng.hpp"

namespace dpreg {

// Design matrix X (one row per individual, the unit of privacy) and response y.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }

  void validate() const {
    if (X.rows() < 1 || X.cols() < 1) throw InvalidParameter("Dataset: empty design");
    if (y.size() != X.rows()) throw InvalidParameter("Dataset: X/y row mismatch");
    if (!X.allFinite() || !y.allFinite()) {
      throw InvalidParameter("Dataset: non-finite entries");
    }
  }

  // Row-subset copy. Used for the two data-splitting pipelines.
  Dataset rows(const std::vector<int>& idx) const {
    Dataset out;
    out.X.resize(static_cast<int>(idx.size()), X.cols());
    out.y.resize(static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.X.row(static_cast<int>(i)) = X.row(idx[i]);
      out.y[static_cast<int>(i)] = y[idx[i]];
    }
    return out;
  }
};

// Random partition of [n] into T disjoint, exhaustive splits of near-equal
// size; the first n mod T splits take one extra row. Shared by the private
// solvers and their deterministic oracles so both see the same split order.
std::vector<std::vector<int>> split_rows(int n, int T, RandomStream& rng);

// x_i' v evaluated over an explicit support; the sparse fast path for the
// hard-thresholded iterates.
inline double dot_on_support(const Eigen::MatrixXd& X, int i,
                             const std::vector<int>& support,
                             const Eigen::VectorXd& v) {
  double s = 0.0;
  for (int q : support) s += X(i, q) * v[q];
  return s;
}

inline std::vector<int> nonzero_support(const Eigen::VectorXd& v) {
  std::vector<int> out;
  for (int q = 0; q < v.size(); ++q) {
    if (v[q] != 0.0) out.push_back(q);
  }
  return out;
}

}  // namespace dpreg
