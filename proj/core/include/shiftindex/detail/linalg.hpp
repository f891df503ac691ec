#pragma once

#include <Eigen/Dense>

namespace shiftindex::detail {

/// Thin singular value decomposition A = U diag(s) V^*, singular values descending.
struct Svd {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd v;
};

/// Divide-and-conquer SVD backed by LAPACK zgesdd.
Svd svd(const Eigen::MatrixXcd& a);

/// Singular values only.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a);

}  // namespace shiftindex::detail
