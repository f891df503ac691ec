#include "shiftindex/detail/linalg.hpp"

#include <lapacke.h>

#include <algorithm>

#include "shiftindex/errors.hpp"

namespace shiftindex::detail {

namespace {

Svd run_gesdd(const Eigen::MatrixXcd& a, char jobz) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  out.singular_values.resize(k);
  if (k == 0) return out;
  Eigen::MatrixXcd work = a;
  Eigen::MatrixXcd u, vt;
  if (jobz == 'S') {
    u.resize(m, k);
    vt.resize(k, n);
  } else {
    u.resize(1, 1);
    vt.resize(1, 1);
  }
  const lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, jobz, m, n, reinterpret_cast<lapack_complex_double*>(work.data()), m,
      out.singular_values.data(), reinterpret_cast<lapack_complex_double*>(u.data()),
      jobz == 'S' ? m : 1, reinterpret_cast<lapack_complex_double*>(vt.data()), jobz == 'S' ? k : 1);
  if (info != 0) throw Error("zgesdd failed with info " + std::to_string(info));
  if (jobz == 'S') {
    out.u = std::move(u);
    out.v = vt.adjoint();
  }
  return out;
}

}  // namespace

Svd svd(const Eigen::MatrixXcd& a) { return run_gesdd(a, 'S'); }

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) { return run_gesdd(a, 'N').singular_values; }

}  // namespace shiftindex::detail
