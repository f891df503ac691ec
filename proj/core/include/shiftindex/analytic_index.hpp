#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "shiftindex/errors.hpp"
#include "shiftindex/operator_spec.hpp"
#include "shiftindex/symbol_algebra.hpp"

namespace shiftindex {

/// Finite-section matrix of an operator in a spectral basis.
///
/// Basis index i carries `boundary_distance[i]`, the number of basis steps
/// between the basis function and the artificial truncation edge. Kernel
/// vectors are counted only when most of their mass lies at distance
/// greater than `interior_threshold`.
struct TruncatedOperator {
  Eigen::MatrixXcd matrix;
  std::vector<Mode> modes;  ///< per block of `rank` basis indices
  int rank = 1;
  int truncation = 0;
  std::vector<double> boundary_distance;
  double interior_threshold = 0.0;

  Eigen::Index size() const { return matrix.rows(); }
  TruncatedOperator adjoint() const;
  std::vector<char> interior_mask() const;
};

/// Fourier-basis matrix of D (composed with the order reduction when requested)
/// on modes with |n_a| <= N on every axis. Throws UnsupportedTerm / UnsupportedGeometry.
TruncatedOperator assemble(const OperatorSpec& spec, int N);

/// P M_sigma P on modes 0..N for a degree-0 symbol on the base circle, where
/// M_sigma = sum_g (g^*)^{-1} M_{sigma(g)}.
TruncatedOperator toeplitz(const CrossedSymbol& sigma, int N);

/// E = x + d/dx on Hermite functions 0..N-1 (the lowering ladder, E psi_k = sqrt(2k) psi_{k-1}).
TruncatedOperator hermite_model(int N);

/// Index readings of one truncation.
struct TruncationReading {
  int truncation = 0;
  int dimension = 0;
  bool heat_plateau = false;
  int heat_index = 0;
  std::vector<double> heat_times;
  std::vector<double> heat_values;
  bool svd_stable = false;
  int svd_index = 0;
  std::vector<int> svd_sweep;  ///< interior index per threshold
  int raw_kernel = 0;          ///< #{sigma < tau_mid} before interior filtering
  int kernel_count = 0;        ///< interior kernel vectors at tau_mid
  int cokernel_count = 0;
  double median_singular = 0.0;
  double spectral_gap = 0.0;   ///< smallest singular value >= 1e-4 * median
  double kernel_cluster_max = 0.0;
};

TruncationReading read_index(const TruncatedOperator& op);

struct IndexEstimate {
  int index = 0;
  bool heat_agrees = false;
  bool svd_agrees = false;
  std::vector<TruncationReading> readings;
  std::vector<int> plateau;   ///< truncations forming the reported plateau
  double spectral_gap = 0.0;  ///< at the largest truncation
  bool gap_closing = false;
  /// Model operator only: overlap of the interior kernel vector with exp(-x^2/2).
  double kernel_overlap = 0.0;
  int kernel_dimension = 0;
  int cokernel_dimension = 0;
};

/// Thrown when no stable index emerges; carries the readings.
class NoPlateau : public Error {
 public:
  NoPlateau(const std::string& what, IndexEstimate diagnostics)
      : Error("NoPlateau: " + what), diagnostics_(std::move(diagnostics)) {}
  const IndexEstimate& diagnostics() const { return diagnostics_; }

 private:
  IndexEstimate diagnostics_;
};

/// Reads every truncation and reports the index shared by >= 3 consecutive
/// truncations for both methods. A gap closing with N (last < half of first)
/// is reported as NoPlateau regardless of the readings.
IndexEstimate estimate_index(const std::function<TruncatedOperator(int)>& build,
                             const std::vector<int>& truncations);
IndexEstimate estimate_index(const OperatorSpec& spec, const std::vector<int>& truncations);

/// Index of E at N/2, 3N/4 and N Hermite functions, with kernel diagnostics.
IndexEstimate model_euler_index(int N);

/// Gauss-Hermite coefficients of exp(-x^2/2) in normalized Hermite functions 0..N-1.
Eigen::VectorXd gaussian_hermite_coefficients(int N);

}  // namespace shiftindex
