#pragma once

#include <array>
#include <span>
#include <vector>

#include "shiftindex/geometry.hpp"

namespace shiftindex::detail {

/// Affine map x -> sign * x + shift on the periodic axes of a carrier.
struct LatticeMap {
  std::array<int, 3> sign{1, 1, 1};
  std::array<double, 3> shift{0.0, 0.0, 0.0};

  bool is_identity() const;
  /// Sign picked up by the pullback of the basis monomial `mask`.
  int form_sign(unsigned mask) const;
};

/// Signed Fourier mode of FFT index `idx` on an axis of `n` points; the
/// Nyquist index of an even `n` maps to +n/2.
int signed_mode(int idx, int n);

/// Normalized forward transform of one sheet: c_k = N^{-d} sum_x f(x) e^{-i k.x}.
void forward_sheet(const Grid& grid, std::span<const cplx> values, std::vector<cplx>& coeffs);
/// Inverse of forward_sheet.
void inverse_sheet(const Grid& grid, std::span<const cplx> coeffs, std::vector<cplx>& values);

/// Trigonometric-interpolation resampling f -> f o map, applied on every sheet.
/// Exact for band-limited values; the Nyquist mode is treated symmetrically.
std::vector<cplx> resample(const Grid& grid, std::span<const cplx> values, const LatticeMap& map);

/// Spectral derivative along one periodic axis (Nyquist mode dropped).
std::vector<cplx> derivative(const Grid& grid, std::span<const cplx> values, int axis);

/// Trigonometric interpolant of one sheet evaluated at arbitrary axis coordinates.
cplx evaluate_at(const Grid& grid, std::span<const cplx> values, int sheet,
                 const std::array<double, 3>& coords);

/// Values of the interpolant of one sheet on a lattice refined by `factor`.
std::vector<cplx> refine_sheet(const Grid& grid, std::span<const cplx> values, int sheet, int factor);

/// Fourier coefficients of one sheet, keyed by signed mode vectors, dropping
/// entries of modulus below `drop`. Nyquist coefficients are split evenly
/// between the two signed modes.
std::vector<std::pair<std::array<int, 3>, cplx>> fourier_modes(const Grid& grid,
                                                               std::span<const cplx> values,
                                                               int sheet, double drop);

}  // namespace shiftindex::detail
