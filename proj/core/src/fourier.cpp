#include "shiftindex/detail/fourier.hpp"

#include <bit>
#include <cmath>
#include <unsupported/Eigen/FFT>

#include "shiftindex/errors.hpp"

namespace shiftindex::detail {

namespace {

void require_periodic(const Grid& grid) {
  if (!grid.periodic) throw UnsupportedGeometry("spectral operation on a non-periodic carrier");
}

// Applies a 1D transform along every axis of a d-dimensional lattice (last axis fastest).
template <class Fn>
void along_axes(std::vector<cplx>& data, int dim, int n, Fn&& fn) {
  std::vector<cplx> line(n), out(n);
  std::size_t stride = 1;
  for (int axis = dim - 1; axis >= 0; --axis) {
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < data.size(); outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        for (int k = 0; k < n; ++k) line[k] = data[outer + inner + k * stride];
        fn(out, line);
        for (int k = 0; k < n; ++k) data[outer + inner + k * stride] = out[k];
      }
    }
    stride *= n;
  }
}

std::array<int, 3> decode(std::size_t idx, int dim, int n) {
  std::array<int, 3> c{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    c[a] = static_cast<int>(idx % n);
    idx /= n;
  }
  return c;
}

std::size_t encode(const std::array<int, 3>& c, int dim, int n) {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a) idx = idx * n + static_cast<std::size_t>(c[a]);
  return idx;
}

bool is_nyquist(int idx, int n) { return n % 2 == 0 && idx == n / 2; }

}  // namespace

bool LatticeMap::is_identity() const {
  for (int a = 0; a < 3; ++a) {
    if (sign[a] != 1 || shift[a] != 0.0) return false;
  }
  return true;
}

int LatticeMap::form_sign(unsigned mask) const {
  int s = 1;
  for (int a = 0; a < 3; ++a) {
    if ((mask >> a) & 1u) s *= sign[a];
  }
  return s;
}

int signed_mode(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

void forward_sheet(const Grid& grid, std::span<const cplx> values, std::vector<cplx>& coeffs) {
  require_periodic(grid);
  Eigen::FFT<double> fft;
  coeffs.assign(values.begin(), values.end());
  along_axes(coeffs, grid.dim, grid.resolution,
             [&](std::vector<cplx>& out, const std::vector<cplx>& in) { fft.fwd(out, in); });
  const double scale = 1.0 / static_cast<double>(coeffs.size());
  for (auto& c : coeffs) c *= scale;
}

void inverse_sheet(const Grid& grid, std::span<const cplx> coeffs, std::vector<cplx>& values) {
  require_periodic(grid);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  values.assign(coeffs.begin(), coeffs.end());
  along_axes(values, grid.dim, grid.resolution,
             [&](std::vector<cplx>& out, const std::vector<cplx>& in) { fft.inv(out, in); });
}

std::vector<cplx> resample(const Grid& grid, std::span<const cplx> values, const LatticeMap& map) {
  require_periodic(grid);
  std::vector<cplx> out(values.begin(), values.end());
  if (map.is_identity()) return out;
  const std::size_t lattice = grid.lattice_size();
  const int n = grid.resolution;
  std::vector<cplx> coeffs, moved(lattice), sheet_out;
  for (int s = 0; s < grid.sheets; ++s) {
    forward_sheet(grid, values.subspan(s * lattice, lattice), coeffs);
    std::fill(moved.begin(), moved.end(), cplx{});
    for (std::size_t i = 0; i < lattice; ++i) {
      const auto c = decode(i, grid.dim, n);
      cplx phase{1.0, 0.0};
      std::array<int, 3> target{0, 0, 0};
      for (int a = 0; a < grid.dim; ++a) {
        const int k = signed_mode(c[a], n);
        if (is_nyquist(c[a], n)) {
          phase *= std::cos(k * map.shift[a]);
        } else {
          phase *= std::polar(1.0, k * map.shift[a]);
        }
        target[a] = map.sign[a] > 0 ? c[a] : (n - c[a]) % n;
      }
      moved[encode(target, grid.dim, n)] += coeffs[i] * phase;
    }
    inverse_sheet(grid, moved, sheet_out);
    std::copy(sheet_out.begin(), sheet_out.end(), out.begin() + s * lattice);
  }
  return out;
}

std::vector<cplx> derivative(const Grid& grid, std::span<const cplx> values, int axis) {
  require_periodic(grid);
  if (axis < 0 || axis >= grid.dim) throw UnsupportedGeometry("derivative axis out of range");
  const std::size_t lattice = grid.lattice_size();
  const int n = grid.resolution;
  std::vector<cplx> out(values.size());
  std::vector<cplx> coeffs, sheet_out;
  for (int s = 0; s < grid.sheets; ++s) {
    forward_sheet(grid, values.subspan(s * lattice, lattice), coeffs);
    for (std::size_t i = 0; i < lattice; ++i) {
      const int idx = decode(i, grid.dim, n)[axis];
      coeffs[i] *= is_nyquist(idx, n) ? cplx{} : cplx{0.0, static_cast<double>(signed_mode(idx, n))};
    }
    inverse_sheet(grid, coeffs, sheet_out);
    std::copy(sheet_out.begin(), sheet_out.end(), out.begin() + s * lattice);
  }
  return out;
}

cplx evaluate_at(const Grid& grid, std::span<const cplx> values, int sheet,
                 const std::array<double, 3>& coords) {
  require_periodic(grid);
  const std::size_t lattice = grid.lattice_size();
  const int n = grid.resolution;
  std::vector<cplx> coeffs;
  forward_sheet(grid, values.subspan(sheet * lattice, lattice), coeffs);
  cplx sum{};
  for (std::size_t i = 0; i < lattice; ++i) {
    const auto c = decode(i, grid.dim, n);
    cplx phase{1.0, 0.0};
    for (int a = 0; a < grid.dim; ++a) {
      const int k = signed_mode(c[a], n);
      phase *= is_nyquist(c[a], n) ? cplx{std::cos(k * coords[a]), 0.0} : std::polar(1.0, k * coords[a]);
    }
    sum += coeffs[i] * phase;
  }
  return sum;
}

std::vector<cplx> refine_sheet(const Grid& grid, std::span<const cplx> values, int sheet, int factor) {
  require_periodic(grid);
  const std::size_t lattice = grid.lattice_size();
  const int n = grid.resolution;
  const int fine = n * factor;
  std::vector<cplx> coeffs;
  forward_sheet(grid, values.subspan(sheet * lattice, lattice), coeffs);
  std::size_t fine_size = 1;
  for (int a = 0; a < grid.dim; ++a) fine_size *= fine;
  std::vector<cplx> padded(fine_size, cplx{});
  for (std::size_t i = 0; i < lattice; ++i) {
    const auto c = decode(i, grid.dim, n);
    std::array<int, 3> t{0, 0, 0};
    double weight = 1.0;
    bool nyq = false;
    for (int a = 0; a < grid.dim; ++a) {
      const int k = signed_mode(c[a], n);
      t[a] = k >= 0 ? k : fine + k;
      if (is_nyquist(c[a], n)) nyq = true;
    }
    if (nyq) weight = 0.5;  // split each Nyquist coefficient between +n/2 and -n/2
    padded[encode(t, grid.dim, fine)] += weight * coeffs[i];
    if (nyq) {
      std::array<int, 3> u = t;
      for (int a = 0; a < grid.dim; ++a) {
        if (is_nyquist(c[a], n)) u[a] = fine - n / 2;
      }
      padded[encode(u, grid.dim, fine)] += weight * coeffs[i];
    }
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  along_axes(padded, grid.dim, fine,
             [&](std::vector<cplx>& out, const std::vector<cplx>& in) { fft.inv(out, in); });
  return padded;
}

std::vector<std::pair<std::array<int, 3>, cplx>> fourier_modes(const Grid& grid,
                                                               std::span<const cplx> values,
                                                               int sheet, double drop) {
  require_periodic(grid);
  const std::size_t lattice = grid.lattice_size();
  const int n = grid.resolution;
  std::vector<cplx> coeffs;
  forward_sheet(grid, values.subspan(sheet * lattice, lattice), coeffs);
  std::vector<std::pair<std::array<int, 3>, cplx>> modes;
  for (std::size_t i = 0; i < lattice; ++i) {
    if (std::abs(coeffs[i]) < drop) continue;
    const auto c = decode(i, grid.dim, n);
    std::array<int, 3> k{0, 0, 0};
    int nyq_axes = 0;
    for (int a = 0; a < grid.dim; ++a) {
      k[a] = signed_mode(c[a], n);
      if (is_nyquist(c[a], n)) ++nyq_axes;
    }
    if (nyq_axes == 0) {
      modes.emplace_back(k, coeffs[i]);
      continue;
    }
    // Expand every Nyquist axis into both signs.
    const double w = std::pow(0.5, nyq_axes);
    for (unsigned pattern = 0; pattern < (1u << grid.dim); ++pattern) {
      std::array<int, 3> kk = k;
      bool valid = true;
      for (int a = 0; a < grid.dim; ++a) {
        const bool flip = (pattern >> a) & 1u;
        if (flip && !is_nyquist(c[a], n)) { valid = false; break; }
        if (flip) kk[a] = -k[a];
      }
      if (valid) modes.emplace_back(kk, w * coeffs[i]);
    }
  }
  return modes;
}

}  // namespace shiftindex::detail
