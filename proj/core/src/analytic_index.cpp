#include "shiftindex/analytic_index.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "shiftindex/detail/fourier.hpp"
#include "shiftindex/detail/linalg.hpp"

namespace shiftindex {

namespace {

struct ModeWindow {
  int dim = 1;
  int lo = 0, hi = 0;  // inclusive range per axis
  int width() const { return hi - lo + 1; }
  std::size_t count() const {
    std::size_t c = 1;
    for (int a = 0; a < dim; ++a) c *= width();
    return c;
  }
  bool contains(const Mode& n) const {
    for (int a = 0; a < dim; ++a) {
      if (n[a] < lo || n[a] > hi) return false;
    }
    return true;
  }
  std::size_t index(const Mode& n) const {
    std::size_t i = 0;
    for (int a = 0; a < dim; ++a) i = i * width() + static_cast<std::size_t>(n[a] - lo);
    return i;
  }
  Mode mode(std::size_t i) const {
    Mode n{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      n[a] = static_cast<int>(i % width()) + lo;
      i /= width();
    }
    return n;
  }
};

void add_block(Eigen::MatrixXcd& m, std::size_t row, std::size_t col, int rank, const Eigen::MatrixXcd& b) {
  m.block(row * rank, col * rank, rank, rank) += b;
}

}  // namespace

TruncatedOperator TruncatedOperator::adjoint() const {
  TruncatedOperator out = *this;
  out.matrix = matrix.adjoint();
  return out;
}

std::vector<char> TruncatedOperator::interior_mask() const {
  std::vector<char> mask(boundary_distance.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = boundary_distance[i] > interior_threshold;
  return mask;
}

TruncatedOperator assemble(const OperatorSpec& spec, int N) {
  spec.validate();
  const ManifoldModel& m = spec.manifold();
  if (m.kind == ManifoldKind::SphereCrossCircle) {
    throw UnsupportedGeometry("spectral assembly needs a flat manifold");
  }
  if (N < 8) throw UnsupportedTerm("truncation must be >= 8, got " + std::to_string(N));
  const int rank = spec.rank;
  const ModeWindow win{m.dim, -N, N};
  const std::size_t count = win.count();
  TruncatedOperator op;
  op.rank = rank;
  op.truncation = N;
  op.matrix = Eigen::MatrixXcd::Zero(count * rank, count * rank);
  op.interior_threshold = N / 2.0;
  for (std::size_t i = 0; i < count; ++i) {
    const Mode n = win.mode(i);
    op.modes.push_back(n);
    int edge = 0;
    for (int a = 0; a < m.dim; ++a) edge = std::max(edge, std::abs(n[a]));
    for (int r = 0; r < rank; ++r) op.boundary_distance.push_back(N - edge);
  }
  int res = 64;
  while (res < 4 * N) res *= 2;
  for (const auto& term : spec.terms) {
    const RigidMotion motion = spec.group->motion(term.g);
    for (const auto& mono : term.monomials) {
      const auto coeffs = mono.coefficient.fourier(m.dim, res);
      for (std::size_t i = 0; i < count; ++i) {
        const Mode n = win.mode(i);
        const cplx fn = mono.multiplier.on_mode(n, m.dim);
        if (fn == cplx{}) continue;
        for (const auto& [k, c] : coeffs) {
          Mode j{n[0] + k[0], n[1] + k[1], n[2] + k[2]};
          // (g^*)^{-1} e^{i j.x} = e^{-i s j.t} e^{i s j.x}
          double arg = 0.0;
          Mode target = j;
          for (int a = 0; a < m.dim; ++a) {
            arg -= motion.flat_sign * j[a] * motion.flat_shift[a];
            target[a] = motion.flat_sign * j[a];
          }
          if (!win.contains(target)) continue;
          add_block(op.matrix, win.index(target), i, rank, std::polar(1.0, arg) * fn * c);
        }
      }
    }
  }
  if (spec.reduce_order && spec.order != 0.0) {
    for (std::size_t i = 0; i < count; ++i) {
      const Mode n = win.mode(i);
      double s = 1.0;
      for (int a = 0; a < m.dim; ++a) s += static_cast<double>(n[a]) * n[a];
      op.matrix.middleCols(i * rank, rank) *= std::pow(s, -spec.order / 2.0);
    }
  }
  return op;
}

TruncatedOperator toeplitz(const CrossedSymbol& sigma, int N) {
  const Grid& grid = *sigma.grid();
  if (grid.manifold.kind != ManifoldKind::Circle || grid.kind != CarrierKind::Base) {
    throw UnsupportedGeometry("toeplitz needs a symbol on the base circle");
  }
  if (sigma.max_degree() > 0) throw AlgebraMismatch("toeplitz needs a degree-0 symbol");
  if (N < 8) throw UnsupportedTerm("truncation must be >= 8, got " + std::to_string(N));
  const int rank = sigma.rank();
  const int mm = rank * rank;
  const ModeWindow win{1, 0, N};
  const std::size_t count = win.count();
  TruncatedOperator op;
  op.rank = rank;
  op.truncation = N;
  op.matrix = Eigen::MatrixXcd::Zero(count * rank, count * rank);
  op.interior_threshold = N / 2.0;
  for (std::size_t i = 0; i < count; ++i) {
    op.modes.push_back(win.mode(i));
    for (int r = 0; r < rank; ++r) op.boundary_distance.push_back(N - static_cast<int>(i));
  }
  const std::size_t nodes = grid.size();
  std::vector<cplx> entry(nodes);
  for (const auto& [key, data] : sigma.terms()) {
    const RigidMotion motion = sigma.group()->motion(key.g);
    for (int e = 0; e < mm; ++e) {
      for (std::size_t x = 0; x < nodes; ++x) entry[x] = data[x * mm + e];
      for (const auto& [k, c] : detail::fourier_modes(grid, entry, 0, 1e-15)) {
        for (std::size_t i = 0; i < count; ++i) {
          const int j = static_cast<int>(i) + k[0];
          if (j < 0 || j > N) continue;
          const cplx phase = std::polar(1.0, -j * motion.flat_shift[0]);
          op.matrix(static_cast<Eigen::Index>(j) * rank + e / rank,
                    static_cast<Eigen::Index>(i) * rank + e % rank) += phase * c;
        }
      }
    }
  }
  return op;
}

TruncatedOperator hermite_model(int N) {
  if (N < 4) throw UnsupportedTerm("Hermite truncation must be >= 4");
  TruncatedOperator op;
  op.rank = 1;
  op.truncation = N;
  op.matrix = Eigen::MatrixXcd::Zero(N, N);
  for (int k = 1; k < N; ++k) op.matrix(k - 1, k) = std::sqrt(2.0 * k);
  for (int k = 0; k < N; ++k) {
    op.modes.push_back({k, 0, 0});
    op.boundary_distance.push_back(N - 1 - k);
  }
  op.interior_threshold = (N - 1) / 2.0;
  return op;
}

TruncationReading read_index(const TruncatedOperator& op) {
  TruncationReading rd;
  rd.truncation = op.truncation;
  rd.dimension = static_cast<int>(op.size());
  const detail::Svd svd = detail::svd(op.matrix);
  const Eigen::VectorXd& s = svd.singular_values;
  const Eigen::Index n = s.size();
  const auto interior = op.interior_mask();
  std::vector<double> mass_v(n, 0.0), mass_u(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index r = 0; r < n; ++r) {
      if (!interior[r]) continue;
      mass_v[i] += std::norm(svd.v(r, i));
      mass_u[i] += std::norm(svd.u(r, i));
    }
  }
  std::vector<double> sorted(s.data(), s.data() + n);
  std::sort(sorted.begin(), sorted.end());
  double median = sorted[n / 2];
  if (median <= 0.0) median = sorted.back();
  rd.median_singular = median;

  // threshold sweep over three decades
  const double mid_exp = -2.5;
  for (int step = 0; step <= 6; ++step) {
    const double tau = median * std::pow(10.0, -4.0 + 0.5 * step);
    int ker = 0, coker = 0, raw = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (s(i) >= tau) continue;
      ++raw;
      if (mass_v[i] > 0.5) ++ker;
      if (mass_u[i] > 0.5) ++coker;
    }
    rd.svd_sweep.push_back(ker - coker);
    if (std::abs(-4.0 + 0.5 * step - mid_exp) < 1e-9) {
      rd.raw_kernel = raw;
      rd.kernel_count = ker;
      rd.cokernel_count = coker;
    }
  }
  rd.svd_index = rd.svd_sweep[rd.svd_sweep.size() / 2];
  rd.svd_stable = std::all_of(rd.svd_sweep.begin(), rd.svd_sweep.end(),
                              [&](int v) { return v == rd.svd_index; });

  const double cluster = 1e-4 * median;
  double gap = 0.0, top = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s(i) >= cluster) {
      gap = gap == 0.0 ? s(i) : std::min(gap, s(i));
    } else {
      top = std::max(top, s(i));
    }
  }
  rd.spectral_gap = gap;
  rd.kernel_cluster_max = top;
  if (gap > 0.0) {
    const double t_lo = std::log(1e8) / (gap * gap);
    double t_hi = top > 0.0 ? std::min(1e-6 / (top * top), 1e3 * t_lo) : 1e3 * t_lo;
    t_hi = std::max(t_hi, t_lo);
    for (int j = 0; j < 9; ++j) {
      const double t = t_lo * std::pow(t_hi / t_lo, j / 8.0);
      double h = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) h += std::exp(-t * s(i) * s(i)) * (mass_v[i] - mass_u[i]);
      rd.heat_times.push_back(t);
      rd.heat_values.push_back(h);
    }
    rd.heat_index = static_cast<int>(std::lround(rd.heat_values.front()));
    rd.heat_plateau = std::all_of(rd.heat_values.begin(), rd.heat_values.end(),
                                  [&](double h) { return std::abs(h - rd.heat_index) < 0.1; });
  }
  return rd;
}

IndexEstimate estimate_index(const std::function<TruncatedOperator(int)>& build,
                             const std::vector<int>& truncations) {
  if (truncations.size() < 3) throw Error("estimate_index needs at least 3 truncations");
  for (std::size_t i = 1; i < truncations.size(); ++i) {
    if (truncations[i] <= truncations[i - 1]) throw Error("truncations must increase");
  }
  IndexEstimate est;
  for (int N : truncations) est.readings.push_back(read_index(build(N)));
  const auto& first = est.readings.front();
  const auto& last = est.readings.back();
  est.spectral_gap = last.spectral_gap;
  est.kernel_dimension = last.kernel_count;
  est.cokernel_dimension = last.cokernel_count;
  est.gap_closing = last.spectral_gap <= 0.0 || last.spectral_gap < 0.5 * first.spectral_gap;

  auto ok = [](const TruncationReading& r) {
    return r.heat_plateau && r.svd_stable && r.heat_index == r.svd_index;
  };
  std::vector<int> best;
  int best_value = 0;
  for (std::size_t i = 0; i < est.readings.size();) {
    if (!ok(est.readings[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < est.readings.size() && ok(est.readings[j]) &&
           est.readings[j].svd_index == est.readings[i].svd_index) {
      ++j;
    }
    if (j - i >= 3) {
      best.clear();
      for (std::size_t q = i; q < j; ++q) best.push_back(est.readings[q].truncation);
      best_value = est.readings[i].svd_index;
    }
    i = j;
  }
  if (est.gap_closing) {
    throw NoPlateau("spectral gap closing: " + format_number(first.spectral_gap) + " at N=" +
                        std::to_string(first.truncation) + " -> " + format_number(last.spectral_gap) +
                        " at N=" + std::to_string(last.truncation),
                    est);
  }
  if (best.empty()) {
    throw NoPlateau("no 3 consecutive truncations agree for heat and SVD readings", est);
  }
  est.index = best_value;
  est.plateau = best;
  est.heat_agrees = true;
  est.svd_agrees = true;
  return est;
}

IndexEstimate estimate_index(const OperatorSpec& spec, const std::vector<int>& truncations) {
  return estimate_index([&](int N) { return assemble(spec, N); }, truncations);
}

Eigen::VectorXd gaussian_hermite_coefficients(int N) {
  // Golub-Welsch nodes for the weight exp(-x^2)
  const int q = N + 40;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) jac(k - 1, k) = jac(k, k - 1) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd x = eig.eigenvalues();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
  std::vector<double> psi(q);
  for (int i = 0; i < q; ++i) {
    // Hermite functions by their three-term recursion; the Christoffel
    // weight 1 / sum_k psi_k^2 absorbs exp(x^2) and never underflows.
    double prev = 0.0, cur = std::pow(kPi, -0.25) * std::exp(-0.5 * x(i) * x(i));
    double christoffel = 0.0;
    for (int k = 0; k < q; ++k) {
      psi[k] = cur;
      christoffel += cur * cur;
      const double next = std::sqrt(2.0 / (k + 1)) * x(i) * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
      prev = cur;
      cur = next;
    }
    const double lambda = 1.0 / christoffel;
    const double gauss = std::exp(-0.5 * x(i) * x(i));
    for (int k = 0; k < N; ++k) c(k) += lambda * gauss * psi[k];
  }
  return c / c.norm();
}

IndexEstimate model_euler_index(int N) {
  if (N < 8) throw UnsupportedTerm("N_hermite must be >= 8");
  IndexEstimate est = estimate_index(hermite_model, {N / 2, (3 * N) / 4, N});
  const TruncatedOperator op = hermite_model(N);
  const detail::Svd svd = detail::svd(op.matrix);
  const auto interior = op.interior_mask();
  const Eigen::VectorXd gauss = gaussian_hermite_coefficients(N);
  const Eigen::Index last = svd.singular_values.size() - 1;
  for (Eigen::Index i = last; i >= 0; --i) {
    double mass = 0.0;
    for (Eigen::Index r = 0; r <= last; ++r) {
      if (interior[r]) mass += std::norm(svd.v(r, i));
    }
    if (mass > 0.5) {
      const cplx overlap = svd.v.col(i).dot(gauss.cast<cplx>());
      est.kernel_overlap = std::norm(overlap);
      break;
    }
  }
  return est;
}

}  // namespace shiftindex
