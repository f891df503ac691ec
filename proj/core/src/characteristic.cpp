#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "shiftindex/errors.hpp"
#include "shiftindex/topological_index.hpp"

namespace shiftindex {

namespace {

using Graded = std::array<double, 5>;

Graded multiply(const Graded& a, const Graded& b) {
  Graded c{};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; i + j < 5; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

// x / (1 - e^{-x}) = 1 + x/2 + x^2/12 - x^4/720 + ...
Graded todd_root(double x) { return {1.0, x / 2.0, x * x / 12.0, 0.0, -std::pow(x, 4) / 720.0}; }

// (x/2) / sinh(x/2) = 1 - x^2/24 + 7 x^4/5760 + ...
Graded a_hat_root(double x) { return {1.0, 0.0, -x * x / 24.0, 0.0, 7.0 * std::pow(x, 4) / 5760.0}; }

void check_angles(std::span<const double> angles) {
  for (double t : angles) {
    const double w = wrap_angle(t);
    if (w < 1e-10 || kTwoPi - w < 1e-10) {
      throw VanishingAngle("normal rotation angle " + format_number(t) + " is 0 mod 2pi");
    }
  }
}

// Pfaffian of a skew-symmetric matrix by skew Gaussian elimination with pivoting.
cplx pfaffian(Eigen::MatrixXcd a) {
  const Eigen::Index n = a.rows();
  if (n % 2) return 0.0;
  cplx pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp = k + 1;
    for (Eigen::Index i = k + 2; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(kp, k))) kp = i;
    }
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == cplx{}) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index rest = n - k - 2;
      const Eigen::VectorXcd tau = a.row(k).segment(k + 2, rest).transpose() / a(k, k + 1);
      const Eigen::VectorXcd col = a.col(k + 1).segment(k + 2, rest);
      a.block(k + 2, k + 2, rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace

double todd_complexified(double p1, double p2) {
  return 1.0 - p1 / 12.0 + p1 * p1 / 240.0 - p2 / 720.0;
}

double a_hat(double p1, double p2) { return 1.0 - p1 / 24.0 + (7.0 * p1 * p1 - 4.0 * p2) / 5760.0; }

std::array<double, 5> todd_from_roots(std::span<const double> roots) {
  Graded out{1.0, 0.0, 0.0, 0.0, 0.0};
  for (double x : roots) out = multiply(multiply(out, todd_root(x)), todd_root(-x));
  return out;
}

std::array<double, 5> a_hat_from_roots(std::span<const double> roots) {
  Graded out{1.0, 0.0, 0.0, 0.0, 0.0};
  for (double x : roots) out = multiply(out, a_hat_root(x));
  return out;
}

CharacteristicForms characteristic_forms(const FixedStratum& stratum, GridPtr carrier) {
  if (stratum.kind == StratumKind::Empty) throw EmptyStratum("no characteristic forms on an empty stratum");
  CharacteristicForms cf;
  cf.stratum = stratum;
  // Only the whole of S^2 x S^1 sees curvature (K = 1 on the sphere factor).
  // Its curvature 2-form is a multiple of the sphere area form, whose square
  // vanishes, so p1 = p2 = 0 pointwise.
  const bool curved = stratum.kind == StratumKind::WholeManifold &&
                      carrier->manifold.kind == ManifoldKind::SphereCrossCircle;
  cf.curvature = curved ? 1.0 : 0.0;
  const double area_form_square = 0.0;
  const double p1 = cf.curvature * cf.curvature * area_form_square / (4.0 * kPi * kPi);
  const double p2 = 0.0;
  cf.todd = SampledForm::zero(carrier, 0);
  cf.a_hat = SampledForm::zero(carrier, 0);
  const double ah = a_hat(p1, p2);
  const Graded sq = multiply({1.0, 0.0, ah - 1.0, 0.0, 0.0}, {1.0, 0.0, ah - 1.0, 0.0, 0.0});
  cf.todd.component(0).assign(carrier->size(), todd_complexified(p1, p2));
  cf.a_hat.component(0).assign(carrier->size(), sq[0] + sq[2] + sq[4]);
  return cf;
}

cplx as_denominator(std::span<const double> angles) {
  check_angles(angles);
  const int n = 2 * static_cast<int>(angles.size());
  if (n > 16) throw VanishingAngle("too many normal blocks");
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < angles.size(); ++j) {
    const double c = std::cos(angles[j]), s = std::sin(angles[j]);
    g.block(2 * j, 2 * j, 2, 2) << c, -s, s, c;
  }
  // sum_k (-1)^k e_k(g), e_k the sum of k x k principal minors
  cplx total{};
  for (unsigned subset = 0; subset < (1u << n); ++subset) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if ((subset >> i) & 1u) idx.push_back(i);
    }
    const int k = static_cast<int>(idx.size());
    cplx minor = 1.0;
    if (k > 0) {
      Eigen::MatrixXcd sub(k, k);
      for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) sub(r, c) = g(idx[r], idx[c]);
      }
      minor = sub.determinant();
    }
    total += (k % 2 ? -1.0 : 1.0) * minor;
  }
  return total;
}

cplx as_denominator(const FixedStratum& stratum) { return as_denominator(stratum.normal_angles); }

cplx pf_sin_denominator(std::span<const double> angles) {
  check_angles(angles);
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(angles.size());
  if (n == 0) return 1.0;
  // Theta = log of the normal rotation, block-diagonal theta J
  Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < angles.size(); ++j) {
    theta(2 * j, 2 * j + 1) = -angles[j];
    theta(2 * j + 1, 2 * j) = angles[j];
  }
  const cplx i(0.0, 1.0);
  const Eigen::MatrixXcd arg = (i / 2.0) * theta;
  const Eigen::MatrixXcd m = (2.0 * i) * arg.sin();
  return pfaffian(m);
}

cplx pf_sin_denominator(const FixedStratum& stratum) {
  return pf_sin_denominator(stratum.normal_angles);
}

namespace {

// Orientation of the Bott map chosen so that (i/2pi) int tr(p dp dp) = +1.
constexpr double kBottSign = 1.0;

std::array<double, 3> bott_vector(const Point& x) {
  return {std::sin(x[0]), kBottSign * std::sin(x[1]), 1.0 - std::cos(x[0]) - std::cos(x[1])};
}

Eigen::MatrixXcd pauli_combination(const std::array<double, 3>& n) {
  const cplx i(0.0, 1.0);
  Eigen::MatrixXcd m(2, 2);
  m << n[2], n[0] - i * n[1], n[0] + i * n[1], -n[2];
  return m;
}

}  // namespace

Eigen::MatrixXcd bott_projection(const Point& x) {
  auto v = bott_vector(x);
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (auto& c : v) c /= r;
  return 0.5 * (Eigen::MatrixXcd::Identity(2, 2) + pauli_combination(v));
}

std::array<Eigen::MatrixXcd, 2> bott_projection_derivatives(const Point& x) {
  const auto v = bott_vector(x);
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const std::array<double, 3> n{v[0] / r, v[1] / r, v[2] / r};
  const std::array<std::array<double, 3>, 2> dv{{{std::cos(x[0]), 0.0, std::sin(x[0])},
                                                 {0.0, kBottSign * std::cos(x[1]), std::sin(x[1])}}};
  std::array<Eigen::MatrixXcd, 2> out;
  for (int a = 0; a < 2; ++a) {
    const double proj = n[0] * dv[a][0] + n[1] * dv[a][1] + n[2] * dv[a][2];
    std::array<double, 3> dn{};
    for (int c = 0; c < 3; ++c) dn[c] = (dv[a][c] - n[c] * proj) / r;
    out[a] = 0.5 * pauli_combination(dn);
  }
  return out;
}

CrossedSymbol bott_symbol(GroupPtr group, GridPtr base_grid) {
  if (base_grid->manifold.kind != ManifoldKind::Torus2) {
    throw UnsupportedGeometry("the Bott projection lives on the torus");
  }
  const auto e = group->identity();
  return CrossedSymbol::delta(std::move(group), std::move(base_grid), e,
                              [](const GridNode& n) { return bott_projection(n.base); });
}

OperatorSpec twisted_dirac_spec(GroupPtr group) {
  if (group->manifold().kind != ManifoldKind::Torus2) {
    throw UnsupportedGeometry("the twisted Dirac operator lives on the torus");
  }
  const cplx i(0.0, 1.0);
  OperatorSpec spec;
  spec.name = "twisted-dirac";
  spec.group = group;
  spec.rank = 2;
  spec.order = 1.0;
  Term t;
  t.g = group->identity();
  const auto p = Coefficient::smooth([](const Point& x) { return bott_projection(x); }, 2);
  t.monomials.push_back({p, Multiplier::derivative(0)});
  t.monomials.push_back({p.scaled(i), Multiplier::derivative(1)});
  t.monomials.push_back({Coefficient::smooth(
                             [i](const Point& x) {
                               const auto d = bott_projection_derivatives(x);
                               return Eigen::MatrixXcd(bott_projection(x) * (d[0] + i * d[1]));
                             },
                             2),
                         Multiplier::identity()});
  t.monomials.push_back({Coefficient::smooth(
                             [](const Point& x) {
                               return Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2) - bott_projection(x));
                             },
                             2),
                         Multiplier::bessel(1.0)});
  spec.terms.push_back(std::move(t));
  return spec;
}

}  // namespace shiftindex
