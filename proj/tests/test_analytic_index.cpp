#include <doctest.h>

#include <cmath>

#include "shiftindex/analytic_index.hpp"

using namespace shiftindex;

namespace {

const cplx I{0.0, 1.0};

GroupPtr golden_circle() {
  return IsometryGroup::make(ManifoldModel::circle(), GroupLaw::FreeAbelian, 0,
                             {Generator::circle_rotation(RotationNumber::golden())});
}

CrossedSymbol winding_symbol(GroupPtr group, int k, double shift_weight = 0.0) {
  const auto grid = build_base_grid(group->manifold(), 64);
  auto s = CrossedSymbol::delta_scalar(group, grid, group->identity(),
                                       [k](const GridNode& n) { return std::exp(I * (k * n.base[0])); });
  if (shift_weight != 0.0) {
    s = s + CrossedSymbol::delta_scalar(group, grid, group->generator(0),
                                        [shift_weight](const GridNode& n) { return shift_weight * std::cos(n.base[0]); });
  }
  return s;
}

// Hermite functions by the three-term recursion.
std::vector<std::vector<double>> hermite_functions(int count, const std::vector<double>& x) {
  std::vector<std::vector<double>> psi(count, std::vector<double>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    psi[0][i] = std::pow(kPi, -0.25) * std::exp(-x[i] * x[i] / 2.0);
    if (count > 1) psi[1][i] = std::sqrt(2.0) * x[i] * psi[0][i];
    for (int k = 2; k < count; ++k) {
      psi[k][i] = std::sqrt(2.0 / k) * x[i] * psi[k - 1][i] - std::sqrt((k - 1.0) / k) * psi[k - 2][i];
    }
  }
  return psi;
}

}  // namespace

TEST_CASE("Fourier assembly of d/dx is diagonal") {
  OperatorSpec spec;
  spec.group = golden_circle();
  spec.order = 1.0;
  spec.reduce_order = false;
  spec.terms = {Term{spec.group->identity(), {Monomial{Coefficient::constant(1.0), Multiplier::derivative(0)}}}};
  const auto op = assemble(spec, 16);
  REQUIRE(op.size() == 33);
  CHECK((op.matrix - op.matrix.diagonal().asDiagonal().toDenseMatrix()).norm() < 1e-14);
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    CHECK(std::abs(op.matrix(i, i) - I * double(op.modes[i][0])) < 1e-13);
  }
  spec.reduce_order = true;
  const auto reduced = assemble(spec, 16);
  for (Eigen::Index i = 0; i < reduced.size(); ++i) {
    const double n = reduced.modes[i][0];
    CHECK(std::abs(reduced.matrix(i, i) - I * n / std::sqrt(1.0 + n * n)) < 1e-13);
  }
}

TEST_CASE("a pure shift assembles to a diagonal unitary") {
  OperatorSpec spec;
  spec.group = golden_circle();
  spec.terms = {Term{spec.group->generator(0), {Monomial{Coefficient::constant(1.0), Multiplier::identity()}}}};
  const auto op = assemble(spec, 16);
  const Eigen::MatrixXcd gram = op.matrix.adjoint() * op.matrix;
  CHECK((gram - Eigen::MatrixXcd::Identity(op.size(), op.size())).norm() < 1e-12);
  const double alpha = kTwoPi * RotationNumber::golden().turns();
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    CHECK(std::abs(std::abs(op.matrix(i, i)) - 1.0) < 1e-13);
    CHECK(std::abs(std::arg(op.matrix(i, i) * std::exp(I * (alpha * op.modes[i][0]))))  < 1e-12);
  }
  CHECK(estimate_index(spec, {16, 32, 64}).index == 0);
}

TEST_CASE("Toeplitz operators of winding symbols") {
  const auto group = golden_circle();
  for (int k : {-2, -1, 0, 1, 3}) {
    const auto sigma = winding_symbol(group, k);
    const auto est = estimate_index([&](int n) { return toeplitz(sigma, n); }, {32, 64, 128});
    CHECK(est.index == -k);
    CHECK(est.heat_agrees);
    CHECK(est.svd_agrees);
    CHECK_FALSE(est.gap_closing);
  }
  const auto shifted = winding_symbol(group, 2, 0.2);
  CHECK(estimate_index([&](int n) { return toeplitz(shifted, n); }, {32, 64, 128}).index == -2);
}

TEST_CASE("adjoint reverses the index reading") {
  const auto sigma = winding_symbol(golden_circle(), 1);
  const auto op = toeplitz(sigma, 64);
  CHECK(read_index(op).svd_index == -1);
  CHECK(read_index(op.adjoint()).svd_index == 1);
  CHECK(read_index(op.adjoint()).heat_index == 1);
}

TEST_CASE("a vanishing symbol yields no plateau") {
  const auto group = golden_circle();
  const auto grid = build_base_grid(group->manifold(), 64);
  const auto sine = CrossedSymbol::delta_scalar(group, grid, group->identity(),
                                                [](const GridNode& n) { return cplx(std::sin(n.base[0])); });
  CHECK_THROWS_AS(estimate_index([&](int n) { return toeplitz(sine, n); }, {32, 64, 128}), NoPlateau);
  try {
    estimate_index([&](int n) { return toeplitz(sine, n); }, {32, 64, 128});
  } catch (const NoPlateau& e) {
    CHECK(e.diagnostics().readings.size() == 3);
  }
}

TEST_CASE("Hermite ladder matches x + d/dx on sampled Hermite functions") {
  const int count = 10;
  std::vector<double> x;
  const double h = 1e-3;
  for (double t = -12.0; t <= 12.0; t += h) x.push_back(t);
  const auto psi = hermite_functions(count, x);
  const auto op = hermite_model(count);
  for (int k = 1; k < count; ++k) {
    for (int j = 0; j < count; ++j) {
      double s = 0.0;
      for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double e = x[i] * psi[k][i] + (psi[k][i + 1] - psi[k][i - 1]) / (2.0 * h);
        s += psi[j][i] * e * h;
      }
      CHECK(std::abs(op.matrix(j, k).real() - s) < 1e-5);
    }
  }
}

TEST_CASE("model Euler operator has index one with a Gaussian kernel") {
  for (int n : {16, 32, 64}) {
    const auto est = model_euler_index(n);
    CHECK(est.index == 1);
    CHECK(est.kernel_dimension == 1);
    CHECK(est.cokernel_dimension == 0);
    CHECK(est.kernel_overlap > 1.0 - 1e-6);
  }
  const Eigen::VectorXd c = gaussian_hermite_coefficients(32);
  CHECK(std::abs(c(0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.tail(31).norm() < 1e-10);
}

TEST_CASE("analytic side input errors") {
  CHECK_THROWS_AS(hermite_model(2), UnsupportedTerm);
  const auto sigma = winding_symbol(golden_circle(), 1);
  CHECK_THROWS_AS(toeplitz(sigma, 4), UnsupportedTerm);
  CHECK_THROWS_AS(estimate_index([&](int n) { return toeplitz(sigma, n); }, {32, 64}), Error);
  CHECK_THROWS_AS(estimate_index([&](int n) { return toeplitz(sigma, n); }, {64, 32, 128}), Error);
  OperatorSpec sphere;
  sphere.group = IsometryGroup::trivial(ManifoldModel::sphere_cross_circle());
  sphere.terms = {Term{sphere.group->identity(), {Monomial{Coefficient::constant(1.0), Multiplier::identity()}}}};
  CHECK_THROWS_AS(assemble(sphere, 8), UnsupportedGeometry);
}
