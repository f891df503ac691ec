#include <doctest.h>

#include <cmath>

#include "shiftindex/geometry.hpp"
#include "shiftindex/errors.hpp"

using namespace shiftindex;

namespace {
constexpr double kPi3 = kPi * kPi * kPi;
}

TEST_CASE("manifold volumes match the closed forms") {
  CHECK(ManifoldModel::circle().volume() == doctest::Approx(2.0 * kPi));
  CHECK(ManifoldModel::torus2().volume() == doctest::Approx(4.0 * kPi * kPi));
  CHECK(ManifoldModel::sphere_cross_circle().volume() == doctest::Approx(8.0 * kPi * kPi));
  CHECK(ManifoldModel::circle().cosphere_volume() == doctest::Approx(4.0 * kPi));
  CHECK(ManifoldModel::torus2().cosphere_volume() == doctest::Approx(8.0 * kPi3));
  CHECK(ManifoldModel::sphere_cross_circle().cosphere_volume() == doctest::Approx(32.0 * kPi3));
}

TEST_CASE("quadrature weights sum to the carrier volume") {
  for (int res : {4, 8, 16}) {
    for (const auto& m : {ManifoldModel::circle(), ManifoldModel::torus2(), ManifoldModel::sphere_cross_circle()}) {
      if (m.kind == ManifoldKind::SphereCrossCircle && res > 8) continue;
      const auto g = build_cosphere_grid(m, res);
      CHECK(std::abs(g->total_weight() - g->closed_form_volume()) < 1e-10 * g->closed_form_volume());
      if (m.kind != ManifoldKind::SphereCrossCircle) {
        const auto b = build_base_grid(m, res);
        CHECK(b->total_weight() == doctest::Approx(m.volume()).epsilon(1e-13));
      }
    }
    const auto s = build_polar_stratum_grid(res);
    CHECK(s->sheets == 4);
    CHECK(s->total_weight() == doctest::Approx(8.0 * kPi).epsilon(1e-13));
  }
}

TEST_CASE("trapezoid rule integrates trigonometric monomials exactly") {
  const int res = 32;
  const auto grid = build_base_grid(ManifoldModel::circle(), res);
  for (int k = -res + 1; k < res; ++k) {
    auto form = SampledForm::zero(grid, 1);
    auto& c = form.component(1u);
    for (std::size_t i = 0; i < grid->size(); ++i) c[i] = std::exp(cplx(0.0, k * grid->nodes[i].base[0]));
    const cplx v = integrate_form(form, *grid);
    const cplx expected = k == 0 ? cplx(2.0 * kPi) : cplx(0.0);
    CHECK(std::abs(v - expected) < 1e-12);
  }
}

TEST_CASE("torus quadrature of e^{i(kx+ly)} is exact below the resolution") {
  const int res = 8;
  const auto grid = build_base_grid(ManifoldModel::torus2(), res);
  for (int k = -3; k <= 3; ++k) {
    for (int l = -3; l <= 3; ++l) {
      auto form = SampledForm::zero(grid, 2);
      auto& c = form.component(3u);
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const auto& b = grid->nodes[i].base;
        c[i] = std::exp(cplx(0.0, k * b[0] + l * b[1]));
      }
      const cplx expected = (k == 0 && l == 0) ? cplx(4.0 * kPi * kPi) : cplx(0.0);
      CHECK(std::abs(integrate_form(form, *grid) - expected) < 1e-11);
    }
  }
}

TEST_CASE("sheet orientation flips a sheet's contribution") {
  const auto grid = build_cosphere_grid(ManifoldModel::circle(), 16);
  auto form = SampledForm::zero(grid, 1);
  for (auto& v : form.component(1u)) v = 1.0;
  const std::vector<int> orient{+1, -1};
  CHECK(std::abs(integrate_form(form, *grid, orient)) < 1e-13);
  CHECK(integrate_form(form, *grid).real() == doctest::Approx(4.0 * kPi));
}

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
  for (int n : {2, 5, 12, 40}) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
}

TEST_CASE("angles wrap into [0, 2pi)") {
  CHECK(wrap_angle(-0.5) == doctest::Approx(2.0 * kPi - 0.5));
  CHECK(wrap_angle(7.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2.0 * kPi) < 2.0 * kPi);
  CHECK(circle_distance(0.1, 2.0 * kPi - 0.1) == doctest::Approx(0.2));
}

TEST_CASE("geometry errors") {
  CHECK_THROWS_AS(build_cosphere_grid(ManifoldModel::circle(), 2), BadResolution);
  CHECK_THROWS_AS(build_base_grid(ManifoldModel::sphere_cross_circle(), 8), UnsupportedGeometry);
  CHECK_FALSE(parse_manifold("klein_bottle").has_value());
  CHECK(parse_manifold("torus2")->dim == 2);
  const auto grid = build_base_grid(ManifoldModel::circle(), 8);
  auto form = SampledForm::zero(grid, 0);
  form.component(0u)[0] = 1.0;
  CHECK_THROWS_AS(integrate_form(form, *grid), DegreeMismatch);
}
