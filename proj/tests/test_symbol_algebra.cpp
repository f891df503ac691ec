#include <doctest.h>

#include <cmath>
#include <random>

#include "shiftindex/errors.hpp"
#include "shiftindex/symbol_algebra.hpp"

using namespace shiftindex;

namespace {

const cplx I{0.0, 1.0};

struct CircleSetup {
  GroupPtr group = IsometryGroup::make(ManifoldModel::circle(), GroupLaw::FreeAbelian, 0,
                                       {Generator::circle_rotation(RotationNumber::golden())});
  GridPtr cosphere = build_cosphere_grid(ManifoldModel::circle(), 32);
  GridPtr base = build_base_grid(ManifoldModel::circle(), 64);
  double shift = kTwoPi * RotationNumber::golden().turns();

  GroupElement g(long long k) const { return group->element({k}); }
};

// Random scalar symbol on a grid with trigonometric coefficients of degree <= 2.
CrossedSymbol random_symbol(const CircleSetup& c, GridPtr grid, std::mt19937_64& rng, int radius) {
  std::normal_distribution<double> n(0.0, 1.0);
  CrossedSymbol a(c.group, grid, 1);
  for (const auto& g : c.group->ball(radius)) {
    std::array<cplx, 5> m;
    for (auto& z : m) z = cplx(n(rng), n(rng)) * 0.3;
    a = a + CrossedSymbol::delta_scalar(c.group, grid, g, [m](const GridNode& node) {
          cplx s{};
          for (int k = -2; k <= 2; ++k) s += m[k + 2] * std::exp(I * (k * node.base[0]));
          return s * (1.0 + 0.5 * node.fiber[0]);
        });
  }
  return a;
}

cplx identity_integral(const CrossedSymbol& ch, const GroupElement& e) {
  return integrate_form(ch.form(e, 1), *ch.grid());
}

CrossedSymbol winding(const CircleSetup& c, int k, double shift_weight) {
  CrossedSymbol a = CrossedSymbol::delta_scalar(c.group, c.base, c.g(0),
                                                [k](const GridNode& n) { return std::exp(I * (k * n.base[0])); });
  if (shift_weight != 0.0) {
    a = a + CrossedSymbol::delta_scalar(c.group, c.base, c.g(1), [shift_weight](const GridNode& n) {
          return shift_weight * (0.5 + 0.5 * std::cos(n.base[0]));
        });
  }
  return a;
}

}  // namespace

TEST_CASE("convolution of two deltas pulls the left coefficient back") {
  CircleSetup c;
  const auto f = [](const GridNode& n) { return std::exp(I * n.base[0]) * (2.0 + n.fiber[0]); };
  const auto h = [](const GridNode& n) { return cplx(std::cos(2.0 * n.base[0]), 0.0); };
  const auto a = CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(1), f);
  const auto b = CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(2), h);
  const auto ab = convolve(a, b);
  REQUIRE(ab.support() == std::vector<GroupElement>{c.g(3)});
  for (std::size_t i = 0; i < c.cosphere->size(); ++i) {
    GridNode moved = c.cosphere->nodes[i];
    moved.base[0] += 2.0 * c.shift;
    const cplx expected = f(moved) * h(c.cosphere->nodes[i]);
    CHECK(std::abs(ab.value(c.g(3), 0, i)(0, 0) - expected) < 1e-12);
  }
}

TEST_CASE("multiplication by a shift does not commute with e^{ix}") {
  CircleSetup c;
  const auto a = CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(0),
                                             [](const GridNode& n) { return std::exp(I * n.base[0]); });
  const auto u = CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(1), [](const GridNode&) { return cplx(1.0); });
  const auto au = convolve(a, u);
  const auto ua = convolve(u, a);
  for (std::size_t i = 0; i < c.cosphere->size(); ++i) {
    const cplx f = std::exp(I * c.cosphere->nodes[i].base[0]);
    CHECK(std::abs(ua.value(c.g(1), 0, i)(0, 0) - f) < 1e-13);
    CHECK(std::abs(au.value(c.g(1), 0, i)(0, 0) - f * std::exp(I * c.shift)) < 1e-12);
  }
  const auto v = CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(-2), [](const GridNode&) { return cplx(1.0); });
  CHECK(symbol_distance(convolve(u, v), CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(-1),
                                                                    [](const GridNode&) { return cplx(1.0); })) < 1e-14);
}

TEST_CASE("unit and associativity on random circle symbols") {
  CircleSetup c;
  std::mt19937_64 rng(21);
  const auto one = CrossedSymbol::identity(c.group, c.cosphere, 1);
  for (int s = 0; s < 5; ++s) {
    const auto a = random_symbol(c, c.cosphere, rng, 2);
    const auto b = random_symbol(c, c.cosphere, rng, 1);
    const auto d = random_symbol(c, c.cosphere, rng, 1);
    CHECK(symbol_distance(convolve(one, a), a) == 0.0);
    CHECK(symbol_distance(convolve(a, one), a) == 0.0);
    const double scale = a.sup_norm() * b.sup_norm() * d.sup_norm();
    CHECK(symbol_distance(convolve(convolve(a, b), d), convolve(a, convolve(b, d))) < 1e-12 * scale);
  }
}

TEST_CASE("differential obeys Leibniz and d^2 = 0") {
  const auto torus = ManifoldModel::torus2();
  const auto group = IsometryGroup::make(torus, GroupLaw::FreeAbelian, 0,
                                         {Generator::torus_translation(RotationNumber::golden(),
                                                                       RotationNumber::rational(1, 3))});
  const auto grid = build_base_grid(torus, 16);
  const auto a = CrossedSymbol::delta_scalar(group, grid, group->element({1}), [](const GridNode& n) {
                   return std::exp(I * n.base[0]) + 0.5 * std::sin(n.base[1]);
                 }) + CrossedSymbol::identity(group, grid, 1);
  const auto b = CrossedSymbol::delta_scalar(group, grid, group->element({-1}), [](const GridNode& n) {
    return cplx(std::cos(n.base[0] + 2.0 * n.base[1]), 0.0);
  });
  const auto lhs = differential(convolve(a, b));
  const auto rhs = convolve(differential(a), b) + convolve(a, differential(b));
  CHECK(symbol_distance(lhs, rhs) < 1e-12);
  CHECK(symbol_distance(differential(differential(a)), CrossedSymbol(group, grid, 1)) < 1e-12);
  // d sin x = cos x dx on the identity coefficient
  const auto s = CrossedSymbol::delta_scalar(group, grid, group->identity(),
                                             [](const GridNode& n) { return cplx(std::sin(n.base[0])); });
  const auto ds = differential(s);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    CHECK(std::abs(ds.value(group->identity(), 1u, i)(0, 0) - std::cos(grid->nodes[i].base[0])) < 1e-12);
  }
  CrossedSymbol top(group, grid, 1);
  for (auto& v : top.at(group->identity(), 3u)) v = 1.0;
  CHECK_THROWS_AS(differential(top), TopDegree);
}

TEST_CASE("inverse is two-sided") {
  CircleSetup c;
  std::mt19937_64 rng(22);
  for (int s = 0; s < 3; ++s) {
    const auto a = CrossedSymbol::identity(c.group, c.cosphere, 1).scaled(3.0) +
                   random_symbol(c, c.cosphere, rng, 1).scaled(0.1);
    InversionInfo info;
    const auto inv = invert(a, 1e-10, 48, &info);
    const auto one = CrossedSymbol::identity(c.group, c.cosphere, 1);
    CHECK(symbol_distance(convolve(a, inv), one) < 1e-10);
    CHECK(symbol_distance(convolve(inv, a), one) < 1e-10);
    CHECK(info.residual_right < 1e-10);
  }
}

TEST_CASE("non-invertible symbols are rejected") {
  CircleSetup c;
  const auto vanishing = CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(0),
                                                     [](const GridNode& n) { return cplx(std::cos(n.base[0])); });
  CHECK_THROWS_AS(invert(vanishing, 1e-10, 24), NotElliptic);
  // 1 + U with U a unitary shift has spectrum meeting 0
  const auto one_plus_shift = CrossedSymbol::identity(c.group, c.cosphere, 1) +
                              CrossedSymbol::delta_scalar(c.group, c.cosphere, c.g(1),
                                                          [](const GridNode&) { return cplx(1.0); });
  CHECK_THROWS_AS(invert(one_plus_shift, 1e-10, 24), Error);
}

TEST_CASE("Chern character of a winding symbol integrates to its winding number") {
  CircleSetup c;
  for (int k : {-2, -1, 1, 3}) {
    const auto ch = cs_character(winding(c, k, 0.0));
    CHECK(std::abs(identity_integral(ch, c.g(0)) - cplx(k)) < 1e-10);
  }
}

TEST_CASE("Chern character is a homotopy invariant") {
  CircleSetup c;
  const cplx reference = identity_integral(cs_character(winding(c, 1, 0.0)), c.g(0));
  double spread = 0.0;
  for (double t = 0.0; t <= 1.0; t += 0.125) {
    // phase rotation and a growing shift term
    const auto a = winding(c, 1, 0.4 * t).scaled(std::exp(I * (kTwoPi * t)));
    spread = std::max(spread, std::abs(identity_integral(cs_character(a), c.g(0)) - reference));
  }
  CHECK(spread < 1e-6);
}

TEST_CASE("Chern character under unitary conjugation and inversion") {
  CircleSetup c;
  const auto a = winding(c, 2, 0.3);
  const cplx base = identity_integral(cs_character(a), c.g(0));
  CHECK(std::abs(base - 2.0) < 1e-6);
  const auto u = CrossedSymbol::delta_scalar(c.group, c.base, c.g(1), [](const GridNode&) { return cplx(1.0); });
  const auto u_inv = CrossedSymbol::delta_scalar(c.group, c.base, c.g(-1), [](const GridNode&) { return cplx(1.0); });
  const auto conj = convolve(convolve(u, a), u_inv);
  CHECK(std::abs(identity_integral(cs_character(conj), c.g(0)) - base) < 1e-8);
  const auto inv = invert(a, 1e-10, 48);
  CHECK(std::abs(identity_integral(cs_character(inv), c.g(0)) + base) < 1e-8);
}

TEST_CASE("principal symbols of multipliers") {
  CircleSetup c;
  OperatorSpec spec;
  spec.group = c.group;
  spec.order = 1.0;
  // the Hardy projection is of lower order and drops out
  spec.terms = {Term{c.g(0), {Monomial{Coefficient::constant(1.0), Multiplier::derivative(0)}}},
                Term{c.g(1), {Monomial{Coefficient::mode({1, 0, 0}, 0.5), Multiplier::derivative(0)},
                              Monomial{Coefficient::constant(7.0), Multiplier::hardy_plus()}}}};
  const auto sigma = symbol_of_spec(spec, c.cosphere);
  OperatorSpec toeplitz;
  toeplitz.group = c.group;
  toeplitz.order = 0.0;
  toeplitz.terms = {Term{c.g(1), {Monomial{Coefficient::mode({1, 0, 0}, 0.5), Multiplier::hardy_plus()},
                                  Monomial{Coefficient::constant(2.0), Multiplier::hardy_minus()}}}};
  const auto tau = symbol_of_spec(toeplitz, c.cosphere);
  for (std::size_t i = 0; i < c.cosphere->size(); ++i) {
    const auto& n = c.cosphere->nodes[i];
    CHECK(std::abs(sigma.value(c.g(0), 0, i)(0, 0) - I * n.fiber[0]) < 1e-14);
    CHECK(std::abs(sigma.value(c.g(1), 0, i)(0, 0) - 0.5 * std::exp(I * n.base[0]) * I * n.fiber[0]) < 1e-14);
    const cplx hardy = n.fiber[0] > 0 ? 0.5 * std::exp(I * n.base[0]) : cplx(2.0);
    CHECK(std::abs(tau.value(c.g(1), 0, i)(0, 0) - hardy) < 1e-14);
  }
}

TEST_CASE("decay profile recovers a power law") {
  CircleSetup c;
  CrossedSymbol a(c.group, c.cosphere, 1);
  for (const auto& g : c.group->ball(40)) {
    const double w = std::pow(1.0 + c.group->word_length(g), -3.0);
    a = a + CrossedSymbol::delta_scalar(c.group, c.cosphere, g, [w](const GridNode&) { return cplx(w); });
  }
  CHECK(decay_profile(a) == doctest::Approx(-3.0).epsilon(1e-6));
  CHECK_THROWS_AS(decay_profile(CrossedSymbol::identity(c.group, c.cosphere, 1)), InsufficientSupport);
}

TEST_CASE("incompatible symbols are rejected") {
  CircleSetup c;
  const auto a = CrossedSymbol::identity(c.group, c.cosphere, 1);
  const auto b = CrossedSymbol::identity(c.group, build_cosphere_grid(ManifoldModel::circle(), 16), 1);
  const auto r2 = CrossedSymbol::identity(c.group, c.cosphere, 2);
  CHECK_THROWS_AS(convolve(a, b), AlgebraMismatch);
  CHECK_THROWS_AS(a + r2, AlgebraMismatch);
  const auto other = IsometryGroup::trivial(ManifoldModel::circle());
  CHECK_THROWS_AS(convolve(a, CrossedSymbol::identity(other, c.cosphere, 1)), AlgebraMismatch);
}
