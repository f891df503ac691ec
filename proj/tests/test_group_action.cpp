#include <doctest.h>

#include <cmath>
#include <random>

#include "shiftindex/errors.hpp"
#include "shiftindex/group_action.hpp"

using namespace shiftindex;

namespace {

std::vector<GroupPtr> sample_groups() {
  const auto golden = RotationNumber::golden();
  return {
      IsometryGroup::make(ManifoldModel::circle(), GroupLaw::FreeAbelian, 0, {Generator::circle_rotation(golden)}),
      IsometryGroup::make(ManifoldModel::torus2(), GroupLaw::FreeAbelian, 0,
                          {Generator::torus_translation(golden, RotationNumber::rational(1, 3)),
                           Generator::torus_translation(RotationNumber::rational(0, 1),
                                                        RotationNumber::from_double(std::sqrt(2.0) - 1.0))}),
      IsometryGroup::make(ManifoldModel::torus2(), GroupLaw::Cyclic, 2,
                          {Generator{{RotationNumber::rational(1, 2), RotationNumber::rational(0, 1)}, {}, true}}),
      IsometryGroup::make(ManifoldModel::sphere_cross_circle(), GroupLaw::FreeAbelian, 0,
                          {Generator::sphere_rotation_only(golden)}),
      IsometryGroup::make(ManifoldModel::sphere_cross_circle(), GroupLaw::FreeAbelian, 0,
                          {Generator{{RotationNumber::rational(1, 5)}, RotationNumber::from_double(0.3), false}}),
  };
}

Point random_point(const ManifoldModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi), v(0.0, kPi);
  switch (m.kind) {
    case ManifoldKind::Circle: return {u(rng), 0.0, 0.0};
    case ManifoldKind::Torus2: return {u(rng), u(rng), 0.0};
    case ManifoldKind::SphereCrossCircle: return {v(rng), u(rng), u(rng)};
  }
  return {};
}

}  // namespace

TEST_CASE("every element acts isometrically") {
  std::mt19937_64 rng(11);
  for (const auto& G : sample_groups()) {
    for (const auto& g : G->ball(3)) {
      for (int s = 0; s < 20; ++s) {
        const Point x = random_point(G->manifold(), rng), y = random_point(G->manifold(), rng);
        CHECK(std::abs(G->distance(G->act_point(g, x), G->act_point(g, y)) - G->distance(x, y)) < 1e-12);
      }
    }
  }
}

TEST_CASE("action respects composition and inverses") {
  std::mt19937_64 rng(12);
  for (const auto& G : sample_groups()) {
    const auto ball = G->ball(2);
    for (const auto& g : ball) {
      CHECK(G->is_identity(G->compose(g, G->inverse(g))));
      for (const auto& h : ball) {
        const Point x = random_point(G->manifold(), rng);
        const Point a = G->act_point(G->compose(g, h), x);
        const Point b = G->act_point(g, G->act_point(h, x));
        CHECK(G->distance(a, b) < 1e-12);
      }
    }
  }
}

TEST_CASE("fixed strata are pointwise fixed") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  int strata_seen = 0;
  for (const auto& G : sample_groups()) {
    for (const auto& g : G->ball(4)) {
      for (const auto& s : G->fixed_strata(g)) {
        for (int t = 0; t < 10; ++t) {
          Point x{};
          switch (s.kind) {
            case StratumKind::Empty: continue;
            case StratumKind::WholeManifold: x = random_point(G->manifold(), rng); break;
            case StratumKind::PointSet: x = s.location; break;
            case StratumKind::SubCircle: x = {s.location[0], u(rng), u(rng)}; break;
          }
          ++strata_seen;
          CHECK(G->distance(G->act_point(g, x), x) < 1e-12);
          CHECK(G->distance_to_fixed(g, x) < 1e-12);
        }
      }
    }
  }
  CHECK(strata_seen > 100);
}

TEST_CASE("stratum shapes") {
  const auto groups = sample_groups();
  const auto& flip = groups[2];
  const auto strata = flip->fixed_strata(flip->generator(0));
  REQUIRE(strata.size() == 4);
  for (const auto& s : strata) {
    CHECK(s.kind == StratumKind::PointSet);
    CHECK(s.normal_angles == std::vector<double>{kPi});
  }
  const auto& rot = groups[3];
  const auto poles = rot->fixed_strata(rot->generator(0));
  REQUIRE(poles.size() == 2);
  const double alpha = kTwoPi * RotationNumber::golden().turns();
  CHECK(poles[0].normal_angles[0] == doctest::Approx(alpha));
  CHECK(poles[1].normal_angles[0] == doctest::Approx(kTwoPi - alpha));
  CHECK(groups[0]->fixed_strata(groups[0]->generator(0))[0].kind == StratumKind::Empty);
  CHECK(groups[0]->fixed_strata(groups[0]->identity())[0].kind == StratumKind::WholeManifold);
}

TEST_CASE("ball sizes and growth exponents") {
  const auto groups = sample_groups();
  for (long long k = 0; k <= 6; ++k) {
    CHECK(groups[0]->ball(k).size() == static_cast<std::size_t>(2 * k + 1));
    CHECK(groups[1]->ball(k).size() == static_cast<std::size_t>(2 * k * k + 2 * k + 1));
    CHECK(groups[2]->ball(k).size() == static_cast<std::size_t>(k == 0 ? 1 : 2));
  }
  CHECK(growth_check(*groups[0], 64).exponent == doctest::Approx(1.0).epsilon(0.05));
  CHECK(growth_check(*groups[1], 64).exponent == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(growth_check(*groups[2], 64).exponent) < 1e-12);
}

TEST_CASE("rotation numbers") {
  const auto golden = RotationNumber::golden();
  CHECK(golden.turns() == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));
  const auto q = golden.convergent_denominators(1000);
  const std::vector<long long> fib{1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987};
  CHECK(std::vector<long long>(q.end() - std::min(q.size(), fib.size()), q.end()) ==
        std::vector<long long>(fib.end() - std::min(q.size(), fib.size()), fib.end()));
  CHECK(RotationNumber::rational(1, 3).frac_distance(3) == 0.0);
  CHECK(RotationNumber::rational(1, 3).frac_distance(1) == doctest::Approx(1.0 / 3.0));
  CHECK(RotationNumber::rational(7, 3).turns() == doctest::Approx(1.0 / 3.0));
  // 2^{k!} times the Liouville number is within 2^{-(k+1)! + k! + 1} of an integer
  const auto L = RotationNumber::liouville(5);
  CHECK(L.frac_distance(1LL << 24) < std::ldexp(1.0, -90));
  CHECK(L.frac_distance(3) > 0.1);
}

TEST_CASE("Diophantine dichotomy") {
  const auto golden = IsometryGroup::make(ManifoldModel::circle(), GroupLaw::FreeAbelian, 0,
                                          {Generator::circle_rotation(RotationNumber::golden())});
  const auto gfit = diophantine_check(*golden, 1LL << 26, 16);
  CHECK_FALSE(gfit.violation);
  CHECK(gfit.exponent <= 1);
  const auto liouville = IsometryGroup::make(ManifoldModel::circle(), GroupLaw::FreeAbelian, 0,
                                             {Generator::circle_rotation(RotationNumber::liouville(6))});
  CHECK(diophantine_check(*liouville, 1LL << 26, 16).violation);
}

TEST_CASE("group construction errors") {
  CHECK_THROWS_AS(IsometryGroup::make(ManifoldModel::circle(), GroupLaw::FreeAbelian, 0,
                                      {Generator{{RotationNumber::golden()}, {}, true}}),
                  InvalidGroup);
  CHECK_THROWS_AS(IsometryGroup::make(ManifoldModel::circle(), GroupLaw::Cyclic, 2,
                                      {Generator::circle_rotation(RotationNumber::rational(1, 3))}),
                  InvalidGroup);
  CHECK_THROWS_AS(IsometryGroup::make(ManifoldModel::torus2(), GroupLaw::FreeAbelian, 0,
                                      {Generator::circle_rotation(RotationNumber::golden())}),
                  InvalidGroup);
  CHECK_THROWS_AS(RotationNumber::rational(1, 0), InvalidGroup);
  const auto a = IsometryGroup::trivial(ManifoldModel::circle());
  const auto b = IsometryGroup::trivial(ManifoldModel::circle());
  CHECK_THROWS_AS(a->compose(a->identity(), b->identity()), GroupMismatch);
  CHECK_NOTHROW(IsometryGroup::make(ManifoldModel::circle(), GroupLaw::Cyclic, 3,
                                    {Generator::circle_rotation(RotationNumber::rational(1, 3))}));
}
