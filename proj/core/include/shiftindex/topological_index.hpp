#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "shiftindex/group_action.hpp"
#include "shiftindex/operator_spec.hpp"
#include "shiftindex/symbol_algebra.hpp"

namespace shiftindex {

/// Todd and A-hat forms of a stratum, sampled on its carrier grid.
struct CharacteristicForms {
  FixedStratum stratum;
  SampledForm todd;   ///< Td(T M_g (x) C)
  SampledForm a_hat;  ///< A-hat of S*M_g
  /// Sup norm of the curvature 2-form seen by the stratum (0 on flat strata).
  double curvature = 0.0;
};

/// Throws EmptyStratum for Empty strata.
CharacteristicForms characteristic_forms(const FixedStratum& stratum, GridPtr carrier);

/// Degree <= 4 part of Td(E (x) C) from the Pontryagin classes of E.
double todd_complexified(double p1, double p2);
/// Degree <= 4 part of A-hat(E).
double a_hat(double p1, double p2);
/// Graded parts (degrees 0..4) of prod over +-x_j of x / (1 - e^{-x}), from the roots x_j.
std::array<double, 5> todd_from_roots(std::span<const double> roots);
/// Graded parts (degrees 0..4) of prod_j (x_j / 2) / sinh(x_j / 2).
std::array<double, 5> a_hat_from_roots(std::span<const double> roots);

/// sum_k (-1)^k tr(g | Lambda^k (N (x) C)) via principal minors; equals prod (2 - 2 cos theta).
/// Throws VanishingAngle.
cplx as_denominator(std::span<const double> angles);
cplx as_denominator(const FixedStratum& stratum);
/// Pf(2i sin(i Theta / 2)) via the matrix sine; equals prod 2 sin(theta / 2).
cplx pf_sin_denominator(std::span<const double> angles);
cplx pf_sin_denominator(const FixedStratum& stratum);

/// ch p = tr p exp(-(1/2 pi i) p dp dp) expanded to the carrier's top degree.
/// Throws NotIdempotent.
CrossedSymbol chern_projection(const CrossedSymbol& p, double idempotent_tol = 1e-8);

struct Contribution {
  GroupElement g;
  long long word_length = 0;
  StratumKind kind = StratumKind::Empty;
  int component = 0;
  cplx value{};
  double abs_mass = 0.0;  ///< integral of |integrand|
  std::string note;
};

/// Per-g contributions of one index formula and its convergence record.
struct IndexReport {
  std::string formula;
  std::vector<Contribution> contributions;
  std::vector<cplx> shell_sums;      ///< S_k for k = 0..shell_max
  std::vector<double> shell_masses;  ///< A_k = sum over the shell of abs_mass
  /// Slope of log(tail envelope of A_k) against log k over k >= 1; -inf when
  /// every A_k vanishes for k >= 1, NaN when fewer than 3 shells carry mass.
  double decay_exponent = 0.0;
  bool converged = true;
  cplx total{};
  long long nearest = 0;
  double distance_to_integer = 0.0;
  std::vector<std::string> notes;
};

struct FormulaOptions {
  double tolerance = 1e-10;          ///< inversion residual
  long long support_radius = -1;     ///< inverse support; by default starts at max(shell_max, 24) and doubles as needed
  double idempotent_tol = 1e-8;
};

/// Sheet orientations of the cosphere carriers (pinned by the Hardy-Toeplitz convention).
std::vector<int> carrier_orientation(const Grid& grid);

/// sum_g sum_{M_g} int_{S*M_g} Td ch sigma(g) / ch lambda_{-1}(N M_g (x) C)(g).
IndexReport evaluate_fixedp(const CrossedSymbol& sigma, long long shell_max,
                            const FormulaOptions& opt = {});
/// sum_g sum_{X_g} int_{X_g} A-hat Pf^{-1} ch sigma(g) for sigma on the base circle.
IndexReport evaluate_local_odd(const CrossedSymbol& sigma, long long shell_max,
                               const FormulaOptions& opt = {});
/// sum_g sum_{X_g} int_{X_g} A-hat Pf^{-1} ch p(g) for a projection on the base torus.
IndexReport evaluate_dirac_even(const CrossedSymbol& p, long long shell_max,
                                const FormulaOptions& opt = {});

/// Rank-1 projection (1 + n.sigma)/2 on the torus with n = v/|v| and
/// v = (sin x, sin y, 1 - cos x - cos y); first Chern number +1.
Eigen::MatrixXcd bott_projection(const Point& x);
/// x- and y-derivatives of bott_projection.
std::array<Eigen::MatrixXcd, 2> bott_projection_derivatives(const Point& x);
CrossedSymbol bott_symbol(GroupPtr group, GridPtr base_grid);

/// p dbar + p (dbar p) + (1 - p) Lambda with dbar = d/dx + i d/dy, order 1.
OperatorSpec twisted_dirac_spec(GroupPtr group);

}  // namespace shiftindex
