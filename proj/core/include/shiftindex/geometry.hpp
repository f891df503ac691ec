#pragma once

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shiftindex {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ManifoldKind { Circle, Torus2, SphereCrossCircle };
enum class MetricKind { UnitFlat, RoundTimesFlat };

/// One of the supported model geometries with its fixed metric.
///
/// Coordinates are angles: `x` on the circle, `(x, y)` on the flat torus and
/// `(polar, azimuth, psi)` on the product of the unit round sphere with the
/// unit circle.
struct ManifoldModel {
  ManifoldKind kind = ManifoldKind::Circle;
  int dim = 1;
  MetricKind metric = MetricKind::UnitFlat;
  int orientation = +1;

  static ManifoldModel circle();
  static ManifoldModel torus2();
  static ManifoldModel sphere_cross_circle();

  /// Riemannian volume of M.
  double volume() const;
  /// Riemannian volume of the unit cosphere bundle S*M.
  double cosphere_volume() const;
  std::string_view name() const;

  bool operator==(const ManifoldModel&) const = default;
};

std::optional<ManifoldModel> parse_manifold(std::string_view name);

using Point = std::array<double, 3>;

/// Wraps an angle into [0, 2pi).
double wrap_angle(double a);
/// Distance on the unit circle between two angles.
double circle_distance(double a, double b);

enum class CarrierKind {
  Cosphere,        ///< S*M of the whole manifold
  Base,            ///< the manifold itself (carrier of the odd/even Dirac formulas)
  StratumCosphere  ///< S*M_g of the polar sub-circles of S^2 x S^1
};

struct GridNode {
  Point base{};   ///< base point coordinates
  Point fiber{};  ///< covector coordinate components (unit length in the metric)
  int sheet = 0;
};

/// Quadrature grid on a carrier space.
///
/// Periodic carriers are a union of `sheets` copies of a uniform lattice of
/// `dim` angular axes with `resolution` points each; node `i` of sheet `s` has
/// index `s * lattice_size() + i` with the last axis running fastest. The
/// cosphere bundle of S^2 x S^1 is the only non-periodic carrier and uses
/// Gauss-Legendre nodes in the polar directions.
class Grid {
 public:
  ManifoldModel manifold;
  CarrierKind kind = CarrierKind::Cosphere;
  int dim = 0;
  int resolution = 0;
  int sheets = 1;
  bool periodic = true;
  std::vector<GridNode> nodes;
  std::vector<double> weights;
  /// Fiber direction (+1 / -1) of every sheet for carriers fibred over circles; 0 otherwise.
  std::vector<int> sheet_fiber_sign;
  /// Stratum component of every sheet (poles for StratumCosphere, 0 otherwise).
  std::vector<int> sheet_component;

  std::size_t lattice_size() const;
  std::size_t size() const { return nodes.size(); }
  std::size_t node_index(int sheet, std::size_t lattice) const {
    return static_cast<std::size_t>(sheet) * lattice_size() + lattice;
  }
  /// Lattice coordinate of a periodic axis, as an angle.
  double axis_coordinate(int i) const { return kTwoPi * i / resolution; }
  double total_weight() const;
  /// Closed-form volume of the carrier.
  double closed_form_volume() const;
  bool same_layout(const Grid& other) const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Quadrature grid on S*M. Trapezoidal on periodic directions, Gauss-Legendre
/// in the polar angles of the sphere factor and of the S^2 fibers.
GridPtr build_cosphere_grid(const ManifoldModel& manifold, int resolution);
/// Grid on M itself; periodic manifolds only.
GridPtr build_base_grid(const ManifoldModel& manifold, int resolution);
/// Cosphere bundle of the two pole circles {north, south} x S^1 in S^2 x S^1.
/// Four sheets: (north, +), (north, -), (south, +), (south, -).
GridPtr build_polar_stratum_grid(int resolution);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// A differential form sampled on a grid, stored per basis monomial.
///
/// Basis monomials are bit masks over the periodic axes of the carrier: bit j
/// set means dx_j is a factor, in increasing axis order.
struct SampledForm {
  int degree = 0;
  GridPtr grid;
  std::map<unsigned, std::vector<cplx>> components;

  static SampledForm zero(GridPtr grid, int degree);
  /// Returns the coefficient vector of a basis monomial, creating it as zeros.
  std::vector<cplx>& component(unsigned mask);
  const std::vector<cplx>* find(unsigned mask) const;
  /// Checks degree <= carrier dimension and consistent component shapes.
  void validate() const;
};

/// Quadrature of a top-degree form against dx_0 ^ ... ^ dx_{dim-1}.
///
/// `sheet_orientation`, when non-empty, multiplies each sheet's contribution.
cplx integrate_form(const SampledForm& form, const Grid& grid,
                    std::span<const int> sheet_orientation = {});

}  // namespace shiftindex
