#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <vector>

#include "shiftindex/detail/fourier.hpp"
#include "shiftindex/geometry.hpp"
#include "shiftindex/group_action.hpp"
#include "shiftindex/operator_spec.hpp"

namespace shiftindex {

/// Support key: a group element and a basis monomial of the form part.
struct SymbolKey {
  GroupElement g;
  unsigned mask = 0;
  auto operator<=>(const SymbolKey&) const = default;
};

/// Finitely supported crossed-product element a = sum_g (dg^*)^{-1} o a(g).
///
/// Each coefficient is a matrix-valued differential form sampled on a carrier
/// grid, stored per (g, basis monomial) as node-major m x m blocks.
class CrossedSymbol {
 public:
  using Data = std::vector<cplx>;  // size nodes * m * m, entry (r, c) at node*m*m + r*m + c

  CrossedSymbol() = default;
  CrossedSymbol(GroupPtr group, GridPtr grid, int rank);

  static CrossedSymbol identity(GroupPtr group, GridPtr grid, int rank);
  /// delta_g tensor f, with f given per node.
  static CrossedSymbol delta(GroupPtr group, GridPtr grid, const GroupElement& g,
                             const std::function<Eigen::MatrixXcd(const GridNode&)>& f);
  static CrossedSymbol delta_constant(GroupPtr group, GridPtr grid, const GroupElement& g,
                                      const Eigen::MatrixXcd& c);
  static CrossedSymbol delta_scalar(GroupPtr group, GridPtr grid, const GroupElement& g,
                                    const std::function<cplx(const GridNode&)>& f);

  const GroupPtr& group() const { return group_; }
  const GridPtr& grid() const { return grid_; }
  int rank() const { return rank_; }
  const std::map<SymbolKey, Data>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  /// Fitted decay exponent of sup |a(g)| against 1 + |g|; NaN with fewer than 3 word lengths.
  double decay_exponent() const { return decay_; }

  /// Coefficient block, created as zeros on first access.
  Data& at(const GroupElement& g, unsigned mask = 0);
  const Data* find(const GroupElement& g, unsigned mask = 0) const;
  Eigen::MatrixXcd value(const GroupElement& g, unsigned mask, std::size_t node) const;
  void set_value(const GroupElement& g, unsigned mask, std::size_t node, const Eigen::MatrixXcd& v);

  /// Distinct group elements in the support, ordered.
  std::vector<GroupElement> support() const;
  long long support_radius() const;
  int max_degree() const;
  /// Sup over nodes of the operator norm of one coefficient.
  double coefficient_norm(const SymbolKey& key) const;
  double sup_norm() const;

  CrossedSymbol operator+(const CrossedSymbol& other) const;
  CrossedSymbol operator-(const CrossedSymbol& other) const;
  CrossedSymbol scaled(cplx s) const;
  /// Keeps only coefficients with |g| <= radius.
  CrossedSymbol truncated(long long radius) const;
  /// Degree-k part.
  CrossedSymbol degree_part(int k) const;
  /// Matrix trace per node; the result has rank 1.
  CrossedSymbol trace() const;
  /// The scalar degree-k part at g as a sampled form (rank-1 symbols only).
  SampledForm form(const GroupElement& g, int degree) const;

  /// Drops coefficients with sup norm below `eps` and refreshes decay metadata.
  void prune(double eps = 1e-14);
  void check_compatible(const CrossedSymbol& other) const;

 private:
  void refresh_decay();

  GroupPtr group_;
  GridPtr grid_;
  int rank_ = 1;
  std::map<SymbolKey, Data> terms_;
  double decay_ = 0.0;
};

/// The lattice map realizing the cosphere action of g on a periodic carrier.
detail::LatticeMap carrier_map(const IsometryGroup& group, const Grid& grid, const GroupElement& g);

/// f o dk applied to a coefficient block (pullback of forms included).
CrossedSymbol::Data pull_back(const CrossedSymbol& a, const CrossedSymbol::Data& data, unsigned mask,
                              const GroupElement& k);

/// (a*b)(g) = sum_{hk=g} (a(h) o dk) . b(k), with wedge products of the form parts.
CrossedSymbol convolve(const CrossedSymbol& a, const CrossedSymbol& b);

struct InversionInfo {
  bool neumann = false;
  double min_singular = 0.0;
  /// Smallest singular value of the regular-representation blocks at radii R/4, R/2, R.
  std::vector<double> singular_trend;
  double residual_right = 0.0;
  double residual_left = 0.0;
};

/// Two-sided inverse with support |g| <= support_radius.
/// Throws NotElliptic or TruncationInsufficient.
CrossedSymbol invert(const CrossedSymbol& a, double tolerance, long long support_radius,
                     InversionInfo* info = nullptr);

/// Exterior derivative applied coefficient-wise. Throws TopDegree.
CrossedSymbol differential(const CrossedSymbol& a);

/// ch a = sum over odd degrees 2k+1 <= dim of
/// (1/2 pi i)^{k+1} k!/(2k+1)! tr[(a^{-1} da)^{2k+1}], as a rank-1 symbol.
CrossedSymbol cs_character(const CrossedSymbol& a, const CrossedSymbol& a_inverse);
CrossedSymbol cs_character(const CrossedSymbol& a, double tolerance = 1e-10,
                           long long support_radius = -1);

/// Principal symbol sum_g (dg^*)^{-1} o sigma(D_g) on unit covectors of the grid.
CrossedSymbol symbol_of_spec(const OperatorSpec& spec, GridPtr grid);

/// Least-squares slope of log sup|a(g)| against log(1 + |g|). Throws InsufficientSupport.
double decay_profile(const CrossedSymbol& a);

/// sup over (g, node) of |a - b|.
double symbol_distance(const CrossedSymbol& a, const CrossedSymbol& b);

}  // namespace shiftindex
