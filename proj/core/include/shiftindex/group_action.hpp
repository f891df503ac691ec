#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftindex/geometry.hpp"

namespace shiftindex {

using Rational = boost::multiprecision::cpp_rational;

/// An angle measured in full turns, optionally known exactly as a rational.
class RotationNumber {
 public:
  RotationNumber() = default;
  static RotationNumber from_double(double turns);
  static RotationNumber exact(const Rational& turns);
  static RotationNumber rational(long long p, long long q);
  /// (sqrt(5) - 1) / 2, whose continued fraction has all partial quotients 1.
  static RotationNumber golden();
  /// sum_{k=1}^{terms} 2^{-k!}, stored exactly.
  static RotationNumber liouville(int terms);

  /// Value in turns; exact rotation numbers report their fractional part.
  double turns() const { return turns_; }
  const std::optional<Rational>& exact_value() const { return exact_; }
  bool is_zero() const;

  /// Distance of m * turns to the nearest integer, computed exactly when possible.
  double frac_distance(long long m) const;
  /// Denominators of the continued-fraction convergents up to `max_q`. For
  /// inexact values the expansion of the stored double is cut at 1e8.
  std::vector<long long> convergent_denominators(long long max_q) const;

  RotationNumber scaled(long long m) const;
  RotationNumber plus(const RotationNumber& other) const;

 private:
  double turns_ = 0.0;
  std::optional<Rational> exact_;
};

/// Rigid-motion descriptor of one generator.
///
/// `translation` holds one rotation number per flat axis (Circle: x, Torus2:
/// x and y, SphereCrossCircle: psi). `sphere_rotation` rotates the sphere
/// factor about its polar axis. `flip` sets the linear part on the flat factor
/// to -1.
struct Generator {
  std::vector<RotationNumber> translation;
  RotationNumber sphere_rotation;
  bool flip = false;

  static Generator circle_rotation(RotationNumber alpha);
  static Generator torus_translation(RotationNumber a, RotationNumber b);
  static Generator sphere_rotation_only(RotationNumber angle);
};

enum class GroupLaw { FreeAbelian, Cyclic };

/// Element of an IsometryGroup: an exponent vector (FreeAbelian) or a residue (Cyclic).
struct GroupElement {
  std::uint64_t group_id = 0;
  std::vector<long long> exponents;

  auto operator<=>(const GroupElement&) const = default;
  std::string to_string() const;
};

/// The action of an element on M: x -> flat_sign * x + flat_shift on the flat
/// axes and a rotation by sphere_angle about the polar axis of the sphere.
struct RigidMotion {
  int flat_sign = 1;
  std::array<double, 2> flat_shift{0.0, 0.0};
  double sphere_angle = 0.0;
  /// True when the element acts as the identity (exact when the rotation numbers are).
  bool trivial = true;
};

enum class StratumKind { WholeManifold, Empty, SubCircle, PointSet };

/// A connected component M_g of the fixed-point set of g.
struct FixedStratum {
  GroupElement element;
  StratumKind kind = StratumKind::Empty;
  int dim = 0;
  /// Rotation angles of dg on the normal bundle, one per real 2-plane block, in (0, 2pi).
  std::vector<double> normal_angles;
  int normal_rank = 0;
  /// PointSet: the point; SubCircle: polar angle of the pole (0 or pi) in slot 0.
  Point location{};
  /// SubCircle: 0 for the north pole circle, 1 for the south pole circle.
  int component = 0;
};

class IsometryGroup;
using GroupPtr = std::shared_ptr<const IsometryGroup>;

/// A finitely generated abelian group of orientation-preserving isometries.
class IsometryGroup {
 public:
  /// Validates the generator list and returns the group.
  /// Throws InvalidGroup on orientation-reversing generators, a Cyclic(n)
  /// generator whose n-th power is not the identity, or an unsupported motion.
  static GroupPtr make(const ManifoldModel& manifold, GroupLaw law, int order,
                       std::vector<Generator> generators);
  /// The trivial group (FreeAbelian of rank 0).
  static GroupPtr trivial(const ManifoldModel& manifold);

  const ManifoldModel& manifold() const { return manifold_; }
  GroupLaw law() const { return law_; }
  int order() const { return order_; }
  int rank() const { return static_cast<int>(generators_.size()); }
  const std::vector<Generator>& generators() const { return generators_; }
  std::uint64_t id() const { return id_; }

  GroupElement identity() const;
  GroupElement generator(int i) const;
  GroupElement element(std::vector<long long> exponents) const;
  GroupElement compose(const GroupElement& g, const GroupElement& h) const;
  GroupElement inverse(const GroupElement& g) const;
  long long word_length(const GroupElement& g) const;
  bool is_identity(const GroupElement& g) const;
  /// All elements of word length <= radius, ordered by (length, exponents).
  std::vector<GroupElement> ball(long long radius) const;

  RigidMotion motion(const GroupElement& g) const;
  Point act_point(const GroupElement& g, const Point& x) const;
  /// Applies the base action and ((dg)^*)^{-1} to the covector (coordinate components).
  std::pair<Point, Point> act_cosphere(const GroupElement& g, const Point& x, const Point& xi) const;
  /// Riemannian distance on M.
  double distance(const Point& x, const Point& y) const;

  std::vector<FixedStratum> fixed_strata(const GroupElement& g) const;
  /// dist(x, fix(g)), equal to 1 when fix(g) is empty.
  double distance_to_fixed(const GroupElement& g, const Point& x) const;

  /// The single rotation number of a rank-1 group whose generator moves exactly one angle.
  std::optional<RotationNumber> single_rotation() const;

 private:
  IsometryGroup() = default;
  void check_same(const GroupElement& g) const;

  ManifoldModel manifold_;
  GroupLaw law_ = GroupLaw::FreeAbelian;
  int order_ = 0;
  std::vector<Generator> generators_;
  std::uint64_t id_ = 0;
};

struct GrowthEstimate {
  double exponent = 0.0;
  /// Ball counts for radii 0..k_max.
  std::vector<long long> ball_counts;
};

/// Least-squares slope of log(ball count) against log k over k in [2, k_max].
GrowthEstimate growth_check(const IsometryGroup& group, int k_max);

struct EnvelopePoint {
  long long word_length = 0;
  double ratio = 0.0;
  GroupElement witness;
};

struct DiophantineFit {
  bool violation = false;
  int exponent = 0;        ///< smallest passing N
  double constant = 0.0;   ///< C for that N
  int max_tested_power = 0;
  std::vector<EnvelopePoint> envelope;
  std::string method;
};

/// Empirical check of dist(g x, x) >= C |g|^{-N} dist(x, fix g).
///
/// The lower envelope of the ratio over |g| <= g_range is fitted against
/// |g|^{-N} for N = 0..max_power; N passes when extending the range from
/// sqrt(g_range) to g_range shrinks the best constant by less than a factor 4.
DiophantineFit diophantine_check(const IsometryGroup& group, long long g_range, int sample_count,
                                 int max_power = 3);

}  // namespace shiftindex
