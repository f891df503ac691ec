#include "shiftindex/group_action.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "shiftindex/errors.hpp"

namespace shiftindex {

namespace {

using boost::multiprecision::cpp_int;

std::atomic<std::uint64_t> next_group_id{1};

Rational frac_part(const Rational& r) {
  cpp_int num = boost::multiprecision::numerator(r);
  const cpp_int den = boost::multiprecision::denominator(r);
  num %= den;
  if (num < 0) num += den;
  Rational out = num;
  out /= den;
  return out;
}

double frac_double(double t) {
  double r = t - std::floor(t);
  return r >= 1.0 ? 0.0 : r;
}

// Appends the convergent denominators of n/d (n, d > 0) not exceeding max_q.
void convergents_of(cpp_int n, cpp_int d, long long max_q, std::vector<long long>& out) {
  cpp_int q_prev = 0, q = 1;
  out.push_back(1);
  // the integer part contributes q_0 = 1; drop it before expanding
  n %= d;
  while (n != 0) {
    std::swap(n, d);
    const cpp_int a = n / d;
    n -= a * d;
    const cpp_int q_next = a * q + q_prev;
    if (q_next > max_q) break;
    q_prev = q;
    q = q_next;
    if (out.back() != static_cast<long long>(q)) out.push_back(static_cast<long long>(q));
  }
}

}  // namespace

RotationNumber RotationNumber::from_double(double turns) {
  RotationNumber r;
  r.turns_ = turns;
  return r;
}

RotationNumber RotationNumber::exact(const Rational& turns) {
  RotationNumber r;
  r.exact_ = turns;
  r.turns_ = frac_part(turns).convert_to<double>();
  return r;
}

RotationNumber RotationNumber::rational(long long p, long long q) {
  if (q == 0) throw InvalidGroup("rotation number with zero denominator");
  Rational r = p;
  r /= q;
  return exact(r);
}

RotationNumber RotationNumber::golden() { return from_double((std::sqrt(5.0) - 1.0) / 2.0); }

RotationNumber RotationNumber::liouville(int terms) {
  if (terms < 1 || terms > 7) throw InvalidGroup("liouville terms must be in [1, 7]");
  Rational sum = 0;
  long long fact = 1;
  for (int k = 1; k <= terms; ++k) {
    fact *= k;
    cpp_int den = 1;
    den <<= static_cast<unsigned>(fact);
    Rational term = 1;
    term /= den;
    sum += term;
  }
  return exact(sum);
}

bool RotationNumber::is_zero() const {
  if (exact_) return frac_part(*exact_) == 0;
  return frac_distance(1) < 1e-14;
}

double RotationNumber::frac_distance(long long m) const {
  if (exact_) {
    const Rational f = frac_part(*exact_ * m);
    const Rational g = 1 - f;
    return (f < g ? f : g).convert_to<double>();
  }
  const double f = frac_double(static_cast<double>(m) * turns_);
  return std::min(f, 1.0 - f);
}

std::vector<long long> RotationNumber::convergent_denominators(long long max_q) const {
  std::vector<long long> out;
  if (max_q < 1) return out;
  Rational value;
  if (exact_) {
    value = frac_part(*exact_);
  } else {
    max_q = std::min<long long>(max_q, 10'000'000);
    value = frac_part(Rational(turns_));
  }
  const cpp_int n = boost::multiprecision::numerator(value);
  const cpp_int d = boost::multiprecision::denominator(value);
  if (n == 0) {
    out.push_back(1);
    return out;
  }
  convergents_of(n, d, max_q, out);
  return out;
}

RotationNumber RotationNumber::scaled(long long m) const {
  if (exact_) return exact(*exact_ * m);
  return from_double(turns_ * static_cast<double>(m));
}

RotationNumber RotationNumber::plus(const RotationNumber& other) const {
  if (exact_ && other.exact_) return exact(*exact_ + *other.exact_);
  return from_double(turns_ + other.turns_);
}

Generator Generator::circle_rotation(RotationNumber alpha) {
  Generator g;
  g.translation = {alpha};
  return g;
}

Generator Generator::torus_translation(RotationNumber a, RotationNumber b) {
  Generator g;
  g.translation = {a, b};
  return g;
}

Generator Generator::sphere_rotation_only(RotationNumber angle) {
  Generator g;
  g.translation = {RotationNumber::rational(0, 1)};
  g.sphere_rotation = angle;
  return g;
}

std::string GroupElement::to_string() const {
  if (exponents.empty()) return "e";
  std::string s = "(";
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(exponents[i]);
  }
  return s + ")";
}

namespace {

std::size_t flat_axes(const ManifoldModel& m) {
  switch (m.kind) {
    case ManifoldKind::Circle: return 1;
    case ManifoldKind::Torus2: return 2;
    case ManifoldKind::SphereCrossCircle: return 1;
  }
  return 0;
}

struct RawMotion {
  int sign = 1;
  std::vector<RotationNumber> shift;
  RotationNumber sphere;
};

RawMotion raw_motion(const ManifoldModel& m, const std::vector<Generator>& gens,
                     const std::vector<long long>& exps) {
  RawMotion out;
  out.shift.assign(flat_axes(m), RotationNumber::rational(0, 1));
  out.sphere = RotationNumber::rational(0, 1);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const long long e = exps[i];
    if (e == 0) continue;
    const Generator& g = gens[i];
    if (g.flip) {
      // x -> -x + t is an involution, so only the parity of e matters
      if (e % 2 != 0) {
        out.sign = -out.sign;
        for (std::size_t a = 0; a < out.shift.size(); ++a) out.shift[a] = g.translation[a];
      }
      continue;
    }
    for (std::size_t a = 0; a < out.shift.size(); ++a) {
      out.shift[a] = out.shift[a].plus(g.translation[a].scaled(e));
    }
    out.sphere = out.sphere.plus(g.sphere_rotation.scaled(e));
  }
  return out;
}

bool raw_trivial(const RawMotion& r) {
  if (r.sign != 1) return false;
  for (const auto& s : r.shift) {
    if (!s.is_zero()) return false;
  }
  return r.sphere.is_zero();
}

double torus_distance(const Point& x, const Point& y) {
  const double a = circle_distance(x[0], y[0]);
  const double b = circle_distance(x[1], y[1]);
  return std::hypot(a, b);
}

double sphere_arc(double p1, double a1, double p2, double a2) {
  const double u[3] = {std::sin(p1) * std::cos(a1), std::sin(p1) * std::sin(a1), std::cos(p1)};
  const double v[3] = {std::sin(p2) * std::cos(a2), std::sin(p2) * std::sin(a2), std::cos(p2)};
  const double cx = u[1] * v[2] - u[2] * v[1];
  const double cy = u[2] * v[0] - u[0] * v[2];
  const double cz = u[0] * v[1] - u[1] * v[0];
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

}  // namespace

GroupPtr IsometryGroup::make(const ManifoldModel& manifold, GroupLaw law, int order,
                             std::vector<Generator> generators) {
  const std::size_t axes = flat_axes(manifold);
  for (auto& g : generators) {
    if (g.translation.empty()) g.translation.assign(axes, RotationNumber::rational(0, 1));
    if (g.translation.size() != axes) {
      throw InvalidGroup("generator has " + std::to_string(g.translation.size()) +
                         " translation components, expected " + std::to_string(axes));
    }
    if (manifold.kind != ManifoldKind::SphereCrossCircle && !g.sphere_rotation.is_zero()) {
      throw InvalidGroup("sphere rotation on a flat manifold");
    }
    if (g.flip) {
      if (manifold.kind != ManifoldKind::Torus2) {
        throw InvalidGroup("reflection generator reverses orientation on " +
                           std::string(manifold.name()));
      }
      if (law != GroupLaw::Cyclic || order != 2 || generators.size() != 1) {
        throw InvalidGroup("the point reflection of the torus needs Cyclic(2)");
      }
    }
  }
  if (law == GroupLaw::Cyclic) {
    if (order < 1) throw InvalidGroup("Cyclic order must be >= 1");
    if (generators.size() != 1) throw InvalidGroup("Cyclic groups take exactly one generator");
    const RawMotion r = raw_motion(manifold, generators, {order});
    if (!raw_trivial(r)) {
      throw InvalidGroup("generator does not satisfy g^" + std::to_string(order) + " = e");
    }
  } else {
    order = 0;
  }
  auto group = std::shared_ptr<IsometryGroup>(new IsometryGroup());
  group->manifold_ = manifold;
  group->law_ = law;
  group->order_ = order;
  group->generators_ = std::move(generators);
  group->id_ = next_group_id.fetch_add(1);
  return group;
}

GroupPtr IsometryGroup::trivial(const ManifoldModel& manifold) {
  return make(manifold, GroupLaw::FreeAbelian, 0, {});
}

void IsometryGroup::check_same(const GroupElement& g) const {
  if (g.group_id != id_) {
    throw GroupMismatch("element " + g.to_string() + " belongs to a different group");
  }
}

GroupElement IsometryGroup::identity() const {
  return GroupElement{id_, std::vector<long long>(generators_.size(), 0)};
}

GroupElement IsometryGroup::generator(int i) const {
  if (i < 0 || i >= rank()) throw GroupMismatch("generator index out of range");
  auto e = identity();
  e.exponents[i] = 1;
  return element(e.exponents);
}

GroupElement IsometryGroup::element(std::vector<long long> exponents) const {
  if (exponents.size() != generators_.size()) {
    throw GroupMismatch("expected " + std::to_string(generators_.size()) + " exponents");
  }
  if (law_ == GroupLaw::Cyclic) {
    for (auto& e : exponents) {
      e %= order_;
      if (e < 0) e += order_;
    }
  }
  return GroupElement{id_, std::move(exponents)};
}

GroupElement IsometryGroup::compose(const GroupElement& g, const GroupElement& h) const {
  check_same(g);
  check_same(h);
  std::vector<long long> e(g.exponents.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = g.exponents[i] + h.exponents[i];
  return element(std::move(e));
}

GroupElement IsometryGroup::inverse(const GroupElement& g) const {
  check_same(g);
  std::vector<long long> e(g.exponents.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = -g.exponents[i];
  return element(std::move(e));
}

long long IsometryGroup::word_length(const GroupElement& g) const {
  check_same(g);
  long long len = 0;
  for (long long e : g.exponents) {
    if (law_ == GroupLaw::Cyclic) {
      len += std::min(e, order_ - e);
    } else {
      len += e < 0 ? -e : e;
    }
  }
  return len;
}

bool IsometryGroup::is_identity(const GroupElement& g) const {
  check_same(g);
  return std::all_of(g.exponents.begin(), g.exponents.end(), [](long long e) { return e == 0; });
}

std::vector<GroupElement> IsometryGroup::ball(long long radius) const {
  std::vector<GroupElement> out;
  if (radius < 0) return out;
  if (law_ == GroupLaw::Cyclic) {
    for (long long r = 0; r < order_; ++r) {
      auto g = element({r});
      if (word_length(g) <= radius) out.push_back(g);
    }
  } else {
    std::vector<long long> e(generators_.size(), 0);
    auto rec = [&](auto&& self, std::size_t i, long long budget) -> void {
      if (i == e.size()) {
        out.push_back(GroupElement{id_, e});
        return;
      }
      for (long long v = -budget; v <= budget; ++v) {
        e[i] = v;
        self(self, i + 1, budget - (v < 0 ? -v : v));
      }
      e[i] = 0;
    };
    rec(rec, 0, radius);
  }
  std::sort(out.begin(), out.end(), [&](const GroupElement& a, const GroupElement& b) {
    const long long la = word_length(a), lb = word_length(b);
    return la != lb ? la < lb : a.exponents < b.exponents;
  });
  return out;
}

RigidMotion IsometryGroup::motion(const GroupElement& g) const {
  check_same(g);
  const RawMotion r = raw_motion(manifold_, generators_, g.exponents);
  RigidMotion m;
  m.flat_sign = r.sign;
  for (std::size_t a = 0; a < r.shift.size() && a < 2; ++a) {
    m.flat_shift[a] = wrap_angle(kTwoPi * r.shift[a].turns());
  }
  m.sphere_angle = wrap_angle(kTwoPi * r.sphere.turns());
  m.trivial = raw_trivial(r);
  if (m.trivial) {
    m.flat_shift = {0.0, 0.0};
    m.sphere_angle = 0.0;
  }
  return m;
}

namespace {

Point apply_motion(const ManifoldModel& manifold, const RigidMotion& m, const Point& x) {
  Point y = x;
  switch (manifold.kind) {
    case ManifoldKind::Circle:
      y[0] = wrap_angle(m.flat_sign * x[0] + m.flat_shift[0]);
      break;
    case ManifoldKind::Torus2:
      y[0] = wrap_angle(m.flat_sign * x[0] + m.flat_shift[0]);
      y[1] = wrap_angle(m.flat_sign * x[1] + m.flat_shift[1]);
      break;
    case ManifoldKind::SphereCrossCircle:
      y[1] = wrap_angle(x[1] + m.sphere_angle);
      y[2] = wrap_angle(x[2] + m.flat_shift[0]);
      break;
  }
  return y;
}

}  // namespace

Point IsometryGroup::act_point(const GroupElement& g, const Point& x) const {
  return apply_motion(manifold_, motion(g), x);
}

std::pair<Point, Point> IsometryGroup::act_cosphere(const GroupElement& g, const Point& x,
                                                    const Point& xi) const {
  const RigidMotion m = motion(g);
  Point eta = xi;
  // the linear parts are +-I on the flat factor and a coordinate shift on the sphere
  if (manifold_.kind != ManifoldKind::SphereCrossCircle) {
    for (int a = 0; a < manifold_.dim; ++a) eta[a] = m.flat_sign * xi[a];
  }
  return {act_point(g, x), eta};
}

double IsometryGroup::distance(const Point& x, const Point& y) const {
  switch (manifold_.kind) {
    case ManifoldKind::Circle: return circle_distance(x[0], y[0]);
    case ManifoldKind::Torus2: return torus_distance(x, y);
    case ManifoldKind::SphereCrossCircle:
      return std::hypot(sphere_arc(x[0], x[1], y[0], y[1]), circle_distance(x[2], y[2]));
  }
  return 0.0;
}

std::vector<FixedStratum> IsometryGroup::fixed_strata(const GroupElement& g) const {
  const RigidMotion m = motion(g);
  FixedStratum base;
  base.element = g;
  if (m.trivial) {
    base.kind = StratumKind::WholeManifold;
    base.dim = manifold_.dim;
    return {base};
  }
  base.kind = StratumKind::Empty;
  base.dim = -1;
  switch (manifold_.kind) {
    case ManifoldKind::Circle:
      return {base};
    case ManifoldKind::Torus2: {
      if (m.flat_sign > 0) return {base};
      // 2x = t (mod 2pi) on each axis
      std::vector<FixedStratum> out;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          FixedStratum s = base;
          s.kind = StratumKind::PointSet;
          s.dim = 0;
          s.normal_angles = {kPi};
          s.normal_rank = 2;
          s.location = {wrap_angle(m.flat_shift[0] / 2 + i * kPi),
                        wrap_angle(m.flat_shift[1] / 2 + j * kPi), 0.0};
          s.component = 2 * i + j;
          out.push_back(s);
        }
      }
      return out;
    }
    case ManifoldKind::SphereCrossCircle: {
      if (m.flat_shift[0] != 0.0) return {base};
      std::vector<FixedStratum> out;
      for (int pole = 0; pole < 2; ++pole) {
        FixedStratum s = base;
        s.kind = StratumKind::SubCircle;
        s.dim = 1;
        s.normal_rank = 2;
        // seen from the outward normal the south pole turns the other way
        s.normal_angles = {pole == 0 ? m.sphere_angle : wrap_angle(-m.sphere_angle)};
        s.location = {pole == 0 ? 0.0 : kPi, 0.0, 0.0};
        s.component = pole;
        out.push_back(s);
      }
      return out;
    }
  }
  return {base};
}

namespace {

double distance_to_strata(const IsometryGroup& group, const std::vector<FixedStratum>& strata, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : strata) {
    switch (s.kind) {
      case StratumKind::WholeManifold: return 0.0;
      case StratumKind::Empty: return 1.0;
      case StratumKind::PointSet: best = std::min(best, group.distance(x, s.location)); break;
      case StratumKind::SubCircle: best = std::min(best, s.component == 0 ? x[0] : kPi - x[0]); break;
    }
  }
  return best;
}

}  // namespace

double IsometryGroup::distance_to_fixed(const GroupElement& g, const Point& x) const {
  return distance_to_strata(*this, fixed_strata(g), x);
}

std::optional<RotationNumber> IsometryGroup::single_rotation() const {
  if (law_ != GroupLaw::FreeAbelian || generators_.size() != 1) return std::nullopt;
  const Generator& g = generators_[0];
  if (g.flip) return std::nullopt;
  std::vector<RotationNumber> moving;
  for (const auto& t : g.translation) {
    if (!t.is_zero()) moving.push_back(t);
  }
  if (!g.sphere_rotation.is_zero()) moving.push_back(g.sphere_rotation);
  if (moving.size() != 1) return std::nullopt;
  return moving[0];
}

GrowthEstimate growth_check(const IsometryGroup& group, int k_max) {
  if (k_max < 4) throw InvalidGroup("growth_check needs k_max >= 4");
  GrowthEstimate est;
  const int r = group.rank();
  for (long long k = 0; k <= k_max; ++k) {
    long long count = 0;
    if (group.law() == GroupLaw::Cyclic) {
      count = std::min<long long>(group.order(), 2 * k + 1);
    } else {
      // lattice points of the l1 ball: sum_i 2^i C(r, i) C(k, i)
      double binom_r = 1.0, binom_k = 1.0, total = 0.0;
      for (int i = 0; i <= r && i <= k; ++i) {
        if (i > 0) {
          binom_r *= static_cast<double>(r - i + 1) / i;
          binom_k *= static_cast<double>(k - i + 1) / i;
        }
        total += std::ldexp(binom_r * binom_k, i);
      }
      count = std::llround(total);
    }
    est.ball_counts.push_back(count);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = 2; k <= k_max; ++k) {
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(static_cast<double>(est.ball_counts[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  est.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return est;
}

namespace {

std::vector<Point> sample_points(const ManifoldModel& m, int count) {
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    Point p{};
    switch (m.kind) {
      case ManifoldKind::Circle: p[0] = kTwoPi * u(rng); break;
      case ManifoldKind::Torus2:
        p[0] = kTwoPi * u(rng);
        p[1] = kTwoPi * u(rng);
        break;
      case ManifoldKind::SphereCrossCircle:
        p[0] = std::acos(1.0 - 2.0 * u(rng));
        p[1] = kTwoPi * u(rng);
        p[2] = kTwoPi * u(rng);
        break;
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

DiophantineFit diophantine_check(const IsometryGroup& group, long long g_range, int sample_count,
                                 int max_power) {
  if (g_range < 2) throw InvalidGroup("g_range must be >= 2");
  if (sample_count < 16) throw InvalidGroup("sample_count must be >= 16");
  DiophantineFit fit;
  fit.max_tested_power = max_power;

  std::vector<GroupElement> candidates;
  if (group.law() == GroupLaw::Cyclic) {
    fit.method = "cyclic";
    for (const auto& g : group.ball(g_range)) candidates.push_back(g);
  } else if (auto alpha = group.single_rotation()) {
    // record minima of |m alpha| occur at convergent denominators
    fit.method = "continued-fraction";
    std::vector<long long> ms;
    for (long long m = 1; m <= std::min<long long>(g_range, 4096); ++m) ms.push_back(m);
    for (long long q : alpha->convergent_denominators(g_range)) ms.push_back(q);
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    for (long long m : ms) candidates.push_back(group.element({m}));
  } else {
    fit.method = "ball";
    long long radius = 0;
    while (radius < g_range && group.ball(radius + 1).size() <= 200000) ++radius;
    candidates = group.ball(radius);
  }

  const auto points = sample_points(group.manifold(), sample_count);
  std::map<long long, EnvelopePoint> per_length;
  for (const auto& g : candidates) {
    const RigidMotion m = group.motion(g);
    if (m.trivial) continue;
    const auto strata = group.fixed_strata(g);
    double ratio = std::numeric_limits<double>::infinity();
    for (const auto& x : points) {
      const double dfix = distance_to_strata(group, strata, x);
      if (dfix < 1e-12) continue;
      ratio = std::min(ratio, group.distance(apply_motion(group.manifold(), m, x), x) / dfix);
    }
    if (!std::isfinite(ratio)) continue;
    const long long len = group.word_length(g);
    auto it = per_length.find(len);
    if (it == per_length.end() || ratio < it->second.ratio) per_length[len] = {len, ratio, g};
  }

  // lower envelope on a log-spaced subsample of word lengths
  std::map<long long, EnvelopePoint> bins;
  for (const auto& [len, pt] : per_length) {
    const long long bin = static_cast<long long>(std::floor(4.0 * std::log2(static_cast<double>(len))));
    auto it = bins.find(bin);
    if (it == bins.end() || pt.ratio < it->second.ratio) bins[bin] = pt;
  }
  for (const auto& [bin, pt] : bins) fit.envelope.push_back(pt);
  if (fit.envelope.empty()) {
    fit.constant = std::numeric_limits<double>::infinity();
    return fit;
  }

  const double head = std::max(1.0, std::floor(std::sqrt(static_cast<double>(g_range))));
  for (int n = 0; n <= max_power; ++n) {
    double c_all = std::numeric_limits<double>::infinity();
    double c_head = std::numeric_limits<double>::infinity();
    for (const auto& pt : fit.envelope) {
      const double c = pt.ratio * std::pow(static_cast<double>(pt.word_length), n);
      c_all = std::min(c_all, c);
      if (pt.word_length <= head) c_head = std::min(c_head, c);
    }
    if (!std::isfinite(c_head)) {
      c_head = fit.envelope.front().ratio * std::pow(static_cast<double>(fit.envelope.front().word_length), n);
    }
    if (c_all >= 0.25 * c_head) {
      fit.exponent = n;
      fit.constant = c_all;
      return fit;
    }
  }
  fit.violation = true;
  fit.exponent = max_power + 1;
  fit.constant = 0.0;
  return fit;
}

}  // namespace shiftindex
