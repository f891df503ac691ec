#include "shiftindex/topological_index.hpp"

#include <cmath>
#include <limits>

#include "shiftindex/detail/fourier.hpp"
#include "shiftindex/errors.hpp"

namespace shiftindex {

CrossedSymbol chern_projection(const CrossedSymbol& p, double idempotent_tol) {
  if (p.max_degree() > 0) throw AlgebraMismatch("a projection must have degree 0");
  const double defect = symbol_distance(convolve(p, p), p);
  if (defect >= idempotent_tol) {
    throw NotIdempotent("|p*p - p| = " + format_number(defect) + " exceeds " +
                        format_number(idempotent_tol));
  }
  const int dim = p.grid()->dim;
  const CrossedSymbol dp = differential(p);
  const CrossedSymbol curvature = convolve(convolve(p, dp), dp);
  const cplx c = -1.0 / cplx(0.0, kTwoPi);
  CrossedSymbol sum = p;
  CrossedSymbol term = p;
  for (int j = 1; 2 * j <= dim; ++j) {
    term = convolve(term, curvature).scaled(c / static_cast<double>(j));
    sum = sum + term;
  }
  return sum.trace();
}

std::vector<int> carrier_orientation(const Grid& grid) {
  switch (grid.kind) {
    case CarrierKind::Cosphere:
      if (grid.manifold.kind == ManifoldKind::Circle) return {-1, +1};
      return std::vector<int>(grid.sheets, +1);
    case CarrierKind::Base:
      if (grid.manifold.kind == ManifoldKind::Circle) return {-1};
      return {+1};
    case CarrierKind::StratumCosphere: return {-1, +1, -1, +1};
  }
  return std::vector<int>(grid.sheets, +1);
}

namespace {

enum class Formula { FixedPoint, LocalOdd, DiracEven };

constexpr long long kMaxInverseRadius = 192;

// Integral of weight * orientation * todd * top component over the sheets of one component.
void integrate_top(const CrossedSymbol& ch, const GroupElement& g, const SampledForm& todd,
                   int component, bool all_components, cplx& value, double& mass) {
  const Grid& grid = *ch.grid();
  const unsigned top = (1u << grid.dim) - 1u;
  value = 0.0;
  mass = 0.0;
  const auto* data = ch.find(g, top);
  if (data == nullptr) return;
  const auto orient = carrier_orientation(grid);
  const auto& td = todd.components.at(0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int sheet = grid.nodes[i].sheet;
    if (!all_components && grid.sheet_component[sheet] != component) continue;
    const cplx f = td[i] * (*data)[i];
    value += grid.weights[i] * static_cast<double>(orient[sheet]) * f;
    mass += grid.weights[i] * std::abs(f);
  }
}

void finish_report(IndexReport& rep, const IsometryGroup& group, long long shell_max) {
  rep.shell_sums.assign(shell_max + 1, cplx{});
  rep.shell_masses.assign(shell_max + 1, 0.0);
  for (const auto& c : rep.contributions) {
    rep.shell_sums[c.word_length] += c.value;
    rep.shell_masses[c.word_length] += c.abs_mass;
    rep.total += c.value;
  }
  (void)group;
  // tail envelope max_{j >= k} A_j over k >= 1
  std::vector<double> env(shell_max + 2, 0.0);
  for (long long k = shell_max; k >= 1; --k) env[k] = std::max(env[k + 1], rep.shell_masses[k]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (long long k = 1; k <= shell_max; ++k) {
    if (env[k] <= 0.0) continue;
    const double x = std::log(static_cast<double>(k)), y = std::log(env[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n == 0) {
    rep.decay_exponent = -std::numeric_limits<double>::infinity();
  } else if (n < 3) {
    rep.decay_exponent = std::numeric_limits<double>::quiet_NaN();
  } else {
    rep.decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  rep.converged = !(rep.decay_exponent >= -1.0);
  if (!rep.converged) {
    rep.notes.push_back("shell masses decay slower than |g|^-1 by shell " + std::to_string(shell_max));
  }
  rep.nearest = std::llround(rep.total.real());
  rep.distance_to_integer = std::abs(rep.total - cplx(static_cast<double>(rep.nearest), 0.0));
}

IndexReport evaluate_series(const CrossedSymbol& ch, long long shell_max, Formula formula) {
  const IsometryGroup& group = *ch.group();
  const Grid& grid = *ch.grid();
  IndexReport rep;
  rep.formula = formula == Formula::FixedPoint ? "fixedp" : formula == Formula::LocalOdd ? "local-odd" : "dirac-even";
  int empty = 0, pointlike = 0;
  for (const auto& g : group.ball(shell_max)) {
    const long long len = group.word_length(g);
    for (const auto& s : group.fixed_strata(g)) {
      Contribution c;
      c.g = g;
      c.word_length = len;
      c.kind = s.kind;
      c.component = s.component;
      switch (s.kind) {
        case StratumKind::Empty:
          ++empty;
          c.note = "empty stratum";
          break;
        case StratumKind::PointSet: {
          if (formula == Formula::FixedPoint) {
            ++pointlike;
            c.note = "0-dimensional stratum: S*M_g is empty";
            break;
          }
          const auto* data = ch.find(g, 0);
          if (data != nullptr) {
            const cplx v = detail::evaluate_at(grid, *data, 0, s.location) / pf_sin_denominator(s);
            c.value = v;
            c.abs_mass = std::abs(v);
          }
          c.note = "point evaluation";
          break;
        }
        case StratumKind::WholeManifold: {
          if (grid.kind == CarrierKind::StratumCosphere) {
            c.note = "S*M of the whole manifold is not discretized; skipped";
            rep.notes.push_back("identity term skipped on the polar stratum carrier");
            break;
          }
          const auto forms = characteristic_forms(s, ch.grid());
          const SampledForm& weight = formula == Formula::FixedPoint ? forms.todd : forms.a_hat;
          integrate_top(ch, g, weight, 0, true, c.value, c.abs_mass);
          break;
        }
        case StratumKind::SubCircle: {
          if (grid.kind != CarrierKind::StratumCosphere) {
            c.note = "no carrier for this stratum; skipped";
            break;
          }
          const auto forms = characteristic_forms(s, ch.grid());
          const SampledForm& weight = formula == Formula::FixedPoint ? forms.todd : forms.a_hat;
          const cplx den = formula == Formula::FixedPoint ? as_denominator(s) : pf_sin_denominator(s);
          integrate_top(ch, g, weight, s.component, false, c.value, c.abs_mass);
          c.value /= den;
          c.abs_mass /= std::abs(den);
          break;
        }
      }
      rep.contributions.push_back(std::move(c));
    }
  }
  if (empty > 0) rep.notes.push_back(std::to_string(empty) + " empty strata contribute 0");
  if (pointlike > 0) {
    rep.notes.push_back(std::to_string(pointlike) + " 0-dimensional strata contribute 0 (empty cosphere bundle)");
  }
  finish_report(rep, group, shell_max);
  return rep;
}

// Inverse with a support radius that doubles while truncation is the only obstruction.
CrossedSymbol invert_for(const CrossedSymbol& s, long long shell_max, const FormulaOptions& opt) {
  if (opt.support_radius >= 0) {
    return invert(s, opt.tolerance, std::max(opt.support_radius, s.support_radius()));
  }
  long long radius = std::max({shell_max, 24LL, s.support_radius()});
  for (;;) {
    try {
      return invert(s, opt.tolerance, radius);
    } catch (const TruncationInsufficient&) {
      if (radius >= kMaxInverseRadius) throw;
      radius = std::min(2 * radius, kMaxInverseRadius);
    }
  }
}

}  // namespace

IndexReport evaluate_fixedp(const CrossedSymbol& sigma, long long shell_max, const FormulaOptions& opt) {
  const Grid& grid = *sigma.grid();
  if (grid.kind == CarrierKind::Base) throw UnsupportedGeometry("fixedp integrates over S*M_g");
  const CrossedSymbol inv = invert_for(sigma, shell_max, opt);
  return evaluate_series(cs_character(sigma, inv), shell_max, Formula::FixedPoint);
}

IndexReport evaluate_local_odd(const CrossedSymbol& sigma, long long shell_max, const FormulaOptions& opt) {
  const Grid& grid = *sigma.grid();
  if (grid.kind != CarrierKind::Base || grid.manifold.kind != ManifoldKind::Circle) {
    throw UnsupportedGeometry("the odd formula needs a symbol on the base circle");
  }
  const CrossedSymbol inv = invert_for(sigma, shell_max, opt);
  return evaluate_series(cs_character(sigma, inv), shell_max, Formula::LocalOdd);
}

IndexReport evaluate_dirac_even(const CrossedSymbol& p, long long shell_max, const FormulaOptions& opt) {
  const Grid& grid = *p.grid();
  if (grid.kind != CarrierKind::Base || grid.dim % 2 != 0) {
    throw UnsupportedGeometry("the even formula needs a projection on an even-dimensional base");
  }
  return evaluate_series(chern_projection(p, opt.idempotent_tol), shell_max, Formula::DiracEven);
}

}  // namespace shiftindex
