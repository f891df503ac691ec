#include "shiftindex/geometry.hpp"

#include <bit>
#include <cmath>

#include "shiftindex/errors.hpp"

namespace shiftindex {

ManifoldModel ManifoldModel::circle() { return {ManifoldKind::Circle, 1, MetricKind::UnitFlat, +1}; }
ManifoldModel ManifoldModel::torus2() { return {ManifoldKind::Torus2, 2, MetricKind::UnitFlat, +1}; }
ManifoldModel ManifoldModel::sphere_cross_circle() {
  return {ManifoldKind::SphereCrossCircle, 3, MetricKind::RoundTimesFlat, +1};
}

double ManifoldModel::volume() const {
  switch (kind) {
    case ManifoldKind::Circle: return kTwoPi;
    case ManifoldKind::Torus2: return kTwoPi * kTwoPi;
    case ManifoldKind::SphereCrossCircle: return 4.0 * kPi * kTwoPi;
  }
  return 0.0;
}

double ManifoldModel::cosphere_volume() const {
  switch (kind) {
    case ManifoldKind::Circle: return 2.0 * volume();          // two points per fiber
    case ManifoldKind::Torus2: return kTwoPi * volume();       // unit circle fibers
    case ManifoldKind::SphereCrossCircle: return 4.0 * kPi * volume();  // unit 2-sphere fibers
  }
  return 0.0;
}

std::string_view ManifoldModel::name() const {
  switch (kind) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Torus2: return "torus2";
    case ManifoldKind::SphereCrossCircle: return "sphere_x_circle";
  }
  return "?";
}

std::optional<ManifoldModel> parse_manifold(std::string_view name) {
  if (name == "circle") return ManifoldModel::circle();
  if (name == "torus2") return ManifoldModel::torus2();
  if (name == "sphere_x_circle") return ManifoldModel::sphere_cross_circle();
  return std::nullopt;
}

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double circle_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

std::size_t Grid::lattice_size() const {
  if (!periodic) return nodes.size();
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(resolution);
  return n;
}

double Grid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double Grid::closed_form_volume() const {
  switch (kind) {
    case CarrierKind::Cosphere: return manifold.cosphere_volume();
    case CarrierKind::Base: return manifold.volume();
    case CarrierKind::StratumCosphere: return 4.0 * kTwoPi;
  }
  return 0.0;
}

bool Grid::same_layout(const Grid& other) const {
  return manifold == other.manifold && kind == other.kind && dim == other.dim &&
         resolution == other.resolution && sheets == other.sheets && periodic == other.periodic &&
         nodes.size() == other.nodes.size();
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    nodes[n - 1 - i] = -x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

void require_resolution(int resolution) {
  if (resolution < 4) {
    throw BadResolution("resolution must be >= 4, got " + std::to_string(resolution));
  }
}

std::shared_ptr<Grid> periodic_grid(const ManifoldModel& m, CarrierKind kind, int dim, int resolution,
                                    int sheets) {
  auto g = std::make_shared<Grid>();
  g->manifold = m;
  g->kind = kind;
  g->dim = dim;
  g->resolution = resolution;
  g->sheets = sheets;
  g->periodic = true;
  const std::size_t lattice = g->lattice_size();
  g->nodes.resize(lattice * sheets);
  g->weights.assign(lattice * sheets, std::pow(kTwoPi / resolution, dim));
  g->sheet_fiber_sign.assign(sheets, 0);
  g->sheet_component.assign(sheets, 0);
  return g;
}

// Decodes a lattice index into per-axis integer coordinates (last axis fastest).
std::array<int, 3> lattice_coords(std::size_t idx, int dim, int resolution) {
  std::array<int, 3> c{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    c[a] = static_cast<int>(idx % resolution);
    idx /= resolution;
  }
  return c;
}

}  // namespace

GridPtr build_cosphere_grid(const ManifoldModel& manifold, int resolution) {
  require_resolution(resolution);
  switch (manifold.kind) {
    case ManifoldKind::Circle: {
      auto g = periodic_grid(manifold, CarrierKind::Cosphere, 1, resolution, 2);
      g->sheet_fiber_sign = {+1, -1};
      for (int s = 0; s < 2; ++s) {
        for (int i = 0; i < resolution; ++i) {
          auto& n = g->nodes[g->node_index(s, i)];
          n.base = {g->axis_coordinate(i), 0.0, 0.0};
          n.fiber = {s == 0 ? 1.0 : -1.0, 0.0, 0.0};
          n.sheet = s;
        }
      }
      return g;
    }
    case ManifoldKind::Torus2: {
      // axes (x, y, omega) with unit covector (cos omega, sin omega)
      auto g = periodic_grid(manifold, CarrierKind::Cosphere, 3, resolution, 1);
      for (std::size_t i = 0; i < g->lattice_size(); ++i) {
        const auto c = lattice_coords(i, 3, resolution);
        auto& n = g->nodes[i];
        const double w = g->axis_coordinate(c[2]);
        n.base = {g->axis_coordinate(c[0]), g->axis_coordinate(c[1]), 0.0};
        n.fiber = {std::cos(w), std::sin(w), 0.0};
      }
      return g;
    }
    case ManifoldKind::SphereCrossCircle: {
      auto g = std::make_shared<Grid>();
      g->manifold = manifold;
      g->kind = CarrierKind::Cosphere;
      g->dim = 5;
      g->resolution = resolution;
      g->sheets = 1;
      g->periodic = false;
      g->sheet_fiber_sign = {0};
      g->sheet_component = {0};
      std::vector<double> gx, gw;
      gauss_legendre(resolution, gx, gw);
      const double dphi = kTwoPi / resolution;
      for (int ip = 0; ip < resolution; ++ip) {
        const double polar = std::acos(gx[ip]);
        for (int ia = 0; ia < resolution; ++ia) {
          for (int ic = 0; ic < resolution; ++ic) {
            for (int fp = 0; fp < resolution; ++fp) {
              const double fpol = std::acos(gx[fp]);
              for (int fa = 0; fa < resolution; ++fa) {
                const double faz = fa * dphi;
                const double n1 = std::sin(fpol) * std::cos(faz);
                const double n2 = std::sin(fpol) * std::sin(faz);
                const double n3 = std::cos(fpol);
                GridNode node;
                node.base = {polar, ia * dphi, ic * dphi};
                // coordinate components of an orthonormal-frame unit covector
                node.fiber = {n1, std::sin(polar) * n2, n3};
                g->nodes.push_back(node);
                g->weights.push_back(gw[ip] * dphi * dphi * gw[fp] * dphi);
              }
            }
          }
        }
      }
      return g;
    }
  }
  throw UnsupportedGeometry("unknown manifold");
}

GridPtr build_base_grid(const ManifoldModel& manifold, int resolution) {
  require_resolution(resolution);
  if (manifold.kind == ManifoldKind::SphereCrossCircle) {
    throw UnsupportedGeometry("no periodic base grid for sphere_x_circle");
  }
  auto g = periodic_grid(manifold, CarrierKind::Base, manifold.dim, resolution, 1);
  for (std::size_t i = 0; i < g->lattice_size(); ++i) {
    const auto c = lattice_coords(i, manifold.dim, resolution);
    g->nodes[i].base = {g->axis_coordinate(c[0]), manifold.dim > 1 ? g->axis_coordinate(c[1]) : 0.0,
                        0.0};
  }
  return g;
}

GridPtr build_polar_stratum_grid(int resolution) {
  require_resolution(resolution);
  auto g = periodic_grid(ManifoldModel::sphere_cross_circle(), CarrierKind::StratumCosphere, 1,
                         resolution, 4);
  g->sheet_fiber_sign = {+1, -1, +1, -1};
  g->sheet_component = {0, 0, 1, 1};
  for (int s = 0; s < 4; ++s) {
    const double polar = s < 2 ? 0.0 : kPi;
    for (int i = 0; i < resolution; ++i) {
      auto& n = g->nodes[g->node_index(s, i)];
      n.base = {polar, 0.0, g->axis_coordinate(i)};
      n.fiber = {0.0, 0.0, g->sheet_fiber_sign[s] * 1.0};
      n.sheet = s;
    }
  }
  return g;
}

SampledForm SampledForm::zero(GridPtr grid, int degree) {
  SampledForm f;
  f.degree = degree;
  f.grid = std::move(grid);
  return f;
}

std::vector<cplx>& SampledForm::component(unsigned mask) {
  auto it = components.find(mask);
  if (it == components.end()) {
    it = components.emplace(mask, std::vector<cplx>(grid->size(), cplx{})).first;
  }
  return it->second;
}

const std::vector<cplx>* SampledForm::find(unsigned mask) const {
  auto it = components.find(mask);
  return it == components.end() ? nullptr : &it->second;
}

void SampledForm::validate() const {
  if (!grid) throw DegreeMismatch("form has no carrier grid");
  if (degree < 0 || degree > grid->dim) {
    throw DegreeMismatch("form degree " + std::to_string(degree) + " exceeds carrier dimension " +
                         std::to_string(grid->dim));
  }
  for (const auto& [mask, values] : components) {
    if (std::popcount(mask) != degree) throw DegreeMismatch("basis monomial of wrong degree");
    if (values.size() != grid->size()) throw DegreeMismatch("inconsistent coefficient shape");
  }
}

cplx integrate_form(const SampledForm& form, const Grid& grid, std::span<const int> sheet_orientation) {
  form.validate();
  if (!form.grid->same_layout(grid)) throw UnsupportedGeometry("form carrier does not match grid");
  if (form.degree != grid.dim) {
    throw DegreeMismatch("form degree " + std::to_string(form.degree) + " != carrier dimension " +
                         std::to_string(grid.dim));
  }
  const unsigned top = (1u << grid.dim) - 1u;
  const auto* values = form.find(top);
  if (values == nullptr) return {};
  cplx sum{};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int sheet = grid.nodes[i].sheet;
    const double sign = sheet_orientation.empty() ? 1.0 : sheet_orientation[sheet];
    sum += grid.weights[i] * sign * (*values)[i];
  }
  return sum;
}

}  // namespace shiftindex
