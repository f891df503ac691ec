#include "shiftindex/symbol_algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include "shiftindex/detail/linalg.hpp"
#include "shiftindex/errors.hpp"

namespace shiftindex {

namespace {

// Sign of dx_A ^ dx_B against dx_{A|B}, zero when the monomials overlap.
int wedge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int swaps = 0;
  for (unsigned j = 0; j < 32; ++j) {
    if ((b >> j) & 1u) swaps += std::popcount(a >> (j + 1));
  }
  return swaps % 2 ? -1 : 1;
}

Eigen::MatrixXcd block(const CrossedSymbol::Data& d, std::size_t node, int m) {
  Eigen::MatrixXcd out(m, m);
  const std::size_t base = node * m * m;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) out(r, c) = d[base + r * m + c];
  }
  return out;
}

double block_norm(const CrossedSymbol::Data& d, std::size_t node, int m) {
  if (m == 1) return std::abs(d[node]);
  return detail::singular_values(block(d, node, m))(0);
}

}  // namespace

CrossedSymbol::CrossedSymbol(GroupPtr group, GridPtr grid, int rank)
    : group_(std::move(group)), grid_(std::move(grid)), rank_(rank) {
  if (!group_ || !grid_) throw AlgebraMismatch("symbol needs a group and a grid");
  if (group_->manifold() != grid_->manifold) throw AlgebraMismatch("group and grid live on different manifolds");
  if (rank_ < 1) throw AlgebraMismatch("matrix size must be >= 1");
  decay_ = std::numeric_limits<double>::quiet_NaN();
}

CrossedSymbol CrossedSymbol::identity(GroupPtr group, GridPtr grid, int rank) {
  const auto e = group->identity();
  return delta_constant(std::move(group), std::move(grid), e, Eigen::MatrixXcd::Identity(rank, rank));
}

CrossedSymbol CrossedSymbol::delta(GroupPtr group, GridPtr grid, const GroupElement& g,
                                   const std::function<Eigen::MatrixXcd(const GridNode&)>& f) {
  const int rank = static_cast<int>(f(grid->nodes.front()).rows());
  CrossedSymbol s(std::move(group), std::move(grid), rank);
  for (std::size_t i = 0; i < s.grid_->size(); ++i) {
    const Eigen::MatrixXcd v = f(s.grid_->nodes[i]);
    if (!v.allFinite()) throw AlgebraMismatch("non-finite symbol value");
    s.set_value(g, 0, i, v);
  }
  s.prune(0.0);
  return s;
}

CrossedSymbol CrossedSymbol::delta_constant(GroupPtr group, GridPtr grid, const GroupElement& g,
                                            const Eigen::MatrixXcd& c) {
  return delta(std::move(group), std::move(grid), g, [&](const GridNode&) { return c; });
}

CrossedSymbol CrossedSymbol::delta_scalar(GroupPtr group, GridPtr grid, const GroupElement& g,
                                          const std::function<cplx(const GridNode&)>& f) {
  return delta(std::move(group), std::move(grid), g, [&](const GridNode& n) {
    Eigen::MatrixXcd v(1, 1);
    v(0, 0) = f(n);
    return v;
  });
}

CrossedSymbol::Data& CrossedSymbol::at(const GroupElement& g, unsigned mask) {
  if (g.group_id != group_->id()) throw GroupMismatch("support element from another group");
  auto it = terms_.find({g, mask});
  if (it == terms_.end()) {
    it = terms_.emplace(SymbolKey{g, mask}, Data(grid_->size() * rank_ * rank_, cplx{})).first;
  }
  return it->second;
}

const CrossedSymbol::Data* CrossedSymbol::find(const GroupElement& g, unsigned mask) const {
  auto it = terms_.find({g, mask});
  return it == terms_.end() ? nullptr : &it->second;
}

Eigen::MatrixXcd CrossedSymbol::value(const GroupElement& g, unsigned mask, std::size_t node) const {
  const Data* d = find(g, mask);
  if (d == nullptr) return Eigen::MatrixXcd::Zero(rank_, rank_);
  return block(*d, node, rank_);
}

void CrossedSymbol::set_value(const GroupElement& g, unsigned mask, std::size_t node,
                              const Eigen::MatrixXcd& v) {
  if (v.rows() != rank_ || v.cols() != rank_) throw AlgebraMismatch("matrix size mismatch");
  Data& d = at(g, mask);
  const std::size_t base = node * rank_ * rank_;
  for (int r = 0; r < rank_; ++r) {
    for (int c = 0; c < rank_; ++c) d[base + r * rank_ + c] = v(r, c);
  }
}

std::vector<GroupElement> CrossedSymbol::support() const {
  std::vector<GroupElement> out;
  for (const auto& [key, d] : terms_) {
    if (out.empty() || out.back() != key.g) out.push_back(key.g);
  }
  return out;
}

long long CrossedSymbol::support_radius() const {
  long long r = 0;
  for (const auto& g : support()) r = std::max(r, group_->word_length(g));
  return r;
}

int CrossedSymbol::max_degree() const {
  int d = 0;
  for (const auto& [key, data] : terms_) d = std::max(d, std::popcount(key.mask));
  return d;
}

double CrossedSymbol::coefficient_norm(const SymbolKey& key) const {
  auto it = terms_.find(key);
  if (it == terms_.end()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < grid_->size(); ++i) s = std::max(s, block_norm(it->second, i, rank_));
  return s;
}

double CrossedSymbol::sup_norm() const {
  double s = 0.0;
  for (const auto& [key, d] : terms_) s = std::max(s, coefficient_norm(key));
  return s;
}

void CrossedSymbol::check_compatible(const CrossedSymbol& other) const {
  if (!group_ || !other.group_ || group_->id() != other.group_->id()) {
    throw AlgebraMismatch("symbols over different groups");
  }
  if (grid_ != other.grid_ && !grid_->same_layout(*other.grid_)) {
    throw AlgebraMismatch("symbols on different grids");
  }
  if (rank_ != other.rank_) throw AlgebraMismatch("symbols of different matrix size");
}

CrossedSymbol CrossedSymbol::operator+(const CrossedSymbol& other) const {
  check_compatible(other);
  CrossedSymbol out = *this;
  for (const auto& [key, d] : other.terms_) {
    Data& t = out.at(key.g, key.mask);
    for (std::size_t i = 0; i < d.size(); ++i) t[i] += d[i];
  }
  out.prune(0.0);
  return out;
}

CrossedSymbol CrossedSymbol::operator-(const CrossedSymbol& other) const {
  return *this + other.scaled(-1.0);
}

CrossedSymbol CrossedSymbol::scaled(cplx s) const {
  CrossedSymbol out = *this;
  for (auto& [key, d] : out.terms_) {
    for (auto& v : d) v *= s;
  }
  out.prune(0.0);
  return out;
}

CrossedSymbol CrossedSymbol::truncated(long long radius) const {
  CrossedSymbol out(group_, grid_, rank_);
  for (const auto& [key, d] : terms_) {
    if (group_->word_length(key.g) <= radius) out.terms_.emplace(key, d);
  }
  out.refresh_decay();
  return out;
}

CrossedSymbol CrossedSymbol::degree_part(int k) const {
  CrossedSymbol out(group_, grid_, rank_);
  for (const auto& [key, d] : terms_) {
    if (std::popcount(key.mask) == k) out.terms_.emplace(key, d);
  }
  out.refresh_decay();
  return out;
}

CrossedSymbol CrossedSymbol::trace() const {
  CrossedSymbol out(group_, grid_, 1);
  const std::size_t n = grid_->size();
  for (const auto& [key, d] : terms_) {
    Data t(n, cplx{});
    for (std::size_t i = 0; i < n; ++i) {
      for (int r = 0; r < rank_; ++r) t[i] += d[i * rank_ * rank_ + r * rank_ + r];
    }
    out.terms_.emplace(key, std::move(t));
  }
  out.prune(0.0);
  return out;
}

SampledForm CrossedSymbol::form(const GroupElement& g, int degree) const {
  if (rank_ != 1) throw AlgebraMismatch("form extraction needs a traced (rank 1) symbol");
  SampledForm f = SampledForm::zero(grid_, degree);
  for (const auto& [key, d] : terms_) {
    if (key.g == g && std::popcount(key.mask) == degree) f.components[key.mask] = d;
  }
  return f;
}

void CrossedSymbol::prune(double eps) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    double s = 0.0;
    for (const auto& v : it->second) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw AlgebraMismatch("non-finite symbol value");
      }
      s = std::max(s, std::abs(v));
    }
    if (s <= eps) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  refresh_decay();
}

void CrossedSymbol::refresh_decay() {
  try {
    decay_ = decay_profile(*this);
  } catch (const InsufficientSupport&) {
    decay_ = std::numeric_limits<double>::quiet_NaN();
  }
}

detail::LatticeMap carrier_map(const IsometryGroup& group, const Grid& grid, const GroupElement& g) {
  const RigidMotion m = group.motion(g);
  detail::LatticeMap map;
  if (m.trivial) return map;
  if (!grid.periodic) {
    throw UnsupportedGeometry("non-trivial action on a non-periodic carrier");
  }
  switch (grid.kind) {
    case CarrierKind::Base:
    case CarrierKind::Cosphere:
      for (int a = 0; a < grid.manifold.dim; ++a) {
        map.sign[a] = m.flat_sign;
        map.shift[a] = m.flat_shift[a];
      }
      if (grid.manifold.kind == ManifoldKind::Torus2 && grid.kind == CarrierKind::Cosphere &&
          m.flat_sign < 0) {
        map.shift[2] = kPi;  // xi -> -xi turns the fiber angle by pi
      }
      break;
    case CarrierKind::StratumCosphere:
      if (m.flat_sign < 0) throw UnsupportedGeometry("reflections on the polar stratum");
      map.shift[0] = m.flat_shift[0];
      break;
  }
  return map;
}

CrossedSymbol::Data pull_back(const CrossedSymbol& a, const CrossedSymbol::Data& data, unsigned mask,
                              const GroupElement& k) {
  const detail::LatticeMap map = carrier_map(*a.group(), *a.grid(), k);
  if (map.is_identity()) return data;
  const int mm = a.rank() * a.rank();
  const std::size_t n = a.grid()->size();
  CrossedSymbol::Data out(data.size());
  std::vector<cplx> entry(n);
  const double sign = map.form_sign(mask);
  for (int e = 0; e < mm; ++e) {
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      entry[i] = data[i * mm + e];
      if (entry[i] != cplx{}) zero = false;
    }
    if (zero) {
      for (std::size_t i = 0; i < n; ++i) out[i * mm + e] = cplx{};
      continue;
    }
    const auto moved = detail::resample(*a.grid(), entry, map);
    for (std::size_t i = 0; i < n; ++i) out[i * mm + e] = sign * moved[i];
  }
  return out;
}

CrossedSymbol convolve(const CrossedSymbol& a, const CrossedSymbol& b) {
  a.check_compatible(b);
  const IsometryGroup& group = *a.group();
  const int m = a.rank();
  const int mm = m * m;
  const std::size_t n = a.grid()->size();
  CrossedSymbol out(a.group(), a.grid(), m);
  // group the right factor by k so each a(h) is resampled once per k
  std::map<GroupElement, std::vector<std::pair<unsigned, const CrossedSymbol::Data*>>> by_k;
  for (const auto& [key, d] : b.terms()) by_k[key.g].emplace_back(key.mask, &d);
  for (const auto& [k, right] : by_k) {
    for (const auto& [akey, adata] : a.terms()) {
      const CrossedSymbol::Data moved = pull_back(a, adata, akey.mask, k);
      const GroupElement g = group.compose(akey.g, k);
      for (const auto& [bmask, bdata] : right) {
        const int s = wedge_sign(akey.mask, bmask);
        if (s == 0) continue;
        CrossedSymbol::Data& t = out.at(g, akey.mask | bmask);
        if (m == 1) {
          for (std::size_t i = 0; i < n; ++i) t[i] += static_cast<double>(s) * moved[i] * (*bdata)[i];
          continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t base = i * mm;
          for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
              cplx acc{};
              for (int q = 0; q < m; ++q) acc += moved[base + r * m + q] * (*bdata)[base + q * m + c];
              t[base + r * m + c] += static_cast<double>(s) * acc;
            }
          }
        }
      }
    }
  }
  out.prune(1e-14);
  return out;
}

CrossedSymbol differential(const CrossedSymbol& a) {
  const Grid& grid = *a.grid();
  if (!grid.periodic) throw UnsupportedGeometry("differential needs a periodic carrier");
  for (const auto& [key, d] : a.terms()) {
    if (std::popcount(key.mask) >= grid.dim) throw TopDegree("input already has top degree");
  }
  const int mm = a.rank() * a.rank();
  const std::size_t n = grid.size();
  CrossedSymbol out(a.group(), a.grid(), a.rank());
  std::vector<cplx> entry(n);
  for (const auto& [key, d] : a.terms()) {
    for (int j = 0; j < grid.dim; ++j) {
      if ((key.mask >> j) & 1u) continue;
      const double sign = std::popcount(key.mask & ((1u << j) - 1u)) % 2 ? -1.0 : 1.0;
      CrossedSymbol::Data& t = out.at(key.g, key.mask | (1u << j));
      for (int e = 0; e < mm; ++e) {
        for (std::size_t i = 0; i < n; ++i) entry[i] = d[i * mm + e];
        const auto deriv = detail::derivative(grid, entry, j);
        for (std::size_t i = 0; i < n; ++i) t[i * mm + e] += sign * deriv[i];
      }
    }
  }
  out.prune(1e-14);
  return out;
}

double symbol_distance(const CrossedSymbol& a, const CrossedSymbol& b) {
  a.check_compatible(b);
  double s = 0.0;
  std::set<SymbolKey> keys;
  for (const auto& [k, d] : a.terms()) keys.insert(k);
  for (const auto& [k, d] : b.terms()) keys.insert(k);
  for (const auto& key : keys) {
    const auto* x = a.find(key.g, key.mask);
    const auto* y = b.find(key.g, key.mask);
    const std::size_t len = x ? x->size() : y->size();
    for (std::size_t i = 0; i < len; ++i) {
      const cplx u = x ? (*x)[i] : cplx{};
      const cplx v = y ? (*y)[i] : cplx{};
      s = std::max(s, std::abs(u - v));
    }
  }
  return s;
}

double decay_profile(const CrossedSymbol& a) {
  const IsometryGroup& group = *a.group();
  std::map<GroupElement, double> norms;
  for (const auto& [key, d] : a.terms()) {
    double s = 0.0;
    for (const auto& v : d) s = std::max(s, std::abs(v));
    auto& slot = norms[key.g];
    slot = std::max(slot, s);
  }
  std::set<long long> lengths;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& [g, s] : norms) {
    if (s <= 0.0) continue;
    const long long len = group.word_length(g);
    lengths.insert(len);
    const double x = std::log1p(static_cast<double>(len));
    const double y = std::log(s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (lengths.size() < 3) {
    throw InsufficientSupport("support spans " + std::to_string(lengths.size()) +
                              " word lengths, need 3");
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

namespace {

double min_singular(const Eigen::MatrixXcd& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  const Eigen::VectorXd s = detail::singular_values(m);
  return s(s.size() - 1);
}

// Smallest singular value of a single coefficient, sampled on a refined lattice.
double pointwise_min_singular(const CrossedSymbol& a, const CrossedSymbol::Data& d) {
  const Grid& grid = *a.grid();
  const int m = a.rank();
  const int mm = m * m;
  if (!grid.periodic) {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) s = std::min(s, min_singular(block(d, i, m)));
    return s;
  }
  int factor = 8;
  while (factor > 1 && grid.lattice_size() * static_cast<std::size_t>(std::pow(factor, grid.dim)) > 65536) {
    factor /= 2;
  }
  const std::size_t n = grid.size();
  double s = std::numeric_limits<double>::infinity();
  std::vector<cplx> entry(n);
  for (int sheet = 0; sheet < grid.sheets; ++sheet) {
    std::vector<std::vector<cplx>> fine(mm);
    for (int e = 0; e < mm; ++e) {
      for (std::size_t i = 0; i < n; ++i) entry[i] = d[i * mm + e];
      fine[e] = detail::refine_sheet(grid, entry, sheet, factor);
    }
    Eigen::MatrixXcd b(m, m);
    for (std::size_t i = 0; i < fine[0].size(); ++i) {
      for (int e = 0; e < mm; ++e) b(e / m, e % m) = fine[e][i];
      s = std::min(s, min_singular(b));
    }
  }
  return s;
}

struct RegularSolve {
  CrossedSymbol inverse;
  double min_singular = std::numeric_limits<double>::infinity();
};

// Right inverse from the regular representation restricted to the ball of radius R.
RegularSolve regular_solve(const CrossedSymbol& a, long long radius, bool build) {
  const IsometryGroup& group = *a.group();
  const int m = a.rank();
  const std::size_t n = a.grid()->size();
  const auto cols = group.ball(radius);
  const auto rows = group.ball(radius + a.support_radius());
  std::map<GroupElement, int> row_index;
  for (std::size_t i = 0; i < rows.size(); ++i) row_index[rows[i]] = static_cast<int>(i);
  // a(h) o dk for every support element h and column k
  std::vector<std::vector<CrossedSymbol::Data>> pulled(cols.size());
  const auto supp = a.support();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (const auto& h : supp) pulled[c].push_back(pull_back(a, *a.find(h, 0), 0, cols[c]));
  }
  RegularSolve out{CrossedSymbol(a.group(), a.grid(), m), std::numeric_limits<double>::infinity()};
  const int e_row = row_index.at(group.identity());
  Eigen::MatrixXcd mat(rows.size() * m, cols.size() * m);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(rows.size() * m, m);
  rhs.block(e_row * m, 0, m, m).setIdentity();
  for (std::size_t x = 0; x < n; ++x) {
    mat.setZero();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (std::size_t j = 0; j < supp.size(); ++j) {
        const int r = row_index.at(group.compose(supp[j], cols[c]));
        mat.block(r * m, c * m, m, m) += block(pulled[c][j], x, m);
      }
    }
    const detail::Svd svd = detail::svd(mat);
    const Eigen::VectorXd& s = svd.singular_values;
    out.min_singular = std::min(out.min_singular, s(s.size() - 1));
    if (!build) continue;
    Eigen::VectorXd inv_s = s;
    for (Eigen::Index i = 0; i < s.size(); ++i) inv_s(i) = s(i) > 0 ? 1.0 / s(i) : 0.0;
    const Eigen::MatrixXcd sol = svd.v * inv_s.asDiagonal() * (svd.u.adjoint() * rhs);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out.inverse.set_value(cols[c], 0, x, sol.block(c * m, 0, m, m));
    }
  }
  if (build) out.inverse.prune(1e-14);
  return out;
}

double identity_residual(const CrossedSymbol& product) {
  const auto one = CrossedSymbol::identity(product.group(), product.grid(), product.rank());
  return symbol_distance(product, one);
}

}  // namespace

CrossedSymbol invert(const CrossedSymbol& a, double tolerance, long long support_radius,
                     InversionInfo* info) {
  if (tolerance <= 0) throw AlgebraMismatch("tolerance must be positive");
  if (a.max_degree() > 0) throw AlgebraMismatch("only degree-0 symbols can be inverted");
  if (a.empty()) throw NotElliptic("zero symbol");
  if (support_radius < a.support_radius()) {
    throw TruncationInsufficient("support radius " + std::to_string(support_radius) +
                                 " is below the symbol's own radius " +
                                 std::to_string(a.support_radius()));
  }
  InversionInfo local;
  InversionInfo& inf = info ? *info : local;
  const IsometryGroup& group = *a.group();
  const int m = a.rank();
  const double scale = a.sup_norm();
  const double floor = 1e-3 * scale;
  const auto supp = a.support();

  // dominant coefficient and the pointwise size of the rest
  std::size_t dom = 0;
  double dom_min = -1.0;
  std::vector<double> norms(supp.size());
  for (std::size_t j = 0; j < supp.size(); ++j) {
    const auto& d = *a.find(supp[j], 0);
    const double s = supp.size() == 1 ? pointwise_min_singular(a, d) : [&] {
      double v = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < a.grid()->size(); ++i) v = std::min(v, min_singular(block(d, i, m)));
      return v;
    }();
    norms[j] = a.coefficient_norm({supp[j], 0});
    if (s > dom_min) {
      dom_min = s;
      dom = j;
    }
  }
  double rest = 0.0;
  for (std::size_t j = 0; j < supp.size(); ++j) {
    if (j != dom) rest += norms[j];
  }
  inf.min_singular = dom_min;

  if (supp.size() == 1 && dom_min < floor) {
    throw NotElliptic("symbol is not pointwise invertible (min singular value " +
                      format_number(dom_min) + ")");
  }

  CrossedSymbol b(a.group(), a.grid(), m);
  if (rest < 0.9 * dom_min) {
    // a = u (1 + w) with u = delta_{g_d} a_d; the series for (1 + w)^{-1} converges
    inf.neumann = true;
    const GroupElement gd = supp[dom];
    const GroupElement gd_inv = group.inverse(gd);
    CrossedSymbol u(a.group(), a.grid(), m);
    u.at(gd, 0) = *a.find(gd, 0);
    CrossedSymbol u_inv(a.group(), a.grid(), m);
    {
      CrossedSymbol raw(a.group(), a.grid(), m);
      for (std::size_t i = 0; i < a.grid()->size(); ++i) {
        raw.set_value(gd_inv, 0, i, block(*a.find(gd, 0), i, m).inverse());
      }
      u_inv.at(gd_inv, 0) = pull_back(raw, *raw.find(gd_inv, 0), 0, gd_inv);
    }
    const long long work_radius = support_radius + group.word_length(gd);
    const CrossedSymbol w = convolve(u_inv, a - u).truncated(work_radius);
    CrossedSymbol term = CrossedSymbol::identity(a.group(), a.grid(), m);
    CrossedSymbol series = term;
    for (int j = 1; j <= 400; ++j) {
      term = convolve(term, w).scaled(-1.0).truncated(work_radius);
      if (term.empty()) break;
      series = series + term;
      if (term.sup_norm() < 0.01 * tolerance) break;
    }
    b = convolve(series, u_inv).truncated(support_radius);
  } else {
    const long long r1 = std::max<long long>(1, support_radius / 4);
    const long long r2 = std::max<long long>(1, support_radius / 2);
    const double s1 = regular_solve(a, r1, false).min_singular;
    const double s2 = regular_solve(a, r2, false).min_singular;
    RegularSolve full = regular_solve(a, support_radius, true);
    inf.singular_trend = {s1, s2, full.min_singular};
    inf.min_singular = full.min_singular;
    const bool closing = support_radius >= 4 && full.min_singular < 0.5 * s1 && s2 < 0.85 * s1;
    if (full.min_singular < floor || closing) {
      throw NotElliptic("regular representation degenerates: min singular values " +
                        format_number(s1) + ", " + format_number(s2) + ", " +
                        format_number(full.min_singular) + " at radii " + std::to_string(r1) +
                        ", " + std::to_string(r2) + ", " + std::to_string(support_radius));
    }
    b = full.inverse.truncated(support_radius);
  }
  inf.residual_right = identity_residual(convolve(a, b));
  inf.residual_left = identity_residual(convolve(b, a));
  if (inf.residual_right >= tolerance || inf.residual_left >= tolerance) {
    throw TruncationInsufficient("inverse residuals " + format_number(inf.residual_right) + ", " +
                                 format_number(inf.residual_left) + " exceed tolerance at radius " +
                                 std::to_string(support_radius));
  }
  return b;
}

CrossedSymbol cs_character(const CrossedSymbol& a, const CrossedSymbol& a_inverse) {
  const int dim = a.grid()->dim;
  const CrossedSymbol theta = convolve(a_inverse, differential(a));
  CrossedSymbol out(a.group(), a.grid(), 1);
  CrossedSymbol power = theta;
  double fact_k = 1.0, fact_odd = 1.0;  // k! and (2k+1)!
  for (int k = 0; 2 * k + 1 <= dim; ++k) {
    if (k > 0) {
      power = convolve(convolve(power, theta), theta);
      fact_k *= k;
      fact_odd *= (2.0 * k) * (2.0 * k + 1.0);
    }
    const cplx c = std::pow(1.0 / cplx(0.0, kTwoPi), k + 1) * (fact_k / fact_odd);
    out = out + power.trace().scaled(c);
  }
  out.prune(1e-14);
  return out;
}

CrossedSymbol cs_character(const CrossedSymbol& a, double tolerance, long long support_radius) {
  if (support_radius < 0) support_radius = std::max<long long>(24, 2 * a.support_radius());
  return cs_character(a, invert(a, tolerance, support_radius));
}

CrossedSymbol symbol_of_spec(const OperatorSpec& spec, GridPtr grid) {
  spec.validate();
  const int dim = spec.manifold().dim;
  CrossedSymbol out(spec.group, grid, spec.rank);
  for (const auto& term : spec.terms) {
    auto& data = out.at(term.g, 0);
    const int mm = spec.rank * spec.rank;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const GridNode& node = grid->nodes[i];
      for (const auto& mono : term.monomials) {
        if (std::abs(mono.multiplier.order() - spec.order) > 1e-12) continue;
        const cplx s = mono.multiplier.principal(node.fiber, dim);
        if (s == cplx{}) continue;
        const Eigen::MatrixXcd f = mono.coefficient(node.base);
        for (int e = 0; e < mm; ++e) data[i * mm + e] += s * f(e / spec.rank, e % spec.rank);
      }
    }
  }
  out.prune(1e-14);
  return out;
}

}  // namespace shiftindex
