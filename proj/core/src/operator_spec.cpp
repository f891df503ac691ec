#include "shiftindex/operator_spec.hpp"

#include <cmath>

#include "shiftindex/detail/fourier.hpp"
#include "shiftindex/errors.hpp"

namespace shiftindex {

Coefficient Coefficient::constant(cplx c, int rank) { return mode({0, 0, 0}, c, rank); }

Coefficient Coefficient::constant_matrix(const Eigen::MatrixXcd& c) {
  return trig_matrix({{Mode{0, 0, 0}, c}});
}

Coefficient Coefficient::mode(const Mode& k, cplx c, int rank) { return trig({{k, c}}, rank); }

Coefficient Coefficient::trig(const std::vector<std::pair<Mode, cplx>>& modes, int rank) {
  std::vector<std::pair<Mode, Eigen::MatrixXcd>> m;
  for (const auto& [k, c] : modes) {
    m.emplace_back(k, c * Eigen::MatrixXcd::Identity(rank, rank));
  }
  Coefficient out = trig_matrix(std::move(m));
  out.rank_ = rank;
  return out;
}

Coefficient Coefficient::trig_matrix(std::vector<std::pair<Mode, Eigen::MatrixXcd>> modes) {
  Coefficient out;
  if (!modes.empty()) out.rank_ = static_cast<int>(modes.front().second.rows());
  for (const auto& [k, c] : modes) {
    if (c.rows() != out.rank_ || c.cols() != out.rank_) {
      throw UnsupportedTerm("trig coefficient matrices must be square of one size");
    }
    if (!c.allFinite()) throw UnsupportedTerm("non-finite trig coefficient");
  }
  out.modes_ = std::move(modes);
  return out;
}

Coefficient Coefficient::smooth(MatrixFn f, int rank) {
  Coefficient out;
  out.rank_ = rank;
  out.function_ = std::move(f);
  return out;
}

int Coefficient::degree() const {
  if (function_) return -1;
  int d = 0;
  for (const auto& [k, c] : modes_) {
    for (int a = 0; a < 3; ++a) d = std::max(d, std::abs(k[a]));
  }
  return d;
}

Eigen::MatrixXcd Coefficient::operator()(const Point& x) const {
  if (function_) return function_(x);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rank_, rank_);
  for (const auto& [k, c] : modes_) {
    out += std::polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]) * c;
  }
  return out;
}

std::map<Mode, Eigen::MatrixXcd> Coefficient::fourier(int dim, int res) const {
  std::map<Mode, Eigen::MatrixXcd> out;
  if (!function_) {
    for (const auto& [k, c] : modes_) {
      auto it = out.find(k);
      if (it == out.end()) {
        out.emplace(k, c);
      } else {
        it->second += c;
      }
    }
    return out;
  }
  const ManifoldModel m = dim == 1 ? ManifoldModel::circle() : ManifoldModel::torus2();
  const GridPtr grid = build_base_grid(m, res);
  const std::size_t n = grid->size();
  std::vector<Eigen::MatrixXcd> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = function_(grid->nodes[i].base);
  std::vector<cplx> values(n), coeffs;
  for (int r = 0; r < rank_; ++r) {
    for (int c = 0; c < rank_; ++c) {
      for (std::size_t i = 0; i < n; ++i) values[i] = samples[i](r, c);
      detail::forward_sheet(*grid, values, coeffs);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(coeffs[i]) < 1e-15) continue;
        Mode k{0, 0, 0};
        std::size_t idx = i;
        for (int a = dim - 1; a >= 0; --a) {
          k[a] = detail::signed_mode(static_cast<int>(idx % res), res);
          idx /= res;
        }
        auto it = out.find(k);
        if (it == out.end()) it = out.emplace(k, Eigen::MatrixXcd::Zero(rank_, rank_)).first;
        it->second(r, c) += coeffs[i];
      }
    }
  }
  return out;
}

Coefficient Coefficient::scaled(cplx s) const {
  Coefficient out = *this;
  if (function_) {
    auto f = function_;
    out.function_ = [f, s](const Point& x) { return Eigen::MatrixXcd(s * f(x)); };
  } else {
    for (auto& [k, c] : out.modes_) c *= s;
  }
  return out;
}

Multiplier Multiplier::identity() { return {}; }

Multiplier Multiplier::derivative(int axis, int p) {
  Mode power{0, 0, 0};
  power.at(axis) = p;
  return derivative(power);
}

Multiplier Multiplier::derivative(const Mode& power) {
  Multiplier m;
  m.kind = MultiplierKind::Derivative;
  m.power = power;
  return m;
}

Multiplier Multiplier::hardy_plus() {
  Multiplier m;
  m.kind = MultiplierKind::HardyPlus;
  return m;
}

Multiplier Multiplier::hardy_minus() {
  Multiplier m;
  m.kind = MultiplierKind::HardyMinus;
  return m;
}

Multiplier Multiplier::bessel(double s) {
  Multiplier m;
  m.kind = MultiplierKind::Bessel;
  m.exponent = s;
  return m;
}

double Multiplier::order() const {
  switch (kind) {
    case MultiplierKind::Derivative: return power[0] + power[1] + power[2];
    case MultiplierKind::Bessel: return exponent;
    default: return 0.0;
  }
}

cplx Multiplier::on_mode(const Mode& n, int dim) const {
  switch (kind) {
    case MultiplierKind::Identity: return 1.0;
    case MultiplierKind::Derivative: {
      cplx v = 1.0;
      for (int a = 0; a < dim; ++a) {
        for (int p = 0; p < power[a]; ++p) v *= cplx(0.0, n[a]);
      }
      return v;
    }
    case MultiplierKind::HardyPlus: return n[0] >= 0 ? 1.0 : 0.0;
    case MultiplierKind::HardyMinus: return n[0] < 0 ? 1.0 : 0.0;
    case MultiplierKind::Bessel: {
      double s = 1.0;
      for (int a = 0; a < dim; ++a) s += static_cast<double>(n[a]) * n[a];
      return std::pow(s, exponent / 2.0);
    }
  }
  return 0.0;
}

cplx Multiplier::principal(const Point& xi, int dim) const {
  switch (kind) {
    case MultiplierKind::Identity: return 1.0;
    case MultiplierKind::Derivative: {
      cplx v = 1.0;
      for (int a = 0; a < dim; ++a) {
        for (int p = 0; p < power[a]; ++p) v *= cplx(0.0, xi[a]);
      }
      return v;
    }
    case MultiplierKind::HardyPlus: return xi[0] > 0 ? 1.0 : 0.0;
    case MultiplierKind::HardyMinus: return xi[0] < 0 ? 1.0 : 0.0;
    case MultiplierKind::Bessel: {
      double s = 0.0;
      for (int a = 0; a < dim; ++a) s += xi[a] * xi[a];
      return std::pow(s, exponent / 2.0);
    }
  }
  return 0.0;
}

std::string Multiplier::label() const {
  switch (kind) {
    case MultiplierKind::Identity: return "identity";
    case MultiplierKind::Derivative:
      return "derivative(" + std::to_string(power[0]) + "," + std::to_string(power[1]) + ")";
    case MultiplierKind::HardyPlus: return "hardy_plus";
    case MultiplierKind::HardyMinus: return "hardy_minus";
    case MultiplierKind::Bessel: return "bessel(" + std::to_string(exponent) + ")";
  }
  return "?";
}

void OperatorSpec::validate() const {
  if (!group) throw UnsupportedTerm("operator has no group");
  if (rank < 1) throw UnsupportedTerm("rank must be >= 1");
  if (terms.empty()) throw UnsupportedTerm("operator has no terms");
  const ManifoldModel& m = manifold();
  bool attains = false;
  for (const auto& t : terms) {
    if (t.g.group_id != group->id()) throw GroupMismatch("term key from another group");
    for (const auto& mono : t.monomials) {
      const Multiplier& f = mono.multiplier;
      if ((f.kind == MultiplierKind::HardyPlus || f.kind == MultiplierKind::HardyMinus) &&
          m.kind != ManifoldKind::Circle) {
        throw UnsupportedTerm("Hardy projections are only defined on the circle");
      }
      if (f.kind == MultiplierKind::Derivative) {
        for (int a = 0; a < 3; ++a) {
          if (f.power[a] < 0 || (a >= m.dim && f.power[a] != 0)) {
            throw UnsupportedTerm("derivative " + f.label() + " outside the manifold's axes");
          }
        }
      }
      if (mono.coefficient.rank() != rank) {
        throw UnsupportedTerm("coefficient rank " + std::to_string(mono.coefficient.rank()) +
                              " != operator rank " + std::to_string(rank));
      }
      if (f.order() > order + 1e-12) {
        throw UnsupportedTerm("monomial " + f.label() + " exceeds the declared order");
      }
      if (std::abs(f.order() - order) < 1e-12) attains = true;
    }
  }
  if (!attains) throw UnsupportedTerm("no term attains the declared order");
}

long long OperatorSpec::support_radius() const {
  long long r = 0;
  for (const auto& t : terms) r = std::max(r, group->word_length(t.g));
  return r;
}

OperatorSpec OperatorSpec::shifted(const GroupElement& g) const {
  OperatorSpec out = *this;
  for (auto& t : out.terms) t.g = group->compose(g, t.g);
  return out;
}

}  // namespace shiftindex
