#include "shiftindex/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <json.hpp>

#include "shiftindex/errors.hpp"

namespace shiftindex {

using json = nlohmann::json;

namespace {

InvariantCheck make_check(std::string name, double worst, double threshold, int samples, bool exact = false) {
  InvariantCheck c;
  c.name = std::move(name);
  c.value = worst;
  c.threshold = threshold;
  c.samples = samples;
  c.passed = exact ? worst == 0.0 : worst < threshold;
  return c;
}

// Random rank-2 trigonometric polynomial of degree <= `band` per axis; the fiber angle is the last axis.
CrossedSymbol random_delta(std::mt19937_64& rng, GroupPtr group, GridPtr grid, const GroupElement& g, double scale,
                           int band) {
  std::normal_distribution<double> normal;
  std::vector<std::pair<std::array<int, 3>, Eigen::Matrix2cd>> modes;
  for (int i = 0; i < 4; ++i) {
    std::uniform_int_distribution<int> deg(-band, band);
    Eigen::Matrix2cd c;
    for (int r = 0; r < 2; ++r) {
      for (int s = 0; s < 2; ++s) c(r, s) = cplx(normal(rng), normal(rng));
    }
    modes.push_back({{deg(rng), deg(rng), deg(rng)}, c * (scale / 8.0)});
  }
  return CrossedSymbol::delta(group, grid, g, [modes](const GridNode& n) {
    const double w = std::atan2(n.fiber[1], n.fiber[0]);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    for (const auto& [k, c] : modes) m += std::polar(1.0, k[0] * n.base[0] + k[1] * n.base[1] + k[2] * w) * c;
    return m;
  });
}

CrossedSymbol random_symbol(std::mt19937_64& rng, GroupPtr group, GridPtr grid, double scale, int band) {
  CrossedSymbol out(group, grid, 2);
  for (const auto& g : group->ball(1)) out = out + random_delta(rng, group, grid, g, scale, band);
  return out;
}

}  // namespace

std::vector<InvariantCheck> algebra_properties(unsigned long long seed, int samples) {
  std::mt19937_64 rng(seed);
  const auto torus = ManifoldModel::torus2();
  const auto group = IsometryGroup::make(
      torus, GroupLaw::FreeAbelian, 0,
      {Generator::torus_translation(RotationNumber::golden(), RotationNumber::rational(1, 3)),
       Generator::torus_translation(RotationNumber::rational(0, 1), RotationNumber::from_double(std::sqrt(2.0) - 1.0))});
  // triple products of degree-1 symbols stay below the Nyquist band of 8 points
  const auto grid = build_cosphere_grid(torus, 8);
  const auto one = CrossedSymbol::identity(group, grid, 2);
  const auto circle = ManifoldModel::circle();
  const auto circle_group =
      IsometryGroup::make(circle, GroupLaw::FreeAbelian, 0, {Generator::circle_rotation(RotationNumber::golden())});
  const auto circle_grid = build_cosphere_grid(circle, 64);
  const auto circle_one = CrossedSymbol::identity(circle_group, circle_grid, 2);
  double assoc = 0, unit = 0, inverse = 0, leibniz = 0, dd = 0;
  for (int i = 0; i < samples; ++i) {
    const auto a = random_symbol(rng, group, grid, 1.0, 1);
    const auto b = random_symbol(rng, group, grid, 1.0, 1);
    const auto c = random_symbol(rng, group, grid, 1.0, 1);
    assoc = std::max(assoc, symbol_distance(convolve(convolve(a, b), c), convolve(a, convolve(b, c))));
    unit = std::max({unit, symbol_distance(convolve(one, a), a), symbol_distance(convolve(a, one), a)});

    // inverses leave the band of the torus grid quickly, so they are tested on the circle
    const auto e = circle_one.scaled(2.0) + random_symbol(rng, circle_group, circle_grid, 0.3, 2);
    const auto e_inv = invert(e, 1e-10, 24);
    inverse = std::max({inverse, symbol_distance(convolve(e, e_inv), circle_one),
                        symbol_distance(convolve(e_inv, e), circle_one)});

    const auto lhs = differential(convolve(a, b));
    const auto rhs = convolve(differential(a), b) + convolve(a, differential(b));
    leibniz = std::max(leibniz, symbol_distance(lhs, rhs));
    const auto d2 = differential(differential(a));
    dd = std::max(dd, symbol_distance(d2, CrossedSymbol(group, grid, 2)));
  }
  return {make_check("associativity", assoc, 1e-10, samples),
          make_check("unit", unit, 0.0, samples, true),
          make_check("inverse residual", inverse, 1e-8, samples),
          make_check("leibniz", leibniz, 1e-9, samples),
          make_check("d squared", dd, 1e-10, samples)};
}

std::vector<InvariantCheck> denominator_properties(unsigned long long seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.1, kPi);
  std::uniform_real_distribution<double> root(-2.0, 2.0);
  std::uniform_int_distribution<int> length(1, 4);
  double todd_vs_ahat = 0.0, den = 0.0;
  for (int i = 0; i < samples; ++i) {
    std::vector<double> roots(length(rng));
    for (auto& x : roots) x = root(rng);
    const auto td = todd_from_roots(roots);
    const auto ah = a_hat_from_roots(roots);
    for (int d = 0; d < 5; ++d) {
      double sq = 0.0;
      for (int j = 0; j <= d; ++j) sq += ah[j] * ah[d - j];
      todd_vs_ahat = std::max(todd_vs_ahat, std::abs(td[d] - sq));
    }
    std::vector<double> angles(length(rng)), doubled;
    for (auto& t : angles) {
      t = angle(rng);
      doubled.push_back(t);
      doubled.push_back(t);
    }
    const cplx a = as_denominator(angles);
    den = std::max(den, std::abs(a - pf_sin_denominator(doubled)) / std::abs(a));
  }
  // sampled strata forms: Td(T M_g (x) C) against A-hat(S*M_g) node by node
  const auto group = IsometryGroup::make(ManifoldModel::sphere_cross_circle(), GroupLaw::FreeAbelian, 0,
                                         {Generator::sphere_rotation_only(RotationNumber::golden())});
  const auto grid = build_polar_stratum_grid(32);
  for (const auto& g : group->ball(4)) {
    for (const auto& s : group->fixed_strata(g)) {
      if (s.kind == StratumKind::Empty) continue;
      const auto cf = characteristic_forms(s, grid);
      const auto& t = cf.todd.components.at(0);
      const auto& h = cf.a_hat.components.at(0);
      for (std::size_t n = 0; n < t.size(); ++n) todd_vs_ahat = std::max(todd_vs_ahat, std::abs(t[n] - h[n]));
    }
  }
  return {make_check("todd vs a-hat", todd_vs_ahat, 1e-10, samples),
          make_check("denominator vs pfaffian", den, 1e-10, samples)};
}

bool SuiteReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; }) &&
         std::all_of(invariants.begin(), invariants.end(), [](const auto& c) { return c.passed; });
}

SuiteReport verify_suite(const Suite& suite, const RunOptions& opt, int property_samples) {
  SuiteReport rep;
  rep.suite = suite.name;
  rep.seed = opt.seed;
  std::vector<const Scenario*> order;
  for (const auto& s : suite.scenarios) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const Scenario* a, const Scenario* b) { return a->name < b->name; });
  for (const Scenario* s : order) rep.results.push_back(run_scenario(*s, opt));
  if (property_samples > 0) {
    for (auto& c : algebra_properties(opt.seed, property_samples)) rep.invariants.push_back(std::move(c));
    for (auto& c : denominator_properties(opt.seed, property_samples)) rep.invariants.push_back(std::move(c));
  }
  return rep;
}

namespace {

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json complex_json(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

json analytic_json(const VerificationResult& r) {
  json j = {{"status", r.analytic_side.status}, {"message", r.analytic_side.message}};
  if (r.analytic_index) j["index"] = *r.analytic_index;
  if (r.analytic) {
    const IndexEstimate& e = *r.analytic;
    j["heat_agrees"] = e.heat_agrees;
    j["svd_agrees"] = e.svd_agrees;
    j["plateau"] = e.plateau;
    j["spectral_gap"] = number(e.spectral_gap);
    j["gap_closing"] = e.gap_closing;
    j["kernel_dimension"] = e.kernel_dimension;
    j["cokernel_dimension"] = e.cokernel_dimension;
    if (r.kind == ScenarioKind::ModelEuler) j["kernel_overlap"] = number(e.kernel_overlap);
    json rd = json::array();
    for (const auto& t : e.readings) {
      rd.push_back({{"truncation", t.truncation},
                    {"dimension", t.dimension},
                    {"heat_plateau", t.heat_plateau},
                    {"heat_index", t.heat_index},
                    {"svd_stable", t.svd_stable},
                    {"svd_index", t.svd_index},
                    {"svd_sweep", t.svd_sweep},
                    {"kernel", t.kernel_count},
                    {"cokernel", t.cokernel_count},
                    {"spectral_gap", number(t.spectral_gap)},
                    {"kernel_cluster_max", number(t.kernel_cluster_max)}});
    }
    j["readings"] = rd;
  }
  return j;
}

json topological_json(const VerificationResult& r) {
  json j = {{"status", r.topological_side.status}, {"message", r.topological_side.message}};
  if (!r.topological) return j;
  const IndexReport& t = *r.topological;
  j["formula"] = t.formula;
  j["raw"] = complex_json(t.total);
  j["rounded"] = t.nearest;
  j["distance_to_integer"] = number(t.distance_to_integer);
  j["decay_exponent"] = number(t.decay_exponent);
  j["converged"] = t.converged;
  json sums = json::array(), masses = json::array();
  for (const auto& s : t.shell_sums) sums.push_back(complex_json(s));
  for (double m : t.shell_masses) masses.push_back(number(m));
  j["shell_sums"] = sums;
  j["shell_masses"] = masses;
  j["contributions"] = t.contributions.size();
  j["notes"] = t.notes;
  return j;
}

json result_json(const VerificationResult& r) {
  json j = {{"name", r.name},
            {"kind", std::string(kind_name(r.kind))},
            {"agree", r.agree},
            {"passed", r.passed},
            {"analytic", analytic_json(r)},
            {"topological", topological_json(r)},
            {"runtime_ms", number(r.runtime_ms)},
            {"warnings", r.warnings},
            {"failures", r.failures}};
  if (r.conditions.checked) {
    j["conditions"] = {{"growth_exponent", number(r.conditions.growth_exponent)},
                       {"diophantine_violation", r.conditions.diophantine_violation},
                       {"diophantine_exponent", r.conditions.diophantine_exponent},
                       {"diophantine_constant", number(r.conditions.diophantine_constant)},
                       {"method", r.conditions.method}};
  }
  return j;
}

std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string emit_json(const SuiteReport& report) {
  json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["passed"] = report.all_passed();
  json results = json::array();
  for (const auto& r : report.results) results.push_back(result_json(r));
  j["scenarios"] = results;
  json inv = json::array();
  for (const auto& c : report.invariants) {
    inv.push_back({{"name", c.name}, {"passed", c.passed}, {"value", number(c.value)},
                   {"threshold", number(c.threshold)}, {"samples", c.samples}});
  }
  j["invariants"] = inv;
  return j.dump(2) + "\n";
}

std::string emit_csv(const SuiteReport& report) {
  std::ostringstream os;
  os << "name,analytic,topological_raw,topological_rounded,agree,decay_exponent,runtime_ms\n";
  for (const auto& r : report.results) {
    os << csv_field(r.name) << ','
       << (r.analytic_index ? std::to_string(*r.analytic_index) : r.analytic_side.status) << ','
       << (r.topological_raw ? csv_double(r.topological_raw->real()) : r.topological_side.status) << ','
       << (r.topological_rounded ? std::to_string(*r.topological_rounded) : r.topological_side.status) << ','
       << (r.agree ? "true" : "false") << ','
       << (r.topological ? csv_double(r.decay_exponent) : "n/a") << ','
       << csv_double(r.runtime_ms) << '\n';
  }
  return os.str();
}

std::string emit(const SuiteReport& report, ReportFormat format) {
  return format == ReportFormat::Json ? emit_json(report) : emit_csv(report);
}

std::string write_report(const SuiteReport& report, ReportFormat format, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = report.suite.empty() ? "report" : report.suite;
  const std::string path =
      (std::filesystem::path(dir) / (stem + (format == ReportFormat::Json ? ".json" : ".csv"))).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << emit(report, format);
  return path;
}

int exit_status(const SuiteReport& report) { return report.all_passed() ? 0 : 1; }

}  // namespace shiftindex
