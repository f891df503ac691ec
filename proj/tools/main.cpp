#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shiftindex/harness.hpp"

using namespace shiftindex;
using json = nlohmann::json;

namespace {

struct Common {
  int resolution = 0;
  std::vector<int> truncations;
  long long shell_max = -1;
  double tol = 0.0;
  unsigned long long seed = 0x5eed;
  std::string format = "json";
  std::string out;
  bool timing = false;
  int property_samples = 100;

  RunOptions options() const {
    RunOptions o;
    if (resolution > 0) o.resolution = resolution;
    if (!truncations.empty()) o.truncations = truncations;
    if (shell_max >= 0) o.shell_max = shell_max;
    if (tol > 0.0) o.tolerance = tol;
    o.seed = seed;
    o.timing = timing;
    return o;
  }
  ReportFormat report_format() const { return format == "csv" ? ReportFormat::Csv : ReportFormat::Json; }
};

void add_common(CLI::App* app, Common& c, bool suite_flags) {
  app->add_option("--resolution", c.resolution, "carrier grid points per axis");
  app->add_option("--truncations", c.truncations, "truncation schedule, e.g. 16,32,64")->delimiter(',');
  app->add_option("--shell-max", c.shell_max, "largest word length summed on the topological side");
  app->add_option("--tol", c.tol, "symbol inversion tolerance");
  app->add_option("--seed", c.seed, "seed of the randomized property checks");
  if (suite_flags) {
    app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", c.out, "directory receiving the report files");
    app->add_flag("--timing", c.timing, "record wall-clock runtimes (reports are then not reproducible)");
    app->add_option("--property-samples", c.property_samples, "random draws per property check");
  }
}

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

CrossedSymbol scenario_symbol(const Scenario& s, int resolution) {
  switch (s.kind) {
    case ScenarioKind::Operator: return symbol_of_spec(s.spec, build_cosphere_grid(s.manifold, resolution));
    case ScenarioKind::Toeplitz: return toeplitz_symbol(s, build_base_grid(s.manifold, resolution));
    case ScenarioKind::Projection: return bott_symbol(s.group, build_base_grid(s.manifold, resolution));
    case ScenarioKind::Audit: return audit_symbol(s.group, build_polar_stratum_grid(resolution), s.audit);
    case ScenarioKind::ModelEuler: break;
  }
  throw ScenarioInvalid("kind: the model operator has no crossed-product symbol");
}

int check_group(const Scenario& s, int k_max, long long g_range, int samples) {
  const auto growth = growth_check(*s.group, k_max);
  const auto fit = diophantine_check(*s.group, g_range, samples);
  json env = json::array();
  for (const auto& p : fit.envelope) env.push_back({{"length", p.word_length}, {"ratio", num(p.ratio)}});
  json j = {{"scenario", s.name},
            {"growth_exponent", num(growth.exponent)},
            {"ball_counts", growth.ball_counts},
            {"diophantine", {{"violation", fit.violation},
                             {"exponent", fit.exponent},
                             {"constant", num(fit.constant)},
                             {"max_tested_power", fit.max_tested_power},
                             {"method", fit.method},
                             {"envelope", env}}}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int invert_symbol(const Scenario& s, const Common& c, long long radius) {
  const int res = c.resolution > 0 ? c.resolution : s.resolution;
  const double tol = c.tol > 0.0 ? c.tol : s.tolerances.inversion;
  const CrossedSymbol sigma = scenario_symbol(s, res);
  InversionInfo info;
  json j = {{"scenario", s.name}, {"support_radius", radius}};
  int status = 0;
  try {
    const CrossedSymbol inv = invert(sigma, tol, radius, &info);
    j["status"] = "ok";
    j["inverse_support"] = inv.support().size();
    j["inverse_decay"] = num(inv.decay_exponent());
  } catch (const Error& e) {
    j["status"] = e.what();
    status = 1;
  }
  j["neumann"] = info.neumann;
  j["min_singular"] = num(info.min_singular);
  j["singular_trend"] = info.singular_trend;
  j["residual_right"] = num(info.residual_right);
  j["residual_left"] = num(info.residual_left);
  std::cout << j.dump(2) << "\n";
  return status;
}

json readings_json(const IndexEstimate& e) {
  json rd = json::array();
  for (const auto& t : e.readings) {
    rd.push_back({{"truncation", t.truncation}, {"heat_index", t.heat_index}, {"heat_plateau", t.heat_plateau},
                  {"svd_index", t.svd_index}, {"svd_stable", t.svd_stable}, {"kernel", t.kernel_count},
                  {"cokernel", t.cokernel_count}, {"spectral_gap", num(t.spectral_gap)}});
  }
  return rd;
}

int analytic_index(const Scenario& s, const Common& c) {
  const std::vector<int> truncations = c.truncations.empty() ? s.truncations : c.truncations;
  const int res = c.resolution > 0 ? c.resolution : s.resolution;
  json j = {{"scenario", s.name}};
  int status = 0;
  try {
    IndexEstimate e;
    switch (s.kind) {
      case ScenarioKind::Operator: e = estimate_index(s.spec, truncations); break;
      case ScenarioKind::Toeplitz: {
        const CrossedSymbol sigma = toeplitz_symbol(s, build_base_grid(s.manifold, res));
        e = estimate_index([&](int n) { return toeplitz(sigma, n); }, truncations);
        break;
      }
      case ScenarioKind::Projection: e = estimate_index(twisted_dirac_spec(s.group), truncations); break;
      case ScenarioKind::ModelEuler: e = model_euler_index(s.hermite_size); break;
      case ScenarioKind::Audit: throw ScenarioInvalid("kind: audits have no analytic side");
    }
    j["index"] = e.index;
    j["gap_closing"] = e.gap_closing;
    j["readings"] = readings_json(e);
  } catch (const NoPlateau& e) {
    j["status"] = e.what();
    j["readings"] = readings_json(e.diagnostics());
    status = 1;
  }
  std::cout << j.dump(2) << "\n";
  return status;
}

int topological_index(const Scenario& s, const Common& c) {
  const int res = c.resolution > 0 ? c.resolution : s.resolution;
  const long long shell = c.shell_max >= 0 ? c.shell_max : s.shell_max;
  FormulaOptions fo;
  fo.tolerance = c.tol > 0.0 ? c.tol : s.tolerances.inversion;
  IndexReport rep;
  switch (s.kind) {
    case ScenarioKind::Operator:
    case ScenarioKind::Audit: rep = evaluate_fixedp(scenario_symbol(s, res), shell, fo); break;
    case ScenarioKind::Toeplitz: rep = evaluate_local_odd(scenario_symbol(s, res), shell, fo); break;
    case ScenarioKind::Projection: rep = evaluate_dirac_even(scenario_symbol(s, res), shell, fo); break;
    case ScenarioKind::ModelEuler: throw ScenarioInvalid("kind: the model operator has no index formula");
  }
  json sums = json::array(), masses = json::array();
  for (const auto& z : rep.shell_sums) sums.push_back({num(z.real()), num(z.imag())});
  for (double m : rep.shell_masses) masses.push_back(num(m));
  json j = {{"scenario", s.name},      {"formula", rep.formula},
            {"raw", {num(rep.total.real()), num(rep.total.imag())}},
            {"rounded", rep.nearest},  {"distance_to_integer", num(rep.distance_to_integer)},
            {"decay_exponent", num(rep.decay_exponent)}, {"converged", rep.converged},
            {"shell_sums", sums},      {"shell_masses", masses},
            {"notes", rep.notes}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int model_euler(int n) {
  const IndexEstimate e = model_euler_index(n);
  json j = {{"N", n},
            {"index", e.index},
            {"kernel_dimension", e.kernel_dimension},
            {"cokernel_dimension", e.cokernel_dimension},
            {"kernel_overlap", num(e.kernel_overlap)},
            {"readings", readings_json(e)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int emit_reports(const std::vector<SuiteReport>& reports, const Common& c) {
  int status = 0;
  for (const auto& r : reports) {
    if (c.out.empty()) {
      std::cout << emit(r, c.report_format());
    } else {
      std::cerr << "wrote " << write_report(r, c.report_format(), c.out) << "\n";
    }
    const int passed = static_cast<int>(std::count_if(r.results.begin(), r.results.end(),
                                                      [](const auto& x) { return x.passed; }));
    std::cerr << r.suite << ": " << passed << "/" << r.results.size() << " scenarios passed";
    if (!r.invariants.empty()) {
      const int held = static_cast<int>(std::count_if(r.invariants.begin(), r.invariants.end(),
                                                      [](const auto& x) { return x.passed; }));
      std::cerr << ", " << held << "/" << r.invariants.size() << " invariants held";
    }
    std::cerr << "\n";
    status |= exit_status(r);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of the index formula for operators with shifts"};
  app.require_subcommand(1);

  Common common;
  std::string file, name;
  std::vector<std::string> files;
  int k_max = 128, samples = 16, hermite = 64;
  long long g_range = 1LL << 26, radius = 24;

  auto* cg = app.add_subcommand("check-group", "growth and Diophantine checks of a scenario's group");
  cg->add_option("file", file, "scenario or suite file")->required();
  cg->add_option("--name", name, "scenario within a suite");
  cg->add_option("--k-max", k_max, "largest ball radius of the growth fit");
  cg->add_option("--g-range", g_range, "largest word length of the Diophantine check");
  cg->add_option("--samples", samples, "sample points of the Diophantine check");

  auto* inv = app.add_subcommand("invert-symbol", "invert a scenario's crossed-product symbol");
  inv->add_option("file", file, "scenario or suite file")->required();
  inv->add_option("--name", name, "scenario within a suite");
  inv->add_option("--support-radius", radius, "support radius of the inverse");
  add_common(inv, common, false);

  auto* an = app.add_subcommand("analytic-index", "index by finite sections");
  an->add_option("file", file, "scenario or suite file")->required();
  an->add_option("--name", name, "scenario within a suite");
  add_common(an, common, false);

  auto* top = app.add_subcommand("topological-index", "index by the index formula");
  top->add_option("file", file, "scenario or suite file")->required();
  top->add_option("--name", name, "scenario within a suite");
  add_common(top, common, false);

  auto* me = app.add_subcommand("model-euler", "index of x + d/dx in Hermite functions");
  me->add_option("-N,--hermite", hermite, "largest number of Hermite functions");

  auto* ve = app.add_subcommand("verify", "verify one suite and emit its report");
  ve->add_option("suite", file, "suite file")->required();
  add_common(ve, common, true);

  auto* rp = app.add_subcommand("report", "verify several suites and emit one report per suite");
  rp->add_option("suites", files, "suite files")->required();
  add_common(rp, common, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cg) return check_group(load_scenario(file, name), k_max, g_range, samples);
    if (*inv) return invert_symbol(load_scenario(file, name), common, radius);
    if (*an) return analytic_index(load_scenario(file, name), common);
    if (*top) return topological_index(load_scenario(file, name), common);
    if (*me) return model_euler(hermite);
    if (*ve) {
      return emit_reports({verify_suite(load_suite(file), common.options(), common.property_samples)}, common);
    }
    if (*rp) {
      std::vector<SuiteReport> reports;
      for (const auto& f : files) reports.push_back(verify_suite(load_suite(f), common.options(), common.property_samples));
      return emit_reports(reports, common);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
