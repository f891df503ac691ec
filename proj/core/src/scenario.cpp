#include "shiftindex/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shiftindex/errors.hpp"

namespace shiftindex {

using json = nlohmann::json;

std::string_view kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Operator: return "operator";
    case ScenarioKind::Toeplitz: return "toeplitz";
    case ScenarioKind::Projection: return "projection";
    case ScenarioKind::ModelEuler: return "model-euler";
    case ScenarioKind::Audit: return "audit";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError("key '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; });
    if (!known) fail(join(path, k), "unknown key");
  }
}

template <class T>
T as(const json& j, const std::string& path, const char* expected) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    fail(path, std::string("expected ") + expected);
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

cplx as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(path, "expected a number or [re, im]");
}

std::vector<long long> as_integer_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<long long> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_integer(j[i], index_path(path, i)));
  return out;
}

RotationNumber parse_rotation(const json& j, const std::string& path) {
  if (j.is_number()) return RotationNumber::from_double(j.get<double>());
  if (!j.is_string()) fail(path, "expected a number, \"golden\", \"liouville[:terms]\" or \"p/q\"");
  const std::string s = j.get<std::string>();
  if (s == "golden") return RotationNumber::golden();
  if (s.rfind("liouville", 0) == 0) {
    int terms = 6;
    if (s.size() > 9) {
      if (s[9] != ':') fail(path, "bad liouville spec '" + s + "'");
      try {
        terms = std::stoi(s.substr(10));
      } catch (const std::exception&) {
        fail(path, "bad liouville term count in '" + s + "'");
      }
    }
    try {
      return RotationNumber::liouville(terms);
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    try {
      return RotationNumber::rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const Error& e) {
      fail(path, e.what());
    } catch (const std::exception&) {
      fail(path, "bad rational '" + s + "'");
    }
  }
  fail(path, "unknown rotation number '" + s + "'");
}

Generator parse_generator(const json& j, const std::string& path) {
  allow_keys(j, path, {"translation", "sphere", "flip"});
  Generator g;
  if (j.contains("translation")) {
    const auto& t = j["translation"];
    const std::string tp = join(path, "translation");
    if (!t.is_array()) fail(tp, "expected an array of rotation numbers");
    for (std::size_t i = 0; i < t.size(); ++i) g.translation.push_back(parse_rotation(t[i], index_path(tp, i)));
  }
  if (j.contains("sphere")) g.sphere_rotation = parse_rotation(j["sphere"], join(path, "sphere"));
  if (j.contains("flip")) g.flip = as<bool>(j["flip"], join(path, "flip"), "a boolean");
  return g;
}

GroupPtr parse_group(const json* j, const ManifoldModel& manifold, const std::string& path) {
  if (j == nullptr || j->is_null()) return IsometryGroup::trivial(manifold);
  allow_keys(*j, path, {"law", "order", "generators"});
  GroupLaw law = GroupLaw::FreeAbelian;
  int order = 0;
  if (j->contains("law")) {
    const std::string l = as<std::string>((*j)["law"], join(path, "law"), "\"free\" or \"cyclic\"");
    if (l == "cyclic") {
      law = GroupLaw::Cyclic;
    } else if (l != "free") {
      fail(join(path, "law"), "expected \"free\" or \"cyclic\"");
    }
  }
  if (j->contains("order")) order = static_cast<int>(as_integer((*j)["order"], join(path, "order")));
  std::vector<Generator> gens;
  if (j->contains("generators")) {
    const auto& g = (*j)["generators"];
    const std::string gp = join(path, "generators");
    if (!g.is_array()) fail(gp, "expected an array");
    for (std::size_t i = 0; i < g.size(); ++i) gens.push_back(parse_generator(g[i], index_path(gp, i)));
  }
  try {
    return IsometryGroup::make(manifold, law, order, std::move(gens));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

Mode parse_mode(const json& j, const std::string& path) {
  const auto v = as_integer_list(j, path);
  if (v.empty() || v.size() > 3) fail(path, "expected 1 to 3 mode components");
  Mode m{0, 0, 0};
  for (std::size_t i = 0; i < v.size(); ++i) m[i] = static_cast<int>(v[i]);
  return m;
}

Eigen::MatrixXcd parse_matrix(const json& j, int rank, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != rank) fail(path, "expected a " + std::to_string(rank) + "x" + std::to_string(rank) + " matrix");
  Eigen::MatrixXcd m(rank, rank);
  for (int r = 0; r < rank; ++r) {
    const std::string rp = index_path(path, r);
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != rank) fail(rp, "expected a row of length " + std::to_string(rank));
    for (int c = 0; c < rank; ++c) m(r, c) = as_complex(j[r][c], index_path(rp, c));
  }
  return m;
}

// number | [re, im] | {"modes": [{"k": [..], "c": z} | {"k": [..], "matrix": [[..]]}]}
Coefficient parse_coefficient(const json& j, int rank, const std::string& path) {
  if (j.is_number() || j.is_array()) return Coefficient::constant(as_complex(j, path), rank);
  allow_keys(j, path, {"modes"});
  if (!j.contains("modes")) fail(join(path, "modes"), "missing");
  const auto& modes = j["modes"];
  const std::string mp = join(path, "modes");
  if (!modes.is_array() || modes.empty()) fail(mp, "expected a non-empty array");
  std::vector<std::pair<Mode, Eigen::MatrixXcd>> out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string ip = index_path(mp, i);
    allow_keys(modes[i], ip, {"k", "c", "matrix"});
    if (!modes[i].contains("k")) fail(join(ip, "k"), "missing");
    const Mode k = parse_mode(modes[i]["k"], join(ip, "k"));
    if (modes[i].contains("matrix")) {
      out.emplace_back(k, parse_matrix(modes[i]["matrix"], rank, join(ip, "matrix")));
    } else if (modes[i].contains("c")) {
      out.emplace_back(k, as_complex(modes[i]["c"], join(ip, "c")) * Eigen::MatrixXcd::Identity(rank, rank));
    } else {
      fail(join(ip, "c"), "missing");
    }
  }
  return Coefficient::trig_matrix(std::move(out));
}

// "identity" | "hardy+" | "hardy-" | "d/dx" | "d/dy" | {"derivative": [px, py]} | {"bessel": s}
Multiplier parse_multiplier(const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "identity") return Multiplier::identity();
    if (s == "hardy+") return Multiplier::hardy_plus();
    if (s == "hardy-") return Multiplier::hardy_minus();
    if (s == "d/dx") return Multiplier::derivative(0);
    if (s == "d/dy") return Multiplier::derivative(1);
    fail(path, "unknown multiplier '" + s + "'");
  }
  allow_keys(j, path, {"derivative", "bessel"});
  if (j.contains("derivative")) return Multiplier::derivative(parse_mode(j["derivative"], join(path, "derivative")));
  if (j.contains("bessel")) return Multiplier::bessel(as_number(j["bessel"], join(path, "bessel")));
  fail(path, "expected a multiplier");
}

GroupElement parse_element(const json& j, const IsometryGroup& group, const std::string& path) {
  const auto e = as_integer_list(j, path);
  if (static_cast<int>(e.size()) != group.rank()) {
    fail(path, "expected " + std::to_string(group.rank()) + " exponents");
  }
  return group.element(e);
}

std::vector<Term> parse_operator_terms(const json& j, const IsometryGroup& group, int rank,
                                       const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of terms");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tp = index_path(path, i);
    allow_keys(j[i], tp, {"g", "monomials"});
    Term t;
    t.g = j[i].contains("g") ? parse_element(j[i]["g"], group, join(tp, "g")) : group.identity();
    if (!j[i].contains("monomials")) fail(join(tp, "monomials"), "missing");
    const auto& ms = j[i]["monomials"];
    const std::string mp = join(tp, "monomials");
    if (!ms.is_array()) fail(mp, "expected an array");
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const std::string kp = index_path(mp, k);
      allow_keys(ms[k], kp, {"coefficient", "multiplier"});
      if (!ms[k].contains("coefficient")) fail(join(kp, "coefficient"), "missing");
      Monomial m{parse_coefficient(ms[k]["coefficient"], rank, join(kp, "coefficient")),
                 ms[k].contains("multiplier") ? parse_multiplier(ms[k]["multiplier"], join(kp, "multiplier"))
                                              : Multiplier::identity()};
      t.monomials.push_back(std::move(m));
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

std::vector<SymbolTerm> parse_symbol_terms(const json& j, const IsometryGroup& group, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of terms");
  std::vector<SymbolTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tp = index_path(path, i);
    allow_keys(j[i], tp, {"g", "coefficient"});
    SymbolTerm t;
    t.g = j[i].contains("g") ? parse_element(j[i]["g"], group, join(tp, "g")).exponents
                             : group.identity().exponents;
    if (!j[i].contains("coefficient")) fail(join(tp, "coefficient"), "missing");
    t.coefficient = parse_coefficient(j[i]["coefficient"], 1, join(tp, "coefficient"));
    terms.push_back(std::move(t));
  }
  return terms;
}

ScenarioKind parse_kind(const json& j, const std::string& path) {
  const std::string s = as<std::string>(j, path, "a scenario kind");
  for (auto k : {ScenarioKind::Operator, ScenarioKind::Toeplitz, ScenarioKind::Projection,
                 ScenarioKind::ModelEuler, ScenarioKind::Audit}) {
    if (s == kind_name(k)) return k;
  }
  fail(path, "unknown scenario kind '" + s + "'");
}

Scenario parse_scenario(const json& j, const std::string& path) {
  allow_keys(j, path, {"name", "kind", "manifold", "group", "rank", "order", "terms", "audit", "hermite_size",
                       "truncations", "resolution", "shell_max", "expected", "tolerances"});
  Scenario s;
  if (!j.contains("name")) fail(join(path, "name"), "missing");
  s.name = as<std::string>(j["name"], join(path, "name"), "a string");
  if (j.contains("kind")) s.kind = parse_kind(j["kind"], join(path, "kind"));
  if (s.kind == ScenarioKind::ModelEuler) {
    s.manifold = ManifoldModel::circle();
  } else {
    if (!j.contains("manifold")) fail(join(path, "manifold"), "missing");
    const std::string m = as<std::string>(j["manifold"], join(path, "manifold"), "a manifold name");
    const auto model = parse_manifold(m);
    if (!model) fail(join(path, "manifold"), "unknown manifold '" + m + "'");
    s.manifold = *model;
  }
  s.group = parse_group(j.contains("group") ? &j["group"] : nullptr, s.manifold, join(path, "group"));
  const int rank = j.contains("rank") ? static_cast<int>(as_integer(j["rank"], join(path, "rank"))) : 1;
  if (rank < 1) fail(join(path, "rank"), "must be >= 1");

  if (s.kind == ScenarioKind::Operator) {
    if (!j.contains("terms")) fail(join(path, "terms"), "missing");
    s.spec.name = s.name;
    s.spec.group = s.group;
    s.spec.rank = rank;
    s.spec.order = j.contains("order") ? as_number(j["order"], join(path, "order")) : 0.0;
    s.spec.terms = parse_operator_terms(j["terms"], *s.group, rank, join(path, "terms"));
  } else if (s.kind == ScenarioKind::Toeplitz) {
    if (!j.contains("terms")) fail(join(path, "terms"), "missing");
    s.symbol = parse_symbol_terms(j["terms"], *s.group, join(path, "terms"));
  } else if (j.contains("terms")) {
    fail(join(path, "terms"), "not used by " + std::string(kind_name(s.kind)) + " scenarios");
  }
  if (j.contains("audit")) {
    const auto& a = j["audit"];
    const std::string ap = join(path, "audit");
    allow_keys(a, ap, {"shell", "amplitude", "power"});
    if (a.contains("shell")) s.audit.shell = static_cast<int>(as_integer(a["shell"], join(ap, "shell")));
    if (a.contains("amplitude")) s.audit.amplitude = as_number(a["amplitude"], join(ap, "amplitude"));
    if (a.contains("power")) s.audit.power = as_number(a["power"], join(ap, "power"));
  }
  if (j.contains("hermite_size")) s.hermite_size = static_cast<int>(as_integer(j["hermite_size"], join(path, "hermite_size")));
  if (j.contains("truncations")) {
    for (long long t : as_integer_list(j["truncations"], join(path, "truncations"))) s.truncations.push_back(static_cast<int>(t));
  }
  if (j.contains("resolution")) s.resolution = static_cast<int>(as_integer(j["resolution"], join(path, "resolution")));
  if (j.contains("shell_max")) s.shell_max = as_integer(j["shell_max"], join(path, "shell_max"));
  if (j.contains("expected")) {
    const auto& e = j["expected"];
    const std::string ep = join(path, "expected");
    allow_keys(e, ep, {"index", "elliptic", "decay_max", "decay_min", "note"});
    if (e.contains("index")) s.expected.index = as_integer(e["index"], join(ep, "index"));
    if (e.contains("elliptic")) s.expected.elliptic = as<bool>(e["elliptic"], join(ep, "elliptic"), "a boolean");
    if (e.contains("decay_max")) s.expected.decay_max = as_number(e["decay_max"], join(ep, "decay_max"));
    if (e.contains("decay_min")) s.expected.decay_min = as_number(e["decay_min"], join(ep, "decay_min"));
    if (e.contains("note")) s.expected.note = as<std::string>(e["note"], join(ep, "note"), "a string");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    const std::string tp = join(path, "tolerances");
    allow_keys(t, tp, {"integer", "inversion"});
    if (t.contains("integer")) s.tolerances.integer = as_number(t["integer"], join(tp, "integer"));
    if (t.contains("inversion")) s.tolerances.inversion = as_number(t["inversion"], join(tp, "inversion"));
  }
  try {
    s.validate();
  } catch (const ScenarioInvalid& e) {
    fail(path, e.what());
  }
  return s;
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void Scenario::validate() const {
  auto bad = [&](const std::string& field, const std::string& what) {
    throw ScenarioInvalid(field + ": " + what);
  };
  if (name.empty()) bad("name", "empty");
  if (!group) bad("group", "missing");
  if (group->manifold() != manifold) bad("group", "declared on a different manifold");
  const bool two_sided = kind == ScenarioKind::Operator || kind == ScenarioKind::Toeplitz ||
                         kind == ScenarioKind::Projection;
  if (two_sided) {
    if (truncations.size() < 3) bad("truncations", "need at least 3");
    for (std::size_t i = 1; i < truncations.size(); ++i) {
      if (truncations[i] <= truncations[i - 1]) bad("truncations", "must increase");
    }
  }
  if (resolution < 8) bad("resolution", "must be >= 8");
  if (shell_max < 0) bad("shell_max", "must be >= 0");
  if (tolerances.integer <= 0.0 || tolerances.inversion <= 0.0) bad("tolerances", "must be positive");
  switch (kind) {
    case ScenarioKind::Operator:
      if (manifold.kind == ManifoldKind::SphereCrossCircle) bad("manifold", "operators on S^2 x S^1 are not assembled");
      try {
        spec.validate();
      } catch (const Error& e) {
        bad("terms", e.what());
      }
      break;
    case ScenarioKind::Toeplitz:
      if (manifold.kind != ManifoldKind::Circle) bad("manifold", "Toeplitz scenarios live on the circle");
      if (symbol.empty()) bad("terms", "empty symbol");
      for (const auto& t : symbol) {
        if (static_cast<int>(t.g.size()) != group->rank()) bad("terms", "group element of the wrong rank");
      }
      break;
    case ScenarioKind::Projection:
      if (manifold.kind != ManifoldKind::Torus2) bad("manifold", "the Bott projection lives on the torus");
      break;
    case ScenarioKind::ModelEuler:
      if (hermite_size < 8) bad("hermite_size", "must be >= 8");
      break;
    case ScenarioKind::Audit:
      if (manifold.kind != ManifoldKind::SphereCrossCircle) bad("manifold", "audits use S^2 x S^1");
      if (group->rank() != 1) bad("group", "audits need one generator");
      if (audit.shell < 1) bad("audit.shell", "must be >= 1");
      break;
  }
}

Suite parse_suite(const std::string& text) {
  const json doc = parse_document(text);
  allow_keys(doc, "", {"suite", "defaults", "scenarios"});
  Suite suite;
  if (doc.contains("suite")) suite.name = as<std::string>(doc["suite"], "suite", "a string");
  if (!doc.contains("scenarios")) fail("scenarios", "missing");
  const auto& list = doc["scenarios"];
  if (!list.is_array()) fail("scenarios", "expected an array");
  json defaults = json::object();
  if (doc.contains("defaults")) {
    defaults = doc["defaults"];
    if (!defaults.is_object()) fail("defaults", "expected an object");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = index_path("scenarios", i);
    if (!list[i].is_object()) fail(path, "expected an object");
    json merged = defaults;
    merged.update(list[i]);
    Scenario s = parse_scenario(merged, path);
    if (!names.insert(s.name).second) fail(join(path, "name"), "duplicate scenario name '" + s.name + "'");
    suite.scenarios.push_back(std::move(s));
  }
  return suite;
}

Suite load_suite(const std::string& path) { return parse_suite(read_file(path)); }

Scenario load_scenario(const std::string& path, const std::string& name) {
  const std::string text = read_file(path);
  const json doc = parse_document(text);
  if (doc.is_object() && !doc.contains("scenarios")) return parse_scenario(doc, "");
  Suite suite = parse_suite(text);
  if (name.empty()) {
    if (suite.scenarios.size() != 1) throw ParseError("key 'scenarios': several scenarios; select one by name");
    return suite.scenarios.front();
  }
  for (auto& s : suite.scenarios) {
    if (s.name == name) return s;
  }
  throw ParseError("key 'scenarios': no scenario named '" + name + "'");
}

CrossedSymbol toeplitz_symbol(const Scenario& s, GridPtr base_grid) {
  CrossedSymbol sigma(s.group, base_grid, 1);
  for (const auto& t : s.symbol) {
    const Coefficient c = t.coefficient;
    sigma = sigma + CrossedSymbol::delta(s.group, base_grid, s.group->element(t.g),
                                         [c](const GridNode& n) { return c(n.base); });
  }
  return sigma;
}

CrossedSymbol audit_symbol(GroupPtr group, GridPtr stratum_grid, const AuditSymbol& a) {
  CrossedSymbol sigma = CrossedSymbol::identity(group, stratum_grid, 1);
  for (long long k = -a.shell; k <= a.shell; ++k) {
    if (k == 0) continue;
    const double c = a.amplitude * std::pow(1.0 + std::abs(static_cast<double>(k)), -a.power);
    sigma = sigma + CrossedSymbol::delta(group, stratum_grid, group->element({k}), [c](const GridNode& n) {
              Eigen::MatrixXcd m(1, 1);
              m(0, 0) = c * std::polar(1.0, n.base[2]);
              return m;
            });
  }
  return sigma;
}

namespace {

std::string error_name(const std::exception& e) {
  const std::string w = e.what();
  const auto colon = w.find(':');
  return colon == std::string::npos ? "Error" : w.substr(0, colon);
}

void record_error(SideResult& side, const std::exception& e) {
  side.status = error_name(e);
  side.message = e.what();
  if (side.status == "NotElliptic") side.status = "not-elliptic";
}

void run_conditions(const Scenario& s, const RunOptions& opt, VerificationResult& r) {
  if (s.group->rank() == 0) return;
  r.conditions.checked = true;
  r.conditions.growth_exponent = growth_check(*s.group, 64).exponent;
  const DiophantineFit fit = diophantine_check(*s.group, opt.diophantine_range, 16);
  r.conditions.diophantine_violation = fit.violation;
  r.conditions.diophantine_exponent = fit.exponent;
  r.conditions.diophantine_constant = fit.constant;
  r.conditions.method = fit.method;
  if (fit.violation) {
    r.warnings.push_back("Diophantine condition violated (no power <= " + std::to_string(fit.max_tested_power) +
                         " bounds the displacement envelope); proceeding");
  }
}

void run_analytic(const Scenario& s, const std::vector<int>& truncations, int resolution,
                  VerificationResult& r) {
  try {
    IndexEstimate est;
    switch (s.kind) {
      case ScenarioKind::Operator: est = estimate_index(s.spec, truncations); break;
      case ScenarioKind::Toeplitz: {
        const CrossedSymbol sigma = toeplitz_symbol(s, build_base_grid(s.manifold, resolution));
        est = estimate_index([&](int n) { return toeplitz(sigma, n); }, truncations);
        break;
      }
      case ScenarioKind::Projection: est = estimate_index(twisted_dirac_spec(s.group), truncations); break;
      case ScenarioKind::ModelEuler: est = model_euler_index(s.hermite_size); break;
      case ScenarioKind::Audit:
        r.analytic_side.message = "topological audit only";
        return;
    }
    r.analytic_side.status = "ok";
    r.analytic_index = est.index;
    r.analytic = std::move(est);
  } catch (const NoPlateau& e) {
    r.analytic_side.status = "no-plateau";
    r.analytic_side.message = e.what();
    r.analytic = e.diagnostics();
  } catch (const Error& e) {
    record_error(r.analytic_side, e);
  }
}

void run_topological(const Scenario& s, int resolution, long long shell_max, double tol,
                     VerificationResult& r) {
  FormulaOptions fo;
  fo.tolerance = tol;
  try {
    IndexReport rep;
    switch (s.kind) {
      case ScenarioKind::Operator: {
        const CrossedSymbol sigma = symbol_of_spec(s.spec, build_cosphere_grid(s.manifold, resolution));
        rep = evaluate_fixedp(sigma, shell_max, fo);
        break;
      }
      case ScenarioKind::Toeplitz:
        rep = evaluate_local_odd(toeplitz_symbol(s, build_base_grid(s.manifold, resolution)), shell_max, fo);
        break;
      case ScenarioKind::Projection:
        rep = evaluate_dirac_even(bott_symbol(s.group, build_base_grid(s.manifold, resolution)), shell_max, fo);
        break;
      case ScenarioKind::ModelEuler:
        r.topological_side.message = "non-compact model; no index formula";
        return;
      case ScenarioKind::Audit:
        rep = evaluate_fixedp(audit_symbol(s.group, build_polar_stratum_grid(resolution), s.audit), shell_max, fo);
        break;
    }
    r.topological_side.status = "ok";
    r.topological_raw = rep.total;
    r.topological_rounded = rep.nearest;
    r.decay_exponent = rep.decay_exponent;
    for (const auto& n : rep.notes) r.warnings.push_back(n);
    r.topological = std::move(rep);
  } catch (const Error& e) {
    record_error(r.topological_side, e);
  }
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void judge(const Scenario& s, VerificationResult& r) {
  const std::string& a = r.analytic_side.status;
  const std::string& t = r.topological_side.status;
  const bool a_ok = a == "ok", t_ok = t == "ok";
  const bool a_na = a == "n/a", t_na = t == "n/a";
  const bool integral = t_ok && r.topological &&
                        r.topological->distance_to_integer <= s.tolerances.integer;
  if (a_ok && t_ok) {
    r.agree = integral && *r.analytic_index == *r.topological_rounded;
  } else if (a_ok && t_na) {
    r.agree = true;
  } else if (a_na && t_ok) {
    r.agree = true;
  } else {
    // both sides reject the operator, consistently with the ellipticity dichotomy
    r.agree = (a == "no-plateau" || a_na) && (t == "not-elliptic" || t_na) && !(a_na && t_na);
  }
  if (!r.agree) {
    if (a_ok && t_ok && !integral) {
      r.failures.push_back("topological total is " + fmt_double(r.topological->distance_to_integer) +
                           " away from an integer");
    } else {
      r.failures.push_back("sides disagree: analytic " + a + ", topological " + t);
    }
  }

  const Expectation& e = s.expected;
  if (e.elliptic) {
    if (!a_ok && !a_na) r.failures.push_back("analytic side: " + r.analytic_side.message);
    if (!t_ok && !t_na) r.failures.push_back("topological side: " + r.topological_side.message);
  } else {
    if (!a_na && !(a == "no-plateau" && r.analytic && r.analytic->gap_closing)) {
      r.failures.push_back("expected NoPlateau with a closing gap, analytic side " + a);
    }
    if (!t_na && t != "not-elliptic") r.failures.push_back("expected NotElliptic, topological side " + t);
  }
  if (e.index) {
    if (a_ok && *r.analytic_index != *e.index) {
      r.failures.push_back("analytic index " + std::to_string(*r.analytic_index) + ", expected " + std::to_string(*e.index));
    }
    if (t_ok && *r.topological_rounded != *e.index) {
      r.failures.push_back("topological index " + std::to_string(*r.topological_rounded) + ", expected " +
                           std::to_string(*e.index));
    }
  }
  if (e.decay_max && t_ok && !(r.decay_exponent <= *e.decay_max)) {
    r.failures.push_back("decay exponent " + fmt_double(r.decay_exponent) + " above " + fmt_double(*e.decay_max));
  }
  if (e.decay_min && t_ok && !(r.decay_exponent >= *e.decay_min)) {
    r.failures.push_back("decay exponent " + fmt_double(r.decay_exponent) + " below " + fmt_double(*e.decay_min));
  }
  r.passed = r.agree && r.failures.empty();
}

}  // namespace

VerificationResult run_scenario(const Scenario& s, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  s.validate();
  VerificationResult r;
  r.name = s.name;
  r.kind = s.kind;
  const std::vector<int> truncations = opt.truncations ? *opt.truncations : s.truncations;
  const int resolution = opt.resolution ? *opt.resolution : s.resolution;
  const long long shell_max = opt.shell_max ? *opt.shell_max : s.shell_max;
  const double tol = opt.tolerance ? *opt.tolerance : s.tolerances.inversion;
  try {
    run_conditions(s, opt, r);
  } catch (const Error& e) {
    r.warnings.push_back(std::string("condition check failed: ") + e.what());
  }
  run_analytic(s, truncations, resolution, r);
  run_topological(s, resolution, shell_max, tol, r);
  judge(s, r);
  if (opt.timing) {
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

}  // namespace shiftindex
