#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftindex/analytic_index.hpp"
#include "shiftindex/group_action.hpp"
#include "shiftindex/operator_spec.hpp"
#include "shiftindex/topological_index.hpp"

namespace shiftindex {

enum class ScenarioKind {
  Operator,    ///< spec assembled in Fourier modes; fixed-point formula on S*M
  Toeplitz,    ///< degree-0 symbol on the base circle; Hardy compression; odd formula
  Projection,  ///< Bott projection on T^2; twisted Dirac; even formula
  ModelEuler,  ///< x + d/dx on R; topological side N/A
  Audit        ///< shift symbol on the polar strata of S^2 x S^1; topological side only
};

std::string_view kind_name(ScenarioKind kind);

/// g-coefficient of a symbol given by a trigonometric coefficient.
struct SymbolTerm {
  std::vector<long long> g;
  Coefficient coefficient;
};

/// sigma = delta_e + sum_{1 <= |k| <= K} amplitude (1 + |k|)^{-power} delta_{g^k} e^{i psi}.
struct AuditSymbol {
  int shell = 64;
  double amplitude = 0.2;
  double power = 6.0;
};

struct Tolerances {
  double integer = 1e-6;     ///< |raw - nearest| accepted on the topological side
  double inversion = 1e-10;  ///< symbol inversion residual
};

struct Expectation {
  std::optional<long long> index;
  bool elliptic = true;
  std::optional<double> decay_max;  ///< decay exponent must be <= this
  std::optional<double> decay_min;  ///< decay exponent must be >= this
  std::string note;                 ///< provenance of the expected value
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::Operator;
  ManifoldModel manifold;
  GroupPtr group;
  OperatorSpec spec;                 ///< Operator
  std::vector<SymbolTerm> symbol;    ///< Toeplitz
  AuditSymbol audit;                 ///< Audit
  int hermite_size = 64;             ///< ModelEuler
  std::vector<int> truncations;
  int resolution = 128;
  long long shell_max = 32;
  Tolerances tolerances;
  Expectation expected;

  /// Throws ScenarioInvalid naming the field.
  void validate() const;
};

struct Suite {
  std::string name;
  std::vector<Scenario> scenarios;
};

/// Parses a suite document. Throws ParseError naming the offending key and
/// position (line of the JSON syntax error, or the path of the bad field).
Suite parse_suite(const std::string& text);
Suite load_suite(const std::string& path);
/// A single-scenario document, or a suite with one scenario selected by name
/// (the only scenario when `name` is empty).
Scenario load_scenario(const std::string& path, const std::string& name = "");

/// The Toeplitz symbol sum_g delta_g (x) c_g on a base-circle grid.
CrossedSymbol toeplitz_symbol(const Scenario& s, GridPtr base_grid);
/// The audit symbol on the polar stratum carrier.
CrossedSymbol audit_symbol(GroupPtr group, GridPtr stratum_grid, const AuditSymbol& a);

/// Overrides applied on top of the scenario file.
struct RunOptions {
  std::optional<int> resolution;
  std::optional<std::vector<int>> truncations;
  std::optional<long long> shell_max;
  std::optional<double> tolerance;
  unsigned long long seed = 0x5eed;
  bool timing = false;
  long long diophantine_range = 1LL << 26;
};

struct ConditionSummary {
  bool checked = false;
  double growth_exponent = 0.0;
  bool diophantine_violation = false;
  int diophantine_exponent = 0;
  double diophantine_constant = 0.0;
  std::string method;
};

/// Outcome of one side of a verification.
struct SideResult {
  std::string status = "n/a";  ///< "ok", "n/a", "no-plateau", "not-elliptic", or an error name
  std::string message;
};

struct VerificationResult {
  std::string name;
  ScenarioKind kind = ScenarioKind::Operator;
  SideResult analytic_side;
  SideResult topological_side;
  std::optional<IndexEstimate> analytic;
  std::optional<IndexReport> topological;
  std::optional<long long> analytic_index;
  std::optional<cplx> topological_raw;
  std::optional<long long> topological_rounded;
  /// Both sides report the same integer, or both reject a non-elliptic scenario.
  bool agree = false;
  bool passed = false;
  double decay_exponent = 0.0;
  double runtime_ms = 0.0;
  ConditionSummary conditions;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
};

/// Runs condition checks, the analytic side and the topological side.
/// Disagreements are recorded, never thrown.
VerificationResult run_scenario(const Scenario& s, const RunOptions& opt = {});

}  // namespace shiftindex
