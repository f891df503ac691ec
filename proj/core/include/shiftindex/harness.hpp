#pragma once

#include <string>
#include <vector>

#include "shiftindex/scenario.hpp"

namespace shiftindex {

/// One seeded property measurement; `value` is the worst case over the samples.
struct InvariantCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  int samples = 0;
};

/// Random band-limited symbols on the torus cosphere under a translation
/// group: associativity, unit, inverse residual, Leibniz rule and d^2 = 0.
std::vector<InvariantCheck> algebra_properties(unsigned long long seed, int samples);
/// Td = A-hat^2 on random roots and on sampled strata forms, and the
/// lambda_{-1} denominator against the Pfaffian on doubled angle lists.
std::vector<InvariantCheck> denominator_properties(unsigned long long seed, int samples);

struct SuiteReport {
  std::string suite;
  unsigned long long seed = 0;
  std::vector<VerificationResult> results;  ///< ordered by scenario name
  std::vector<InvariantCheck> invariants;

  bool all_passed() const;
};

/// Runs every scenario plus `property_samples` draws of each property check.
SuiteReport verify_suite(const Suite& suite, const RunOptions& opt = {}, int property_samples = 100);

enum class ReportFormat { Json, Csv };

std::string emit_json(const SuiteReport& report);
std::string emit_csv(const SuiteReport& report);
std::string emit(const SuiteReport& report, ReportFormat format);
/// Writes `<dir>/<suite>.<ext>` and returns the path.
std::string write_report(const SuiteReport& report, ReportFormat format, const std::string& dir);

/// Process exit status: 0 iff every scenario passed and every invariant held.
int exit_status(const SuiteReport& report);

}  // namespace shiftindex
