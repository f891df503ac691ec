#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shiftindex/harness.hpp"

using namespace shiftindex;

namespace {

const char* kSmallSuite = R"({
  "suite": "small",
  "defaults": {"manifold": "circle",
               "group": {"law": "free", "generators": [{"translation": ["golden"]}]},
               "resolution": 64, "shell_max": 8, "truncations": [32, 64, 128]},
  "scenarios": [
    {"name": "toeplitz-winding+1", "kind": "toeplitz",
     "terms": [{"g": [0], "coefficient": {"modes": [{"k": [1], "c": 1.0}]}},
               {"g": [1], "coefficient": 0.2}],
     "expected": {"index": -1}},
    {"name": "hardy-winding-1", "kind": "operator",
     "terms": [{"g": [0], "monomials": [{"coefficient": {"modes": [{"k": [-1], "c": 1.0}]}, "multiplier": "hardy+"},
                                        {"coefficient": 1.0, "multiplier": "hardy-"}]},
               {"g": [1], "monomials": [{"coefficient": 0.1, "multiplier": "hardy+"}]}],
     "expected": {"index": 1}},
    {"name": "model", "kind": "model-euler", "hermite_size": 16, "expected": {"index": 1}},
    {"name": "sine", "kind": "operator",
     "terms": [{"g": [0], "monomials": [{"coefficient": {"modes": [{"k": [1], "c": [0, -0.5]}, {"k": [-1], "c": [0, 0.5]}]},
                                         "multiplier": "identity"}]}],
     "expected": {"elliptic": false}}
  ]
})";

std::string with_replacement(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::string parse_message(const std::string& text) {
  try {
    parse_suite(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("suite parsing") {
  const Suite s = parse_suite(kSmallSuite);
  CHECK(s.name == "small");
  REQUIRE(s.scenarios.size() == 4);
  CHECK(s.scenarios[0].kind == ScenarioKind::Toeplitz);
  CHECK(s.scenarios[0].resolution == 64);
  CHECK(s.scenarios[0].truncations == std::vector<int>{32, 64, 128});
  CHECK(s.scenarios[1].spec.terms.size() == 2);
  CHECK(s.scenarios[2].hermite_size == 16);
  CHECK_FALSE(s.scenarios[3].expected.elliptic);
  CHECK(s.scenarios[0].group->generators()[0].translation[0].turns() ==
        doctest::Approx(RotationNumber::golden().turns()));
}

TEST_CASE("rotation number spellings") {
  auto turns = [](const std::string& spelling) {
    const std::string text = with_replacement(kSmallSuite, "\"golden\"", spelling);
    return parse_suite(text).scenarios[0].group->generators()[0].translation[0];
  };
  CHECK(turns("\"1/3\"").turns() == doctest::Approx(1.0 / 3.0));
  CHECK(turns("0.25").turns() == doctest::Approx(0.25));
  CHECK(turns("\"liouville:3\"").exact_value().has_value());
  CHECK(turns("\"liouville\"").turns() == doctest::Approx(RotationNumber::liouville(6).turns()));
}

TEST_CASE("parse errors name the offending key") {
  CHECK(parse_message(with_replacement(kSmallSuite, "\"hermite_size\"", "\"hermite_sise\"")).find(
            "scenarios[2].hermite_sise") != std::string::npos);
  CHECK(parse_message(with_replacement(kSmallSuite, "\"hardy-\"", "\"hardy\"")).find(
            "scenarios[1].terms[0].monomials[1].multiplier") != std::string::npos);
  CHECK(parse_message(with_replacement(kSmallSuite, "[32, 64, 128]", "\"many\"")).find("truncations") !=
        std::string::npos);
  CHECK(parse_message(with_replacement(kSmallSuite, "\"golden\"", "\"1/0\"")).find("translation") !=
        std::string::npos);
  CHECK(parse_message(with_replacement(kSmallSuite, "\"model\"", "\"sine\"")).find("duplicate") !=
        std::string::npos);
  const std::string syntax = parse_message("{\n  \"suite\": \"x\",\n  \"scenarios\": [\n}");
  CHECK(syntax.find("line 4") != std::string::npos);
  CHECK_THROWS_AS(load_suite("/nonexistent/suite.json"), ParseError);
}

TEST_CASE("invalid scenarios name the field") {
  // validation failures surface as parse errors carrying the scenario path
  const std::string m = parse_message(with_replacement(kSmallSuite, "[32, 64, 128]", "[32, 64]"));
  CHECK(m.find("scenarios[0]") != std::string::npos);
  CHECK(m.find("ScenarioInvalid: truncations") != std::string::npos);
  auto message = parse_message;
  CHECK(message(with_replacement(kSmallSuite, "\"resolution\": 64", "\"resolution\": 4")).find("resolution") !=
        std::string::npos);
  CHECK(message(with_replacement(kSmallSuite, "\"hermite_size\": 16", "\"hermite_size\": 2")).find(
            "hermite_size") != std::string::npos);
}

TEST_CASE("verification outcomes and report formats") {
  RunOptions opt;
  const SuiteReport report = verify_suite(parse_suite(kSmallSuite), opt, 2);
  REQUIRE(report.results.size() == 4);
  for (std::size_t i = 1; i < report.results.size(); ++i) {
    CHECK(report.results[i - 1].name < report.results[i].name);
  }
  for (const auto& r : report.results) {
    INFO(r.name);
    CHECK(r.passed);
    CHECK(r.agree);
    CHECK(r.runtime_ms == 0.0);
    if (r.name == "model") {
      CHECK(r.topological_side.status == "n/a");
      CHECK(r.analytic_index == 1);
    }
    if (r.name == "sine") {
      CHECK(r.analytic_side.status == "no-plateau");
      CHECK(r.topological_side.status == "not-elliptic");
    }
    if (r.name == "toeplitz-winding+1") {
      CHECK(r.analytic_index == -1);
      CHECK(r.topological_rounded == -1);
      CHECK(r.conditions.checked);
      CHECK_FALSE(r.conditions.diophantine_violation);
    }
    if (r.name == "hardy-winding-1") CHECK(r.topological_rounded == 1);
  }
  CHECK(report.all_passed());
  CHECK(exit_status(report) == 0);

  const auto doc = nlohmann::json::parse(emit_json(report));
  CHECK(doc["suite"] == "small");
  CHECK(doc["scenarios"].size() == 4);
  CHECK(doc["invariants"].size() > 0);

  std::istringstream csv(emit_csv(report));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "name,analytic,topological_raw,topological_rounded,agree,decay_exponent,runtime_ms");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
    if (line.rfind("model,", 0) == 0) CHECK(line.find(",n/a,n/a,true,") != std::string::npos);
  }
  CHECK(rows == 4);
}

TEST_CASE("reports are byte-identical across runs") {
  const Suite suite = parse_suite(kSmallSuite);
  const SuiteReport a = verify_suite(suite, {}, 3);
  const SuiteReport b = verify_suite(suite, {}, 3);
  CHECK(emit_json(a) == emit_json(b));
  CHECK(emit_csv(a) == emit_csv(b));
  const auto dir = std::filesystem::temp_directory_path() / "shiftindex_report_test";
  std::filesystem::remove_all(dir);
  const std::string path = write_report(a, ReportFormat::Csv, dir.string());
  CHECK(path == (dir / "small.csv").string());
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == emit_csv(a));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a wrong expectation fails the suite") {
  const std::string text = with_replacement(kSmallSuite, "\"expected\": {\"index\": -1}", "\"expected\": {\"index\": 0}");
  const SuiteReport report = verify_suite(parse_suite(text), {}, 0);
  CHECK_FALSE(report.all_passed());
  CHECK(exit_status(report) != 0);
  const auto& r = report.results.back();
  CHECK(r.name == "toeplitz-winding+1");
  CHECK(r.agree);
  CHECK_FALSE(r.passed);
  REQUIRE_FALSE(r.failures.empty());
  CHECK(r.failures.front().find("expected 0") != std::string::npos);
}

TEST_CASE("run options override the scenario file") {
  Scenario s = parse_suite(kSmallSuite).scenarios[0];
  RunOptions opt;
  opt.truncations = std::vector<int>{16, 32, 64};
  const auto r = run_scenario(s, opt);
  REQUIRE(r.analytic);
  CHECK(r.analytic->readings.front().truncation == 16);
  opt.timing = true;
  CHECK(run_scenario(s, opt).runtime_ms > 0.0);
}

TEST_CASE("bundled suites parse") {
  for (const char* name : {"classical", "rotation", "dichotomy", "even", "model", "audit"}) {
    INFO(name);
    const Suite s = load_suite(std::string(SHIFTINDEX_SUITE_DIR) + "/" + name + ".json");
    CHECK_FALSE(s.scenarios.empty());
  }
  const Scenario golden = load_scenario(std::string(SHIFTINDEX_SUITE_DIR) + "/audit.json", "audit-golden");
  CHECK(golden.kind == ScenarioKind::Audit);
  CHECK_THROWS_AS(load_scenario(std::string(SHIFTINDEX_SUITE_DIR) + "/audit.json"), ParseError);
}

TEST_CASE("property batteries hold") {
  for (const auto& c : algebra_properties(7, 3)) {
    INFO(c.name);
    CHECK(c.passed);
    CHECK(c.samples == 3);
  }
  for (const auto& c : denominator_properties(7, 10)) {
    INFO(c.name);
    CHECK(c.passed);
  }
}
