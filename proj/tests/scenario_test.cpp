// Copyright 2026 The modalhist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

#include "modalhist/emit.hpp"
#include "modalhist/scenario.hpp"

using namespace modalhist;
using namespace modalhist::scenario;

namespace {

Json load_fixture(const std::string& name) {
  std::ifstream in(std::string(MODALHIST_SCENARIO_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  return Json::parse(in);
}

ErrorKind kind_of(const Json& doc, const RunOptions& opt = {}) {
  try {
    run_scenario(doc, opt);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

RunOptions with_tol(double tol) {
  RunOptions o;
  o.tolerance = tol;
  return o;
}

double table_total(const Json& r) {
  double s = 0.0;
  for (const auto& row : r["table"]["rows"]) s += row.back().get<double>();
  return s;
}

const char* const kFixtures[] = {"bell.json",        "single-time.json", "measurement-chain.json", "kent.json",
                                 "larmor.json",      "branch-dependent.json", "lattice-2x2.json"};

}  // namespace

TEST(Scenario, FixturesProduceValidResults) {
  for (const char* f : kFixtures) {
    const Json r = run_scenario(load_fixture(f));
    EXPECT_TRUE(validate_result(r).empty()) << f;
    // Round trip through the emitted text.
    const Json back = Json::parse(emit(r, OutputFormat::kJson));
    EXPECT_TRUE(validate_result(back).empty()) << f;
    EXPECT_EQ(back["kind"], r["kind"]);
    EXPECT_EQ(back["table"]["rows"].size(), r["table"]["rows"].size());
  }
}

TEST(Scenario, EmitIsDeterministic) {
  for (const char* f : kFixtures) {
    const std::string a = emit(run_scenario(load_fixture(f)), OutputFormat::kJson);
    const std::string b = emit(run_scenario(load_fixture(f)), OutputFormat::kJson);
    EXPECT_EQ(a, b) << f;
  }
}

TEST(Scenario, MeasurementChainIsConsistentAndNormalized) {
  const Json r = run_scenario(load_fixture("measurement-chain.json"), with_tol(1e-10));
  EXPECT_EQ(r["summary"]["verdict"], "consistent");
  EXPECT_NEAR(table_total(r), 1.0, 1e-10);
  for (const auto& row : r["table"]["rows"]) EXPECT_NEAR(row[2].get<double>(), 0.25, 1e-12);
}

TEST(Scenario, KentIsInconsistent) {
  const Json r = run_scenario(load_fixture("kent.json"));
  EXPECT_EQ(r["summary"]["verdict"], "inconsistent");
  EXPECT_NEAR(r["summary"]["max_offdiagonal"].get<double>(), 0.21650635094610965, 1e-12);
}

TEST(Scenario, KentVariantsViaBuilder) {
  Json doc = load_fixture("kent.json");
  doc["builder"]["variant"] = "dilated";
  EXPECT_EQ(run_scenario(doc)["summary"]["verdict"], "consistent");
  doc["builder"]["variant"] = "closed_commuting";
  EXPECT_EQ(run_scenario(doc)["summary"]["verdict"], "consistent");
  doc["builder"]["variant"] = "warped";
  EXPECT_EQ(kind_of(doc), ErrorKind::kSchema);
}

TEST(Scenario, TolFlagOverridesFile) {
  const Json doc = load_fixture("kent.json");
  const Json r = run_scenario(doc, with_tol(0.5));
  EXPECT_EQ(r["tolerance"], 0.5);
  EXPECT_EQ(r["summary"]["verdict"], "consistent");
}

TEST(Scenario, BellMergesDegenerateWeights) {
  const Json r = run_scenario(load_fixture("bell.json"));
  EXPECT_EQ(r["summary"]["merge_groups"].size(), 1u);
  EXPECT_EQ(r["summary"]["merge_groups"][0].size(), 2u);
  EXPECT_NEAR(r["summary"]["weights"][0].get<double>(), 0.5, 1e-12);
}

TEST(Scenario, BranchContrast) {
  const Json r = run_scenario(load_fixture("branch-dependent.json"));
  const auto& s = r["summary"];
  EXPECT_EQ(s["leaf_count"], 8u);
  EXPECT_EQ(s["branch_family"]["verdict"], "consistent");
  EXPECT_NEAR(s["global_family"]["max_offdiagonal"].get<double>(), 0.06221429919510912, 1e-12);
  EXPECT_NEAR(table_total(r), 1.0, 1e-10);
}

TEST(Scenario, LatticeMatchesFrozenDistribution) {
  const Json r = run_scenario(load_fixture("lattice-2x2.json"));
  const auto& rows = r["table"]["rows"];
  ASSERT_EQ(rows.size(), 16u);
  EXPECT_NEAR(rows[0].back().get<double>(), 0.37260411681539413, 1e-12);
  EXPECT_NEAR(rows[13].back().get<double>(), 0.1262062879256618, 1e-12);
  EXPECT_EQ(r["summary"]["foliation_invariance"]["verdict"], "invariant");
  EXPECT_EQ(r["summary"]["foliation_invariance"]["orderings"], 4u);
}

TEST(Scenario, HamiltonianTimesMatchExplicitUnitaries) {
  Json doc = load_fixture("larmor.json");
  const Json via_h = run_scenario(doc);
  // sigma_x generator: exp(-i t X) = cos t I - i sin t X
  for (auto& entry : doc["times"]) {
    const double t = entry["time"];
    entry["unitary"] = Json::array({Json::array({Json::array({std::cos(t), 0.0}), Json::array({0.0, -std::sin(t)})}),
                                    Json::array({Json::array({0.0, -std::sin(t)}), Json::array({std::cos(t), 0.0})})});
  }
  doc.erase("hamiltonian");
  const Json via_u = run_scenario(doc);
  const auto& a = via_h["table"]["rows"];
  const auto& b = via_u["table"]["rows"];
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].back().get<double>(), b[i].back().get<double>(), 1e-12);
}

TEST(Scenario, CsvHasOneRowPerOutcome) {
  const Json r = run_scenario(load_fixture("measurement-chain.json"));
  const std::string csv = emit(r, OutputFormat::kCsv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t0,t1,probability");
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 4u);
}

TEST(Scenario, SchemaErrors) {
  EXPECT_EQ(kind_of(Json::array()), ErrorKind::kSchema);
  EXPECT_EQ(kind_of(Json{{"kind", "teleport"}}), ErrorKind::kSchema);
  EXPECT_EQ(kind_of(Json{{"kind", "decompose"}, {"cut", {0}}}), ErrorKind::kSchema);
  Json doc = load_fixture("bell.json");
  doc["state"]["amplitudes"][0] = 0.7;  // not a [re, im] pair
  EXPECT_EQ(kind_of(doc), ErrorKind::kSchema);
  doc = load_fixture("bell.json");
  doc["tolerance"] = -1.0;
  EXPECT_EQ(kind_of(doc), ErrorKind::kSchema);
  doc = load_fixture("lattice-2x2.json");
  doc["lattice"]["local_unitary"][1].erase(0);  // ragged
  EXPECT_EQ(kind_of(doc), ErrorKind::kSchema);
}

TEST(Scenario, ModuleErrorsPassThrough) {
  Json doc = load_fixture("bell.json");
  doc["state"]["dims"] = Json::array({2, 3});
  EXPECT_EQ(kind_of(doc), ErrorKind::kShape);
  RunOptions small;
  small.policy.max_dim = 2;
  EXPECT_EQ(kind_of(load_fixture("bell.json"), small), ErrorKind::kCapacity);
  doc = load_fixture("lattice-2x2.json");
  doc["lattice"]["width"] = 3;
  doc["lattice"].erase("initial_sites");
  doc["lattice"]["routes"] = Json::array({Json{{"x", 0}, {"t", 0}, {"target_x", 2}}});
  EXPECT_EQ(kind_of(doc), ErrorKind::kCausality);
}

TEST(Scenario, ValidateResultFlagsProblems) {
  Json r = run_scenario(load_fixture("measurement-chain.json"));
  ASSERT_TRUE(validate_result(r).empty());
  Json broken = r;
  broken.erase("summary");
  EXPECT_FALSE(validate_result(broken).empty());
  broken = r;
  broken["table"]["rows"][0].push_back(1);
  EXPECT_FALSE(validate_result(broken).empty());
  broken = r;
  broken["table"]["rows"][0][2] = 1.5;
  EXPECT_FALSE(validate_result(broken).empty());
  broken = r;
  broken["schema_version"] = 99;
  EXPECT_FALSE(validate_result(broken).empty());
}

TEST(Emit, FloatFormatting) {
  EXPECT_EQ(scenario::detail::format_double(-0.0), "0");
  EXPECT_EQ(scenario::detail::format_double(0.1), "0.1");
  EXPECT_EQ(scenario::detail::format_double(1.0 / 3.0), "0.333333333333333");
  EXPECT_EQ(scenario::detail::format_double(1e-20), "1e-20");
  const Json j = Json::parse(R"({"b": 1.0, "a": [-0.0, 2]})");
  EXPECT_EQ(emit(j, OutputFormat::kJson), "{\n  \"a\": [0, 2],\n  \"b\": 1\n}\n");
}
