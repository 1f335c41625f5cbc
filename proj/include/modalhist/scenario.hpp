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

#pragma once

// Scenario documents: schema checks, dispatch to the computation modules and
// the result document. Pure in-memory transformation; reading and writing
// files is left to the caller.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "modalhist/branch_modal.hpp"
#include "modalhist/causal_lattice.hpp"
#include "modalhist/decoherence_models.hpp"
#include "modalhist/error.hpp"
#include "modalhist/histories.hpp"
#include "modalhist/modal.hpp"
#include "modalhist/numeric_policy.hpp"
#include "modalhist/spectral.hpp"
#include "modalhist/state.hpp"

namespace modalhist::scenario {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr double kDefaultTolerance = 1e-10;

struct RunOptions {
  std::optional<double> tolerance;  // overrides the scenario's value
  NumericPolicy policy;
};

namespace detail {

[[noreturn]] inline void schema(const std::string& where, const std::string& what) {
  fail(ErrorKind::kSchema, where + ": " + what);
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema(where, std::string("missing required field \"") + key + "\"");
  return *it;
}

inline std::string child(const std::string& where, const std::string& key) { return where + "." + key; }
inline std::string child(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) schema(where, "expected a number");
  return j.get<double>();
}

inline std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    schema(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline bool boolean(const Json& j, const std::string& where) {
  if (!j.is_boolean()) schema(where, "expected true or false");
  return j.get<bool>();
}

inline const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) schema(where, "expected an array");
  return j;
}

inline Complex complex_number(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    schema(where, "expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ComplexVector vector(const Json& j, const std::string& where) {
  array(j, where);
  if (j.empty()) schema(where, "empty vector");
  ComplexVector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(complex_number(j[i], child(where, i)));
  return v;
}

inline ComplexMatrix matrix(const Json& j, const std::string& where) {
  array(j, where);
  if (j.empty()) schema(where, "empty matrix");
  std::vector<Complex> entries;
  const std::size_t cols = array(j[0], child(where, std::size_t{0})).size();
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Json& row = array(j[r], child(where, r));
    if (row.size() != cols) schema(child(where, r), "ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c) entries.push_back(complex_number(row[c], child(child(where, r), c)));
  }
  if (cols == 0) schema(where, "empty matrix row");
  return ComplexMatrix(j.size(), cols, std::move(entries));
}

inline std::vector<ComplexMatrix> matrices(const Json& j, const std::string& where) {
  array(j, where);
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(matrix(j[i], child(where, i)));
  return out;
}

inline std::vector<std::size_t> counts(const Json& j, const std::string& where) {
  array(j, where);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(count(j[i], child(where, i)));
  return out;
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json tuple_json(const OutcomeTuple& t) {
  Json a = Json::array();
  for (std::size_t i : t) a.push_back(i);
  return a;
}

inline std::string path_string(const BranchPath& p) {
  std::string s;
  for (std::size_t k = 0; k < p.size(); ++k) s += (k ? "." : "") + std::to_string(p[k]);
  return s.empty() ? "root" : s;
}

inline Json table(std::vector<std::string> columns, Json rows) {
  return Json{{"columns", std::move(columns)}, {"rows", std::move(rows)}};
}

inline PureState explicit_state(const Json& j, const std::string& where, const NumericPolicy& policy) {
  const auto dims = counts(field(j, "dims", where), child(where, "dims"));
  const auto amps = vector(field(j, "amplitudes", where), child(where, "amplitudes"));
  if (j.contains("normalize") && boolean(j["normalize"], child(where, "normalize")))
    return PureState::normalized(dims, amps, policy);
  return PureState(dims, amps, policy);
}

inline RecordingScenario recording_builder(const Json& b, const std::string& where, const NumericPolicy& policy) {
  const std::string type = field(b, "type", where).get<std::string>();
  const std::size_t d = count(field(b, "system_dim", where), child(where, "system_dim"));
  const ComplexVector init = vector(field(b, "initial_system", where), child(where, "initial_system"));
  if (type == "measurement_chain")
    return build_measurement_chain(d, matrices(field(b, "pointer_bases", where), child(where, "pointer_bases")), init,
                                   policy);
  if (type == "branch_dependent_chain") {
    std::vector<ComplexMatrix> trailing;
    if (b.contains("trailing_bases")) trailing = matrices(b["trailing_bases"], child(where, "trailing_bases"));
    return build_branch_dependent_chain(
        d, matrix(field(b, "first_basis", where), child(where, "first_basis")),
        matrices(field(b, "per_branch_bases", where), child(where, "per_branch_bases")), init, trailing, policy);
  }
  schema(child(where, "type"), "unknown recording builder \"" + type + "\"");
}

inline bool is_recording_builder(const Json& doc) {
  if (!doc.contains("builder") || !doc["builder"].is_object() || !doc["builder"].contains("type")) return false;
  const Json& t = doc["builder"]["type"];
  return t.is_string() && (t == "measurement_chain" || t == "branch_dependent_chain");
}

// {"factors": [...], "basis": M} or {"factors": [...], "projectors": [M, ...]}
inline std::pair<FactorSet, std::vector<ComplexMatrix>> local_family(const Json& j, const std::string& where) {
  FactorSet factors = counts(field(j, "factors", where), child(where, "factors"));
  std::vector<ComplexMatrix> projectors;
  if (j.contains("basis")) {
    const ComplexMatrix basis = matrix(j["basis"], child(where, "basis"));
    for (std::size_t c = 0; c < basis.cols(); ++c) projectors.push_back(ComplexMatrix::projector_onto(basis.column(c)));
  } else if (j.contains("projectors")) {
    projectors = matrices(j["projectors"], child(where, "projectors"));
  } else {
    schema(where, "a family needs \"basis\" or \"projectors\"");
  }
  if (projectors.empty()) schema(where, "empty family");
  return {std::move(factors), std::move(projectors)};
}

inline Json consistency_json(const HistoryProbabilityTable& t) {
  Json worst = Json::array();
  if (!t.worst_pair.first.empty()) worst = Json::array({tuple_json(t.worst_pair.first), tuple_json(t.worst_pair.second)});
  return Json{{"max_offdiagonal", t.max_offdiagonal},
              {"normalization_residual", t.normalization_residual},
              {"tolerance", t.tolerance},
              {"verdict", t.consistent ? "consistent" : "inconsistent"},
              {"worst_pair", worst}};
}

inline Json history_rows(const HistoryProbabilityTable& t) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < t.probabilities.size(); ++x) {
    Json row = tuple_json(t.indexer.tuple(x));
    row.push_back(t.probabilities[x]);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::string> tuple_columns(std::size_t n, const std::string& prefix) {
  std::vector<std::string> cols;
  for (std::size_t k = 0; k < n; ++k) cols.push_back(prefix + std::to_string(k));
  cols.push_back("probability");
  return cols;
}

// kinds

inline Json run_decompose(const Json& doc, const NumericPolicy& policy) {
  const PureState psi = explicit_state(field(doc, "state", "scenario"), "scenario.state", policy);
  const FactorSet cut = counts(field(doc, "cut", "scenario"), "scenario.cut");
  const ModalState m = modal_state(psi, cut, policy);
  const SchmidtResult& s = *m.schmidt;
  Json groups = Json::array();
  for (const auto& g : s.merge_groups) groups.push_back(g);
  Json coefficients = Json::array();
  for (const auto& c : s.coefficients) coefficients.push_back(c.real());
  Json rows = Json::array();
  for (std::size_t k = 0; k < m.definite_family.size(); ++k)
    rows.push_back(Json::array({m.definite_family.labels()[k], m.probabilities[k], m.weight_zero[k]}));
  Json summary{{"cut", s.side_a},
               {"rest", s.side_b},
               {"schmidt_rank", s.rank()},
               {"coefficients", coefficients},
               {"weights", s.weights},
               {"merge_groups", groups},
               {"reconstruction_residual", max_abs_diff(s.reconstruct(psi.dims()), psi.amplitudes())}};
  return Json{{"summary", summary}, {"table", table({"projector", "probability", "structural"}, rows)}};
}

inline Json run_single_time(const Json& doc, const NumericPolicy& policy) {
  const PureState psi = explicit_state(field(doc, "state", "scenario"), "scenario.state", policy);
  const Json& fams = array(field(doc, "families", "scenario"), "scenario.families");
  if (fams.empty()) schema("scenario.families", "at least one family required");
  std::vector<std::pair<FactorSet, std::vector<ComplexMatrix>>> families;
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < fams.size(); ++i) {
    families.push_back(local_family(fams[i], child("scenario.families", i)));
    // Validates each family against its own factor space.
    ProjectorFamily(families.back().second, {}, policy);
    sizes.push_back(families.back().second.size());
  }
  const TupleIndexer idx(sizes);
  require(idx.size() <= policy.max_histories, ErrorKind::kCapacity, "too many joint outcomes");
  Json rows = Json::array();
  double total = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const OutcomeTuple o = idx.tuple(k);
    std::vector<LocalProjector> assignment;
    for (std::size_t f = 0; f < families.size(); ++f) assignment.push_back({families[f].first, families[f].second[o[f]]});
    const double p = joint_probability_single_time(psi, assignment, policy);
    total += p;
    Json row = tuple_json(o);
    row.push_back(p);
    rows.push_back(std::move(row));
  }
  return Json{{"summary", Json{{"total", total}, {"normalization_residual", std::abs(total - 1.0)}}},
              {"table", table(tuple_columns(families.size(), "family"), rows)}};
}

inline HistoryFamily history_family_from(const Json& doc, const NumericPolicy& policy) {
  if (is_recording_builder(doc)) return pointer_history_family(recording_builder(doc["builder"], "scenario.builder", policy), policy);
  if (doc.contains("builder")) {
    const Json& b = doc["builder"];
    const std::string type = field(b, "type", "scenario.builder").get<std::string>();
    if (type != "kent") schema("scenario.builder.type", "unknown builder \"" + type + "\"");
    KentParameters params;
    if (b.contains("theta")) params.theta = number(b["theta"], "scenario.builder.theta");
    if (b.contains("t1")) params.t1 = number(b["t1"], "scenario.builder.t1");
    if (b.contains("t2")) params.t2 = number(b["t2"], "scenario.builder.t2");
    const std::string variant = b.contains("variant") ? b["variant"].get<std::string>() : "closed";
    KentVariant v = KentVariant::kClosed;
    if (variant == "closed_commuting") v = KentVariant::kClosedCommuting;
    else if (variant == "dilated") v = KentVariant::kDilated;
    else if (variant != "closed") schema("scenario.builder.variant", "unknown Kent variant \"" + variant + "\"");
    return kent_scenario(v, params, policy);
  }

  const PureState psi = explicit_state(field(doc, "state", "scenario"), "scenario.state", policy);
  std::optional<ComplexMatrix> hamiltonian;
  if (doc.contains("hamiltonian")) hamiltonian = matrix(doc["hamiltonian"], "scenario.hamiltonian");
  const Json& times = array(field(doc, "times", "scenario"), "scenario.times");
  if (times.empty()) schema("scenario.times", "at least one time required");
  std::vector<TimedFamily> timed;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const std::string where = child("scenario.times", k);
    const double t = number(field(times[k], "time", where), child(where, "time"));
    auto [factors, projectors] = local_family(field(times[k], "family", where), child(where, "family"));
    std::vector<ComplexMatrix> embedded;
    for (const auto& p : projectors) embedded.push_back(embed_operator(p, psi.dims(), factors));
    ComplexMatrix u;
    if (times[k].contains("unitary")) u = matrix(times[k]["unitary"], child(where, "unitary"));
    else if (hamiltonian) u = matrix_exponential_unitary(*hamiltonian, t, policy);
    else schema(where, "needs \"unitary\" or a top-level \"hamiltonian\"");
    timed.push_back({t, ProjectorFamily(std::move(embedded), {}, policy), std::move(u)});
  }
  return HistoryFamily(psi, std::move(timed), policy);
}

inline Json run_histories(const Json& doc, double tol, const NumericPolicy& policy) {
  const HistoryFamily hf = history_family_from(doc, policy);
  const HistoryProbabilityTable t = check_consistency(hf, tol, policy);
  Json marginals = Json::array();
  if (hf.time_count() > 1)
    for (std::size_t k = 0; k < hf.time_count(); ++k) marginals.push_back(marginalization_check(t, hf, k, policy));
  Json summary = consistency_json(t);
  summary["history_count"] = t.probabilities.size();
  summary["time_count"] = hf.time_count();
  summary["total"] = t.total();
  summary["marginalization_residuals"] = marginals;
  return Json{{"summary", summary}, {"table", table(tuple_columns(hf.time_count(), "t"), history_rows(t))}};
}

inline Json node_json(const BranchTree& tree, std::size_t idx) {
  const BranchNode& n = tree.nodes[idx];
  Json children = Json::array();
  for (std::size_t c : n.children) children.push_back(node_json(tree, c));
  return Json{{"path", path_string(n.path)},
              {"amplitude", complex_json(n.amplitude)},
              {"probability", n.probability()},
              {"rank", n.system_basis.size()},
              {"children", children}};
}

struct BranchInputs {
  PureState initial;
  std::vector<ComplexMatrix> interactions;
  std::size_t system_factor = 0;
};

inline BranchInputs branch_inputs_from(const Json& doc, const NumericPolicy& policy) {
  BranchInputs in;
  if (is_recording_builder(doc)) {
    const RecordingScenario s = recording_builder(doc["builder"], "scenario.builder", policy);
    in.initial = s.initial_state;
    in.interactions = s.step_unitaries;
    in.system_factor = RecordingScenario::system_factor();
    return in;
  }
  in.initial = explicit_state(field(doc, "state", "scenario"), "scenario.state", policy);
  in.interactions = matrices(field(doc, "interactions", "scenario"), "scenario.interactions");
  if (in.interactions.empty()) schema("scenario.interactions", "at least one interaction required");
  in.system_factor = count(field(doc, "system_factor", "scenario"), "scenario.system_factor");
  return in;
}

inline BranchTree branch_tree_from(const BranchInputs& in, const NumericPolicy& policy) {
  BranchTree tree = make_branch_tree(in.initial, in.system_factor);
  for (const auto& u : in.interactions) tree = branch_decompose(tree, u, policy);
  return tree;
}

inline Json run_branch(const Json& doc, double tol, const NumericPolicy& policy) {
  const BranchInputs in = branch_inputs_from(doc, policy);
  const BranchTree tree = branch_tree_from(in, policy);

  const ReinterferenceReport re = detect_reinterference(tree, tol, policy);
  Json pairs = Json::array();
  for (const auto& [a, b] : re.offending_pairs) pairs.push_back(Json::array({path_string(a), path_string(b)}));
  // Refuses with a consistency-refusal error when the records reinterfere.
  const HistoryFamily branch_family = branch_history_family(tree, tol, policy);
  Json summary{{"depth", tree.depth()},
               {"leaf_count", tree.leaves().size()},
               {"reconstruction_residual", tree.reconstruction_residual},
               {"reinterference", Json{{"max_overlap", re.max_overlap}, {"decoherent", re.decoherent}, {"offending_pairs", pairs}}},
               {"branch_family", consistency_json(check_consistency(branch_family, tol, policy))},
               {"tree", node_json(tree, 0)}};
  const bool compare = !doc.contains("compare_global") || boolean(doc["compare_global"], "scenario.compare_global");
  if (compare)
    summary["global_family"] =
        consistency_json(check_consistency(global_modal_history_family(in.initial, in.interactions, in.system_factor, policy), tol, policy));
  Json rows = Json::array();
  for (const auto& p : branch_properties(tree)) rows.push_back(Json::array({path_string(p.path), p.probability}));
  return Json{{"summary", summary}, {"table", table({"path", "probability"}, rows)}};
}

inline LatticeModel lattice_model_from(const Json& doc, const NumericPolicy& policy) {
  const Json& l = field(doc, "lattice", "scenario");
  const std::size_t width = count(field(l, "width", "scenario.lattice"), "scenario.lattice.width");
  const std::size_t steps = count(field(l, "timesteps", "scenario.lattice"), "scenario.lattice.timesteps");
  const std::size_t local_dim = l.contains("local_dim") ? count(l["local_dim"], "scenario.lattice.local_dim") : 2;
  LatticeDynamics dyn;
  if (l.contains("initial_sites")) dyn.initial_sites = vector(l["initial_sites"], "scenario.lattice.initial_sites");
  if (l.contains("local_unitary")) dyn.local_unitary = matrix(l["local_unitary"], "scenario.lattice.local_unitary");
  if (l.contains("neighbor_gate")) dyn.neighbor_gate = matrix(l["neighbor_gate"], "scenario.lattice.neighbor_gate");
  if (l.contains("routes")) {
    const Json& routes = array(l["routes"], "scenario.lattice.routes");
    for (std::size_t i = 0; i < routes.size(); ++i) {
      const std::string where = child("scenario.lattice.routes", i);
      dyn.routes.push_back({count(field(routes[i], "x", where), child(where, "x")),
                            count(field(routes[i], "t", where), child(where, "t")),
                            count(field(routes[i], "target_x", where), child(where, "target_x"))});
    }
  }
  if (l.contains("erased_records")) {
    const Json& erased = array(l["erased_records"], "scenario.lattice.erased_records");
    for (std::size_t i = 0; i < erased.size(); ++i) {
      const auto xt = counts(erased[i], child("scenario.lattice.erased_records", i));
      if (xt.size() != 2) schema(child("scenario.lattice.erased_records", i), "expected [x, t]");
      dyn.erased_records.emplace_back(xt[0], xt[1]);
    }
  }
  if (l.contains("allow_acausal")) dyn.allow_acausal = boolean(l["allow_acausal"], "scenario.lattice.allow_acausal");

  return build_lattice_model(width, steps, local_dim, dyn, policy);
}

inline Json run_lattice(const Json& doc, double tol, const NumericPolicy& policy) {
  const Json& l = doc["lattice"];
  const std::size_t samples = l.contains("foliation_samples") ? count(l["foliation_samples"], "scenario.lattice.foliation_samples") : 64;
  const std::uint64_t seed = l.contains("seed") ? count(l["seed"], "scenario.lattice.seed") : 0x5eed;
  const LatticeModel m = lattice_model_from(doc, policy);
  const Foliation rest_frame = equal_time_foliation(m);
  const LatticeConsistencyReport c = lattice_consistency_check(m, rest_frame, tol, policy);
  const FoliationInvarianceReport inv = foliation_invariance(m, tol, policy, samples, seed);

  Json points = Json::array();
  for (const auto& p : m.order.points())
    points.push_back(Json{{"x", p.x}, {"t", p.t}, {"factor", p.factor_index}, {"records", p.record_factor_indices}});
  Json consistency = consistency_json(c.table);
  consistency["same_earlier_residual"] = c.same_earlier_residual;
  consistency["distinct_earlier_residual"] = c.distinct_earlier_residual;
  consistency["verdict"] = c.consistent ? "consistent" : "inconsistent";
  Json summary{{"points", points},
               {"microcausality_residual", m.microcausality_residual},
               {"consistency", consistency},
               {"foliation_invariance", Json{{"exhaustive", inv.exhaustive},
                                             {"orderings", inv.orderings.size()},
                                             {"max_distance", inv.max_distance},
                                             {"tolerance", tol},
                                             {"verdict", inv.invariant ? "invariant" : "foliation-dependent"}}}};
  const std::vector<double> dist = lattice_distribution(m, rest_frame, policy);
  const TupleIndexer idx = m.outcome_indexer();
  Json rows = Json::array();
  for (std::size_t k = 0; k < dist.size(); ++k) {
    Json row = tuple_json(idx.tuple(k));
    row.push_back(dist[k]);
    rows.push_back(std::move(row));
  }
  std::vector<std::string> cols;
  for (const auto& p : m.order.points()) cols.push_back("x" + std::to_string(p.x) + "t" + std::to_string(p.t));
  cols.push_back("probability");
  return Json{{"summary", summary}, {"table", table(cols, rows)}};
}

}  // namespace detail

inline const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{"decompose", "single_time", "histories", "branch", "lattice"};
  return kinds;
}

/// Structural checks that need no computation: the document is an object
/// with a known kind and the fields that kind requires.
inline void validate_scenario(const Json& doc) {
  if (!doc.is_object()) detail::schema("scenario", "expected a JSON object");
  const Json& kind = detail::field(doc, "kind", "scenario");
  if (!kind.is_string()) detail::schema("scenario.kind", "expected a string");
  const std::string k = kind.get<std::string>();
  const auto& kinds = scenario_kinds();
  if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) detail::schema("scenario.kind", "unknown kind \"" + k + "\"");
  if (doc.contains("tolerance")) {
    const double tol = detail::number(doc["tolerance"], "scenario.tolerance");
    if (!(tol >= 0.0)) detail::schema("scenario.tolerance", "must be nonnegative");
  }
  if (doc.contains("name") && !doc["name"].is_string()) detail::schema("scenario.name", "expected a string");
  const bool builder = doc.contains("builder");
  if (builder && !doc["builder"].is_object()) detail::schema("scenario.builder", "expected an object");
  if (builder) {
    const Json& type = detail::field(doc["builder"], "type", "scenario.builder");
    if (!type.is_string()) detail::schema("scenario.builder.type", "expected a string");
  }
  if (k == "decompose") {
    detail::field(doc, "state", "scenario");
    detail::field(doc, "cut", "scenario");
  } else if (k == "single_time") {
    detail::field(doc, "state", "scenario");
    detail::field(doc, "families", "scenario");
  } else if (k == "histories") {
    if (!builder) {
      detail::field(doc, "state", "scenario");
      detail::field(doc, "times", "scenario");
    }
  } else if (k == "branch") {
    if (!builder) {
      detail::field(doc, "state", "scenario");
      detail::field(doc, "interactions", "scenario");
      detail::field(doc, "system_factor", "scenario");
    } else if (!detail::is_recording_builder(doc)) {
      detail::schema("scenario.builder.type", "branch scenarios take measurement_chain or branch_dependent_chain");
    }
  } else if (k == "lattice") {
    detail::field(doc, "lattice", "scenario");
  }
}

/// Validates and runs one scenario, returning the result document.
inline Json run_scenario(const Json& doc, const RunOptions& options = {}) {
  validate_scenario(doc);
  const std::string kind = doc["kind"].get<std::string>();
  const double tol = options.tolerance ? *options.tolerance
                     : doc.contains("tolerance") ? doc["tolerance"].get<double>()
                                                 : kDefaultTolerance;
  const NumericPolicy& policy = options.policy;
  Json body;
  if (kind == "decompose") body = detail::run_decompose(doc, policy);
  else if (kind == "single_time") body = detail::run_single_time(doc, policy);
  else if (kind == "histories") body = detail::run_histories(doc, tol, policy);
  else if (kind == "branch") body = detail::run_branch(doc, tol, policy);
  else body = detail::run_lattice(doc, tol, policy);
  body["kind"] = kind;
  body["schema_version"] = kSchemaVersion;
  body["scenario"] = doc.contains("name") ? doc["name"].get<std::string>() : std::string();
  body["tolerance"] = tol;
  return body;
}

/// Checks a result document against the result schema. Returns the list of
/// problems found; empty means valid.
inline std::vector<std::string> validate_result(const Json& r) {
  std::vector<std::string> problems;
  auto need = [&](const Json& obj, const char* key, const std::string& where) -> const Json* {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(where + ": missing \"" + key + "\"");
      return nullptr;
    }
    return &obj[key];
  };
  if (!r.is_object()) return {"result: expected an object"};
  const Json* kind = need(r, "kind", "result");
  if (kind && (!kind->is_string() ||
               std::find(scenario_kinds().begin(), scenario_kinds().end(), kind->get<std::string>()) == scenario_kinds().end()))
    problems.push_back("result.kind: unknown kind");
  const Json* version = need(r, "schema_version", "result");
  if (version && (!version->is_number_integer() || version->get<int>() != kSchemaVersion))
    problems.push_back("result.schema_version: unsupported version");
  const Json* tol = need(r, "tolerance", "result");
  if (tol && !tol->is_number()) problems.push_back("result.tolerance: expected a number");
  need(r, "scenario", "result");
  const Json* summary = need(r, "summary", "result");
  if (summary && !summary->is_object()) problems.push_back("result.summary: expected an object");
  const Json* tab = need(r, "table", "result");
  if (tab) {
    const Json* cols = need(*tab, "columns", "result.table");
    const Json* rows = need(*tab, "rows", "result.table");
    if (cols && rows && cols->is_array() && rows->is_array()) {
      const std::size_t width = cols->size();
      std::optional<std::size_t> prob_col;
      for (std::size_t c = 0; c < width; ++c)
        if ((*cols)[c] == "probability") prob_col = c;
      for (std::size_t i = 0; i < rows->size(); ++i) {
        const Json& row = (*rows)[i];
        if (!row.is_array() || row.size() != width) {
          problems.push_back("result.table.rows[" + std::to_string(i) + "]: width differs from columns");
          continue;
        }
        if (prob_col) {
          const Json& p = row[*prob_col];
          if (!p.is_number() || p.get<double>() < 0.0 || p.get<double>() > 1.0 + 1e-9)
            problems.push_back("result.table.rows[" + std::to_string(i) + "]: probability outside [0, 1]");
        }
      }
    } else {
      problems.push_back("result.table: columns and rows must be arrays");
    }
  }
  if (summary && summary->is_object() && kind && kind->is_string()) {
    const std::string k = kind->get<std::string>();
    if (k == "decompose") {
      need(*summary, "weights", "result.summary");
      need(*summary, "merge_groups", "result.summary");
    } else if (k == "histories") {
      need(*summary, "verdict", "result.summary");
      need(*summary, "max_offdiagonal", "result.summary");
    } else if (k == "branch") {
      need(*summary, "tree", "result.summary");
      need(*summary, "reinterference", "result.summary");
    } else if (k == "lattice") {
      need(*summary, "consistency", "result.summary");
      need(*summary, "foliation_invariance", "result.summary");
    }
  }
  return problems;
}

}  // namespace modalhist::scenario
