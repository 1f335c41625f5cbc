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


// modalhist: runs a scenario file and writes the result document.
//
//   modalhist decompose|histories|branch|lattice <scenario> [--tol R]
//             [--format json|csv] [--out PATH] [--parallel]
//
// Exit status: 0 ok, 1 usage, 2 schema, 3 validation, 4 capacity,
// 5 consistency refusal, 6 io. MODALHIST_MAX_DIM overrides the dimension cap.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "modalhist/emit.hpp"
#include "modalhist/scenario.hpp"

namespace {

using modalhist::Error;
using modalhist::ErrorKind;
namespace sc = modalhist::scenario;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kSchemaError = 2,
  kValidationError = 3,
  kCapacityError = 4,
  kRefusal = 5,
  kIoError = 6,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return kSchemaError;
    case ErrorKind::kCapacity: return kCapacityError;
    case ErrorKind::kConsistencyRefusal: return kRefusal;
    case ErrorKind::kIo: return kIoError;
    default: return kValidationError;
  }
}

struct Options {
  std::string command;
  std::string scenario;
  std::optional<double> tol;
  std::string format = "json";
  std::string out;
  bool parallel = false;
  bool quiet = false;
};

nlohmann::json load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kSchema, path + ": " + e.what());
  }
}

std::size_t max_dim_override(std::size_t fallback) {
  const char* env = std::getenv("MODALHIST_MAX_DIM");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw Error(ErrorKind::kValidation, "MODALHIST_MAX_DIM must be a positive integer");
  return static_cast<std::size_t>(v);
}

// Writes via a temporary file so a failed run never leaves partial output.
void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
    out << text;
    if (!out.flush()) throw Error(ErrorKind::kIo, "write failed for " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::kIo, "cannot write " + path);
  }
}

bool kind_matches(const std::string& command, const std::string& kind) {
  if (command == "decompose") return kind == "decompose" || kind == "single_time";
  return command == kind;
}

std::string human_summary(const nlohmann::json& r) {
  const std::string kind = r["kind"];
  const auto& s = r["summary"];
  std::ostringstream o;
  o << r["scenario"].get<std::string>() << " [" << kind << "] ";
  if (kind == "decompose") {
    o << "schmidt rank " << s["schmidt_rank"] << ", " << s["merge_groups"].size() << " definite projector group(s)";
  } else if (kind == "single_time") {
    o << r["table"]["rows"].size() << " joint outcomes, total " << sc::detail::format_double(s["total"].get<double>());
  } else if (kind == "histories") {
    o << s["history_count"] << " histories, " << s["verdict"].get<std::string>() << " (max off-diagonal "
      << sc::detail::format_double(s["max_offdiagonal"].get<double>()) << ")";
  } else if (kind == "branch") {
    o << s["leaf_count"] << " leaves, branch family " << s["branch_family"]["verdict"].get<std::string>();
    if (s.contains("global_family"))
      o << ", global family " << s["global_family"]["verdict"].get<std::string>() << " (max off-diagonal "
        << sc::detail::format_double(s["global_family"]["max_offdiagonal"].get<double>()) << ")";
  } else {
    o << s["points"].size() << " points, " << s["consistency"]["verdict"].get<std::string>() << ", "
      << s["foliation_invariance"]["verdict"].get<std::string>() << " over " << s["foliation_invariance"]["orderings"]
      << " ordering(s)";
  }
  return o.str();
}

int run(const Options& opt) {
  const nlohmann::json doc = load(opt.scenario);
  sc::validate_scenario(doc);
  const std::string kind = doc["kind"].get<std::string>();
  if (!kind_matches(opt.command, kind))
    throw Error(ErrorKind::kSchema, "scenario kind \"" + kind + "\" cannot run under '" + opt.command + "'");

  sc::RunOptions ro;
  ro.tolerance = opt.tol;
  ro.policy.parallel = opt.parallel;
  ro.policy.max_dim = max_dim_override(ro.policy.max_dim);

  const nlohmann::json result = sc::run_scenario(doc, ro);
  const std::string text = sc::emit(result, opt.format == "csv" ? sc::OutputFormat::kCsv : sc::OutputFormat::kJson);
  write_output(text, opt.out);
  if (!opt.quiet) std::cerr << human_summary(result) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modalhist: modal property assignment and history consistency"};
  app.require_subcommand(1);
  Options opt;

  for (const char* name : {"decompose", "histories", "branch", "lattice"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run a ") + name + " scenario");
    sub->add_option("scenario", opt.scenario, "scenario file (JSON)")->required();
    sub->add_option("--tol", opt.tol, "consistency tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", opt.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", opt.out, "output path (default stdout)");
    sub->add_flag("--parallel", opt.parallel, "allow threaded consistency scans");
    sub->add_flag("-q,--quiet", opt.quiet, "no summary on stderr");
    sub->callback([&opt, name] { opt.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return run(opt);
  } catch (const Error& e) {
    std::cerr << "modalhist: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "modalhist: schema error: " << e.what() << "\n";
    return kSchemaError;
  } catch (const std::exception& e) {
    std::cerr << "modalhist: " << e.what() << "\n";
    return kValidationError;
  }
}
