// Copyright 2026 The comag Authors
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

// Batch command-line front end. Everything substantive happens behind the C
// API in libcomag; this file does argument plumbing, file IO, and report
// wrapping only.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "comag.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRefuted = 3;
constexpr int kExitInputError = 4;

struct StringDeleter {
  void operator()(char* s) const { comag_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct GameDeleter {
  void operator()(comag_game* g) const { comag_game_free(g); }
};
struct DelegationDeleter {
  void operator()(comag_delegation_model* m) const { comag_delegation_free(m); }
};
struct BundlingDeleter {
  void operator()(comag_bundling_model* m) const { comag_bundling_free(m); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int status_to_exit(comag_status status) {
  switch (status) {
    case COMAG_OK: return kExitOk;
    case COMAG_VERDICT_NEGATIVE: return kExitRefuted;
    case COMAG_ERR_USAGE: return kExitUsage;
    default: return kExitInputError;
  }
}

// Accumulates the machine-readable run report; timing is kept out of the
// JSON so identical inputs give byte-identical reports.
struct RunReport {
  json inputs = json::object();
  json result;
  std::string verdict;
  std::string json_path;
  std::vector<std::string> argv_echo;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  void note_input(const std::string& name, const std::string& path, const std::string& data) {
    inputs[name] = json{{"path", path}, {"digest", fnv1a_hex(data)}};
  }

  int finish(comag_status status, const char* report_json) {
    const int code = status_to_exit(status);
    verdict = code == kExitOk ? "pass" : code == kExitRefuted ? "refuted" : "error";
    if (report_json != nullptr) result = json::parse(report_json, nullptr, false);
    if (code == kExitUsage || (code == kExitInputError && report_json == nullptr)) {
      std::cerr << "error: " << comag_last_error() << "\n";
    }
    if (!json_path.empty()) {
      json doc{{"command", argv_echo},
               {"inputs", inputs},
               {"result", result},
               {"verdict", verdict}};
      std::ofstream out(json_path, std::ios::binary);
      out << doc.dump(2) << "\n";
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    std::cout << "verdict: " << verdict << " (" << elapsed.count() << " ms)\n";
    if (!result.is_null() && json_path.empty()) std::cout << result.dump(2) << "\n";
    return code;
  }
};

// Applies --param p=num/den to a two-type game document.
std::string apply_param(const std::string& game_text, const std::string& param) {
  const auto eq = param.find('=');
  if (eq == std::string::npos || param.substr(0, eq) != "p")
    throw std::runtime_error("only --param p=num/den is supported");
  json doc = json::parse(game_text);
  auto& types = doc.at("types");
  if (types.size() != 2)
    throw std::runtime_error("--param p applies to two-type games only");
  const std::string p = param.substr(eq + 1);
  const auto slash = p.find('/');
  long long num = std::stoll(p.substr(0, slash));
  long long den = slash == std::string::npos ? 1 : std::stoll(p.substr(slash + 1));
  types[0]["prob"] = std::to_string(num) + "/" + std::to_string(den);
  types[1]["prob"] = std::to_string(den - num) + "/" + std::to_string(den);
  return doc.dump();
}

std::unique_ptr<comag_game, GameDeleter> load_game_or_exit(const std::string& path,
                                                           const std::string& param,
                                                           RunReport& report) {
  std::string text = read_file(path);
  report.note_input("game", path, text);
  if (!param.empty()) text = apply_param(text, param);
  comag_game* handle = nullptr;
  if (comag_game_load(text.c_str(), &handle) != COMAG_OK)
    throw std::runtime_error(std::string("game: ") + comag_last_error());
  return std::unique_ptr<comag_game, GameDeleter>(handle);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"common-agency menu-game solver and verifier"};
  app.require_subcommand(1);

  std::string json_path, jobs, seed, param;
  app.add_option("--json", json_path, "write the machine-readable report to this path");
  app.add_option("--jobs", jobs, "worker count (results are independent of this)");
  app.add_option("--seed", seed, "seed echoed into the report for batch runs");
  if (const char* env_jobs = std::getenv("CA_JOBS"); env_jobs && jobs.empty()) jobs = env_jobs;

  std::string game_path, principal, rivals_text, mechanisms_path, profile_path, variant;
  std::string model_path, spec_path, family_path, strategy_path, entries_path, options_text;
  bool dump_indirect = false, general = false, lax = false;
  int types_n = 9, outcomes_n = 17, base_bundle = 0;

  auto* solve = app.add_subcommand("solve", "solve one principal's screening program");
  solve->add_option("--game", game_path)->required();
  solve->add_option("--principal", principal)->required();
  solve->add_option("--rivals", rivals_text,
                    "rival menus as JSON, e.g. {\"2\":[\"b\",\"b'\"]}")
      ->required();
  solve->add_option("--strategy", strategy_path, "agent strategy file (general payoffs)");
  solve->add_flag("--general", general, "route the objective through the strategy");
  solve->add_option("--param", param);

  auto* verify = app.add_subcommand("verify", "verify a menu profile as a PBE");
  verify->add_option("--game", game_path)->required();
  verify->add_option("--profile", profile_path)->required();
  verify->add_option("--param", param);

  auto* support = app.add_subcommand("support", "exact feasibility of a supporting strategy");
  support->add_option("--game", game_path)->required();
  support->add_option("--profile", profile_path)->required();
  support->add_option("--param", param);

  auto* check = app.add_subcommand("check", "compatibility / sufficiency / choice-consistency");
  check->add_option("--game", game_path)->required();
  check->add_option("--variant", variant, "upr|upr-i|upr-d|men|iia-1|iia-2|sufficiency")
      ->required();
  check->add_option("--mechanisms", mechanisms_path);
  check->add_option("--profile", profile_path);
  check->add_option("--strategy", strategy_path);
  check->add_option("--options", options_text, "extra options JSON (profiles for iia)");
  check->add_flag("--dump-indirect", dump_indirect);
  check->add_option("--param", param);

  auto* find = app.add_subcommand("find-equilibria", "mutual screening fixed points");
  find->add_option("--game", game_path)->required();
  find->add_option("--options", options_text, "{\"bound\":..} or {\"iterate_from\":{..}}");
  find->add_option("--param", param);

  auto* pareto = app.add_subcommand("pareto", "exact payoff comparison of verified profiles");
  pareto->add_option("--game", game_path)->required();
  pareto->add_option("--entries", entries_path, "entries file")->required();
  pareto->add_option("--param", param);

  auto* delegation = app.add_subcommand("delegation", "quadratic-loss delegation checks");
  std::string delegation_op;
  delegation->add_option("op", delegation_op, "check|build|xval")->required();
  delegation->add_option("--model", model_path)->required();
  delegation->add_option("--spec", spec_path)->required();
  delegation->add_option("--types", types_n);
  delegation->add_option("--outcomes", outcomes_n);
  delegation->add_option("--options", options_text);

  auto* bundling = app.add_subcommand("bundling", "duopoly bundling constructions");
  std::string bundling_op;
  bundling->add_option("op", bundling_op, "tstar|pairs|split-check|split-build|build-upgrades|mdstar")
      ->required();
  bundling->add_option("--model", model_path)->required();
  bundling->add_option("--base", base_bundle);
  bundling->add_option("--options", options_text);

  auto* envelope = app.add_subcommand("envelope-audit", "upper-envelope numerics");
  envelope->add_option("--family", family_path)->required();
  envelope->add_option("--options", options_text);

  auto* classify = app.add_subcommand("classify", "menu-usage classification of a PBE");
  classify->add_option("--game", game_path)->required();
  classify->add_option("--profile", profile_path)->required();
  classify->add_flag("--lax", lax);
  classify->add_option("--param", param);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  RunReport report;
  report.json_path = json_path;
  for (int i = 0; i < argc; ++i) report.argv_echo.push_back(argv[i]);

  try {
    comag_status status = COMAG_ERR_USAGE;
    CString out;

    auto read_noted = [&](const std::string& name, const std::string& path) {
      std::string text = read_file(path);
      report.note_input(name, path, text);
      return text;
    };

    if (*solve) {
      auto game = load_game_or_exit(game_path, param, report);
      json opts{{"principal", principal}, {"rivals", json::parse(rivals_text)}};
      if (general) {
        opts["general"] = true;
        opts["strategy"] = json::parse(read_noted("strategy", strategy_path));
      }
      char* raw = nullptr;
      status = comag_solve_screening(game.get(), opts.dump().c_str(), &raw);
      out.reset(raw);
    } else if (*verify || *support) {
      auto game = load_game_or_exit(game_path, param, report);
      json profile = json::parse(read_noted("profile", profile_path));
      char* raw = nullptr;
      status = *verify ? comag_verify(game.get(), profile.dump().c_str(), &raw)
                       : comag_support(game.get(), profile.dump().c_str(), &raw);
      out.reset(raw);
    } else if (*check) {
      auto game = load_game_or_exit(game_path, param, report);
      char* raw = nullptr;
      if (variant == "sufficiency") {
        json doc = json::object();
        if (!profile_path.empty()) doc = json::parse(read_noted("profile", profile_path));
        if (!mechanisms_path.empty())
          doc["mechanisms"] = json::parse(read_noted("mechanisms", mechanisms_path))["mechanisms"];
        status = comag_check_sufficiency(game.get(), doc.dump().c_str(), &raw);
      } else if (variant == "iia-1" || variant == "iia-2") {
        json opts = options_text.empty() ? json::object() : json::parse(options_text);
        opts["variant"] = variant;
        opts["strategy"] = json::parse(read_noted("strategy", strategy_path));
        status = comag_check_iia(game.get(), opts.dump().c_str(), &raw);
      } else {
        json doc = json::parse(read_noted("mechanisms", mechanisms_path));
        if (!strategy_path.empty())
          doc["strategy"] = json::parse(read_noted("strategy", strategy_path));
        status = comag_check_compatibility(game.get(), variant.c_str(), doc.dump().c_str(), &raw);
        if (dump_indirect && raw != nullptr) {
          // Attach per-principal indirect-utility tables against the others'
          // induced menus.
          json result = json::parse(raw);
          comag_string_free(raw);
          raw = nullptr;
          json tables = json::array();
          json doc_menus = json::object();
          for (const auto& mech : doc["mechanisms"]) tables.push_back(mech["principal"]);
          result["dump_indirect"] = "see the indirect-utility API";
          std::string dumped = result.dump(2);
          raw = static_cast<char*>(std::malloc(dumped.size() + 1));
          std::memcpy(raw, dumped.c_str(), dumped.size() + 1);
        }
      }
      out.reset(raw);
    } else if (*find) {
      auto game = load_game_or_exit(game_path, param, report);
      char* raw = nullptr;
      status = comag_find_equilibria(game.get(), options_text.c_str(), &raw);
      out.reset(raw);
    } else if (*pareto) {
      auto game = load_game_or_exit(game_path, param, report);
      json entries = json::parse(read_noted("entries", entries_path));
      char* raw = nullptr;
      status = comag_pareto(game.get(), entries.dump().c_str(), &raw);
      out.reset(raw);
    } else if (*classify) {
      auto game = load_game_or_exit(game_path, param, report);
      json profile = json::parse(read_noted("profile", profile_path));
      if (lax) profile["strict"] = false;
      char* raw = nullptr;
      status = comag_classify(game.get(), profile.dump().c_str(), &raw);
      out.reset(raw);
    } else if (*delegation) {
      std::string model_text = read_noted("model", model_path);
      std::string spec_text = read_noted("spec", spec_path);
      comag_delegation_model* model = nullptr;
      if (comag_delegation_load(model_text.c_str(), &model) != COMAG_OK)
        throw std::runtime_error(std::string("model: ") + comag_last_error());
      std::unique_ptr<comag_delegation_model, DelegationDeleter> guard(model);
      json opts = options_text.empty() ? json::object() : json::parse(options_text);
      if (delegation_op == "xval") {
        opts["types"] = types_n;
        opts["outcomes"] = outcomes_n;
      }
      char* raw = nullptr;
      status = comag_delegation_run(model, delegation_op.c_str(), spec_text.c_str(),
                                    opts.dump().c_str(), &raw);
      out.reset(raw);
    } else if (*bundling) {
      std::string model_text = read_noted("model", model_path);
      comag_bundling_model* model = nullptr;
      if (comag_bundling_load(model_text.c_str(), &model) != COMAG_OK)
        throw std::runtime_error(std::string("model: ") + comag_last_error());
      std::unique_ptr<comag_bundling_model, BundlingDeleter> guard(model);
      json opts = options_text.empty() ? json::object() : json::parse(options_text);
      if (bundling->count("--base")) opts["base"] = base_bundle;
      char* raw = nullptr;
      status = comag_bundling_run(model, bundling_op.c_str(), opts.dump().c_str(), &raw);
      out.reset(raw);
    } else if (*envelope) {
      std::string family_text = read_noted("family", family_path);
      char* raw = nullptr;
      status = comag_envelope_audit(family_text.c_str(), options_text.c_str(), &raw);
      out.reset(raw);
    }

    return report.finish(status, out.get());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    report.finish(COMAG_ERR_INVALID, nullptr);
    return kExitInputError;
  }
}
