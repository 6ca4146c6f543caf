// Copyright 2026 The mapek-monitor Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#include "mapek/cli.h"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mapek/config.h"
#include "mapek/error.h"
#include "mapek/runner.h"

namespace mapek {
namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> ticks;

  void apply(RunConfig& config) const {
    if (seed) config.script.seed = *seed;
    if (ticks) config.script.duration = *ticks;
  }
};

// Loading and validating is where config errors come from; anything that
// fails here maps to exit code 2.
RunConfig prepare(const std::string& path, const Overrides& overrides) {
  RunConfig config = load_config(path);
  overrides.apply(config);
  config.validate();
  return config;
}

bool is_config_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kConfiguration:
    case ErrorCode::kBuild:
    case ErrorCode::kUsage:
    case ErrorCode::kDuplicateSensor:
    case ErrorCode::kUnknownGauge:
    case ErrorCode::kInstrumentation:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Runtime monitoring harness: simulated managed system, sensors, monitor and knowledge log."};
  app.name("mapek-monitor");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  Overrides overrides;
  std::vector<std::string> modes;
  std::uint64_t realtime_ms = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario, write the .ndlog file and print a report");
  run_cmd->add_option("--config", config_path, "Config document")->required();
  run_cmd->add_option("--out", out_path, "Log file path (overrides [output] path)");
  run_cmd->add_option("--seed", overrides.seed, "Override the scenario seed");
  run_cmd->add_option("--ticks", overrides.ticks, "Override the scenario duration");
  run_cmd->add_option("--mode", modes, "event, periodic:P, fixed:P or config")->expected(1);
  run_cmd->add_option("--realtime", realtime_ms, "Wall-clock milliseconds per tick (demo only)");

  CLI::App* compare_cmd = app.add_subcommand("compare", "Run the same scenario under several variants");
  compare_cmd->add_option("--config", config_path, "Config document")->required();
  compare_cmd->add_option("--seed", overrides.seed, "Override the scenario seed");
  compare_cmd->add_option("--ticks", overrides.ticks, "Override the scenario duration");
  compare_cmd->add_option("--mode", modes, "Variant (repeat): event, periodic:P, fixed:P or config")
      ->required()
      ->take_all();

  CLI::App* validate_cmd = app.add_subcommand("validate", "Parse and check a config document");
  validate_cmd->add_option("--config", config_path, "Config document")->required();
  validate_cmd->add_option("--seed", overrides.seed, "Override the scenario seed");
  validate_cmd->add_option("--ticks", overrides.ticks, "Override the scenario duration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  RunConfig config;
  try {
    config = prepare(config_path, overrides);
    if (run_cmd->parsed()) {
      if (!modes.empty()) config = parse_variant(modes.front()).apply(config);
      if (!out_path.empty()) config.output_path = out_path;
      config.validate();
    } else if (compare_cmd->parsed()) {
      if (modes.size() < 2) throw Error(ErrorCode::kUsage, "compare needs at least two --mode variants");
      for (const std::string& m : modes) parse_variant(m).apply(config).validate();
    }
  } catch (const Error& e) {
    err << "mapek-monitor: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (validate_cmd->parsed()) {
      out << fmt::format("{}: ok ({} properties, {} sensors, {} ticks, mode {}, policy {})\n", config_path,
                         config.properties.size(), config.sensors.size(), config.script.duration,
                         config.mode.describe(), policy_name(config.policy));
      return kExitOk;
    }
    if (run_cmd->parsed()) {
      RunOptions options;
      options.realtime = std::chrono::milliseconds(realtime_ms);
      RunResult result = run(config, options);
      print_report(result.report, out);
      if (!config.output_path.empty()) out << fmt::format("log written to {}\n", config.output_path);
      return kExitOk;
    }
    print_comparison(compare(config, modes), out);
    return kExitOk;
  } catch (const Error& e) {
    err << "mapek-monitor: " << e.what() << "\n";
    return is_config_error(e) ? kExitConfigError : kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "mapek-monitor: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace mapek
