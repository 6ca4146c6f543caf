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

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mapek/adaptive.h"
#include "mapek/controller.h"
#include "mapek/error.h"
#include "mapek/managed_sim.h"
#include "mapek/property.h"
#include "mapek/sensing.h"

namespace mapek {

// Everything one scenario run needs.
struct RunConfig {
  DomainModel domain;
  ScenarioScript script;
  std::vector<PropertySpec> properties;
  std::vector<SensorDescriptor> sensors;
  MonitoringMode mode;
  PolicyConfig policy;
  std::string output_path;

  // Cross-reference and invariant checks shared by the parser and
  // programmatic callers. Throws ConfigError.
  void validate() const;
  ControllerConfig controller_config() const { return {mode, properties, sensors}; }
};

enum class ConfigErrorKind {
  kSyntax,
  kUnknownSection,
  kUnknownKey,
  kBadValue,
  kMissing,
  kDuplicate,
  kDanglingReference,
  kInvariant,
};

std::string_view to_string(ConfigErrorKind kind);

// A rejected configuration. `element` names the offending section or key,
// e.g. "sensor s_load.period"; `line` and `column` are 1-based, 0 when the
// problem has no single location.
class ConfigError : public Error {
 public:
  ConfigError(ConfigErrorKind kind, std::string element, std::size_t line, std::size_t column,
              const std::string& message);

  ConfigErrorKind kind() const { return kind_; }
  const std::string& element() const { return element_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  ConfigErrorKind kind_;
  std::string element_;
  std::size_t line_;
  std::size_t column_;
};

// Sectioned key = value document:
//
//   # comment
//   [property server_load]
//   component = web
//   unit = percent
//   upper = 50
//
// References to properties and gauges use "component.name" or
// "component.operation.name".
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Throws ConfigError(kBadValue) on malformed references.
PropertyId parse_property_ref(std::string_view text);

}  // namespace mapek
