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

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mapek/adaptive.h"
#include "mapek/config.h"
#include "mapek/controller.h"
#include "mapek/knowledge_log.h"

namespace mapek {

struct DetectedViolation {
  PropertyId property;
  ViolationKind kind;
  // Tick of the first log entry that carries this (property, kind).
  Tick first_detection_tick;

  bool operator==(const DetectedViolation&) const = default;
};

struct RunReport {
  std::string variant;
  Tick total_ticks = 0;
  std::uint64_t entries_logged = 0;
  std::uint64_t violation_events = 0;
  // Sorted by (first_detection_tick, property, kind).
  std::vector<DetectedViolation> violations_detected;
  std::uint64_t measurements_taken = 0;
  std::vector<std::pair<Tick, Tick>> period_trace;
  std::vector<std::pair<Tick, Stage>> stage_trace;

  std::optional<Tick> first_detection_tick() const;
  bool operator==(const RunReport&) const = default;
};

// The RunSummary record, with "cause" as its first field.
nlohmann::ordered_json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::ordered_json& record);

// Entry counts and first-detection ticks recomputed from a log. Used by the
// runner and, independently, by consistency checks.
std::vector<DetectedViolation> detections_from(const std::vector<LogEntry>& entries);

void print_report(const RunReport& report, std::ostream& out);

using TickObserver = std::function<void(Tick, const MonitoringController&, const AdaptiveStrategy*)>;

struct RunOptions {
  // Wall-clock pacing for demos; zero runs as fast as possible.
  std::chrono::milliseconds realtime{0};
  // Extra analyzers subscribed to the knowledge log.
  std::vector<AnalyzerTrigger> analyzers;
  TickObserver on_tick;
  std::function<void(const ViolationEvent&)> on_violation;
  // When false the .ndlog file is not written even if output_path is set.
  bool write_log = true;
};

struct RunResult {
  RunReport report;
  std::vector<LogEntry> entries;
  // Analyzer stub invocations; equals the number of entries.
  std::uint64_t analyzer_calls = 0;
};

// Steps the simulator, ticks the controller and applies the policy for
// ticks 0..duration. Writes config.output_path unless it is empty.
RunResult run(const RunConfig& config, const RunOptions& options = {});

// A named alteration of a config used by compare:
//   event      EventTriggered logging, no policy
//   periodic:P Periodic(P) logging, no policy
//   fixed:P    Periodic(P) with every time-triggered sensor at period P
//   config     the config as written
struct Variant {
  std::string label;
  std::function<RunConfig(const RunConfig&)> apply;
};

// Throws Error(kUsage) for unknown forms.
Variant parse_variant(const std::string& text);
MonitoringMode parse_mode(const std::string& text);

struct ComparisonRow {
  std::string variant;
  RunReport report;
};

// Throws Error(kUsage) with fewer than two variants.
std::vector<ComparisonRow> compare(const RunConfig& config, const std::vector<std::string>& variants);
void print_comparison(const std::vector<ComparisonRow>& rows, std::ostream& out);

}  // namespace mapek
