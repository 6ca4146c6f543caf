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

#include "mapek/runner.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <memory>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "mapek/managed_sim.h"
#include "mapek/sensing.h"

namespace mapek {

using nlohmann::ordered_json;

std::optional<Tick> RunReport::first_detection_tick() const {
  if (violations_detected.empty()) return std::nullopt;
  Tick first = violations_detected.front().first_detection_tick;
  for (const DetectedViolation& d : violations_detected) first = std::min(first, d.first_detection_tick);
  return first;
}

std::vector<DetectedViolation> detections_from(const std::vector<LogEntry>& entries) {
  std::map<std::pair<PropertyId, ViolationKind>, Tick> first;
  for (const LogEntry& e : entries) {
    for (const ViolationEvent& ev : e.events) first.try_emplace({ev.property, ev.violation}, e.tick);
  }
  std::vector<DetectedViolation> out;
  out.reserve(first.size());
  for (const auto& [key, tick] : first) out.push_back({key.first, key.second, tick});
  std::stable_sort(out.begin(), out.end(), [](const DetectedViolation& a, const DetectedViolation& b) {
    return std::tie(a.first_detection_tick, a.property, a.kind) < std::tie(b.first_detection_tick, b.property, b.kind);
  });
  return out;
}

ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["cause"] = "RunSummary";
  j["variant"] = r.variant;
  j["total_ticks"] = r.total_ticks;
  j["entries_logged"] = r.entries_logged;
  j["violation_events"] = r.violation_events;
  j["measurements_taken"] = r.measurements_taken;
  ordered_json violations = ordered_json::array();
  for (const DetectedViolation& d : r.violations_detected) {
    ordered_json v;
    v["component"] = d.property.component;
    v["operation"] = d.property.operation;
    v["name"] = d.property.name;
    v["violation"] = to_string(d.kind);
    v["first_detection_tick"] = d.first_detection_tick;
    violations.push_back(std::move(v));
  }
  j["violations_detected"] = std::move(violations);
  ordered_json periods = ordered_json::array();
  for (const auto& [tick, period] : r.period_trace) periods.push_back(ordered_json::array({tick, period}));
  j["period_trace"] = std::move(periods);
  ordered_json stages = ordered_json::array();
  for (const auto& [tick, stage] : r.stage_trace) stages.push_back(ordered_json::array({tick, to_string(stage)}));
  j["stage_trace"] = std::move(stages);
  return j;
}

RunReport report_from_json(const ordered_json& j) {
  try {
    if (j.at("cause") != "RunSummary") throw Error(ErrorCode::kParse, "record is not a RunSummary");
    RunReport r;
    r.variant = j.at("variant").get<std::string>();
    r.total_ticks = j.at("total_ticks").get<Tick>();
    r.entries_logged = j.at("entries_logged").get<std::uint64_t>();
    r.violation_events = j.at("violation_events").get<std::uint64_t>();
    r.measurements_taken = j.at("measurements_taken").get<std::uint64_t>();
    for (const auto& v : j.at("violations_detected")) {
      auto kind = parse_violation_kind(v.at("violation").get<std::string>());
      if (!kind) throw Error(ErrorCode::kParse, "unknown violation kind in RunSummary");
      r.violations_detected.push_back({PropertyId{v.at("name").get<std::string>(), v.at("component").get<std::string>(),
                                       v.at("operation").get<std::string>()},
                                      *kind, v.at("first_detection_tick").get<Tick>()});
    }
    for (const auto& p : j.at("period_trace")) r.period_trace.emplace_back(p.at(0).get<Tick>(), p.at(1).get<Tick>());
    for (const auto& s : j.at("stage_trace")) {
      const std::string name = s.at(1).get<std::string>();
      Stage stage;
      if (name == to_string(Stage::kCoreOnly)) {
        stage = Stage::kCoreOnly;
      } else if (name == to_string(Stage::kExtended)) {
        stage = Stage::kExtended;
      } else {
        throw Error(ErrorCode::kParse, fmt::format("unknown stage '{}' in RunSummary", name));
      }
      r.stage_trace.emplace_back(s.at(0).get<Tick>(), stage);
    }
    return r;
  } catch (const nlohmann::json::exception& err) {
    throw Error(ErrorCode::kParse, fmt::format("malformed RunSummary: {}", err.what()));
  }
}

void print_report(const RunReport& r, std::ostream& out) {
  out << fmt::format("run summary ({})\n", r.variant);
  out << fmt::format("  {:<22}{}\n", "ticks", r.total_ticks);
  out << fmt::format("  {:<22}{}\n", "entries logged", r.entries_logged);
  out << fmt::format("  {:<22}{}\n", "violation events", r.violation_events);
  out << fmt::format("  {:<22}{}\n", "measurements taken", r.measurements_taken);
  if (r.violations_detected.empty()) {
    out << "  no violations detected\n";
  } else {
    out << fmt::format("  {:<32}{:<16}{}\n", "property", "violation", "first detected");
    for (const DetectedViolation& d : r.violations_detected) {
      out << fmt::format("  {:<32}{:<16}{}\n", d.property.qualified(), to_string(d.kind), d.first_detection_tick);
    }
  }
  if (!r.period_trace.empty()) {
    out << "  period trace:";
    for (const auto& [tick, period] : r.period_trace) out << fmt::format(" {}@{}", period, tick);
    out << "\n";
  }
  if (!r.stage_trace.empty()) {
    out << "  stage trace:";
    for (const auto& [tick, stage] : r.stage_trace) out << fmt::format(" {}@{}", to_string(stage), tick);
    out << "\n";
  }
}

namespace {

std::string describe(const RunConfig& config) {
  const auto name = policy_name(config.policy);
  if (name == "none") return config.mode.describe();
  return fmt::format("{}+{}", config.mode.describe(), name);
}

}  // namespace

RunResult run(const RunConfig& config, const RunOptions& options) {
  config.validate();
  Simulator sim = Simulator::build(config.domain, config.script);
  KnowledgeLog log;
  RunResult result;

  std::unique_ptr<NdlogWriter> writer;
  if (options.write_log && !config.output_path.empty()) {
    writer = std::make_unique<NdlogWriter>(config.output_path);
    log.subscribe([&writer](const LogEntry& e) { writer->append(e); });
  }
  // Stand-in for the Analyze phase: it only counts triggers.
  log.subscribe([&result](const LogEntry&) { ++result.analyzer_calls; });
  for (const AnalyzerTrigger& a : options.analyzers) log.subscribe(a);

  MonitoringController controller(config.properties, config.mode, log);
  if (options.on_violation) controller.set_violation_listener(options.on_violation);
  for (const SensorDescriptor& d : config.sensors) {
    controller.deploy_sensor(d, instrument(d.property, sim));
  }
  for (const SensorDescriptor& d : config.sensors) {
    if (d.status == SensorStatus::kInactive) controller.retire_sensor(d.sensor_id);
  }

  std::unique_ptr<AdaptiveStrategy> strategy = make_strategy(config.policy);
  if (strategy) strategy->install(controller);

  const auto started = std::chrono::steady_clock::now();
  for (Tick t = 0; t <= sim.duration(); ++t) {
    if (t > 0) sim.step();
    controller.tick(t);
    if (options.on_tick) options.on_tick(t, controller, strategy.get());
    if (strategy) strategy->after_tick(t, controller, log);
    if (options.realtime.count() > 0) std::this_thread::sleep_until(started + options.realtime * (t + 1));
  }
  controller.flush();

  result.entries = log.entries();
  RunReport& r = result.report;
  r.variant = describe(config);
  r.total_ticks = sim.duration();
  r.entries_logged = result.entries.size();
  for (const LogEntry& e : result.entries) r.violation_events += e.events.size();
  r.violations_detected = detections_from(result.entries);
  r.measurements_taken = controller.measurements_taken();
  if (strategy) r.period_trace = strategy->period_trace();
  if (const auto* stage = dynamic_cast<const StageAdapter*>(strategy.get())) r.stage_trace = stage->stage_trace();

  if (writer) {
    writer->append_summary(to_json(r));
    writer->flush();
  }
  return result;
}

namespace {

Tick parse_period(const std::string& text, const std::string& whole) {
  Tick p = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
  if (ec != std::errc() || ptr != text.data() + text.size() || p < 1) {
    throw Error(ErrorCode::kUsage, fmt::format("'{}': period must be an integer >= 1", whole));
  }
  return p;
}

}  // namespace

MonitoringMode parse_mode(const std::string& text) {
  if (text == "event" || text == "1") return MonitoringMode::event_triggered();
  if (text.starts_with("periodic:")) return MonitoringMode::periodic(parse_period(text.substr(9), text));
  throw Error(ErrorCode::kUsage, fmt::format("unknown mode '{}' (expected periodic:P or event)", text));
}

Variant parse_variant(const std::string& text) {
  if (text == "config") {
    return {text, [](const RunConfig& c) { return c; }};
  }
  if (text.starts_with("fixed:")) {
    const Tick p = parse_period(text.substr(6), text);
    return {text, [p](const RunConfig& c) {
              RunConfig out = c;
              out.mode = MonitoringMode::periodic(p);
              out.policy = std::monostate{};
              for (SensorDescriptor& d : out.sensors) {
                if (d.mode.kind == TriggerMode::Kind::kTimeTriggered) d.mode.period = p;
              }
              return out;
            }};
  }
  const MonitoringMode mode = parse_mode(text);
  return {text, [mode](const RunConfig& c) {
            RunConfig out = c;
            out.mode = mode;
            out.policy = std::monostate{};
            return out;
          }};
}

std::vector<ComparisonRow> compare(const RunConfig& config, const std::vector<std::string>& variants) {
  if (variants.size() < 2) throw Error(ErrorCode::kUsage, "compare needs at least two variants");
  std::vector<Variant> parsed;
  for (const std::string& v : variants) parsed.push_back(parse_variant(v));
  std::vector<ComparisonRow> rows;
  RunOptions options;
  options.write_log = false;
  for (const Variant& v : parsed) {
    RunConfig altered = v.apply(config);
    RunResult res = run(altered, options);
    rows.push_back({v.label, std::move(res.report)});
  }
  return rows;
}

void print_comparison(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  out << fmt::format("{:<16}{:>10}{:>12}{:>14}{:>16}\n", "variant", "entries", "violations", "measurements",
                     "first detected");
  for (const ComparisonRow& row : rows) {
    const auto first = row.report.first_detection_tick();
    out << fmt::format("{:<16}{:>10}{:>12}{:>14}{:>16}\n", row.variant, row.report.entries_logged,
                       row.report.violation_events, row.report.measurements_taken,
                       first ? fmt::format("{}", *first) : std::string("-"));
  }
}

}  // namespace mapek
