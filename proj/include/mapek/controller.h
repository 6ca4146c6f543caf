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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mapek/knowledge_log.h"
#include "mapek/property.h"
#include "mapek/sensing.h"

namespace mapek {

// Logging policy of the controller. Periodic is the passive monitor (snapshot
// every `log_period` ticks); EventTriggered is the active monitor (an entry
// only on ticks with violations). Integer codes: 0 = Periodic,
// 1 = EventTriggered.
struct MonitoringMode {
  enum class Kind { kPeriodic = 0, kEventTriggered = 1 };

  Kind kind = Kind::kPeriodic;
  Tick log_period = 1;

  static MonitoringMode periodic(Tick period) { return {Kind::kPeriodic, period}; }
  static MonitoringMode event_triggered() { return {Kind::kEventTriggered, 0}; }

  bool is_periodic() const { return kind == Kind::kPeriodic; }
  int code() const { return static_cast<int>(kind); }
  void validate() const;
  std::string describe() const;

  bool operator==(const MonitoringMode&) const = default;
};

struct ControllerConfig {
  MonitoringMode mode;
  std::vector<PropertySpec> properties;
  std::vector<SensorDescriptor> sensors;

  // Sensors reference declared properties, every property has a sensor,
  // ids and property triples are unique. Throws Error(kConfiguration).
  void validate() const;
};

// Deploys sensors, observes their measurements, keeps the composed system
// state and writes entries to the knowledge log according to the mode.
//
// Single-threaded: all on_measurement deliveries of tick t complete before
// tick(t) returns, and tick calls are strictly sequential.
class MonitoringController : public MeasurementObserver {
 public:
  MonitoringController(std::vector<PropertySpec> properties, MonitoringMode mode, KnowledgeLog& log);
  ~MonitoringController() override;

  MonitoringController(const MonitoringController&) = delete;
  MonitoringController& operator=(const MonitoringController&) = delete;

  void set_monitoring_mode(MonitoringMode mode);
  const MonitoringMode& monitoring_mode() const { return mode_; }

  // Replaces the current state wholesale.
  void set_system_state(SystemState state);
  const SystemState& system_state() const { return current_; }

  // Registers the sensor Active and attaches the controller as observer.
  std::string deploy_sensor(SensorDescriptor descriptor, InstrumentationHook hook);
  // Marks Inactive, detaches and drops the sensor's previous-value record.
  // When no active sensor remains for the property, the property leaves
  // the current state. Idempotent for already inactive sensors.
  void retire_sensor(const std::string& sensor_id);
  void activate_sensor(const std::string& sensor_id);
  SensorStatus sensor_status(const std::string& sensor_id) const;
  const SensorDescriptor& sensor_descriptor(const std::string& sensor_id) const;
  std::vector<std::string> sensor_ids() const;
  std::set<PropertyId> active_properties() const;

  void on_measurement(const Measurement& measurement) override;

  // On-demand poll of one sensor at the last scheduled tick (0 before the
  // first tick). Any trigger mode may be polled this way.
  Measurement request_sample(const std::string& sensor_id);

  // One scheduler step; `now` must strictly increase across calls.
  void tick(Tick now);
  // Logs still-pending events as a final Violation entry. Used at end of run
  // so periodic mode never loses events detected after its last log point.
  void flush();

  // Reschedules periodic logging and every time-triggered sensor to fire at
  // anchor, anchor + period, ...
  void retime(Tick period, Tick anchor);

  const PropertySpec* find_property(const PropertyId& id) const;
  const std::vector<PropertySpec>& properties() const { return properties_; }
  const std::vector<ViolationEvent>& pending_events() const { return pending_; }
  std::optional<double> previous_value(const PropertyId& id) const;
  std::optional<Tick> last_tick() const { return last_tick_; }

  // Overhead accounting: sensor reads performed.
  std::uint64_t measurements_taken() const { return measurements_taken_; }
  std::uint64_t dropped_measurements() const { return dropped_; }
  std::uint64_t violations_detected() const { return violations_detected_; }

  // Called for every ViolationEvent the controller produces.
  void set_violation_listener(std::function<void(const ViolationEvent&)> listener) {
    violation_listener_ = std::move(listener);
  }

 private:
  Sensor& find_sensor(const std::string& sensor_id);
  const Sensor& find_sensor(const std::string& sensor_id) const;
  bool log_point(Tick now) const;
  void write_entry(EntryCause cause, Tick now, std::uint64_t overhead);

  std::vector<PropertySpec> properties_;
  MonitoringMode mode_;
  Tick log_anchor_ = 0;
  KnowledgeLog& log_;

  // Ordered by id: evaluation order within a tick, so among same-tick
  // measurements of one property the lexicographically last sensor wins.
  std::map<std::string, std::unique_ptr<Sensor>> sensors_;
  SystemState current_;
  std::map<PropertyId, double> previous_values_;
  std::vector<ViolationEvent> pending_;
  std::optional<Tick> last_tick_;

  std::uint64_t measurements_taken_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t violations_detected_ = 0;
  std::function<void(const ViolationEvent&)> violation_listener_;
};

}  // namespace mapek
