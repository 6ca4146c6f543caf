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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapek/property.h"

namespace mapek {

// When a sensor reports. Time-triggered sensors carry their sampling period.
struct TriggerMode {
  enum class Kind { kTimeTriggered, kEventTriggered, kOnDemand };

  Kind kind = Kind::kTimeTriggered;
  Tick period = 1;  // meaningful for kTimeTriggered only

  static TriggerMode time_triggered(Tick period) { return {Kind::kTimeTriggered, period}; }
  static TriggerMode event_triggered() { return {Kind::kEventTriggered, 0}; }
  static TriggerMode on_demand() { return {Kind::kOnDemand, 0}; }

  bool operator==(const TriggerMode&) const = default;
};

std::string_view to_string(TriggerMode::Kind kind);

enum class SensorStatus { kActive, kInactive };

std::string_view to_string(SensorStatus status);

struct SensorDescriptor {
  std::string sensor_id;
  PropertyId property;
  TriggerMode mode;
  SensorStatus status = SensorStatus::kActive;

  bool operator==(const SensorDescriptor&) const = default;
};

// The touchpoint surface of a managed system: a set of readable gauges.
class ManagedSystem {
 public:
  virtual ~ManagedSystem() = default;

  virtual bool has_gauge(const PropertyId& id) const = 0;
  // Value of the gauge at `tick`. Must not alter the managed system.
  virtual double gauge_value(const PropertyId& id, Tick tick) const = 0;
};

// Binding between a property and the managed system. `read` is side-effect
// free with respect to the managed system.
struct InstrumentationHook {
  PropertyId property;
  std::function<double(Tick)> read;
};

// Binds a hook to `source`. The source must outlive the hook.
// Throws Error(kInstrumentation) when the system has no such gauge.
InstrumentationHook instrument(const PropertyId& property, const ManagedSystem& source);

// Throws Error(kInactiveSensor) when the sensor is not active.
Measurement poll(const SensorDescriptor& sensor, const InstrumentationHook& hook, Tick now);

// Schedule check. Time-triggered sensors are due on multiples of their
// period (first sample at tick 0); event-triggered sensors are evaluated by
// emit_if_violation instead and on-demand sensors are never scheduled.
bool due(const SensorDescriptor& sensor, Tick now);

// Reads the hook and returns a measurement only when it violates `threshold`
// relative to `previous`. `previous` is the caller-owned previous-value
// record and is updated with the new reading on every call.
std::optional<Measurement> emit_if_violation(const SensorDescriptor& sensor,
                                             const InstrumentationHook& hook,
                                             const Threshold& threshold,
                                             std::optional<double>& previous,
                                             Tick now);

class MeasurementObserver {
 public:
  virtual ~MeasurementObserver() = default;
  virtual void on_measurement(const Measurement& measurement) = 0;
};

// Subject side of the observer pattern. Observers are not owned and must
// detach before they are destroyed.
class MeasurementSubject {
 public:
  void attach(MeasurementObserver& observer);
  void detach(MeasurementObserver& observer);
  bool is_attached(const MeasurementObserver& observer) const;
  // Delivers to every attached observer once, in attachment order.
  void notify(const Measurement& measurement) const;
  std::size_t observer_count() const { return observers_.size(); }

 private:
  std::vector<MeasurementObserver*> observers_;
};

// A deployed sensor: descriptor, hook, schedule anchor and the
// previous-value record used for relative-change checks.
class Sensor : public MeasurementSubject {
 public:
  Sensor(SensorDescriptor descriptor, InstrumentationHook hook);

  const SensorDescriptor& descriptor() const { return descriptor_; }
  const std::string& id() const { return descriptor_.sensor_id; }
  const PropertyId& property() const { return descriptor_.property; }
  SensorStatus status() const { return descriptor_.status; }
  bool active() const { return descriptor_.status == SensorStatus::kActive; }

  void activate();
  // Also clears the previous-value record.
  void deactivate();

  // Time-triggered sensors fire at anchor, anchor + period, ... Default
  // anchor is 0, which reduces to `now % period == 0`.
  bool due(Tick now) const;
  void set_period(Tick period, Tick anchor);

  // Polls the hook, records the value and notifies observers.
  Measurement sample(Tick now);
  // Event-triggered evaluation; notifies only on emission.
  std::optional<Measurement> evaluate(const Threshold& threshold, Tick now);

  std::optional<double> previous() const { return previous_; }

 private:
  SensorDescriptor descriptor_;
  InstrumentationHook hook_;
  Tick anchor_ = 0;
  std::optional<double> previous_;
};

}  // namespace mapek
