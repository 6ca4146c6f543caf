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

#include "mapek/sensing.h"

#include <algorithm>

#include <fmt/format.h>

#include "mapek/error.h"

namespace mapek {

std::string_view to_string(TriggerMode::Kind kind) {
  switch (kind) {
    case TriggerMode::Kind::kTimeTriggered: return "time";
    case TriggerMode::Kind::kEventTriggered: return "event";
    case TriggerMode::Kind::kOnDemand: return "on-demand";
  }
  return "unknown";
}

std::string_view to_string(SensorStatus status) {
  return status == SensorStatus::kActive ? "active" : "inactive";
}

InstrumentationHook instrument(const PropertyId& property, const ManagedSystem& source) {
  if (!source.has_gauge(property)) {
    throw Error(ErrorCode::kInstrumentation,
                fmt::format("managed system exposes no gauge for property {}", property.qualified()));
  }
  return InstrumentationHook{property, [&source, property](Tick t) { return source.gauge_value(property, t); }};
}

namespace {

void require_active(const SensorDescriptor& sensor) {
  if (sensor.status != SensorStatus::kActive) {
    throw Error(ErrorCode::kInactiveSensor, fmt::format("sensor '{}' is inactive", sensor.sensor_id));
  }
}

}  // namespace

Measurement poll(const SensorDescriptor& sensor, const InstrumentationHook& hook, Tick now) {
  require_active(sensor);
  return Measurement{sensor.property, hook.read(now), now, sensor.sensor_id};
}

bool due(const SensorDescriptor& sensor, Tick now) {
  if (sensor.mode.kind != TriggerMode::Kind::kTimeTriggered) return false;
  return sensor.mode.period > 0 && now % sensor.mode.period == 0;
}

std::optional<Measurement> emit_if_violation(const SensorDescriptor& sensor,
                                             const InstrumentationHook& hook,
                                             const Threshold& threshold,
                                             std::optional<double>& previous,
                                             Tick now) {
  require_active(sensor);
  const double value = hook.read(now);
  const bool violated = !check_threshold(threshold, previous, value).empty();
  previous = value;
  if (!violated) return std::nullopt;
  return Measurement{sensor.property, value, now, sensor.sensor_id};
}

void MeasurementSubject::attach(MeasurementObserver& observer) {
  if (is_attached(observer)) throw Error(ErrorCode::kAlreadyAttached, "observer is already attached");
  observers_.push_back(&observer);
}

void MeasurementSubject::detach(MeasurementObserver& observer) {
  auto it = std::find(observers_.begin(), observers_.end(), &observer);
  if (it == observers_.end()) throw Error(ErrorCode::kNotAttached, "observer is not attached");
  observers_.erase(it);
}

bool MeasurementSubject::is_attached(const MeasurementObserver& observer) const {
  return std::find(observers_.begin(), observers_.end(), &observer) != observers_.end();
}

void MeasurementSubject::notify(const Measurement& measurement) const {
  // Copy so an observer detaching itself does not invalidate the iteration.
  const auto snapshot = observers_;
  for (MeasurementObserver* observer : snapshot) observer->on_measurement(measurement);
}

Sensor::Sensor(SensorDescriptor descriptor, InstrumentationHook hook)
    : descriptor_(std::move(descriptor)), hook_(std::move(hook)) {
  if (descriptor_.sensor_id.empty()) throw Error(ErrorCode::kConfiguration, "sensor id must be non-empty");
  if (descriptor_.mode.kind == TriggerMode::Kind::kTimeTriggered && descriptor_.mode.period < 1) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("sensor '{}' has period {}; time-triggered periods must be >= 1",
                            descriptor_.sensor_id, descriptor_.mode.period));
  }
  if (!hook_.read) {
    throw Error(ErrorCode::kInstrumentation, fmt::format("sensor '{}' has no read binding", descriptor_.sensor_id));
  }
  if (hook_.property != descriptor_.property) {
    throw Error(ErrorCode::kInstrumentation,
                fmt::format("sensor '{}' watches {} but its hook is bound to {}", descriptor_.sensor_id,
                            descriptor_.property.qualified(), hook_.property.qualified()));
  }
}

void Sensor::activate() { descriptor_.status = SensorStatus::kActive; }

void Sensor::deactivate() {
  descriptor_.status = SensorStatus::kInactive;
  previous_.reset();
}

bool Sensor::due(Tick now) const {
  if (descriptor_.mode.kind != TriggerMode::Kind::kTimeTriggered) return false;
  if (now < anchor_) return false;
  return (now - anchor_) % descriptor_.mode.period == 0;
}

void Sensor::set_period(Tick period, Tick anchor) {
  if (descriptor_.mode.kind != TriggerMode::Kind::kTimeTriggered) {
    throw Error(ErrorCode::kConfiguration, fmt::format("sensor '{}' is not time-triggered", id()));
  }
  if (period < 1) throw Error(ErrorCode::kConfiguration, fmt::format("sensor '{}': period must be >= 1", id()));
  descriptor_.mode.period = period;
  anchor_ = anchor;
}

Measurement Sensor::sample(Tick now) {
  Measurement m = poll(descriptor_, hook_, now);
  previous_ = m.value;
  notify(m);
  return m;
}

std::optional<Measurement> Sensor::evaluate(const Threshold& threshold, Tick now) {
  auto m = emit_if_violation(descriptor_, hook_, threshold, previous_, now);
  if (m) notify(*m);
  return m;
}

}  // namespace mapek
