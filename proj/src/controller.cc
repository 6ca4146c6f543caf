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

#include "mapek/controller.h"

#include <fmt/format.h>

#include "mapek/error.h"

namespace mapek {

void MonitoringMode::validate() const {
  if (kind == Kind::kPeriodic && log_period < 1) {
    throw Error(ErrorCode::kConfiguration, fmt::format("periodic log_period must be >= 1, got {}", log_period));
  }
}

std::string MonitoringMode::describe() const {
  return is_periodic() ? fmt::format("periodic:{}", log_period) : std::string("event");
}

void ControllerConfig::validate() const {
  mode.validate();
  std::set<PropertyId> declared;
  for (const PropertySpec& p : properties) {
    p.validate();
    if (!declared.insert(p.id).second) {
      throw Error(ErrorCode::kConfiguration, fmt::format("property {} declared twice", p.id.qualified()));
    }
  }
  std::set<std::string> ids;
  std::set<PropertyId> covered;
  for (const SensorDescriptor& s : sensors) {
    if (!ids.insert(s.sensor_id).second) {
      throw Error(ErrorCode::kDuplicateSensor, fmt::format("sensor '{}' declared twice", s.sensor_id));
    }
    if (!declared.contains(s.property)) {
      throw Error(ErrorCode::kConfiguration, fmt::format("sensor '{}' references undeclared property {}",
                                                         s.sensor_id, s.property.qualified()));
    }
    if (s.mode.kind == TriggerMode::Kind::kTimeTriggered && s.mode.period < 1) {
      throw Error(ErrorCode::kConfiguration, fmt::format("sensor '{}' period must be >= 1", s.sensor_id));
    }
    covered.insert(s.property);
  }
  for (const PropertySpec& p : properties) {
    if (!covered.contains(p.id)) {
      throw Error(ErrorCode::kConfiguration, fmt::format("property {} has no sensor", p.id.qualified()));
    }
  }
}

MonitoringController::MonitoringController(std::vector<PropertySpec> properties, MonitoringMode mode,
                                           KnowledgeLog& log)
    : properties_(std::move(properties)), mode_(mode), log_(log) {
  mode_.validate();
  std::set<PropertyId> seen;
  for (const PropertySpec& p : properties_) {
    p.validate();
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::kConfiguration, fmt::format("property {} declared twice", p.id.qualified()));
    }
  }
}

MonitoringController::~MonitoringController() = default;

void MonitoringController::set_monitoring_mode(MonitoringMode mode) {
  mode.validate();
  mode_ = mode;
  log_anchor_ = 0;
}

void MonitoringController::set_system_state(SystemState state) {
  for (const auto& [id, m] : state.entries()) {
    if (find_property(id) == nullptr) {
      throw Error(ErrorCode::kConfiguration, fmt::format("state contains undeclared property {}", id.qualified()));
    }
  }
  current_ = std::move(state);
}

const PropertySpec* MonitoringController::find_property(const PropertyId& id) const {
  for (const PropertySpec& p : properties_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::optional<double> MonitoringController::previous_value(const PropertyId& id) const {
  auto it = previous_values_.find(id);
  if (it == previous_values_.end()) return std::nullopt;
  return it->second;
}

std::string MonitoringController::deploy_sensor(SensorDescriptor descriptor, InstrumentationHook hook) {
  if (find_property(descriptor.property) == nullptr) {
    throw Error(ErrorCode::kConfiguration, fmt::format("sensor '{}' references undeclared property {}",
                                                       descriptor.sensor_id, descriptor.property.qualified()));
  }
  if (sensors_.contains(descriptor.sensor_id)) {
    throw Error(ErrorCode::kDuplicateSensor, fmt::format("sensor '{}' is already deployed", descriptor.sensor_id));
  }
  descriptor.status = SensorStatus::kActive;
  auto sensor = std::make_unique<Sensor>(std::move(descriptor), std::move(hook));
  sensor->attach(*this);
  std::string id = sensor->id();
  sensors_.emplace(id, std::move(sensor));
  return id;
}

Sensor& MonitoringController::find_sensor(const std::string& sensor_id) {
  auto it = sensors_.find(sensor_id);
  if (it == sensors_.end()) throw Error(ErrorCode::kUnknownSensor, fmt::format("no sensor '{}'", sensor_id));
  return *it->second;
}

const Sensor& MonitoringController::find_sensor(const std::string& sensor_id) const {
  auto it = sensors_.find(sensor_id);
  if (it == sensors_.end()) throw Error(ErrorCode::kUnknownSensor, fmt::format("no sensor '{}'", sensor_id));
  return *it->second;
}

void MonitoringController::retire_sensor(const std::string& sensor_id) {
  Sensor& sensor = find_sensor(sensor_id);
  if (!sensor.active()) return;
  sensor.detach(*this);
  sensor.deactivate();
  const PropertyId& property = sensor.property();
  for (const auto& [id, other] : sensors_) {
    if (other->active() && other->property() == property) return;
  }
  current_.remove(property);
  previous_values_.erase(property);
}

void MonitoringController::activate_sensor(const std::string& sensor_id) {
  Sensor& sensor = find_sensor(sensor_id);
  if (sensor.active()) return;
  sensor.activate();
  sensor.attach(*this);
}

SensorStatus MonitoringController::sensor_status(const std::string& sensor_id) const {
  return find_sensor(sensor_id).status();
}

const SensorDescriptor& MonitoringController::sensor_descriptor(const std::string& sensor_id) const {
  return find_sensor(sensor_id).descriptor();
}

std::vector<std::string> MonitoringController::sensor_ids() const {
  std::vector<std::string> ids;
  ids.reserve(sensors_.size());
  for (const auto& [id, sensor] : sensors_) ids.push_back(id);
  return ids;
}

std::set<PropertyId> MonitoringController::active_properties() const {
  std::set<PropertyId> out;
  for (const auto& [id, sensor] : sensors_) {
    if (sensor->active()) out.insert(sensor->property());
  }
  return out;
}

void MonitoringController::on_measurement(const Measurement& measurement) {
  const PropertySpec* spec = find_property(measurement.property);
  if (spec == nullptr) {
    ++dropped_;
    return;
  }
  current_.add(measurement);
  for (ViolationEvent& ev : violations_for(measurement, spec->threshold, previous_value(measurement.property))) {
    ++violations_detected_;
    if (violation_listener_) violation_listener_(ev);
    pending_.push_back(std::move(ev));
  }
  previous_values_[measurement.property] = measurement.value;
}

Measurement MonitoringController::request_sample(const std::string& sensor_id) {
  Sensor& sensor = find_sensor(sensor_id);
  Measurement m = sensor.sample(last_tick_.value_or(0));
  ++measurements_taken_;
  return m;
}

bool MonitoringController::log_point(Tick now) const {
  return now >= log_anchor_ && (now - log_anchor_) % mode_.log_period == 0;
}

void MonitoringController::tick(Tick now) {
  if (last_tick_ && now <= *last_tick_) {
    throw Error(ErrorCode::kScheduler, fmt::format("tick {} does not follow tick {}", now, *last_tick_));
  }
  last_tick_ = now;
  current_.advance_to(now);

  std::uint64_t reads = 0;
  for (auto& [id, sensor] : sensors_) {
    if (!sensor->active()) continue;
    switch (sensor->descriptor().mode.kind) {
      case TriggerMode::Kind::kTimeTriggered:
        if (sensor->due(now)) {
          sensor->sample(now);
          ++reads;
        }
        break;
      case TriggerMode::Kind::kEventTriggered: {
        const PropertySpec* spec = find_property(sensor->property());
        const bool emitted = sensor->evaluate(spec->threshold, now).has_value();
        ++reads;
        // Silent reads still move the baseline so the controller's check
        // sees the same previous value the sensor used.
        if (!emitted) previous_values_[sensor->property()] = *sensor->previous();
        break;
      }
      case TriggerMode::Kind::kOnDemand:
        break;
    }
  }
  measurements_taken_ += reads;

  if (mode_.is_periodic()) {
    if (log_point(now)) write_entry(EntryCause::kPeriodicTick, now, reads);
  } else if (!pending_.empty()) {
    write_entry(EntryCause::kViolation, now, reads);
  }
}

void MonitoringController::flush() {
  if (pending_.empty()) return;
  write_entry(EntryCause::kViolation, last_tick_.value_or(0), 0);
}

void MonitoringController::retime(Tick period, Tick anchor) {
  if (period < 1) throw Error(ErrorCode::kConfiguration, "retime period must be >= 1");
  if (mode_.is_periodic()) {
    mode_.log_period = period;
    log_anchor_ = anchor;
  }
  for (auto& [id, sensor] : sensors_) {
    if (sensor->descriptor().mode.kind == TriggerMode::Kind::kTimeTriggered) sensor->set_period(period, anchor);
  }
}

void MonitoringController::write_entry(EntryCause cause, Tick now, std::uint64_t overhead) {
  SystemState snapshot = current_;
  snapshot.advance_to(now);
  std::vector<ViolationEvent> events = std::move(pending_);
  pending_.clear();
  log_.log(std::move(snapshot), std::move(events), cause, now, overhead);
}

}  // namespace mapek
