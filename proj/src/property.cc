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

#include "mapek/property.h"

#include <cmath>

#include <fmt/format.h>

#include "mapek/error.h"

namespace mapek {

std::string PropertyId::qualified() const {
  if (operation.empty()) return fmt::format("{}.{}", component, name);
  return fmt::format("{}.{}.{}", component, operation, name);
}

std::string_view to_string(PropertyKind kind) {
  return kind == PropertyKind::kSystem ? "system" : "environment";
}

std::string_view to_string(QosPurpose purpose) {
  switch (purpose) {
    case QosPurpose::kSelfHealing: return "self-healing";
    case QosPurpose::kSelfProtecting: return "self-protecting";
    case QosPurpose::kSelfOptimizing: return "self-optimizing";
    case QosPurpose::kSelfConfiguring: return "self-configuring";
  }
  return "unknown";
}

void Threshold::validate() const {
  if (!lower && !upper && !relative_change_pct) {
    throw Error(ErrorCode::kConfiguration, "threshold must set at least one of lower, upper, relative_change_pct");
  }
  if (lower && upper && !(*lower < *upper)) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("threshold lower ({}) must be below upper ({})", *lower, *upper));
  }
  if (relative_change_pct && !(*relative_change_pct > 0.0)) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("threshold relative_change_pct ({}) must be positive", *relative_change_pct));
  }
}

void PropertySpec::validate() const {
  if (id.name.empty()) throw Error(ErrorCode::kConfiguration, "property name must be non-empty");
  if (unit.empty()) {
    throw Error(ErrorCode::kConfiguration, fmt::format("property {} has an empty unit", id.qualified()));
  }
  threshold.validate();
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kLower: return "Lower";
    case ViolationKind::kUpper: return "Upper";
    case ViolationKind::kRelativeChange: return "RelativeChange";
  }
  return "unknown";
}

std::optional<ViolationKind> parse_violation_kind(std::string_view text) {
  if (text == "Lower") return ViolationKind::kLower;
  if (text == "Upper") return ViolationKind::kUpper;
  if (text == "RelativeChange") return ViolationKind::kRelativeChange;
  return std::nullopt;
}

std::vector<ViolationKind> check_threshold(const Threshold& threshold,
                                           std::optional<double> previous,
                                           double value) {
  std::vector<ViolationKind> out;
  if (threshold.lower && value < *threshold.lower) out.push_back(ViolationKind::kLower);
  if (threshold.upper && value > *threshold.upper) out.push_back(ViolationKind::kUpper);
  if (threshold.relative_change_pct && previous && *previous != 0.0) {
    const double change_pct = 100.0 * std::fabs(value - *previous) / std::fabs(*previous);
    if (change_pct > *threshold.relative_change_pct) out.push_back(ViolationKind::kRelativeChange);
  }
  return out;
}

void SystemState::add(Measurement measurement) {
  advance_to(measurement.tick);
  PropertyId key = measurement.property;
  entries_.insert_or_assign(std::move(key), std::move(measurement));
}

bool SystemState::remove(const PropertyId& id) { return entries_.erase(id) > 0; }

std::optional<Measurement> SystemState::get(const PropertyId& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SystemState::advance_to(Tick now) {
  if (now > composed_at_) composed_at_ = now;
}

SystemState compose_state(std::span<const Measurement> measurements, Tick now) {
  SystemState state(now);
  for (const Measurement& m : measurements) {
    if (state.contains(m.property)) {
      throw Error(ErrorCode::kComposition,
                  fmt::format("duplicate measurement for property {}", m.property.qualified()));
    }
    if (m.tick > now) {
      throw Error(ErrorCode::kComposition,
                  fmt::format("measurement of {} at tick {} is newer than composition tick {}",
                              m.property.qualified(), m.tick, now));
    }
    state.add(m);
  }
  return state;
}

std::vector<ViolationEvent> violations_for(const Measurement& measurement,
                                           const Threshold& threshold,
                                           std::optional<double> previous) {
  std::vector<ViolationEvent> events;
  for (ViolationKind kind : check_threshold(threshold, previous, measurement.value)) {
    ViolationEvent ev{measurement.property, kind, measurement.value, std::nullopt, measurement.tick};
    if (kind == ViolationKind::kRelativeChange) ev.reference = previous;
    events.push_back(std::move(ev));
  }
  return events;
}

}  // namespace mapek
