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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mapek {

// Logical time. One tick is the smallest scheduling quantum of the loop.
using Tick = std::uint64_t;

// Identifies a monitorable property. `component` is the owning service and
// `operation` the instrumented operation (empty for plain gauges).
struct PropertyId {
  std::string name;
  std::string component;
  std::string operation;

  auto operator<=>(const PropertyId&) const = default;
  bool operator==(const PropertyId&) const = default;

  // "component.name" or "component.operation.name".
  std::string qualified() const;
};

enum class PropertyKind { kSystem, kEnvironment };

// Carried as metadata only.
enum class QosPurpose { kSelfHealing, kSelfProtecting, kSelfOptimizing, kSelfConfiguring };

std::string_view to_string(PropertyKind kind);
std::string_view to_string(QosPurpose purpose);

// Acceptable range of a property value. All bounds are strict: a value equal
// to `upper` is within range.
struct Threshold {
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> relative_change_pct;

  bool operator==(const Threshold&) const = default;

  // Throws Error(kConfiguration) naming the broken invariant.
  void validate() const;
};

struct PropertySpec {
  PropertyId id;
  PropertyKind kind = PropertyKind::kSystem;
  std::string unit;
  QosPurpose qos_purpose = QosPurpose::kSelfOptimizing;
  Threshold threshold;
  bool core_metric = false;

  void validate() const;
};

enum class ViolationKind { kLower, kUpper, kRelativeChange };

std::string_view to_string(ViolationKind kind);
std::optional<ViolationKind> parse_violation_kind(std::string_view text);

// Returns the violated clauses, always ordered Lower, Upper, RelativeChange.
// A missing or zero `previous` never yields RelativeChange.
std::vector<ViolationKind> check_threshold(const Threshold& threshold,
                                           std::optional<double> previous,
                                           double value);

struct Measurement {
  PropertyId property;
  double value = 0.0;
  Tick tick = 0;
  std::string sensor_id;

  bool operator==(const Measurement&) const = default;
};

// Composed snapshot of the latest value of every monitored property.
class SystemState {
 public:
  explicit SystemState(Tick composed_at = 0) : composed_at_(composed_at) {}

  // Overwrites any entry for the same property; advances composed_at to the
  // measurement tick when the measurement is newer.
  void add(Measurement measurement);
  // Returns false when the property was absent.
  bool remove(const PropertyId& id);
  std::optional<Measurement> get(const PropertyId& id) const;
  bool contains(const PropertyId& id) const { return entries_.contains(id); }

  const std::map<PropertyId, Measurement>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  Tick composed_at() const { return composed_at_; }
  // No-op when `now` is not ahead of the current composition time.
  void advance_to(Tick now);

  bool operator==(const SystemState&) const = default;

 private:
  std::map<PropertyId, Measurement> entries_;
  Tick composed_at_;
};

// Throws Error(kComposition) on a duplicate property or a measurement newer
// than `now`.
SystemState compose_state(std::span<const Measurement> measurements, Tick now);

struct ViolationEvent {
  PropertyId property;
  ViolationKind violation = ViolationKind::kUpper;
  double observed = 0.0;
  // Baseline value; set for RelativeChange only.
  std::optional<double> reference;
  Tick tick = 0;

  bool operator==(const ViolationEvent&) const = default;
};

// Expands check_threshold output into events for one measurement.
std::vector<ViolationEvent> violations_for(const Measurement& measurement,
                                           const Threshold& threshold,
                                           std::optional<double> previous);

}  // namespace mapek
