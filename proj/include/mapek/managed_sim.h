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
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mapek/property.h"
#include "mapek/sensing.h"

namespace mapek {

// Managed-system model: a domain made of tasks; each task groups services
// (which own gauges) and a composite coordinating some of them.
struct Service {
  std::string name;
  std::vector<PropertyId> gauges;
};

struct Composite {
  std::vector<std::string> member_services;
};

struct Task {
  std::string name;
  std::vector<Service> services;
  Composite composite;
};

struct DomainModel {
  std::string domain_name;
  std::vector<Task> tasks;

  // Throws Error(kBuild).
  void validate() const;
  std::vector<PropertyId> gauges() const;
};

// Scripted effects on a gauge, starting at the event tick.
struct StepTo {
  double value;
};
struct RampTo {
  double value;
  Tick over_ticks;
};
struct SpikeTo {
  double value;
  Tick width_ticks;
};
using EventEffect = std::variant<StepTo, RampTo, SpikeTo>;

struct ScriptedEvent {
  Tick tick = 0;
  PropertyId gauge;
  EventEffect effect = StepTo{0.0};
};

// Discrete domain events (out-of-stock and the like) live on 0/1 gauges.
ScriptedEvent domain_event(const PropertyId& gauge, Tick tick, bool raised);

struct GaugeProfile {
  double baseline = 0.0;
  double noise_amplitude = 0.0;
};

struct ScenarioScript {
  std::uint64_t seed = 0;
  Tick duration = 0;
  // Gauges without a profile sit at 0 with no noise.
  std::map<PropertyId, GaugeProfile> gauges;
  // Later entries win where effects on one gauge overlap.
  std::vector<ScriptedEvent> events;
};

// splitmix64: state advances by a fixed odd constant, output goes through
// two xor-shift-multiply rounds. `at(seed, i)` is the i-th output (1-based)
// of a generator started at `seed`, so traces are random-access.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  static std::uint64_t at(std::uint64_t seed, std::uint64_t index);
  static std::uint64_t mix(std::uint64_t z);
  // Top 53 bits mapped to [0, 1).
  static double to_unit(std::uint64_t x);

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view text);

// Deterministic simulated managed system. Gauge values are a pure function
// of (domain, script, gauge, tick).
class Simulator : public ManagedSystem {
 public:
  // Throws Error(kBuild) when the script references unknown gauges or breaks
  // its invariants.
  static Simulator build(DomainModel domain, ScenarioScript script);

  Tick now() const { return now_; }
  Tick duration() const { return script_.duration; }
  // Throws Error(kEndOfScenario) once now == duration.
  Tick step();

  // Value at the current tick. Throws Error(kUnknownGauge).
  double read_gauge(const PropertyId& id) const;

  bool has_gauge(const PropertyId& id) const override;
  double gauge_value(const PropertyId& id, Tick tick) const override;

  // Scripted level without noise.
  double level_at(const PropertyId& id, Tick tick) const;
  double noise_at(const PropertyId& id, Tick tick) const;

  const DomainModel& domain() const { return domain_; }
  const ScenarioScript& script() const { return script_; }

 private:
  Simulator(DomainModel domain, ScenarioScript script);

  double level_before(const PropertyId& id, std::size_t event_limit, Tick tick) const;

  DomainModel domain_;
  ScenarioScript script_;
  std::map<PropertyId, std::vector<std::size_t>> events_by_gauge_;
  std::map<PropertyId, std::uint64_t> noise_seed_;
  Tick now_ = 0;
};

}  // namespace mapek
