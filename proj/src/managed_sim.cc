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

#include "mapek/managed_sim.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "mapek/error.h"

namespace mapek {

void DomainModel::validate() const {
  std::set<std::string> service_names;
  std::set<PropertyId> seen_gauges;
  for (const Task& task : tasks) {
    if (task.name.empty()) throw Error(ErrorCode::kBuild, "task name must be non-empty");
    std::set<std::string> local;
    for (const Service& service : task.services) {
      if (service.name.empty()) throw Error(ErrorCode::kBuild, fmt::format("task '{}' has an unnamed service", task.name));
      if (!service_names.insert(service.name).second) {
        throw Error(ErrorCode::kBuild, fmt::format("service '{}' declared twice", service.name));
      }
      local.insert(service.name);
      for (const PropertyId& gauge : service.gauges) {
        if (gauge.name.empty()) {
          throw Error(ErrorCode::kBuild, fmt::format("service '{}' has an unnamed gauge", service.name));
        }
        if (gauge.component != service.name) {
          throw Error(ErrorCode::kBuild, fmt::format("gauge {} is owned by service '{}' but names component '{}'",
                                                     gauge.qualified(), service.name, gauge.component));
        }
        if (!seen_gauges.insert(gauge).second) {
          throw Error(ErrorCode::kBuild, fmt::format("gauge {} declared twice", gauge.qualified()));
        }
      }
    }
    if (task.composite.member_services.empty()) {
      throw Error(ErrorCode::kBuild, fmt::format("task '{}' has an empty composite", task.name));
    }
    for (const std::string& member : task.composite.member_services) {
      if (!local.contains(member)) {
        throw Error(ErrorCode::kBuild,
                    fmt::format("composite of task '{}' references undeclared service '{}'", task.name, member));
      }
    }
  }
}

std::vector<PropertyId> DomainModel::gauges() const {
  std::vector<PropertyId> out;
  for (const Task& task : tasks) {
    for (const Service& service : task.services) out.insert(out.end(), service.gauges.begin(), service.gauges.end());
  }
  return out;
}

ScriptedEvent domain_event(const PropertyId& gauge, Tick tick, bool raised) {
  return ScriptedEvent{tick, gauge, StepTo{raised ? 1.0 : 0.0}};
}

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += kGamma;
  return mix(state_);
}

std::uint64_t SplitMix64::at(std::uint64_t seed, std::uint64_t index) { return mix(seed + index * kGamma); }

double SplitMix64::to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Simulator::Simulator(DomainModel domain, ScenarioScript script)
    : domain_(std::move(domain)), script_(std::move(script)) {}

Simulator Simulator::build(DomainModel domain, ScenarioScript script) {
  domain.validate();
  const std::vector<PropertyId> all = domain.gauges();
  const std::set<PropertyId> known(all.begin(), all.end());

  for (const auto& [id, profile] : script.gauges) {
    if (!known.contains(id)) {
      throw Error(ErrorCode::kBuild, fmt::format("script profiles unknown gauge {}", id.qualified()));
    }
    if (!std::isfinite(profile.baseline)) {
      throw Error(ErrorCode::kBuild, fmt::format("gauge {} has a non-finite baseline", id.qualified()));
    }
    if (!(profile.noise_amplitude >= 0.0) || !std::isfinite(profile.noise_amplitude)) {
      throw Error(ErrorCode::kBuild, fmt::format("gauge {} noise amplitude must be finite and >= 0", id.qualified()));
    }
  }
  for (const ScriptedEvent& ev : script.events) {
    if (!known.contains(ev.gauge)) {
      throw Error(ErrorCode::kBuild, fmt::format("script event targets unknown gauge {}", ev.gauge.qualified()));
    }
    if (ev.tick >= script.duration) {
      throw Error(ErrorCode::kBuild, fmt::format("event on {} at tick {} is not before duration {}",
                                                 ev.gauge.qualified(), ev.tick, script.duration));
    }
    std::visit(
        [&](const auto& effect) {
          using T = std::decay_t<decltype(effect)>;
          if (!std::isfinite(effect.value)) {
            throw Error(ErrorCode::kBuild, fmt::format("event on {} has a non-finite value", ev.gauge.qualified()));
          }
          if constexpr (std::is_same_v<T, RampTo>) {
            if (effect.over_ticks < 1) {
              throw Error(ErrorCode::kBuild, fmt::format("ramp on {} needs over_ticks >= 1", ev.gauge.qualified()));
            }
          } else if constexpr (std::is_same_v<T, SpikeTo>) {
            if (effect.width_ticks < 1) {
              throw Error(ErrorCode::kBuild, fmt::format("spike on {} needs width_ticks >= 1", ev.gauge.qualified()));
            }
          }
        },
        ev.effect);
  }

  Simulator sim(std::move(domain), std::move(script));
  for (std::size_t i = 0; i < sim.script_.events.size(); ++i) {
    sim.events_by_gauge_[sim.script_.events[i].gauge].push_back(i);
  }
  for (const PropertyId& id : all) sim.noise_seed_[id] = sim.script_.seed ^ fnv1a64(id.qualified());
  return sim;
}

Tick Simulator::step() {
  if (now_ >= script_.duration) {
    throw Error(ErrorCode::kEndOfScenario, fmt::format("scenario ended at tick {}", script_.duration));
  }
  return ++now_;
}

bool Simulator::has_gauge(const PropertyId& id) const { return noise_seed_.contains(id); }

double Simulator::read_gauge(const PropertyId& id) const { return gauge_value(id, now_); }

double Simulator::gauge_value(const PropertyId& id, Tick tick) const {
  if (!has_gauge(id)) throw Error(ErrorCode::kUnknownGauge, fmt::format("no gauge {}", id.qualified()));
  return level_at(id, tick) + noise_at(id, tick);
}

double Simulator::level_at(const PropertyId& id, Tick tick) const {
  if (!has_gauge(id)) throw Error(ErrorCode::kUnknownGauge, fmt::format("no gauge {}", id.qualified()));
  return level_before(id, script_.events.size(), tick);
}

// Level from the baseline plus events with script index < event_limit. The
// active event with the highest index decides the value.
double Simulator::level_before(const PropertyId& id, std::size_t event_limit, Tick tick) const {
  if (auto it = events_by_gauge_.find(id); it != events_by_gauge_.end()) {
    const auto& indices = it->second;
    for (auto rit = indices.rbegin(); rit != indices.rend(); ++rit) {
      const std::size_t index = *rit;
      if (index >= event_limit) continue;
      const ScriptedEvent& ev = script_.events[index];
      if (tick < ev.tick) continue;
      const Tick elapsed = tick - ev.tick;
      if (const auto* step = std::get_if<StepTo>(&ev.effect)) return step->value;
      if (const auto* spike = std::get_if<SpikeTo>(&ev.effect)) {
        if (elapsed < spike->width_ticks) return spike->value;
        continue;
      }
      const auto& ramp = std::get<RampTo>(ev.effect);
      if (elapsed >= ramp.over_ticks) return ramp.value;
      const double from = level_before(id, index, ev.tick);
      return from + (ramp.value - from) * (static_cast<double>(elapsed) / static_cast<double>(ramp.over_ticks));
    }
  }
  auto profile = script_.gauges.find(id);
  return profile == script_.gauges.end() ? 0.0 : profile->second.baseline;
}

double Simulator::noise_at(const PropertyId& id, Tick tick) const {
  auto profile = script_.gauges.find(id);
  if (profile == script_.gauges.end() || profile->second.noise_amplitude == 0.0) return 0.0;
  const double u = SplitMix64::to_unit(SplitMix64::at(noise_seed_.at(id), tick + 1));
  return profile->second.noise_amplitude * (2.0 * u - 1.0);
}

}  // namespace mapek
