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

#include "mapek/adaptive.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mapek/error.h"

namespace mapek {

void FrequencyPolicy::validate() const {
  if (p_min < 1) throw Error(ErrorCode::kConfiguration, "frequency policy p_min must be >= 1");
  if (p_min > p_max) {
    throw Error(ErrorCode::kConfiguration, fmt::format("frequency policy p_min ({}) exceeds p_max ({})", p_min, p_max));
  }
  if (!(decrease_factor > 0.0 && decrease_factor <= 1.0)) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("frequency policy decrease_factor must be in (0, 1], got {}", decrease_factor));
  }
  if (!(increase_factor >= 1.0) || !std::isfinite(increase_factor)) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("frequency policy increase_factor must be >= 1, got {}", increase_factor));
  }
  if (quiet_windows_required < 1) {
    throw Error(ErrorCode::kConfiguration, "frequency policy quiet_windows must be >= 1");
  }
}

namespace {

Tick scaled(Tick period, double factor) {
  return static_cast<Tick>(std::floor(static_cast<double>(period) * factor));
}

}  // namespace

FrequencyStep adjust_frequency(const FrequencyPolicy& policy, Tick period, WindowOutcome outcome,
                               std::uint32_t quiet_streak) {
  if (outcome == WindowOutcome::kAlarm) {
    return {std::clamp(scaled(period, policy.decrease_factor), policy.p_min, policy.p_max), 0};
  }
  const std::uint32_t streak = quiet_streak + 1;
  if (streak >= policy.quiet_windows_required) {
    return {std::clamp(scaled(period, policy.increase_factor), policy.p_min, policy.p_max), 0};
  }
  return {period, streak};
}

std::string_view to_string(Stage stage) { return stage == Stage::kCoreOnly ? "CoreOnly" : "Extended"; }

void StagePolicy::validate() const {
  if (core_set.empty()) throw Error(ErrorCode::kConfiguration, "stage policy core set must be non-empty");
  for (const PropertyId& id : core_set) {
    if (!extended_set.contains(id)) {
      throw Error(ErrorCode::kConfiguration,
                  fmt::format("stage policy core property {} is missing from the extended set", id.qualified()));
    }
  }
  if (stability_windows < 1) throw Error(ErrorCode::kConfiguration, "stage policy stability_windows must be >= 1");
  if (window_ticks < 1) throw Error(ErrorCode::kConfiguration, "stage policy window_ticks must be >= 1");
}

namespace {

void enforce_stage(const StagePolicy& policy, MonitoringController& controller) {
  const auto& wanted = policy.prescribed();
  for (const std::string& id : controller.sensor_ids()) {
    if (wanted.contains(controller.sensor_descriptor(id).property)) {
      controller.activate_sensor(id);
    } else {
      controller.retire_sensor(id);
    }
  }
}

}  // namespace

void install_stage(const StagePolicy& policy, MonitoringController& controller) {
  policy.validate();
  std::set<PropertyId> sensed;
  for (const std::string& id : controller.sensor_ids()) sensed.insert(controller.sensor_descriptor(id).property);
  for (const PropertyId& id : policy.extended_set) {
    if (!sensed.contains(id)) {
      throw Error(ErrorCode::kConfiguration,
                  fmt::format("stage policy needs a sensor for extended property {}", id.qualified()));
    }
  }
  enforce_stage(policy, controller);
}

StagePolicy apply_stage(StagePolicy policy, MonitoringController& controller, std::span<const LogEntry> window) {
  const bool violated =
      std::any_of(window.begin(), window.end(), [](const LogEntry& e) { return !e.events.empty(); });
  const Stage before = policy.current_stage;
  if (policy.current_stage == Stage::kCoreOnly) {
    if (violated) {
      policy.current_stage = Stage::kExtended;
      policy.clean_windows = 0;
    }
  } else if (violated) {
    policy.clean_windows = 0;
  } else if (++policy.clean_windows >= policy.stability_windows) {
    policy.current_stage = Stage::kCoreOnly;
    policy.clean_windows = 0;
  }
  if (policy.current_stage != before) enforce_stage(policy, controller);
  return policy;
}

void LoadProportionalPolicy::validate() const {
  if (bands.empty()) throw Error(ErrorCode::kConfiguration, "load policy needs at least one band");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (bands[i].period < 1) {
      throw Error(ErrorCode::kConfiguration, fmt::format("load policy band {} period must be >= 1", i));
    }
    if (i > 0 && !(bands[i - 1].load_upper_bound < bands[i].load_upper_bound)) {
      throw Error(ErrorCode::kConfiguration, "load policy bands must be sorted by ascending load bound");
    }
  }
}

Tick load_band_period(const LoadProportionalPolicy& policy, double current_load) {
  for (const LoadBand& band : policy.bands) {
    if (band.load_upper_bound >= current_load) return band.period;
  }
  return policy.bands.back().period;
}

std::string_view policy_name(const PolicyConfig& policy) {
  switch (policy.index()) {
    case 1: return "frequency";
    case 2: return "stage";
    case 3: return "load";
    default: return "none";
  }
}

// ---------------------------------------------------------------------------

namespace {

void require_periodic(const MonitoringController& controller, std::string_view policy) {
  if (!controller.monitoring_mode().is_periodic()) {
    throw Error(ErrorCode::kConfiguration, fmt::format("{} policy requires periodic monitoring mode", policy));
  }
}

// The periodic entry appended by this tick, if any.
std::optional<LogEntry> fresh_periodic_entry(Tick now, const KnowledgeLog& log,
                                             std::optional<std::uint64_t>& last_seq) {
  auto entry = log.get_data();
  if (!entry || entry->tick != now || entry->cause != EntryCause::kPeriodicTick) return std::nullopt;
  if (last_seq && *last_seq == entry->seq) return std::nullopt;
  last_seq = entry->seq;
  return entry;
}

}  // namespace

FrequencyAdapter::FrequencyAdapter(FrequencyPolicy policy) : policy_(policy) { policy_.validate(); }

void FrequencyAdapter::install(MonitoringController& controller) {
  require_periodic(controller, name());
  period_ = controller.monitoring_mode().log_period;
  if (period_ < policy_.p_min || period_ > policy_.p_max) {
    throw Error(ErrorCode::kConfiguration, fmt::format("initial period {} lies outside [{}, {}]", period_,
                                                       policy_.p_min, policy_.p_max));
  }
  controller.retime(period_, controller.last_tick().value_or(0));
  period_trace_.emplace_back(controller.last_tick().value_or(0), period_);
}

void FrequencyAdapter::after_tick(Tick now, MonitoringController& controller, const KnowledgeLog& log) {
  auto entry = fresh_periodic_entry(now, log, last_seq_);
  if (!entry) return;
  const WindowOutcome outcome = entry->events.empty() ? WindowOutcome::kQuiet : WindowOutcome::kAlarm;
  const FrequencyStep step = adjust_frequency(policy_, period_, outcome, quiet_streak_);
  quiet_streak_ = step.quiet_streak;
  if (step.period != period_) {
    period_ = step.period;
    controller.retime(period_, now);
    period_trace_.emplace_back(now + 1, period_);
  }
}

StageAdapter::StageAdapter(StagePolicy policy) : policy_(std::move(policy)) { policy_.validate(); }

void StageAdapter::install(MonitoringController& controller) {
  install_stage(policy_, controller);
  stage_trace_.emplace_back(controller.last_tick().value_or(0), policy_.current_stage);
}

void StageAdapter::after_tick(Tick now, MonitoringController& controller, const KnowledgeLog& log) {
  if ((now + 1) % policy_.window_ticks != 0) return;
  const Tick start = now + 1 - policy_.window_ticks;
  const std::vector<LogEntry> window = log.history(start, now);
  const Stage before = policy_.current_stage;
  policy_ = apply_stage(std::move(policy_), controller, window);
  if (policy_.current_stage != before) stage_trace_.emplace_back(now + 1, policy_.current_stage);
}

LoadAdapter::LoadAdapter(LoadProportionalPolicy policy) : policy_(std::move(policy)) { policy_.validate(); }

void LoadAdapter::install(MonitoringController& controller) {
  require_periodic(controller, name());
  if (controller.find_property(policy_.load_property) == nullptr) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("load policy property {} is not monitored", policy_.load_property.qualified()));
  }
  period_ = controller.monitoring_mode().log_period;
  controller.retime(period_, controller.last_tick().value_or(0));
  period_trace_.emplace_back(controller.last_tick().value_or(0), period_);
}

void LoadAdapter::after_tick(Tick now, MonitoringController& controller, const KnowledgeLog& log) {
  auto entry = fresh_periodic_entry(now, log, last_seq_);
  if (!entry) return;
  const auto load = entry->state.get(policy_.load_property);
  if (!load) return;
  const Tick wanted = load_band_period(policy_, load->value);
  if (wanted != period_) {
    period_ = wanted;
    controller.retime(period_, now);
    period_trace_.emplace_back(now + 1, period_);
  }
}

std::unique_ptr<AdaptiveStrategy> make_strategy(const PolicyConfig& policy) {
  if (const auto* p = std::get_if<FrequencyPolicy>(&policy)) return std::make_unique<FrequencyAdapter>(*p);
  if (const auto* p = std::get_if<StagePolicy>(&policy)) return std::make_unique<StageAdapter>(*p);
  if (const auto* p = std::get_if<LoadProportionalPolicy>(&policy)) return std::make_unique<LoadAdapter>(*p);
  return nullptr;
}

}  // namespace mapek
