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
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mapek/controller.h"
#include "mapek/knowledge_log.h"
#include "mapek/property.h"

namespace mapek {

// Multiplicative frequency modulation. An alarm shrinks the sampling period,
// `quiet_windows_required` consecutive quiet windows grow it. The period is
// always clamped to [p_min, p_max].
struct FrequencyPolicy {
  Tick p_min = 1;
  Tick p_max = 32;
  double decrease_factor = 0.5;
  double increase_factor = 2.0;
  std::uint32_t quiet_windows_required = 3;

  void validate() const;
  bool operator==(const FrequencyPolicy&) const = default;
};

enum class WindowOutcome { kAlarm, kQuiet };

struct FrequencyStep {
  Tick period;
  std::uint32_t quiet_streak;

  bool operator==(const FrequencyStep&) const = default;
};

FrequencyStep adjust_frequency(const FrequencyPolicy& policy, Tick period, WindowOutcome outcome,
                               std::uint32_t quiet_streak);

enum class Stage { kCoreOnly, kExtended };

std::string_view to_string(Stage stage);

// Two-stage metric sets: watch `core_set` until a window contains a
// violation, then watch `extended_set` until `stability_windows` clean
// windows in a row.
struct StagePolicy {
  std::set<PropertyId> core_set;
  std::set<PropertyId> extended_set;
  std::uint32_t stability_windows = 2;
  Tick window_ticks = 20;
  Stage current_stage = Stage::kCoreOnly;
  std::uint32_t clean_windows = 0;

  void validate() const;
  const std::set<PropertyId>& prescribed() const {
    return current_stage == Stage::kCoreOnly ? core_set : extended_set;
  }
  bool operator==(const StagePolicy&) const = default;
};

// Checks every extended property has a deployed sensor (Error(kConfiguration)
// otherwise) and brings the controller's active sensors in line with the
// current stage.
void install_stage(const StagePolicy& policy, MonitoringController& controller);

// Advances the stage machine over one window of log entries and applies the
// resulting sensor set to the controller.
StagePolicy apply_stage(StagePolicy policy, MonitoringController& controller, std::span<const LogEntry> window);

struct LoadBand {
  double load_upper_bound;
  Tick period;

  bool operator==(const LoadBand&) const = default;
};

// Reporting period chosen by the band the current load falls into.
struct LoadProportionalPolicy {
  PropertyId load_property;
  std::vector<LoadBand> bands;

  void validate() const;
  bool operator==(const LoadProportionalPolicy&) const = default;
};

// Period of the first band whose bound is >= load; the last band's period
// beyond the last bound.
Tick load_band_period(const LoadProportionalPolicy& policy, double current_load);

using PolicyConfig = std::variant<std::monostate, FrequencyPolicy, StagePolicy, LoadProportionalPolicy>;

std::string_view policy_name(const PolicyConfig& policy);

// Drives one policy from the run loop.
class AdaptiveStrategy {
 public:
  virtual ~AdaptiveStrategy() = default;

  virtual std::string_view name() const = 0;
  // Called once, after sensors are deployed and before the first tick.
  virtual void install(MonitoringController& controller) = 0;
  // Called after controller.tick(now); changes take effect from now + 1.
  virtual void after_tick(Tick now, MonitoringController& controller, const KnowledgeLog& log) = 0;

  // (tick, period) from which each sampling period applies.
  const std::vector<std::pair<Tick, Tick>>& period_trace() const { return period_trace_; }

 protected:
  std::vector<std::pair<Tick, Tick>> period_trace_;
};

class FrequencyAdapter : public AdaptiveStrategy {
 public:
  explicit FrequencyAdapter(FrequencyPolicy policy);

  std::string_view name() const override { return "frequency"; }
  void install(MonitoringController& controller) override;
  void after_tick(Tick now, MonitoringController& controller, const KnowledgeLog& log) override;

  Tick period() const { return period_; }
  std::uint32_t quiet_streak() const { return quiet_streak_; }
  const FrequencyPolicy& policy() const { return policy_; }

 private:
  FrequencyPolicy policy_;
  Tick period_ = 1;
  std::uint32_t quiet_streak_ = 0;
  std::optional<std::uint64_t> last_seq_;
};

class StageAdapter : public AdaptiveStrategy {
 public:
  explicit StageAdapter(StagePolicy policy);

  std::string_view name() const override { return "stage"; }
  void install(MonitoringController& controller) override;
  void after_tick(Tick now, MonitoringController& controller, const KnowledgeLog& log) override;

  const StagePolicy& policy() const { return policy_; }
  // (tick, stage) from which each stage applies.
  const std::vector<std::pair<Tick, Stage>>& stage_trace() const { return stage_trace_; }

 private:
  StagePolicy policy_;
  std::vector<std::pair<Tick, Stage>> stage_trace_;
};

class LoadAdapter : public AdaptiveStrategy {
 public:
  explicit LoadAdapter(LoadProportionalPolicy policy);

  std::string_view name() const override { return "load"; }
  void install(MonitoringController& controller) override;
  void after_tick(Tick now, MonitoringController& controller, const KnowledgeLog& log) override;

  Tick period() const { return period_; }

 private:
  LoadProportionalPolicy policy_;
  Tick period_ = 1;
  std::optional<std::uint64_t> last_seq_;
};

// Null for std::monostate.
std::unique_ptr<AdaptiveStrategy> make_strategy(const PolicyConfig& policy);

}  // namespace mapek
