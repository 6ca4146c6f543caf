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
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mapek/config.h"
#include "mapek/knowledge_log.h"
#include "mapek/managed_sim.h"
#include "mapek/property.h"
#include "mapek/sensing.h"

namespace mapek::testing {

inline PropertyId Web(const std::string& name) { return PropertyId{name, "web", ""}; }

// Gauges backed by arbitrary functions of the tick.
class FakeSystem : public ManagedSystem {
 public:
  void set(const PropertyId& id, std::function<double(Tick)> fn) { gauges_[id] = std::move(fn); }
  void set_constant(const PropertyId& id, double v) {
    set(id, [v](Tick) { return v; });
  }
  void set_trace(const PropertyId& id, std::vector<double> trace) {
    set(id, [trace = std::move(trace)](Tick t) { return trace.at(t); });
  }

  bool has_gauge(const PropertyId& id) const override { return gauges_.contains(id); }
  double gauge_value(const PropertyId& id, Tick tick) const override {
    ++reads_;
    return gauges_.at(id)(tick);
  }
  std::uint64_t reads() const { return reads_; }

 private:
  std::map<PropertyId, std::function<double(Tick)>> gauges_;
  mutable std::uint64_t reads_ = 0;
};

// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  // Mostly "interesting" values: integers near a pivot, exact hits, zeros.
  double near(double pivot, double spread) {
    switch (uniform(0, 3)) {
      case 0: return pivot;
      case 1: return pivot + static_cast<double>(static_cast<std::int64_t>(uniform(0, 20)) - 10);
      case 2: return 0.0;
      default: return real(pivot - spread, pivot + spread);
    }
  }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items.at(uniform(0, items.size() - 1));
  }

 private:
  std::mt19937_64 rng_;
};

// One web service with server_load, response_time and bandwidth.
struct ScenarioSpec {
  std::uint64_t seed = 7;
  Tick duration = 100;
  double noise = 0.0;
  MonitoringMode mode = MonitoringMode::periodic(10);
  Tick sensor_period = 1;
  bool event_sensors = false;
  std::vector<ScriptedEvent> events;
  PolicyConfig policy;
};

inline RunConfig MakeWebConfig(const ScenarioSpec& spec) {
  RunConfig c;
  const PropertyId load = Web("server_load");
  const PropertyId rt = Web("response_time");
  const PropertyId bw = Web("bandwidth");
  c.domain.domain_name = "shop";
  c.domain.tasks.push_back(Task{"serve", {Service{"web", {load, rt, bw}}}, Composite{{"web"}}});
  c.script.seed = spec.seed;
  c.script.duration = spec.duration;
  c.script.gauges[load] = GaugeProfile{30.0, spec.noise};
  c.script.gauges[rt] = GaugeProfile{100.0, spec.noise};
  c.script.gauges[bw] = GaugeProfile{40.0, spec.noise};
  c.script.events = spec.events;

  auto prop = [](PropertyId id, std::string unit, double upper, bool core) {
    PropertySpec p;
    p.id = std::move(id);
    p.unit = std::move(unit);
    p.threshold.upper = upper;
    p.core_metric = core;
    return p;
  };
  c.properties = {prop(load, "percent", 50.0, true), prop(rt, "ms", 400.0, false), prop(bw, "Mbit/s", 90.0, false)};
  const TriggerMode trigger =
      spec.event_sensors ? TriggerMode::event_triggered() : TriggerMode::time_triggered(spec.sensor_period);
  c.sensors = {SensorDescriptor{"s_bw", bw, trigger, SensorStatus::kActive},
               SensorDescriptor{"s_load", load, trigger, SensorStatus::kActive},
               SensorDescriptor{"s_rt", rt, trigger, SensorStatus::kActive}};
  c.mode = spec.mode;
  c.policy = spec.policy;
  return c;
}

inline ScriptedEvent Spike(const PropertyId& gauge, Tick tick, double value, Tick width) {
  return ScriptedEvent{tick, gauge, SpikeTo{value, width}};
}

// Fresh scratch directory per test, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mapek-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace mapek::testing
