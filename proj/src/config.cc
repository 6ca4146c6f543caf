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

#include "mapek/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace mapek {

std::string_view to_string(ConfigErrorKind kind) {
  switch (kind) {
    case ConfigErrorKind::kSyntax: return "syntax error";
    case ConfigErrorKind::kUnknownSection: return "unknown section";
    case ConfigErrorKind::kUnknownKey: return "unknown key";
    case ConfigErrorKind::kBadValue: return "bad value";
    case ConfigErrorKind::kMissing: return "missing";
    case ConfigErrorKind::kDuplicate: return "duplicate";
    case ConfigErrorKind::kDanglingReference: return "dangling reference";
    case ConfigErrorKind::kInvariant: return "invariant violation";
  }
  return "unknown";
}

namespace {

std::string locate(std::size_t line, std::size_t column) {
  if (line == 0) return "";
  if (column == 0) return fmt::format("line {}: ", line);
  return fmt::format("line {}, column {}: ", line, column);
}

}  // namespace

ConfigError::ConfigError(ConfigErrorKind kind, std::string element, std::size_t line, std::size_t column,
                         const std::string& message)
    : Error(ErrorCode::kConfiguration,
            fmt::format("{}{} in '{}': {}", locate(line, column), to_string(kind), element, message)),
      kind_(kind),
      element_(std::move(element)),
      line_(line),
      column_(column) {}

namespace {

constexpr std::string_view kWhitespace = " \t\r";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kWhitespace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kWhitespace);
  return s.substr(b, e - b + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
  std::size_t column;  // of the value
};

struct Section {
  std::string kind;
  std::string name;
  std::size_t line;
  std::vector<Entry> entries;

  std::string label() const { return name.empty() ? kind : fmt::format("{} {}", kind, name); }
  std::string element(std::string_view key) const { return fmt::format("{}.{}", label(), key); }
  const Entry* find(std::string_view key) const {
    for (const Entry& e : entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }
};

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const std::size_t indent = raw.find_first_not_of(kWhitespace);

    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) {
        throw ConfigError(ConfigErrorKind::kSyntax, std::string(line), line_no, indent + line.size() + 1,
                          "unterminated section header (expected ']')");
      }
      if (!trim(line.substr(close + 1)).empty()) {
        throw ConfigError(ConfigErrorKind::kSyntax, std::string(line), line_no, indent + close + 2,
                          "unexpected text after section header");
      }
      std::vector<std::string_view> words;
      std::string_view inner = trim(line.substr(1, close - 1));
      while (!inner.empty()) {
        const auto sp = inner.find_first_of(kWhitespace);
        words.push_back(inner.substr(0, sp));
        inner = sp == std::string_view::npos ? std::string_view{} : trim(inner.substr(sp));
      }
      if (words.empty() || words.size() > 2) {
        throw ConfigError(ConfigErrorKind::kSyntax, std::string(line), line_no, indent + 1,
                          "section header must be '[kind]' or '[kind name]'");
      }
      sections.push_back(Section{std::string(words[0]), words.size() == 2 ? std::string(words[1]) : std::string(),
                                 line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(ConfigErrorKind::kSyntax, sections.empty() ? std::string(line) : sections.back().label(),
                        line_no, indent + 1, fmt::format("expected 'key = value', got '{}'", line));
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(ConfigErrorKind::kSyntax, std::string(line), line_no, indent + 1, "empty key");
    }
    if (sections.empty()) {
      throw ConfigError(ConfigErrorKind::kSyntax, std::string(key), line_no, indent + 1,
                        "key outside of any section");
    }
    const std::string_view rest = line.substr(eq + 1);
    const std::string_view value = trim(rest);
    const std::size_t value_col =
        indent + eq + 2 + (value.empty() ? 0 : rest.find_first_not_of(kWhitespace));
    Section& current = sections.back();
    if (current.find(key) != nullptr) {
      throw ConfigError(ConfigErrorKind::kDuplicate, current.element(key), line_no, indent + 1,
                        "key given twice in one section");
    }
    current.entries.push_back(Entry{std::string(key), std::string(value), line_no, value_col});
  }
  return sections;
}

const std::map<std::string, std::set<std::string>, std::less<>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>, std::less<>> keys = {
      {"domain", {"description"}},
      {"task", {"services", "composite"}},
      {"service", {"gauges"}},
      {"scenario", {"seed", "duration"}},
      {"gauge", {"baseline", "noise"}},
      {"event", {"gauge", "tick", "kind", "value", "over", "width"}},
      {"property", {"component", "operation", "kind", "unit", "qos", "lower", "upper", "relative_change_pct", "core"}},
      {"sensor", {"property", "trigger", "period", "status"}},
      {"monitor", {"mode", "log_period"}},
      {"output", {"path"}},
      {"policy none", {}},
      {"policy frequency", {"p_min", "p_max", "decrease_factor", "increase_factor", "quiet_windows"}},
      {"policy stage", {"core", "extended", "stability_windows", "window_ticks"}},
      {"policy load", {"property", "bands"}},
  };
  return keys;
}

// Typed access to one section's keys.
class Reader {
 public:
  explicit Reader(const Section& s) : s_(s) {}

  const Section& section() const { return s_; }

  [[noreturn]] void fail(ConfigErrorKind kind, std::string_view key, const std::string& msg) const {
    const Entry* e = key.empty() ? nullptr : s_.find(key);
    throw ConfigError(kind, key.empty() ? s_.label() : s_.element(key), e ? e->line : s_.line, e ? e->column : 0,
                      msg);
  }

  const Entry* find(std::string_view key) const { return s_.find(key); }
  bool has(std::string_view key) const { return find(key) != nullptr; }

  const Entry& require(std::string_view key) const {
    const Entry* e = find(key);
    if (e == nullptr) fail(ConfigErrorKind::kMissing, key, fmt::format("required key '{}' is missing", key));
    return *e;
  }

  std::string string(std::string_view key) const {
    const Entry& e = require(key);
    if (e.value.empty()) fail(ConfigErrorKind::kBadValue, key, "value must be non-empty");
    return e.value;
  }

  std::optional<std::string> opt_string(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return string(key);
  }

  std::uint64_t integer(std::string_view key) const {
    const Entry& e = require(key);
    std::uint64_t v = 0;
    const char* end = e.value.data() + e.value.size();
    auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      fail(ConfigErrorKind::kBadValue, key, fmt::format("expected a non-negative integer, got '{}'", e.value));
    }
    return v;
  }

  std::optional<std::uint64_t> opt_integer(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return integer(key);
  }

  double real(std::string_view key) const {
    const Entry& e = require(key);
    double v = 0;
    const char* end = e.value.data() + e.value.size();
    auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(ConfigErrorKind::kBadValue, key, fmt::format("expected a real number, got '{}'", e.value));
    }
    return v;
  }

  std::optional<double> opt_real(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return real(key);
  }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = require(key).value;
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(ConfigErrorKind::kBadValue, key, fmt::format("expected true or false, got '{}'", v));
  }

  std::vector<std::string> list(std::string_view key) const {
    const Entry& e = require(key);
    std::vector<std::string> out;
    if (trim(e.value).empty()) return out;
    for (std::string_view item : split(e.value, ',')) {
      if (item.empty()) fail(ConfigErrorKind::kBadValue, key, "empty list item");
      out.emplace_back(item);
    }
    return out;
  }

  PropertyId ref(std::string_view key) const { return ref_value(key, string(key)); }

  PropertyId ref_value(std::string_view key, std::string_view text) const {
    try {
      return parse_property_ref(text);
    } catch (const ConfigError& err) {
      fail(ConfigErrorKind::kBadValue, key, fmt::format("malformed reference '{}'", text));
    }
  }

 private:
  const Section& s_;
};

[[noreturn]] void rethrow_as_config(const Error& err, std::string element) {
  if (const auto* ce = dynamic_cast<const ConfigError*>(&err)) throw *ce;
  throw ConfigError(ConfigErrorKind::kInvariant, std::move(element), 0, 0, err.what());
}

class Interpreter {
 public:
  explicit Interpreter(std::vector<Section> sections) : sections_(std::move(sections)) {}

  RunConfig run() {
    check_sections();
    read_domain();
    read_scenario();
    read_properties();
    read_sensors();
    read_monitor();
    read_policy();
    if (const Section* out = single("output")) cfg_.output_path = Reader(*out).string("path");
    try {
      cfg_.validate();
    } catch (const Error& err) {
      rethrow_as_config(err, "config");
    }
    return std::move(cfg_);
  }

 private:
  std::vector<const Section*> all(std::string_view kind) const {
    std::vector<const Section*> out;
    for (const Section& s : sections_) {
      if (s.kind == kind) out.push_back(&s);
    }
    return out;
  }

  const Section* single(std::string_view kind) const {
    auto found = all(kind);
    return found.empty() ? nullptr : found.front();
  }

  const Section& required(std::string_view kind) const {
    const Section* s = single(kind);
    if (s == nullptr) {
      throw ConfigError(ConfigErrorKind::kMissing, std::string(kind), 0, 0,
                        fmt::format("the config needs a [{}] section", kind));
    }
    return *s;
  }

  void check_sections() const {
    static const std::set<std::string, std::less<>> singletons = {"domain", "scenario", "monitor", "policy",
                                                                  "output"};
    std::set<std::string> seen_kinds;
    std::set<std::pair<std::string, std::string>> seen_names;
    for (const Section& s : sections_) {
      std::string key_set = s.kind;
      if (s.kind == "policy") {
        key_set = fmt::format("policy {}", s.name);
        if (!allowed_keys().contains(key_set)) {
          throw ConfigError(ConfigErrorKind::kUnknownSection, s.label(), s.line, 0,
                            "policy must be one of none, frequency, stage, load");
        }
      } else if (!allowed_keys().contains(s.kind)) {
        throw ConfigError(ConfigErrorKind::kUnknownSection, s.label(), s.line, 0,
                          fmt::format("unknown section kind '{}'", s.kind));
      }
      const bool named = !singletons.contains(s.kind) || s.kind == "policy";
      if (named && s.name.empty() && s.kind != "domain") {
        throw ConfigError(ConfigErrorKind::kSyntax, s.label(), s.line, 0,
                          fmt::format("[{}] sections need a name", s.kind));
      }
      if (singletons.contains(s.kind) && !seen_kinds.insert(s.kind).second) {
        throw ConfigError(ConfigErrorKind::kDuplicate, s.label(), s.line, 0,
                          fmt::format("only one [{}] section is allowed", s.kind));
      }
      // Property sections are keyed by their full triple, checked later.
      if (s.kind != "property" && !singletons.contains(s.kind) && !seen_names.emplace(s.kind, s.name).second) {
        throw ConfigError(ConfigErrorKind::kDuplicate, s.label(), s.line, 0,
                          fmt::format("{} '{}' declared twice", s.kind, s.name));
      }
      if (s.kind != "policy" && !s.name.empty() && s.kind != "gauge" && !is_identifier(s.name)) {
        throw ConfigError(ConfigErrorKind::kSyntax, s.label(), s.line, 0,
                          fmt::format("'{}' is not a valid name (letters, digits, '_' and '-')", s.name));
      }
      const auto& keys = allowed_keys().find(key_set)->second;
      for (const Entry& e : s.entries) {
        if (!keys.contains(e.key)) {
          throw ConfigError(ConfigErrorKind::kUnknownKey, s.element(e.key), e.line, 0,
                            fmt::format("'{}' is not a key of [{}]", e.key, key_set));
        }
      }
    }
  }

  void read_domain() {
    const Section& domain = required("domain");
    cfg_.domain.domain_name = domain.name;

    std::map<std::string, Service> services;
    std::map<std::string, const Section*> service_section;
    for (const Section* s : all("service")) {
      Reader r(*s);
      Service service{s->name, {}};
      for (const std::string& g : r.list("gauges")) {
        const auto parts = split(g, '.');
        PropertyId id;
        if (parts.size() == 1 && is_identifier(parts[0])) {
          id = PropertyId{std::string(parts[0]), s->name, ""};
        } else if (parts.size() == 2 && is_identifier(parts[0]) && is_identifier(parts[1])) {
          id = PropertyId{std::string(parts[1]), s->name, std::string(parts[0])};
        } else {
          r.fail(ConfigErrorKind::kBadValue, "gauges", fmt::format("malformed gauge '{}'", g));
        }
        for (const PropertyId& existing : service.gauges) {
          if (existing == id) r.fail(ConfigErrorKind::kDuplicate, "gauges", fmt::format("gauge '{}' listed twice", g));
        }
        service.gauges.push_back(std::move(id));
      }
      services.emplace(s->name, std::move(service));
      service_section.emplace(s->name, s);
    }

    std::map<std::string, std::string> owner;
    const auto tasks = all("task");
    if (tasks.empty()) {
      throw ConfigError(ConfigErrorKind::kMissing, "task", 0, 0, "the domain needs at least one [task] section");
    }
    for (const Section* s : tasks) {
      Reader r(*s);
      Task task{s->name, {}, {}};
      const auto names = r.list("services");
      if (names.empty()) r.fail(ConfigErrorKind::kInvariant, "services", "a task needs at least one service");
      for (const std::string& name : names) {
        auto it = services.find(name);
        if (it == services.end()) {
          r.fail(ConfigErrorKind::kDanglingReference, "services", fmt::format("no [service {}] section", name));
        }
        if (auto [pos, fresh] = owner.emplace(name, s->name); !fresh) {
          r.fail(ConfigErrorKind::kInvariant, "services",
                 fmt::format("service '{}' already belongs to task '{}'", name, pos->second));
        }
        task.services.push_back(it->second);
      }
      task.composite.member_services = r.has("composite") ? r.list("composite") : names;
      if (task.composite.member_services.empty()) {
        r.fail(ConfigErrorKind::kInvariant, "composite", "a composite needs at least one member service");
      }
      for (const std::string& member : task.composite.member_services) {
        if (std::find(names.begin(), names.end(), member) == names.end()) {
          r.fail(ConfigErrorKind::kDanglingReference, "composite",
                 fmt::format("'{}' is not a service of task '{}'", member, s->name));
        }
      }
      cfg_.domain.tasks.push_back(std::move(task));
    }
    for (const auto& [name, section] : service_section) {
      if (!owner.contains(name)) {
        throw ConfigError(ConfigErrorKind::kInvariant, section->label(), section->line, 0,
                          "service is not part of any task");
      }
    }
    for (const PropertyId& g : cfg_.domain.gauges()) gauges_.insert(g);
  }

  void read_scenario() {
    Reader r(required("scenario"));
    cfg_.script.seed = r.opt_integer("seed").value_or(0);
    cfg_.script.duration = r.integer("duration");
    if (cfg_.script.duration < 1) r.fail(ConfigErrorKind::kInvariant, "duration", "duration must be >= 1");

    for (const Section* s : all("gauge")) {
      Reader g(*s);
      PropertyId id;
      try {
        id = parse_property_ref(s->name);
      } catch (const ConfigError&) {
        g.fail(ConfigErrorKind::kSyntax, "", fmt::format("malformed gauge reference '{}'", s->name));
      }
      if (!gauges_.contains(id)) {
        g.fail(ConfigErrorKind::kDanglingReference, "", fmt::format("no gauge {} in the domain model", s->name));
      }
      GaugeProfile profile;
      profile.baseline = g.opt_real("baseline").value_or(0.0);
      profile.noise_amplitude = g.opt_real("noise").value_or(0.0);
      if (profile.noise_amplitude < 0.0) g.fail(ConfigErrorKind::kInvariant, "noise", "noise must be >= 0");
      cfg_.script.gauges.emplace(id, profile);
    }

    for (const Section* s : all("event")) {
      Reader e(*s);
      ScriptedEvent ev;
      ev.gauge = e.ref("gauge");
      if (!gauges_.contains(ev.gauge)) {
        e.fail(ConfigErrorKind::kDanglingReference, "gauge",
               fmt::format("no gauge {} in the domain model", ev.gauge.qualified()));
      }
      ev.tick = e.integer("tick");
      if (ev.tick >= cfg_.script.duration) {
        e.fail(ConfigErrorKind::kInvariant, "tick",
               fmt::format("event tick {} must be below the scenario duration {}", ev.tick, cfg_.script.duration));
      }
      const std::string kind = e.string("kind");
      auto positive = [&](std::string_view key) {
        const auto v = e.integer(key);
        if (v < 1) e.fail(ConfigErrorKind::kInvariant, key, fmt::format("{} must be >= 1", key));
        return v;
      };
      if (kind == "step") {
        ev.effect = StepTo{e.real("value")};
      } else if (kind == "ramp") {
        ev.effect = RampTo{e.real("value"), positive("over")};
      } else if (kind == "spike") {
        ev.effect = SpikeTo{e.real("value"), positive("width")};
      } else if (kind == "raise" || kind == "clear") {
        if (e.has("value")) e.fail(ConfigErrorKind::kInvariant, "value", "raise/clear events take no value");
        ev.effect = domain_event(ev.gauge, ev.tick, kind == "raise").effect;
      } else {
        e.fail(ConfigErrorKind::kBadValue, "kind",
               fmt::format("'{}' is not one of step, ramp, spike, raise, clear", kind));
      }
      if (kind != "ramp" && e.has("over")) e.fail(ConfigErrorKind::kInvariant, "over", "'over' applies to ramps only");
      if (kind != "spike" && e.has("width")) {
        e.fail(ConfigErrorKind::kInvariant, "width", "'width' applies to spikes only");
      }
      cfg_.script.events.push_back(std::move(ev));
    }
  }

  void read_properties() {
    for (const Section* s : all("property")) {
      Reader r(*s);
      PropertySpec spec;
      spec.id.name = s->name;
      spec.id.component = r.string("component");
      if (const Entry* op = r.find("operation")) spec.id.operation = op->value;
      if (!is_identifier(spec.id.component) || (!spec.id.operation.empty() && !is_identifier(spec.id.operation))) {
        r.fail(ConfigErrorKind::kBadValue, "component", "component and operation must be identifiers");
      }
      for (const PropertySpec& other : cfg_.properties) {
        if (other.id == spec.id) {
          r.fail(ConfigErrorKind::kDuplicate, "",
                 fmt::format("property {} is already declared", spec.id.qualified()));
        }
      }
      if (!gauges_.contains(spec.id)) {
        r.fail(ConfigErrorKind::kDanglingReference, "component",
               fmt::format("no gauge {} in the domain model", spec.id.qualified()));
      }
      const std::string kind = r.opt_string("kind").value_or("system");
      if (kind == "system") {
        spec.kind = PropertyKind::kSystem;
      } else if (kind == "environment") {
        spec.kind = PropertyKind::kEnvironment;
      } else {
        r.fail(ConfigErrorKind::kBadValue, "kind", fmt::format("'{}' is not system or environment", kind));
      }
      spec.unit = r.string("unit");
      const std::string qos = r.opt_string("qos").value_or("self-optimizing");
      if (qos == "self-healing") {
        spec.qos_purpose = QosPurpose::kSelfHealing;
      } else if (qos == "self-protecting") {
        spec.qos_purpose = QosPurpose::kSelfProtecting;
      } else if (qos == "self-optimizing") {
        spec.qos_purpose = QosPurpose::kSelfOptimizing;
      } else if (qos == "self-configuring") {
        spec.qos_purpose = QosPurpose::kSelfConfiguring;
      } else {
        r.fail(ConfigErrorKind::kBadValue, "qos", fmt::format("unknown QoS purpose '{}'", qos));
      }
      spec.threshold.lower = r.opt_real("lower");
      spec.threshold.upper = r.opt_real("upper");
      spec.threshold.relative_change_pct = r.opt_real("relative_change_pct");
      const Threshold& t = spec.threshold;
      if (!t.lower && !t.upper && !t.relative_change_pct) {
        r.fail(ConfigErrorKind::kInvariant, "",
               "a threshold needs at least one of lower, upper, relative_change_pct");
      }
      if (t.lower && t.upper && !(*t.lower < *t.upper)) {
        r.fail(ConfigErrorKind::kInvariant, "lower",
               fmt::format("lower ({}) must be below upper ({})", *t.lower, *t.upper));
      }
      if (t.relative_change_pct && !(*t.relative_change_pct > 0.0)) {
        r.fail(ConfigErrorKind::kInvariant, "relative_change_pct", "relative_change_pct must be > 0");
      }
      spec.core_metric = r.boolean("core", false);
      property_section_.emplace(spec.id, s);
      cfg_.properties.push_back(std::move(spec));
    }
    if (cfg_.properties.empty()) {
      throw ConfigError(ConfigErrorKind::kMissing, "property", 0, 0, "the config declares no [property] sections");
    }
  }

  bool declared(const PropertyId& id) const { return property_section_.contains(id); }

  void read_sensors() {
    std::set<PropertyId> covered;
    for (const Section* s : all("sensor")) {
      Reader r(*s);
      SensorDescriptor d;
      d.sensor_id = s->name;
      d.property = r.ref("property");
      if (!declared(d.property)) {
        r.fail(ConfigErrorKind::kDanglingReference, "property",
               fmt::format("no [property] section declares {}", d.property.qualified()));
      }
      const std::string trigger = r.opt_string("trigger").value_or("time");
      if (trigger == "time") {
        const auto period = r.integer("period");
        if (period < 1) r.fail(ConfigErrorKind::kInvariant, "period", "period must be >= 1");
        d.mode = TriggerMode::time_triggered(period);
      } else if (trigger == "event" || trigger == "on-demand") {
        if (r.has("period")) {
          r.fail(ConfigErrorKind::kInvariant, "period", "period applies to time-triggered sensors only");
        }
        d.mode = trigger == "event" ? TriggerMode::event_triggered() : TriggerMode::on_demand();
      } else {
        r.fail(ConfigErrorKind::kBadValue, "trigger",
               fmt::format("'{}' is not one of time, event, on-demand", trigger));
      }
      const std::string status = r.opt_string("status").value_or("active");
      if (status == "active") {
        d.status = SensorStatus::kActive;
      } else if (status == "inactive") {
        d.status = SensorStatus::kInactive;
      } else {
        r.fail(ConfigErrorKind::kBadValue, "status", fmt::format("'{}' is not active or inactive", status));
      }
      covered.insert(d.property);
      cfg_.sensors.push_back(std::move(d));
    }
    for (const PropertySpec& p : cfg_.properties) {
      if (!covered.contains(p.id)) {
        const Section* s = property_section_.at(p.id);
        throw ConfigError(ConfigErrorKind::kInvariant, s->label(), s->line, 0,
                          fmt::format("property {} has no sensor", p.id.qualified()));
      }
    }
  }

  void read_monitor() {
    Reader r(required("monitor"));
    const std::string mode = r.string("mode");
    if (mode == "0" || mode == "periodic") {
      const auto period = r.integer("log_period");
      if (period < 1) r.fail(ConfigErrorKind::kInvariant, "log_period", "log_period must be >= 1");
      cfg_.mode = MonitoringMode::periodic(period);
    } else if (mode == "1" || mode == "event") {
      if (r.has("log_period")) {
        r.fail(ConfigErrorKind::kInvariant, "log_period", "log_period applies to periodic mode only");
      }
      cfg_.mode = MonitoringMode::event_triggered();
    } else {
      r.fail(ConfigErrorKind::kBadValue, "mode", fmt::format("'{}' is not periodic (0) or event (1)", mode));
    }
  }

  std::set<PropertyId> ref_set(const Reader& r, std::string_view key) const {
    std::set<PropertyId> out;
    for (const std::string& item : r.list(key)) {
      PropertyId id = r.ref_value(key, item);
      if (!declared(id)) {
        r.fail(ConfigErrorKind::kDanglingReference, key, fmt::format("no [property] section declares {}", item));
      }
      out.insert(std::move(id));
    }
    return out;
  }

  void read_policy() {
    const Section* s = single("policy");
    if (s == nullptr || s->name == "none") {
      cfg_.policy = std::monostate{};
      return;
    }
    Reader r(*s);
    if (s->name == "frequency") {
      FrequencyPolicy p;
      if (r.has("p_min")) p.p_min = r.integer("p_min");
      if (r.has("p_max")) p.p_max = r.integer("p_max");
      if (r.has("decrease_factor")) p.decrease_factor = r.real("decrease_factor");
      if (r.has("increase_factor")) p.increase_factor = r.real("increase_factor");
      if (r.has("quiet_windows")) p.quiet_windows_required = static_cast<std::uint32_t>(r.integer("quiet_windows"));
      try {
        p.validate();
      } catch (const Error& err) {
        r.fail(ConfigErrorKind::kInvariant, "", err.what());
      }
      if (!cfg_.mode.is_periodic()) {
        r.fail(ConfigErrorKind::kInvariant, "", "the frequency policy requires periodic monitoring mode");
      }
      if (cfg_.mode.log_period < p.p_min || cfg_.mode.log_period > p.p_max) {
        r.fail(ConfigErrorKind::kInvariant, "",
               fmt::format("monitor log_period {} lies outside [p_min, p_max] = [{}, {}]", cfg_.mode.log_period,
                           p.p_min, p.p_max));
      }
      cfg_.policy = p;
    } else if (s->name == "stage") {
      StagePolicy p;
      if (r.has("core")) {
        p.core_set = ref_set(r, "core");
      } else {
        for (const PropertySpec& spec : cfg_.properties) {
          if (spec.core_metric) p.core_set.insert(spec.id);
        }
      }
      if (r.has("extended")) {
        p.extended_set = ref_set(r, "extended");
      } else {
        for (const PropertySpec& spec : cfg_.properties) p.extended_set.insert(spec.id);
      }
      if (r.has("stability_windows")) {
        p.stability_windows = static_cast<std::uint32_t>(r.integer("stability_windows"));
      }
      if (r.has("window_ticks")) p.window_ticks = r.integer("window_ticks");
      try {
        p.validate();
      } catch (const Error& err) {
        r.fail(ConfigErrorKind::kInvariant, "", err.what());
      }
      cfg_.policy = std::move(p);
    } else {
      LoadProportionalPolicy p;
      p.load_property = r.ref("property");
      if (!declared(p.load_property)) {
        r.fail(ConfigErrorKind::kDanglingReference, "property",
               fmt::format("no [property] section declares {}", p.load_property.qualified()));
      }
      for (const std::string& band : r.list("bands")) {
        const auto parts = split(band, ':');
        double bound = 0;
        Tick period = 0;
        bool ok = parts.size() == 2;
        if (ok) {
          auto [p1, e1] = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), bound);
          auto [p2, e2] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), period);
          ok = e1 == std::errc() && e2 == std::errc() && p1 == parts[0].data() + parts[0].size() &&
               p2 == parts[1].data() + parts[1].size();
        }
        if (!ok) r.fail(ConfigErrorKind::kBadValue, "bands", fmt::format("band '{}' is not bound:period", band));
        p.bands.push_back(LoadBand{bound, period});
      }
      try {
        p.validate();
      } catch (const Error& err) {
        r.fail(ConfigErrorKind::kInvariant, "bands", err.what());
      }
      if (!cfg_.mode.is_periodic()) {
        r.fail(ConfigErrorKind::kInvariant, "", "the load policy requires periodic monitoring mode");
      }
      cfg_.policy = std::move(p);
    }
  }

  std::vector<Section> sections_;
  RunConfig cfg_;
  std::set<PropertyId> gauges_;
  std::map<PropertyId, const Section*> property_section_;
};

}  // namespace

PropertyId parse_property_ref(std::string_view text) {
  const auto parts = split(trim(text), '.');
  for (std::string_view p : parts) {
    if (!is_identifier(p)) {
      throw ConfigError(ConfigErrorKind::kBadValue, std::string(text), 0, 0,
                        "references are component.name or component.operation.name");
    }
  }
  if (parts.size() == 2) return PropertyId{std::string(parts[1]), std::string(parts[0]), ""};
  if (parts.size() == 3) return PropertyId{std::string(parts[2]), std::string(parts[0]), std::string(parts[1])};
  throw ConfigError(ConfigErrorKind::kBadValue, std::string(text), 0, 0,
                    "references are component.name or component.operation.name");
}

void RunConfig::validate() const {
  try {
    domain.validate();
  } catch (const Error& err) {
    rethrow_as_config(err, "domain");
  }
  try {
    controller_config().validate();
  } catch (const Error& err) {
    rethrow_as_config(err, "monitor");
  }
  const auto all_gauges = domain.gauges();
  const std::set<PropertyId> gauges(all_gauges.begin(), all_gauges.end());
  std::set<PropertyId> declared;
  for (const PropertySpec& p : properties) {
    if (!gauges.contains(p.id)) {
      throw ConfigError(ConfigErrorKind::kDanglingReference, fmt::format("property {}", p.id.name), 0, 0,
                        fmt::format("no gauge {} in the domain model", p.id.qualified()));
    }
    declared.insert(p.id);
  }
  try {
    Simulator::build(domain, script);
  } catch (const Error& err) {
    rethrow_as_config(err, "scenario");
  }
  try {
    if (const auto* f = std::get_if<FrequencyPolicy>(&policy)) {
      f->validate();
      if (!mode.is_periodic() || mode.log_period < f->p_min || mode.log_period > f->p_max) {
        throw Error(ErrorCode::kConfiguration, "frequency policy needs a periodic mode with p_min <= period <= p_max");
      }
    } else if (const auto* s = std::get_if<StagePolicy>(&policy)) {
      s->validate();
      for (const PropertyId& id : s->extended_set) {
        if (!declared.contains(id)) {
          throw Error(ErrorCode::kConfiguration, fmt::format("stage policy property {} is undeclared", id.qualified()));
        }
      }
    } else if (const auto* l = std::get_if<LoadProportionalPolicy>(&policy)) {
      l->validate();
      if (!mode.is_periodic()) throw Error(ErrorCode::kConfiguration, "load policy needs periodic mode");
      if (!declared.contains(l->load_property)) {
        throw Error(ErrorCode::kConfiguration,
                    fmt::format("load policy property {} is undeclared", l->load_property.qualified()));
      }
    }
  } catch (const Error& err) {
    rethrow_as_config(err, "policy");
  }
}

RunConfig parse_config(std::string_view text) { return Interpreter(tokenize(text)).run(); }

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open config {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace mapek
