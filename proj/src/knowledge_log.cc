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

#include "mapek/knowledge_log.h"

#include <sstream>

#include <fmt/format.h>

#include "mapek/error.h"

namespace mapek {

using nlohmann::ordered_json;

std::string_view to_string(EntryCause cause) {
  return cause == EntryCause::kPeriodicTick ? "PeriodicTick" : "Violation";
}

std::uint64_t KnowledgeLog::log(SystemState state, std::vector<ViolationEvent> events, EntryCause cause, Tick tick,
                                std::uint64_t measurements_taken_this_tick) {
  if (cause == EntryCause::kViolation && events.empty()) {
    throw Error(ErrorCode::kAppend, "a Violation entry must carry at least one event");
  }
  LogEntry appended;
  std::vector<AnalyzerTrigger> triggers;
  {
    std::lock_guard lock(mu_);
    if (!entries_.empty() && tick < entries_.back().tick) {
      throw Error(ErrorCode::kAppend,
                  fmt::format("tick {} precedes the last entry's tick {}", tick, entries_.back().tick));
    }
    appended = LogEntry{entries_.size(), tick, cause, std::move(state), std::move(events),
                        measurements_taken_this_tick};
    entries_.push_back(appended);
    triggers.reserve(subscribers_.size());
    for (const auto& [id, trigger] : subscribers_) triggers.push_back(trigger);
  }
  for (const auto& trigger : triggers) trigger(appended);
  return appended.seq;
}

std::optional<LogEntry> KnowledgeLog::get_data() const {
  std::lock_guard lock(mu_);
  if (entries_.empty()) return std::nullopt;
  return entries_.back();
}

std::vector<LogEntry> KnowledgeLog::history(Tick from_tick, Tick to_tick) const {
  if (from_tick > to_tick) {
    throw Error(ErrorCode::kRange, fmt::format("inverted history range [{}, {}]", from_tick, to_tick));
  }
  std::lock_guard lock(mu_);
  std::vector<LogEntry> out;
  for (const LogEntry& e : entries_) {
    if (e.tick >= from_tick && e.tick <= to_tick) out.push_back(e);
  }
  return out;
}

std::vector<LogEntry> KnowledgeLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t KnowledgeLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

SubscriptionId KnowledgeLog::subscribe(AnalyzerTrigger trigger) {
  std::lock_guard lock(mu_);
  const SubscriptionId id = next_subscription_++;
  subscribers_.emplace(id, std::move(trigger));
  return id;
}

void KnowledgeLog::unsubscribe(SubscriptionId id) {
  std::lock_guard lock(mu_);
  if (subscribers_.erase(id) == 0) {
    throw Error(ErrorCode::kNotSubscribed, fmt::format("no subscriber with id {}", id));
  }
}

void KnowledgeLog::persist(const std::filesystem::path& path) const {
  NdlogWriter writer(path);
  for (const LogEntry& e : entries()) writer.append(e);
  writer.flush();
}

KnowledgeLog KnowledgeLog::load(const std::filesystem::path& path) {
  return KnowledgeLog(read_ndlog(path).entries);
}

// ---------------------------------------------------------------------------
// Codec

namespace {

void put_id(ordered_json& j, const PropertyId& id) {
  j["component"] = id.component;
  j["operation"] = id.operation;
  j["name"] = id.name;
}

PropertyId get_id(const ordered_json& j) {
  return PropertyId{j.at("name").get<std::string>(), j.at("component").get<std::string>(),
                    j.at("operation").get<std::string>()};
}

[[noreturn]] void parse_fail(std::size_t line_no, std::string_view what) {
  throw Error(ErrorCode::kParse, fmt::format("line {}: {}", line_no, what));
}

ordered_json parse_line(std::string_view line, std::size_t line_no) {
  try {
    return ordered_json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(line_no, fmt::format("malformed record ({})", e.what()));
  }
}

}  // namespace

std::string encode_header() {
  ordered_json j;
  j["format"] = "ndlog";
  j["version"] = kNdlogFormatVersion;
  return j.dump();
}

std::string encode_entry(const LogEntry& entry) {
  ordered_json j;
  j["seq"] = entry.seq;
  j["tick"] = entry.tick;
  j["cause"] = to_string(entry.cause);
  j["overhead"] = entry.measurements_taken_this_tick;
  j["composed_at"] = entry.state.composed_at();
  ordered_json state = ordered_json::array();
  for (const auto& [id, m] : entry.state.entries()) {
    ordered_json s;
    put_id(s, id);
    s["value"] = m.value;
    s["tick"] = m.tick;
    s["sensor"] = m.sensor_id;
    state.push_back(std::move(s));
  }
  j["state"] = std::move(state);
  ordered_json events = ordered_json::array();
  for (const ViolationEvent& ev : entry.events) {
    ordered_json e;
    put_id(e, ev.property);
    e["violation"] = to_string(ev.violation);
    e["observed"] = ev.observed;
    e["reference"] = ev.reference ? ordered_json(*ev.reference) : ordered_json(nullptr);
    e["tick"] = ev.tick;
    events.push_back(std::move(e));
  }
  j["events"] = std::move(events);
  return j.dump();
}

namespace {

LogEntry decode_record(const ordered_json& j, std::size_t line_no) {
  try {
    LogEntry entry;
    entry.seq = j.at("seq").get<std::uint64_t>();
    entry.tick = j.at("tick").get<Tick>();
    const auto cause = j.at("cause").get<std::string>();
    if (cause == "PeriodicTick") {
      entry.cause = EntryCause::kPeriodicTick;
    } else if (cause == "Violation") {
      entry.cause = EntryCause::kViolation;
    } else {
      parse_fail(line_no, fmt::format("unknown cause '{}'", cause));
    }
    entry.measurements_taken_this_tick = j.at("overhead").get<std::uint64_t>();
    SystemState state(j.at("composed_at").get<Tick>());
    for (const auto& s : j.at("state")) {
      state.add(Measurement{get_id(s), s.at("value").get<double>(), s.at("tick").get<Tick>(),
                            s.at("sensor").get<std::string>()});
    }
    if (state.composed_at() != j.at("composed_at").get<Tick>()) {
      parse_fail(line_no, "state entry newer than composed_at");
    }
    entry.state = std::move(state);
    for (const auto& e : j.at("events")) {
      ViolationEvent ev;
      ev.property = get_id(e);
      const auto kind = parse_violation_kind(e.at("violation").get<std::string>());
      if (!kind) parse_fail(line_no, "unknown violation kind");
      ev.violation = *kind;
      ev.observed = e.at("observed").get<double>();
      if (!e.at("reference").is_null()) ev.reference = e.at("reference").get<double>();
      ev.tick = e.at("tick").get<Tick>();
      entry.events.push_back(std::move(ev));
    }
    return entry;
  } catch (const nlohmann::json::exception& e) {
    parse_fail(line_no, fmt::format("invalid entry record ({})", e.what()));
  }
}

}  // namespace

LogEntry decode_entry(std::string_view line, std::size_t line_no) {
  return decode_record(parse_line(line, line_no), line_no);
}

NdlogContents parse_ndlog(std::string_view text) {
  NdlogContents out;
  if (text.empty()) return out;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    ++line_no;
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      parse_fail(line_no, "truncated record (missing line terminator)");
    }
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;

    if (!header_seen) {
      const ordered_json h = parse_line(line, line_no);
      if (!h.is_object() || !h.contains("format") || h.at("format") != "ndlog" || !h.contains("version")) {
        parse_fail(line_no, "missing ndlog header");
      }
      if (h.at("version") != kNdlogFormatVersion) {
        parse_fail(line_no, fmt::format("unsupported format version {}", h.at("version").dump()));
      }
      header_seen = true;
      continue;
    }
    if (out.summary) parse_fail(line_no, "record after RunSummary");

    ordered_json record = parse_line(line, line_no);
    if (record.is_object() && record.contains("cause") && record.at("cause") == "RunSummary") {
      out.summary = std::move(record);
      continue;
    }
    LogEntry entry = decode_record(record, line_no);
    if (entry.seq != out.entries.size()) {
      parse_fail(line_no, fmt::format("seq {} breaks the dense sequence (expected {})", entry.seq,
                                      out.entries.size()));
    }
    if (!out.entries.empty() && entry.tick < out.entries.back().tick) {
      parse_fail(line_no, "tick regression");
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

NdlogContents read_ndlog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open {} for reading", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ndlog(buf.str());
}

NdlogWriter::NdlogWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error(ErrorCode::kIo, fmt::format("cannot open {} for writing", path.string()));
  out_ << encode_header() << '\n';
}

void NdlogWriter::append(const LogEntry& entry) {
  out_ << encode_entry(entry) << '\n';
  if (!out_) throw Error(ErrorCode::kIo, fmt::format("write to {} failed", path_.string()));
}

void NdlogWriter::append_summary(const ordered_json& summary) {
  out_ << summary.dump() << '\n';
  if (!out_) throw Error(ErrorCode::kIo, fmt::format("write to {} failed", path_.string()));
}

void NdlogWriter::flush() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, fmt::format("flush of {} failed", path_.string()));
}

}  // namespace mapek
