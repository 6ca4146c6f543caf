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
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mapek/property.h"

namespace mapek {

enum class EntryCause { kPeriodicTick, kViolation };

std::string_view to_string(EntryCause cause);

struct LogEntry {
  std::uint64_t seq = 0;
  Tick tick = 0;
  EntryCause cause = EntryCause::kPeriodicTick;
  SystemState state;
  std::vector<ViolationEvent> events;
  std::uint64_t measurements_taken_this_tick = 0;

  bool operator==(const LogEntry&) const = default;
};

// Invoked once per appended entry, in seq order.
using AnalyzerTrigger = std::function<void(const LogEntry&)>;
using SubscriptionId = std::uint64_t;

// Append-only repository of state snapshots and violation events. Appends
// and reads are serialized; readers never see a half-appended entry.
// Subscribers run synchronously on the appending thread, outside the lock.
class KnowledgeLog {
 public:
  KnowledgeLog() = default;
  KnowledgeLog(const KnowledgeLog&) = delete;
  KnowledgeLog& operator=(const KnowledgeLog&) = delete;

  // Returns the new entry's seq. Throws Error(kAppend) if `tick` is earlier
  // than the last entry's tick or a Violation entry carries no events.
  std::uint64_t log(SystemState state, std::vector<ViolationEvent> events, EntryCause cause, Tick tick,
                    std::uint64_t measurements_taken_this_tick);

  std::optional<LogEntry> get_data() const;
  // Entries with from_tick <= tick <= to_tick. Throws Error(kRange) when
  // the range is inverted.
  std::vector<LogEntry> history(Tick from_tick, Tick to_tick) const;
  std::vector<LogEntry> entries() const;
  std::size_t size() const;

  SubscriptionId subscribe(AnalyzerTrigger trigger);
  // Throws Error(kNotSubscribed) for unknown ids.
  void unsubscribe(SubscriptionId id);

  void persist(const std::filesystem::path& path) const;
  // Throws Error(kParse) with the offending line number.
  static KnowledgeLog load(const std::filesystem::path& path);

 private:
  explicit KnowledgeLog(std::vector<LogEntry> entries) : entries_(std::move(entries)) {}

  mutable std::mutex mu_;
  std::vector<LogEntry> entries_;
  std::map<SubscriptionId, AnalyzerTrigger> subscribers_;
  SubscriptionId next_subscription_ = 0;
};

// .ndlog codec: one JSON record per line, header first. Field order is fixed
// and doubles use the shortest representation that round-trips.
inline constexpr int kNdlogFormatVersion = 1;

std::string encode_header();
std::string encode_entry(const LogEntry& entry);
// `line_no` is 1-based and only used for diagnostics.
LogEntry decode_entry(std::string_view line, std::size_t line_no);

struct NdlogContents {
  std::vector<LogEntry> entries;
  // Trailing RunSummary record, when the file has one.
  std::optional<nlohmann::ordered_json> summary;
};

NdlogContents parse_ndlog(std::string_view text);
NdlogContents read_ndlog(const std::filesystem::path& path);

// Streams entries to disk as they are appended.
class NdlogWriter {
 public:
  explicit NdlogWriter(const std::filesystem::path& path);

  void append(const LogEntry& entry);
  void append_summary(const nlohmann::ordered_json& summary);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace mapek
