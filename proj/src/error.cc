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

#include "mapek/error.h"

#include <fmt/format.h>

namespace mapek {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kComposition: return "composition";
    case ErrorCode::kInstrumentation: return "instrumentation";
    case ErrorCode::kInactiveSensor: return "inactive-sensor";
    case ErrorCode::kAlreadyAttached: return "already-attached";
    case ErrorCode::kNotAttached: return "not-attached";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kDuplicateSensor: return "duplicate-sensor";
    case ErrorCode::kUnknownSensor: return "unknown-sensor";
    case ErrorCode::kScheduler: return "scheduler";
    case ErrorCode::kAppend: return "append";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kNotSubscribed: return "not-subscribed";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kBuild: return "build";
    case ErrorCode::kEndOfScenario: return "end-of-scenario";
    case ErrorCode::kUnknownGauge: return "unknown-gauge";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{} error: {}", to_string(code), message)),
      code_(code) {}

}  // namespace mapek
