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

#include "mapek/property.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mapek/error.h"
#include "support/fixtures.h"

namespace mapek {
namespace {

using testing::Gen;
using testing::Web;
using VK = ViolationKind;

// Clause-by-clause reference evaluation, written without sharing code with
// the implementation.
std::vector<VK> OracleCheck(const Threshold& t, std::optional<double> prev, double v) {
  std::vector<VK> out;
  bool low = false, high = false, rel = false;
  if (t.lower.has_value()) low = v < t.lower.value();
  if (t.upper.has_value()) high = t.upper.value() < v;
  if (t.relative_change_pct.has_value() && prev.has_value() && prev.value() != 0.0) {
    const double ratio = std::fabs(v - prev.value()) / std::fabs(prev.value());
    rel = ratio * 100.0 > t.relative_change_pct.value();
  }
  if (low) out.push_back(VK::kLower);
  if (high) out.push_back(VK::kUpper);
  if (rel) out.push_back(VK::kRelativeChange);
  return out;
}

TEST(CheckThresholdTest, UpperFromExample) {
  Threshold t;
  t.upper = 50;
  EXPECT_EQ(check_threshold(t, std::nullopt, 55), std::vector<VK>{VK::kUpper});
}

TEST(CheckThresholdTest, BoundIsStrict) {
  Threshold t;
  t.upper = 50;
  EXPECT_TRUE(check_threshold(t, std::nullopt, 50).empty());
  t = Threshold{};
  t.lower = 10;
  EXPECT_TRUE(check_threshold(t, std::nullopt, 10).empty());
  EXPECT_EQ(check_threshold(t, std::nullopt, 9.999), std::vector<VK>{VK::kLower});
}

TEST(CheckThresholdTest, RelativeChange) {
  Threshold t;
  t.relative_change_pct = 20;
  // 100 * 10 / 40 = 25 > 20
  EXPECT_EQ(check_threshold(t, 40.0, 50), std::vector<VK>{VK::kRelativeChange});
  // exactly 20% is not a violation
  EXPECT_TRUE(check_threshold(t, 50.0, 60).empty());
  EXPECT_EQ(check_threshold(t, 50.0, 39), std::vector<VK>{VK::kRelativeChange});
}

TEST(CheckThresholdTest, RelativeChangeNeedsBaseline) {
  Threshold t;
  t.relative_change_pct = 20;
  EXPECT_TRUE(check_threshold(t, std::nullopt, 1000).empty());
  EXPECT_TRUE(check_threshold(t, 0.0, 1000).empty());
  // negative baselines use the magnitude
  EXPECT_EQ(check_threshold(t, -40.0, -50), std::vector<VK>{VK::kRelativeChange});
}

TEST(CheckThresholdTest, AllClausesOrdered) {
  Threshold t{10.0, 50.0, 20.0};
  EXPECT_EQ(check_threshold(t, 40.0, 55), (std::vector<VK>{VK::kUpper, VK::kRelativeChange}));
  EXPECT_EQ(check_threshold(t, 40.0, 5), (std::vector<VK>{VK::kLower, VK::kRelativeChange}));
  EXPECT_TRUE(check_threshold(t, 40.0, 45).empty());
}

TEST(CheckThresholdTest, UpperOnlyGridScan) {
  for (double upper : {-10.0, 0.0, 0.5, 50.0, 1e6}) {
    Threshold t;
    t.upper = upper;
    for (int i = -200; i <= 200; ++i) {
      const double v = upper + i * 0.125;
      const bool expect = v > upper;
      const auto got = check_threshold(t, std::nullopt, v);
      ASSERT_EQ(!got.empty(), expect) << "upper=" << upper << " v=" << v;
      if (expect) EXPECT_EQ(got, std::vector<VK>{VK::kUpper});
    }
    // neighbours in representation space
    EXPECT_TRUE(check_threshold(t, std::nullopt, upper).empty());
    EXPECT_FALSE(check_threshold(t, std::nullopt, std::nextafter(upper, INFINITY)).empty());
  }
}

TEST(CheckThresholdTest, MatchesOracleOnRandomTriples) {
  Gen gen(20261018);
  for (int i = 0; i < 20000; ++i) {
    Threshold t;
    if (gen.coin()) t.lower = gen.near(10, 30);
    if (gen.coin()) t.upper = gen.near(50, 30);
    if (gen.coin()) t.relative_change_pct = gen.real(0.1, 80);
    std::optional<double> prev;
    if (gen.coin(0.8)) prev = gen.near(40, 40);
    const double v = gen.near(45, 50);
    const auto got = check_threshold(t, prev, v);
    ASSERT_EQ(got, OracleCheck(t, prev, v)) << "iteration " << i;
    // purity
    ASSERT_EQ(got, check_threshold(t, prev, v));
  }
}

TEST(ThresholdTest, Validate) {
  EXPECT_THROW(Threshold{}.validate(), Error);
  EXPECT_THROW((Threshold{50.0, 50.0, std::nullopt}.validate()), Error);
  EXPECT_THROW((Threshold{60.0, 50.0, std::nullopt}.validate()), Error);
  EXPECT_THROW((Threshold{std::nullopt, std::nullopt, 0.0}.validate()), Error);
  EXPECT_THROW((Threshold{std::nullopt, std::nullopt, -3.0}.validate()), Error);
  EXPECT_NO_THROW((Threshold{10.0, 50.0, 20.0}.validate()));
  EXPECT_NO_THROW((Threshold{std::nullopt, 0.5, std::nullopt}.validate()));
}

TEST(PropertyIdTest, Qualified) {
  EXPECT_EQ(Web("server_load").qualified(), "web.server_load");
  EXPECT_EQ((PropertyId{"throughput", "web", "checkout"}.qualified()), "web.checkout.throughput");
}

TEST(PropertySpecTest, ValidateNeedsNameAndUnit) {
  PropertySpec p;
  p.id = Web("server_load");
  p.unit = "percent";
  p.threshold.upper = 50;
  EXPECT_NO_THROW(p.validate());
  p.unit.clear();
  EXPECT_THROW(p.validate(), Error);
  p.unit = "percent";
  p.id.name.clear();
  EXPECT_THROW(p.validate(), Error);
}

TEST(ViolationKindTest, NamesRoundTrip) {
  for (VK k : {VK::kLower, VK::kUpper, VK::kRelativeChange}) {
    EXPECT_EQ(parse_violation_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_violation_kind("upper").has_value());
}

Measurement M(const PropertyId& id, double v, Tick t, std::string sensor = "s") {
  return Measurement{id, v, t, std::move(sensor)};
}

TEST(ComposeStateTest, Empty) {
  SystemState s = compose_state({}, 0);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.composed_at(), 0u);
}

TEST(ComposeStateTest, TwoEntries) {
  const std::vector<Measurement> ms = {M(Web("load"), 30, 5), M(Web("clients"), 12, 5)};
  SystemState s = compose_state(ms, 5);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.composed_at(), 5u);
}

TEST(ComposeStateTest, DuplicateNamesTheProperty) {
  const std::vector<Measurement> ms = {M(Web("load"), 30, 5), M(Web("load"), 40, 5)};
  try {
    compose_state(ms, 5);
    FAIL() << "expected a composition error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kComposition);
    EXPECT_NE(std::string(e.what()).find("web.load"), std::string::npos) << e.what();
  }
}

TEST(ComposeStateTest, FutureMeasurementRejected) {
  const std::vector<Measurement> ms = {M(Web("load"), 30, 6)};
  EXPECT_THROW(compose_state(ms, 5), Error);
}

TEST(ComposeStateTest, RoundTripProperty) {
  Gen gen(4);
  for (int round = 0; round < 200; ++round) {
    std::vector<Measurement> ms;
    const auto n = gen.uniform(0, 12);
    const Tick now = gen.uniform(0, 1000);
    for (std::uint64_t i = 0; i < n; ++i) {
      ms.push_back(M(PropertyId{"p" + std::to_string(i), gen.coin() ? "web" : "db", ""}, gen.real(-1e3, 1e3),
                     gen.uniform(0, now), "s" + std::to_string(i)));
    }
    SystemState s = compose_state(ms, now);
    ASSERT_EQ(s.size(), ms.size());
    for (const Measurement& m : ms) ASSERT_EQ(s.get(m.property), m);
  }
}

TEST(SystemStateTest, AddGet) {
  SystemState s;
  s.add(M(Web("load"), 30, 3));
  EXPECT_EQ(s.get(Web("load")), M(Web("load"), 30, 3));
  EXPECT_EQ(s.composed_at(), 3u);
}

TEST(SystemStateTest, RemoveAbsent) {
  SystemState s;
  s.add(M(Web("load"), 30, 3));
  const SystemState before = s;
  EXPECT_FALSE(s.remove(Web("other")));
  EXPECT_EQ(s, before);
  EXPECT_TRUE(s.remove(Web("load")));
  EXPECT_FALSE(s.get(Web("load")).has_value());
}

TEST(SystemStateTest, AddTwiceOverwrites) {
  SystemState s;
  s.add(M(Web("load"), 30, 3));
  s.add(M(Web("load"), 41, 4, "t"));
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.get(Web("load")), M(Web("load"), 41, 4, "t"));
}

TEST(ViolationsForTest, ReferenceOnlyForRelativeChange) {
  Threshold t{std::nullopt, 50.0, 20.0};
  const auto evs = violations_for(M(Web("load"), 55, 9), t, 40.0);
  ASSERT_EQ(evs.size(), 2u);
  EXPECT_EQ(evs[0].violation, VK::kUpper);
  EXPECT_FALSE(evs[0].reference.has_value());
  EXPECT_EQ(evs[1].violation, VK::kRelativeChange);
  EXPECT_EQ(evs[1].reference, 40.0);
  EXPECT_EQ(evs[1].observed, 55.0);
  EXPECT_EQ(evs[1].tick, 9u);
}

}  // namespace
}  // namespace mapek
