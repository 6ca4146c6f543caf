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

#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "support/fixtures.h"

namespace mapek {
namespace {

using testing::ReadFile;
using testing::Web;

const std::filesystem::path kData = MAPEK_TEST_DATA_DIR;

std::string Minimal() { return ReadFile(kData / "minimal.cfg"); }

ConfigError ParseError(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "config was accepted:\n" << text;
  return ConfigError(ConfigErrorKind::kSyntax, "", 0, 0, "");
}

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

TEST(ParseConfigTest, Minimal) {
  const RunConfig c = parse_config(Minimal());
  EXPECT_EQ(c.domain.domain_name, "tiny");
  ASSERT_EQ(c.domain.tasks.size(), 1u);
  EXPECT_EQ(c.domain.tasks[0].composite.member_services, std::vector<std::string>{"web"});
  EXPECT_EQ(c.script.duration, 100u);
  EXPECT_EQ(c.script.seed, 0u);
  EXPECT_EQ(c.script.gauges.at(Web("server_load")).baseline, 30.0);
  ASSERT_EQ(c.properties.size(), 1u);
  EXPECT_EQ(c.properties[0].threshold.upper, 50.0);
  EXPECT_FALSE(c.properties[0].threshold.lower.has_value());
  ASSERT_EQ(c.sensors.size(), 1u);
  EXPECT_EQ(c.sensors[0].mode, TriggerMode::time_triggered(1));
  EXPECT_EQ(c.mode, MonitoringMode::periodic(10));
  EXPECT_EQ(c.policy.index(), 0u);
  EXPECT_TRUE(c.output_path.empty());
}

TEST(ParseConfigTest, ReferenceScenario) {
  const RunConfig c = load_config(kData / "ecommerce.cfg");
  EXPECT_EQ(c.properties.size(), 5u);
  EXPECT_EQ(c.script.events.size(), 3u);
  const PropertyId tp{"throughput", "web", "checkout"};
  const auto it = std::find_if(c.properties.begin(), c.properties.end(),
                               [&](const PropertySpec& p) { return p.id == tp; });
  ASSERT_NE(it, c.properties.end());
  EXPECT_EQ(it->threshold.lower, 20.0);
  EXPECT_EQ(it->threshold.relative_change_pct, 60.0);
  const PropertyId stock{"out_of_stock", "catalog", ""};
  const auto s = std::find_if(c.properties.begin(), c.properties.end(),
                              [&](const PropertySpec& p) { return p.id == stock; });
  EXPECT_EQ(s->kind, PropertyKind::kEnvironment);
  EXPECT_EQ(s->qos_purpose, QosPurpose::kSelfHealing);
  EXPECT_EQ(c.script.events[1].effect.index(), 0u);  // raise is a step to 1
  EXPECT_EQ(std::get<StepTo>(c.script.events[1].effect).value, 1.0);
  EXPECT_EQ(c.output_path, "shop.ndlog");
}

TEST(ParseConfigTest, CommentsAndWhitespace) {
  const std::string text = Replace(Minimal(), "upper = 50", "   upper   =   50   # strict bound");
  EXPECT_EQ(parse_config(text).properties[0].threshold.upper, 50.0);
}

TEST(ParseConfigTest, EventModeByCode) {
  const RunConfig c = parse_config(Replace(Minimal(), "mode = 0\nlog_period = 10", "mode = 1"));
  EXPECT_EQ(c.mode, MonitoringMode::event_triggered());
}

TEST(ParseConfigTest, InactiveAndEventSensors) {
  std::string text = Minimal() +
                     "[sensor s_watch]\nproperty = web.server_load\ntrigger = event\n"
                     "[sensor s_spare]\nproperty = web.server_load\ntrigger = on-demand\nstatus = inactive\n";
  const RunConfig c = parse_config(text);
  ASSERT_EQ(c.sensors.size(), 3u);
  EXPECT_EQ(c.sensors[1].mode.kind, TriggerMode::Kind::kEventTriggered);
  EXPECT_EQ(c.sensors[2].status, SensorStatus::kInactive);
}

TEST(ParseConfigTest, Policies) {
  const RunConfig f =
      parse_config(Replace(Minimal(), "log_period = 10", "log_period = 1") + "[policy frequency]\np_max = 16\n");
  const auto& fp = std::get<FrequencyPolicy>(f.policy);
  EXPECT_EQ(fp.p_max, 16u);
  EXPECT_EQ(fp.decrease_factor, 0.5);

  const RunConfig l = parse_config(Minimal() + "[policy load]\nproperty = web.server_load\nbands = 50:10, 80:5, 100:1\n");
  const auto& lp = std::get<LoadProportionalPolicy>(l.policy);
  EXPECT_EQ(lp.bands, (std::vector<LoadBand>{{50, 10}, {80, 5}, {100, 1}}));

  const RunConfig s = parse_config(Replace(Minimal(), "upper = 50", "upper = 50\ncore = true") + "[policy stage]\n");
  const auto& sp = std::get<StagePolicy>(s.policy);
  EXPECT_EQ(sp.core_set, std::set<PropertyId>{Web("server_load")});
  EXPECT_EQ(sp.window_ticks, 20u);

  const RunConfig none = parse_config(Minimal() + "[policy none]\n");
  EXPECT_EQ(none.policy.index(), 0u);
}

TEST(ParseConfigTest, SyntaxErrorHasLineAndColumn) {
  const std::string text = "[domain d]\n[task t\n";
  const ConfigError e = ParseError(text);
  EXPECT_EQ(e.kind(), ConfigErrorKind::kSyntax);
  EXPECT_EQ(e.line(), 2u);
  EXPECT_GT(e.column(), 0u);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
}

TEST(ParseConfigTest, ErrorKindsAreDistinct) {
  EXPECT_EQ(ParseError(Replace(Minimal(), "property = web.server_load", "property = web.cpu")).kind(),
            ConfigErrorKind::kDanglingReference);
  EXPECT_EQ(ParseError(Replace(Minimal(), "upper = 50", "upper = 50\nlower = 60")).kind(), ConfigErrorKind::kInvariant);
  EXPECT_EQ(ParseError(Replace(Minimal(), "period = 1", "period = 1\nspeed = 2")).kind(), ConfigErrorKind::kUnknownKey);
  EXPECT_EQ(ParseError(Minimal() + "[widget w]\n").kind(), ConfigErrorKind::kUnknownSection);
  EXPECT_EQ(ParseError(Replace(Minimal(), "baseline = 30", "baseline = 3o")).kind(), ConfigErrorKind::kBadValue);
  EXPECT_EQ(ParseError(Replace(Minimal(), "duration = 100", "")).kind(), ConfigErrorKind::kMissing);
  EXPECT_EQ(ParseError(Minimal() + "[sensor s_load]\nproperty = web.server_load\nperiod = 3\n").kind(),
            ConfigErrorKind::kDuplicate);
}

TEST(ParseConfigTest, ValueLocation) {
  const std::string text = Replace(Minimal(), "baseline = 30", "baseline = 3o");
  const ConfigError e = ParseError(text);
  EXPECT_EQ(e.element(), "gauge web.server_load.baseline");
  // line of the offending key, column of its value
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.find("baseline = 3o"); ++i) line += text[i] == '\n';
  EXPECT_EQ(e.line(), line);
  EXPECT_EQ(e.column(), 12u);
}

// Every file in malformed/ starts with "# expect: <element>".
TEST(ParseConfigTest, MalformedSuite) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kData / "malformed")) {
    const std::string text = ReadFile(entry.path());
    const std::string first = text.substr(0, text.find('\n'));
    ASSERT_EQ(first.rfind("# expect: ", 0), 0u) << entry.path();
    const std::string expected = first.substr(10);
    const ConfigError e = ParseError(text);
    EXPECT_NE(e.element().find(expected), std::string::npos)
        << entry.path().filename() << ": element '" << e.element() << "', wanted '" << expected << "'";
    EXPECT_NE(std::string(e.what()).find(expected), std::string::npos) << e.what();
    ++count;
  }
  EXPECT_GE(count, 10u);
}

TEST(ParsePropertyRefTest, Forms) {
  EXPECT_EQ(parse_property_ref("web.server_load"), Web("server_load"));
  EXPECT_EQ(parse_property_ref("web.checkout.throughput"), (PropertyId{"throughput", "web", "checkout"}));
  for (const char* bad : {"web", "", "a.b.c.d", "web.", ".x", "we b.x"}) {
    EXPECT_THROW(parse_property_ref(bad), ConfigError) << bad;
  }
}

TEST(RunConfigTest, ValidateCatchesProgrammaticMistakes) {
  RunConfig c = parse_config(Minimal());
  EXPECT_NO_THROW(c.validate());
  RunConfig bad = c;
  bad.sensors[0].property = Web("ghost");
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.policy = FrequencyPolicy{};  // log period 10 is fine, but mode must stay periodic
  bad.mode = MonitoringMode::event_triggered();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.script.events.push_back(ScriptedEvent{500, Web("server_load"), StepTo{1}});
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.properties[0].id = Web("nowhere");
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(LoadConfigTest, MissingFile) {
  try {
    load_config(kData / "does-not-exist.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("does-not-exist.cfg"), std::string::npos);
  }
}

}  // namespace
}  // namespace mapek
