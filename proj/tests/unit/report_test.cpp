#include <gtest/gtest.h>

#include <json.hpp>

#include <seeker/pipeline.h>
#include <seeker/report.h>

#include "fixtures.h"
#include "generators.h"

namespace seeker {
namespace {

LeakRecord leak(const std::string& source, SourceKind kind,
                const std::string& sensor = "") {
  LeakRecord r;
  r.source = source;
  r.source_kind = kind;
  r.origin = {"a.A#m()", 0, "x = const 0"};
  r.sink = "android.util.Log#d(java.lang.String,java.lang.String)";
  r.sink_stmt = {"a.A#m()", 2, "invoke"};
  r.position = "arg1";
  r.witness_path = {{r.origin, TraceKind::Source}, {r.sink_stmt, TraceKind::Sink}};
  r.attribution = sensor.empty()
      ? SensorAttribution::unknown()
      : SensorAttribution::inferred(sensor, Evidence::SingleSensorRule);
  return r;
}

AppReport app(const std::string& id, std::vector<LeakRecord> leaks) {
  AppReport r;
  r.app_id = id;
  r.leaks = std::move(leaks);
  r.timings = {1.5, 0.25, 3.0, 0.125};
  return r;
}

const std::string kValues = "android.hardware.SensorEvent#values";
const std::string kDefault = "android.hardware.SensorManager#getDefaultSensor(int)";

TEST(Summarize, EmptyListIsAllZero) {
  auto s = summarize({});
  EXPECT_EQ(s, CorpusSummary{});
  EXPECT_EQ(s.total_leaks, 0u);
  EXPECT_TRUE(s.ranked_sources().empty());
}

TEST(Summarize, FieldAndMethodCountsAddUp) {
  auto s = summarize({app("a", {leak(kValues, SourceKind::Field, "TYPE_LIGHT"),
                                leak(kDefault, SourceKind::Method)}),
                      app("b", {leak(kValues, SourceKind::Field)})});
  EXPECT_EQ(s.apps_analyzed, 2u);
  EXPECT_EQ(s.apps_with_leaks, 2u);
  EXPECT_EQ(s.field_leaks, 2u);
  EXPECT_EQ(s.method_leaks, 1u);
  EXPECT_EQ(s.total_leaks, 3u);
  EXPECT_EQ(s.by_source.at(kValues), 2u);
  EXPECT_EQ(s.by_sensor_type, (std::map<std::string, std::size_t>{{"TYPE_LIGHT", 1}}));
  EXPECT_EQ(s.by_verdict.at("inferred"), 1u);
  EXPECT_EQ(s.by_verdict.at("unknown"), 1u);
}

TEST(Summarize, RankingBreaksTiesByName) {
  CorpusSummary s;
  s.by_source = {{"b", 2}, {"a", 2}, {"c", 5}, {"d", 1}};
  EXPECT_EQ(s.ranked_sources(),
            (RankedCounts{{"c", 5}, {"a", 2}, {"b", 2}, {"d", 1}}));
}

// Frozen from the corpus construction: source j appears once in each of the
// first N_j apps, one sink per use.
TEST(Summarize, SourceCountCorpusMatchesPlantedCounts) {
  auto corpus = testing::generate_source_count_corpus();
  ASSERT_EQ(corpus.apps.size(), 12u);
  const std::map<std::string, std::size_t> frozen{
      {"android.hardware.SensorManager#getDefaultSensor(int)", 11},
      {"android.hardware.SensorEvent#values", 10},
      {"android.hardware.SensorManager#getSensorList(int)", 9},
      {"android.hardware.Sensor#getType()", 8},
      {"android.hardware.Sensor#getName()", 7},
      {"android.hardware.Sensor#getMaximumRange()", 6},
      {"android.hardware.SensorEvent#timestamp", 5},
      {"android.hardware.Sensor#getVendor()", 4},
      {"android.hardware.Sensor#getVersion()", 3},
      {"android.hardware.Sensor#getResolution()", 2},
      {"android.hardware.Sensor#getPower()", 1},
  };
  EXPECT_EQ(corpus.expected, frozen);
  auto config = default_sensor_config();
  std::vector<AppReport> reports;
  for (const auto& a : corpus.apps) {
    reports.push_back(run_app_text(a.app_id, a.text, config));
    EXPECT_EQ(reports.back().status, AppStatus::Ok);
  }
  auto s = summarize(reports);
  EXPECT_EQ(s.by_source, frozen);
  EXPECT_EQ(s.total_leaks, 66u);
  EXPECT_EQ(s.field_leaks, 15u);
  EXPECT_EQ(s.method_leaks, 51u);
  EXPECT_EQ(s.apps_with_leaks, 11u);
  auto ranked = s.ranked_sources();
  ASSERT_EQ(ranked.size(), 11u);
  EXPECT_EQ(ranked.front(), (std::pair<std::string, std::size_t>{
                                "android.hardware.SensorManager#getDefaultSensor(int)", 11}));
  EXPECT_EQ(ranked.back(), (std::pair<std::string, std::size_t>{
                               "android.hardware.Sensor#getPower()", 1}));
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    EXPECT_EQ(ranked[i - 1].second, ranked[i].second + 1);
  }
}

TEST(EmitReport, JsonCarriesSchemaKeys) {
  auto r = app("one", {leak(kValues, SourceKind::Field, "TYPE_LIGHT")});
  auto j = nlohmann::json::parse(emit_report(r, OutputFormat::Json));
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  const auto& l = j.at("leaks").at(0);
  for (const auto* key : {"source", "sink", "witness_path", "sensor_type"}) {
    EXPECT_TRUE(l.contains(key)) << key;
  }
  EXPECT_EQ(l.at("sensor_type"), "TYPE_LIGHT");
  auto unknown = nlohmann::json::parse(
      emit_report(app("u", {leak(kValues, SourceKind::Field)}), OutputFormat::Json));
  EXPECT_TRUE(unknown.at("leaks").at(0).at("sensor_type").is_null());
}

TEST(EmitSummary, JsonHasSourceAndSensorMaps) {
  auto s = summarize({app("a", {leak(kValues, SourceKind::Field, "TYPE_LIGHT")})});
  auto j = nlohmann::json::parse(emit_summary(s, OutputFormat::Json));
  EXPECT_EQ(j.at("by_source").at(kValues), 1);
  EXPECT_EQ(j.at("by_sensor_type").at("TYPE_LIGHT"), 1);
}

TEST(EmitReport, SerializationIsByteIdentical) {
  auto a = testing::read_corpus("type_switch.ir");
  auto config = default_sensor_config();
  auto r1 = run_app_text("l2", a, config);
  auto r2 = run_app_text("l2", a, config);
  r2.timings = r1.timings;
  for (auto format : {OutputFormat::Json, OutputFormat::Text}) {
    EXPECT_EQ(emit_report(r1, format), emit_report(r1, format));
    EXPECT_EQ(emit_report(r1, format), emit_report(r2, format));
  }
  auto s = summarize({r1});
  EXPECT_EQ(emit_summary(s, OutputFormat::Json), emit_summary(s, OutputFormat::Json));
}

TEST(EmitReport, TextShowsWitnessAndSensor) {
  auto r = run_app_text("l3", testing::read_corpus("values_chain.ir"),
                        default_sensor_config());
  auto text = emit_report(r, OutputFormat::Text);
  EXPECT_NE(text.find("TYPE_ACCELEROMETER"), std::string::npos);
  EXPECT_NE(text.find("Log#v"), std::string::npos);
  EXPECT_NE(text.find("values"), std::string::npos);
}

TEST(ReportProperty, JsonRoundTripReproducesReports) {
  auto config = default_sensor_config();
  std::vector<AppReport> reports;
  for (const auto* name : {"sensor_enum.ir", "sensor_enum_sink.ir", "type_switch.ir",
                           "values_chain.ir", "dialog_thread.ir"}) {
    reports.push_back(run_app_text(name, testing::read_corpus(name), config));
  }
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    reports.push_back(run_app_text("gen" + std::to_string(seed),
                                   testing::generate_flow_program(seed), config));
  }
  reports.push_back(run_app_text("broken", "class {", config));
  auto conflicted = app("c", {leak(kValues, SourceKind::Field, "TYPE_GRAVITY")});
  conflicted.leaks[0].attribution.conflict = true;
  conflicted.leaks[0].attribution.evidence = Evidence::BranchGuard;
  conflicted.warnings = {"entry callback onPause() not found"};
  reports.push_back(conflicted);
  for (const auto& r : reports) {
    auto parsed = parse_report_json(emit_report(r, OutputFormat::Json));
    EXPECT_EQ(parsed, r) << r.app_id;
  }
  auto s = summarize(reports);
  EXPECT_EQ(parse_summary_json(emit_summary(s, OutputFormat::Json)), s);
}

TEST(ReportProperty, MalformedJsonIsRejected) {
  EXPECT_THROW(parse_report_json("{"), std::invalid_argument);
  EXPECT_THROW(parse_report_json("{\"app_id\": 3}"), std::invalid_argument);
  EXPECT_THROW(parse_summary_json("[]"), std::invalid_argument);
}

TEST(ReportProperty, SummaryArithmeticHolds) {
  testing::Rng rng(17);
  for (int round = 0; round < 200; ++round) {
    std::vector<AppReport> reports;
    auto apps = rng.below(6);
    for (std::size_t a = 0; a < apps; ++a) {
      std::vector<LeakRecord> leaks;
      auto n = rng.below(5);
      for (std::size_t i = 0; i < n; ++i) {
        bool field = rng.chance(50);
        leaks.push_back(leak(field ? kValues : kDefault,
                             field ? SourceKind::Field : SourceKind::Method,
                             rng.chance(50) ? "TYPE_LIGHT" : ""));
      }
      reports.push_back(app("app" + std::to_string(a), std::move(leaks)));
      if (rng.chance(20)) {
        reports.back().status = AppStatus::TimeoutPartial;
      }
    }
    auto s = summarize(reports);
    std::size_t per_app = 0;
    for (const auto& [id, count] : s.per_app) {
      per_app += count;
    }
    std::size_t by_source = 0;
    for (const auto& [id, count] : s.by_source) {
      by_source += count;
    }
    std::size_t by_verdict = 0;
    for (const auto& [id, count] : s.by_verdict) {
      by_verdict += count;
    }
    std::size_t by_status = 0;
    for (const auto& [id, count] : s.by_status) {
      by_status += count;
    }
    EXPECT_EQ(s.total_leaks, per_app);
    EXPECT_EQ(s.total_leaks, by_source);
    EXPECT_EQ(s.field_leaks + s.method_leaks, s.total_leaks);
    EXPECT_EQ(by_verdict, s.field_leaks);
    EXPECT_EQ(by_status, s.apps_analyzed);
    EXPECT_EQ(s.apps_analyzed, reports.size());
  }
}

} // namespace
} // namespace seeker
