#include <seeker/report.h>

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace seeker {

using Json = nlohmann::ordered_json;

namespace {

StmtLocation locate(const IRProgram& program, StmtRef ref) {
  const auto& method = program.method(ref.method);
  return {method.sig.key(), ref.index,
          print_statement(method.body.at(ref.index))};
}

RankedCounts rank(const std::map<std::string, std::size_t>& counts) {
  RankedCounts out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return out;
}

Json location_json(const StmtLocation& loc) {
  return Json{{"method", loc.method}, {"index", loc.index}, {"stmt", loc.text}};
}

StmtLocation location_from(const Json& j) {
  return {j.at("method").get<std::string>(),
          j.at("index").get<std::uint32_t>(), j.at("stmt").get<std::string>()};
}

Json leak_json(const LeakRecord& leak) {
  Json path = Json::array();
  for (const auto& w : leak.witness_path) {
    auto step = location_json(w.at);
    step["kind"] = std::string(to_string(w.kind));
    path.push_back(std::move(step));
  }
  Json attribution{
      {"verdict", std::string(to_string(leak.attribution.verdict))},
      {"candidates", leak.attribution.candidates},
      {"evidence", std::string(to_string(leak.attribution.evidence))},
      {"conflict", leak.attribution.conflict},
  };
  auto sensor = leak.sensor_type();
  return Json{
      {"source", leak.source},
      {"source_kind", std::string(to_string(leak.source_kind))},
      {"origin", location_json(leak.origin)},
      {"sink", leak.sink},
      {"sink_stmt", location_json(leak.sink_stmt)},
      {"position", leak.position},
      {"witness_path", std::move(path)},
      {"sensor_type", sensor.empty() ? Json(nullptr) : Json(sensor)},
      {"attribution", std::move(attribution)},
  };
}

template <typename T, typename Parse>
T required_enum(const Json& j, const char* key, Parse parse) {
  auto text = j.at(key).get<std::string>();
  auto value = parse(text);
  if (!value) {
    throw std::invalid_argument(std::string("bad ") + key + " '" + text + "'");
  }
  return *value;
}

LeakRecord leak_from(const Json& j) {
  LeakRecord leak;
  leak.source = j.at("source").get<std::string>();
  leak.source_kind = required_enum<SourceKind>(
      j, "source_kind", [](std::string_view t) -> std::optional<SourceKind> {
        if (t == "field") {
          return SourceKind::Field;
        }
        if (t == "method") {
          return SourceKind::Method;
        }
        return std::nullopt;
      });
  leak.origin = location_from(j.at("origin"));
  leak.sink = j.at("sink").get<std::string>();
  leak.sink_stmt = location_from(j.at("sink_stmt"));
  leak.position = j.at("position").get<std::string>();
  for (const auto& step : j.at("witness_path")) {
    leak.witness_path.push_back(
        {location_from(step),
         required_enum<TraceKind>(step, "kind", parse_trace_kind)});
  }
  const auto& a = j.at("attribution");
  leak.attribution.verdict =
      required_enum<Verdict>(a, "verdict", parse_verdict);
  leak.attribution.candidates =
      a.at("candidates").get<std::vector<std::string>>();
  leak.attribution.evidence =
      required_enum<Evidence>(a, "evidence", parse_evidence);
  leak.attribution.conflict = a.at("conflict").get<bool>();
  if (leak.attribution.verdict == Verdict::Inferred &&
      leak.attribution.candidates.size() != 1) {
    throw std::invalid_argument("inferred verdict needs one candidate");
  }
  return leak;
}

Json report_json(const AppReport& report) {
  Json leaks = Json::array();
  for (const auto& leak : report.leaks) {
    leaks.push_back(leak_json(leak));
  }
  return Json{
      {"schema_version", kReportSchemaVersion},
      {"app_id", report.app_id},
      {"status", std::string(to_string(report.status))},
      {"error", report.error},
      {"timings",
       {{"parse_ms", report.timings.parse_ms},
        {"graphs_ms", report.timings.graphs_ms},
        {"taint_ms", report.timings.taint_ms},
        {"inference_ms", report.timings.inference_ms}}},
      {"warnings", report.warnings},
      {"leaks", std::move(leaks)},
  };
}

Json ranked_json(const RankedCounts& ranked) {
  Json out = Json::array();
  for (const auto& [name, count] : ranked) {
    out.push_back(Json{{"name", name}, {"count", count}});
  }
  return out;
}

Json summary_json(const CorpusSummary& s) {
  Json per_app = Json::array();
  for (const auto& [app, count] : s.per_app) {
    per_app.push_back(Json{{"app_id", app}, {"leaks", count}});
  }
  return Json{
      {"schema_version", kReportSchemaVersion},
      {"apps_analyzed", s.apps_analyzed},
      {"apps_with_leaks", s.apps_with_leaks},
      {"total_leaks", s.total_leaks},
      {"field_leaks", s.field_leaks},
      {"method_leaks", s.method_leaks},
      {"by_source", s.by_source},
      {"by_sensor_type", s.by_sensor_type},
      {"by_status", s.by_status},
      {"by_verdict", s.by_verdict},
      {"ranked_sources", ranked_json(s.ranked_sources())},
      {"ranked_sensor_types", ranked_json(s.ranked_sensor_types())},
      {"per_app", std::move(per_app)},
  };
}

void check_schema(const Json& j) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
    throw std::invalid_argument("unsupported schema_version");
  }
}

std::string format_ms(double ms) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << ms;
  return out.str();
}

std::string report_text(const AppReport& r) {
  std::ostringstream out;
  out << "app " << r.app_id << ": " << to_string(r.status) << ", "
      << r.leaks.size() << " leak(s)\n";
  if (!r.error.empty()) {
    out << "  error: " << r.error << "\n";
  }
  out << "  timings ms: parse " << format_ms(r.timings.parse_ms) << ", graphs "
      << format_ms(r.timings.graphs_ms) << ", taint "
      << format_ms(r.timings.taint_ms) << ", inference "
      << format_ms(r.timings.inference_ms) << "\n";
  for (const auto& w : r.warnings) {
    out << "  warning: " << w << "\n";
  }
  for (std::size_t i = 0; i < r.leaks.size(); ++i) {
    const auto& leak = r.leaks[i];
    out << "  leak " << i + 1 << ": " << leak.source << " ("
        << to_string(leak.source_kind) << ") -> " << leak.sink << " @"
        << leak.position << "\n";
    out << "    sensor: ";
    const auto& a = leak.attribution;
    if (a.verdict == Verdict::Inferred) {
      out << a.sensor();
    } else {
      out << to_string(a.verdict);
      if (!a.candidates.empty()) {
        out << " {";
        for (std::size_t c = 0; c < a.candidates.size(); ++c) {
          out << (c ? ", " : "") << a.candidates[c];
        }
        out << "}";
      }
    }
    out << " [" << to_string(a.evidence) << (a.conflict ? ", conflict" : "")
        << "]\n";
    for (const auto& w : leak.witness_path) {
      out << "    " << std::left << std::setw(7) << to_string(w.kind)
          << w.at.method << " #" << w.at.index << ": " << w.at.text << "\n";
    }
  }
  return out.str();
}

std::string summary_text(const CorpusSummary& s) {
  std::ostringstream out;
  out << "apps analyzed: " << s.apps_analyzed << "\n"
      << "apps with leaks: " << s.apps_with_leaks << "\n"
      << "leaks: " << s.total_leaks << " (field " << s.field_leaks
      << ", method " << s.method_leaks << ")\n";
  out << "by source:\n";
  for (const auto& [name, count] : s.ranked_sources()) {
    out << "  " << std::setw(6) << count << "  " << name << "\n";
  }
  out << "by sensor type (field-triggered):\n";
  for (const auto& [name, count] : s.ranked_sensor_types()) {
    out << "  " << std::setw(6) << count << "  " << name << "\n";
  }
  out << "by status:\n";
  for (const auto& [name, count] : s.by_status) {
    out << "  " << std::setw(6) << count << "  " << name << "\n";
  }
  return out.str();
}

} // namespace

std::string_view to_string(AppStatus status) {
  switch (status) {
    case AppStatus::Ok:
      return "ok";
    case AppStatus::TimeoutPartial:
      return "timeout-partial";
    case AppStatus::ParseError:
      return "parse-error";
  }
  return "?";
}

std::optional<AppStatus> parse_app_status(std::string_view text) {
  for (auto s :
       {AppStatus::Ok, AppStatus::TimeoutPartial, AppStatus::ParseError}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  return std::nullopt;
}

std::optional<OutputFormat> parse_output_format(std::string_view text) {
  if (text == "json") {
    return OutputFormat::Json;
  }
  if (text == "text") {
    return OutputFormat::Text;
  }
  return std::nullopt;
}

LeakRecord make_leak_record(const IRProgram& program,
                            const LeakFlow& flow,
                            const SensorAttribution& attribution) {
  LeakRecord leak;
  leak.source = flow.source_id;
  leak.source_kind = flow.source_kind;
  leak.origin = locate(program, flow.origin);
  leak.sink = flow.sink_id;
  leak.sink_stmt = locate(program, flow.sink);
  leak.position = flow.position.str();
  for (const auto& w : flow.witness) {
    leak.witness_path.push_back({locate(program, w.at), w.kind});
  }
  leak.attribution = attribution;
  return leak;
}

RankedCounts CorpusSummary::ranked_sources() const {
  return rank(by_source);
}

RankedCounts CorpusSummary::ranked_sensor_types() const {
  return rank(by_sensor_type);
}

CorpusSummary summarize(const std::vector<AppReport>& reports) {
  CorpusSummary s;
  s.apps_analyzed = reports.size();
  for (const auto& r : reports) {
    ++s.by_status[std::string(to_string(r.status))];
    s.per_app.emplace_back(r.app_id, r.leaks.size());
    if (!r.leaks.empty()) {
      ++s.apps_with_leaks;
    }
    for (const auto& leak : r.leaks) {
      ++s.total_leaks;
      ++s.by_source[leak.source];
      if (leak.source_kind == SourceKind::Method) {
        ++s.method_leaks;
        continue;
      }
      ++s.field_leaks;
      ++s.by_verdict[std::string(to_string(leak.attribution.verdict))];
      if (leak.attribution.verdict == Verdict::Inferred) {
        ++s.by_sensor_type[leak.sensor_type()];
      }
    }
  }
  return s;
}

std::string emit_report(const AppReport& report, OutputFormat format) {
  if (format == OutputFormat::Text) {
    return report_text(report);
  }
  return report_json(report).dump(2) + "\n";
}

std::string emit_summary(const CorpusSummary& summary, OutputFormat format) {
  if (format == OutputFormat::Text) {
    return summary_text(summary);
  }
  return summary_json(summary).dump(2) + "\n";
}

std::string emit_batch(const std::vector<AppReport>& reports,
                       const CorpusSummary& summary,
                       OutputFormat format) {
  if (format == OutputFormat::Text) {
    std::string out;
    for (const auto& r : reports) {
      out += report_text(r);
    }
    return out + summary_text(summary);
  }
  Json apps = Json::array();
  for (const auto& r : reports) {
    apps.push_back(report_json(r));
  }
  Json batch{{"schema_version", kReportSchemaVersion},
             {"apps", std::move(apps)},
             {"summary", summary_json(summary)}};
  return batch.dump(2) + "\n";
}

AppReport parse_report_json(std::string_view text) {
  try {
    auto j = Json::parse(text);
    check_schema(j);
    AppReport r;
    r.app_id = j.at("app_id").get<std::string>();
    r.status = required_enum<AppStatus>(j, "status", parse_app_status);
    r.error = j.at("error").get<std::string>();
    const auto& t = j.at("timings");
    r.timings = {t.at("parse_ms").get<double>(), t.at("graphs_ms").get<double>(),
                 t.at("taint_ms").get<double>(),
                 t.at("inference_ms").get<double>()};
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& leak : j.at("leaks")) {
      r.leaks.push_back(leak_from(leak));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

CorpusSummary parse_summary_json(std::string_view text) {
  try {
    auto j = Json::parse(text);
    check_schema(j);
    CorpusSummary s;
    s.apps_analyzed = j.at("apps_analyzed").get<std::size_t>();
    s.apps_with_leaks = j.at("apps_with_leaks").get<std::size_t>();
    s.total_leaks = j.at("total_leaks").get<std::size_t>();
    s.field_leaks = j.at("field_leaks").get<std::size_t>();
    s.method_leaks = j.at("method_leaks").get<std::size_t>();
    using Counts = std::map<std::string, std::size_t>;
    s.by_source = j.at("by_source").get<Counts>();
    s.by_sensor_type = j.at("by_sensor_type").get<Counts>();
    s.by_status = j.at("by_status").get<Counts>();
    s.by_verdict = j.at("by_verdict").get<Counts>();
    for (const auto& entry : j.at("per_app")) {
      s.per_app.emplace_back(entry.at("app_id").get<std::string>(),
                             entry.at("leaks").get<std::size_t>());
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed summary: ") + e.what());
  }
}

} // namespace seeker
