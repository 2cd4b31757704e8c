#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <seeker/ir.h>
#include <seeker/sensor_inference.h>
#include <seeker/taint.h>

namespace seeker {

/// Version of the JSON layout emitted for reports and summaries.
inline constexpr int kReportSchemaVersion = 1;

enum class AppStatus { Ok, TimeoutPartial, ParseError };

std::string_view to_string(AppStatus status);
std::optional<AppStatus> parse_app_status(std::string_view text);

/// A statement located independently of method ids.
struct StmtLocation {
  std::string method; // Class#name(params)
  std::uint32_t index = 0;
  std::string text;

  bool operator==(const StmtLocation&) const = default;
};

struct WitnessEntry {
  StmtLocation at;
  TraceKind kind = TraceKind::Step;

  bool operator==(const WitnessEntry&) const = default;
};

struct LeakRecord {
  std::string source;
  SourceKind source_kind = SourceKind::Field;
  StmtLocation origin;
  std::string sink;
  StmtLocation sink_stmt;
  std::string position; // receiver, arg0, ...
  std::vector<WitnessEntry> witness_path;
  SensorAttribution attribution;

  /// The inferred sensor name, or empty.
  std::string sensor_type() const { return attribution.sensor(); }

  bool operator==(const LeakRecord&) const = default;
};

LeakRecord make_leak_record(const IRProgram& program,
                            const LeakFlow& flow,
                            const SensorAttribution& attribution);

struct Timings {
  double parse_ms = 0;
  double graphs_ms = 0;
  double taint_ms = 0;
  double inference_ms = 0;

  bool operator==(const Timings&) const = default;
};

struct AppReport {
  std::string app_id;
  AppStatus status = AppStatus::Ok;
  std::string error; // set for parse-error
  std::vector<LeakRecord> leaks; // empty for parse-error
  Timings timings;
  std::vector<std::string> warnings;

  bool operator==(const AppReport&) const = default;
};

using RankedCounts = std::vector<std::pair<std::string, std::size_t>>;

struct CorpusSummary {
  std::size_t apps_analyzed = 0;
  std::size_t apps_with_leaks = 0;
  std::size_t total_leaks = 0;
  std::size_t field_leaks = 0;
  std::size_t method_leaks = 0;
  std::map<std::string, std::size_t> by_source;
  /// Inferred field-triggered leaks per sensor type.
  std::map<std::string, std::size_t> by_sensor_type;
  std::map<std::string, std::size_t> by_status;
  /// Field-triggered leaks per verdict.
  std::map<std::string, std::size_t> by_verdict;
  std::vector<std::pair<std::string, std::size_t>> per_app;

  /// Descending by count, then ascending by name.
  RankedCounts ranked_sources() const;
  RankedCounts ranked_sensor_types() const;

  bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary summarize(const std::vector<AppReport>& reports);

enum class OutputFormat { Json, Text };

std::optional<OutputFormat> parse_output_format(std::string_view text);

/// Deterministic: equal inputs give byte-identical output.
std::string emit_report(const AppReport& report, OutputFormat format);
std::string emit_summary(const CorpusSummary& summary, OutputFormat format);
/// Reports followed by their summary.
std::string emit_batch(const std::vector<AppReport>& reports,
                       const CorpusSummary& summary,
                       OutputFormat format);

/// Inverse of the JSON form of emit_report / emit_summary. Throws
/// std::invalid_argument on malformed input.
AppReport parse_report_json(std::string_view text);
CorpusSummary parse_summary_json(std::string_view text);

} // namespace seeker
