#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <seeker/call_graph.h>
#include <seeker/config.h>
#include <seeker/ir.h>
#include <seeker/sensor_inference.h>
#include <seeker/taint.h>

namespace seeker::testing {

std::filesystem::path corpus_dir();
std::string read_corpus(const std::string& file_name);

/// Everything the pipeline computes for one program, kept together.
struct Analyzed {
  IRProgram program;
  ProgramGraphs graphs;
  AnalysisResult result;
  std::vector<SensorAttribution> attributions;
};

Analyzed analyze_text(std::string_view text,
                      const SourceSinkConfig& config = default_sensor_config(),
                      const AnalysisOptions& options = {},
                      const EntryPointModel& entry_model =
                          EntryPointModel::android_sensor_default());

/// Id of the method with key `Class#name(params)`; throws if absent.
MethodId method_id(const IRProgram& program, std::string_view key);

/// One leak of a hand-traced expectation, located by method key and index.
struct ExpectedLeak {
  std::string source;
  std::string origin_method;
  std::uint32_t origin_index = 0;
  std::string sink;
  std::string sink_method;
  std::uint32_t sink_index = 0;
  std::string position;
  std::string sensor; // empty when no sensor is inferred

  bool operator<(const ExpectedLeak& o) const;
  bool operator==(const ExpectedLeak& o) const;
};

std::vector<ExpectedLeak> observed_leaks(const Analyzed& analyzed);

/// Hand-traced leak sets of the reference programs, keyed by file name.
std::vector<std::pair<std::string, std::vector<ExpectedLeak>>>
reference_expectations();

std::string describe(const ExpectedLeak& leak);

/// A one-statement program exercising one sensor source. The probed
/// statement is index 0 of the only method.
struct SourceProbe {
  std::string source_id;
  SourceKind kind = SourceKind::Field;
  std::string program;
};

/// One probe per sensor source of the built-in configuration, written
/// independently of the configuration text.
std::vector<SourceProbe> sensor_source_probes();

} // namespace seeker::testing
