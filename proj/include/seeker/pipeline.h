#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <seeker/call_graph.h>
#include <seeker/config.h>
#include <seeker/report.h>

namespace seeker {

struct RunOptions {
  EntryPointModel entry_model = EntryPointModel::android_sensor_default();
  /// Wall-clock limit over parse, graphs, taint and inference.
  std::chrono::duration<double> budget = std::chrono::minutes(20);
  bool heap_merge = true;
  std::size_t max_depth = 3;
  /// Receives (app id, Graphviz text) when set. May be called concurrently.
  std::function<void(const std::string&, const std::string&)> graph_dump;
};

/// Analyzes one program given as IR text. Never throws on bad input: parse
/// failures become parse-error reports.
AppReport run_app_text(const std::string& app_id,
                       std::string_view text,
                       const SourceSinkConfig& config,
                       const RunOptions& options = {});

/// Reads `path` (app id = file stem); an unreadable file is a parse error.
AppReport run_app(const std::filesystem::path& path,
                  const SourceSinkConfig& config,
                  const RunOptions& options = {});

struct BatchOptions {
  std::size_t workers = 1;
  /// Skip files not mentioning android.hardware.Sensor (case-insensitive).
  bool prefilter = false;
};

struct BatchResult {
  std::vector<AppReport> reports; // ordered by app id
  std::vector<std::string> skipped; // prefiltered app ids
};

BatchResult run_batch(const std::vector<std::filesystem::path>& paths,
                      const SourceSinkConfig& config,
                      const RunOptions& options = {},
                      const BatchOptions& batch = {});

/// `path` itself for a file; the sorted `*.ir` files for a directory.
std::vector<std::filesystem::path> collect_inputs(
    const std::filesystem::path& path);

bool passes_prefilter(std::string_view text);

} // namespace seeker
