#include <seeker/pipeline.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <seeker/sensor_inference.h>
#include <seeker/taint.h>

namespace seeker {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since)
      .count();
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return std::nullopt;
  }
  return buffer.str();
}

AppReport parse_error(const std::string& app_id, std::string message) {
  AppReport report;
  report.app_id = app_id;
  report.status = AppStatus::ParseError;
  report.error = std::move(message);
  return report;
}

} // namespace

bool passes_prefilter(std::string_view text) {
  constexpr std::string_view needle = "android.hardware.sensor";
  auto it = std::search(text.begin(), text.end(), needle.begin(), needle.end(),
                        [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                              b;
                        });
  return it != text.end();
}

AppReport run_app_text(const std::string& app_id,
                       std::string_view text,
                       const SourceSinkConfig& config,
                       const RunOptions& options) {
  auto start = Clock::now();
  auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(options.budget);
  AppReport report;
  report.app_id = app_id;

  IRProgram program;
  try {
    program = parse_program(text);
  } catch (const ParseError& e) {
    auto failed = parse_error(app_id, std::to_string(e.line()) + ":" +
                                          std::to_string(e.column()) + ": " +
                                          e.message());
    failed.timings.parse_ms = elapsed_ms(start);
    return failed;
  }
  report.timings.parse_ms = elapsed_ms(start);

  auto phase = Clock::now();
  auto graphs = build_graphs(program, options.entry_model);
  report.timings.graphs_ms = elapsed_ms(phase);
  report.warnings = graphs.callgraph.warnings();
  if (options.graph_dump) {
    std::string dot = graphs.callgraph.to_dot(program);
    for (auto m : graphs.callgraph.reachable()) {
      dot += cfg_to_dot(graphs.cfgs[m], program.method(m));
    }
    options.graph_dump(app_id, dot);
  }

  phase = Clock::now();
  AnalysisOptions analysis;
  analysis.max_depth = options.max_depth;
  analysis.heap_merge = options.heap_merge;
  analysis.deadline = deadline;
  auto result = analyze(program, graphs, config, analysis);
  report.timings.taint_ms = elapsed_ms(phase);
  if (!result.complete) {
    report.status = AppStatus::TimeoutPartial;
    report.warnings.push_back("analysis budget exhausted; leaks are partial");
  }

  phase = Clock::now();
  auto attributions =
      attribute_all(result.flows, program, graphs.cfgs, config.sensor_table);
  for (std::size_t i = 0; i < result.flows.size(); ++i) {
    report.leaks.push_back(
        make_leak_record(program, result.flows[i], attributions[i]));
  }
  report.timings.inference_ms = elapsed_ms(phase);
  return report;
}

AppReport run_app(const std::filesystem::path& path,
                  const SourceSinkConfig& config,
                  const RunOptions& options) {
  auto app_id = path.stem().string();
  auto text = read_file(path);
  if (!text) {
    return parse_error(app_id, "cannot read " + path.string());
  }
  return run_app_text(app_id, *text, config, options);
}

BatchResult run_batch(const std::vector<std::filesystem::path>& paths,
                      const SourceSinkConfig& config,
                      const RunOptions& options,
                      const BatchOptions& batch) {
  std::vector<std::optional<AppReport>> slots(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < paths.size(); i = next++) {
      if (batch.prefilter) {
        auto text = read_file(paths[i]);
        if (text && !passes_prefilter(*text)) {
          continue;
        }
      }
      try {
        slots[i] = run_app(paths[i], config, options);
      } catch (const std::exception& e) {
        // Keeps one faulty app from taking down the batch.
        slots[i] = parse_error(paths[i].stem().string(),
                               std::string("internal error: ") + e.what());
      }
    }
  };
  auto count = std::clamp<std::size_t>(batch.workers, 1, paths.size() + 1);
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < count; ++t) {
    threads.emplace_back(worker);
  }
  worker();
  for (auto& t : threads) {
    t.join();
  }

  BatchResult result;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (slots[i]) {
      result.reports.push_back(std::move(*slots[i]));
    } else {
      result.skipped.push_back(paths[i].stem().string());
    }
  }
  std::stable_sort(result.reports.begin(), result.reports.end(),
                   [](const AppReport& a, const AppReport& b) {
                     return a.app_id < b.app_id;
                   });
  std::sort(result.skipped.begin(), result.skipped.end());
  return result;
}

std::vector<std::filesystem::path> collect_inputs(
    const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) {
    return {path};
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ir") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace seeker
