// seeker: sensor-leak taint analysis over textual IR dumps.
//
//   seeker analyze <file|dir> [--config PATH] [--budget SECONDS] [--workers N]
//                  [--prefilter] [--format json|text] [--out PATH]
//                  [--dump-graphs] [--no-heap-merge] [--entry CALLBACK]...
//   seeker config            print the built-in sources/sinks configuration
//
// Exit codes: 0 ran, 1 usage or configuration error, 2 (configurable) when
// any app failed to parse.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include <seeker/config.h>
#include <seeker/pipeline.h>
#include <seeker/report.h>

namespace {

struct AnalyzeArgs {
  std::string input;
  std::string config_path;
  double budget_seconds = 1200;
  std::size_t workers = 1;
  bool prefilter = false;
  std::string format = "json";
  std::string out_path;
  bool dump_graphs = false;
  bool no_heap_merge = false;
  std::vector<std::string> entries;
  int parse_error_exit_code = 2;
};

int analyze(const AnalyzeArgs& args) {
  seeker::SourceSinkConfig config;
  try {
    if (args.config_path.empty()) {
      config = seeker::default_sensor_config();
    } else {
      std::ifstream in(args.config_path);
      if (!in) {
        std::cerr << "seeker: cannot read config " << args.config_path << "\n";
        return 1;
      }
      std::ostringstream text;
      text << in.rdbuf();
      config = seeker::load_config(text.str());
    }
  } catch (const seeker::ConfigError& e) {
    std::cerr << "seeker: " << args.config_path << ":" << e.line() << ": "
              << e.what() << "\n";
    return 1;
  }
  for (const auto& w : config.warnings) {
    std::cerr << "seeker: config warning: " << w << "\n";
  }

  seeker::RunOptions options;
  options.budget = std::chrono::duration<double>(args.budget_seconds);
  options.heap_merge = !args.no_heap_merge;
  for (const auto& e : args.entries) {
    if (!options.entry_model.add(e)) {
      std::cerr << "seeker: bad --entry pattern '" << e << "'\n";
      return 1;
    }
  }
  std::mutex dump_lock;
  if (args.dump_graphs) {
    options.graph_dump = [&](const std::string& app, const std::string& dot) {
      std::lock_guard<std::mutex> lock(dump_lock);
      std::cerr << "// app " << app << "\n" << dot;
    };
  }
  auto format = *seeker::parse_output_format(args.format);

  if (!std::filesystem::exists(args.input)) {
    std::cerr << "seeker: no such file or directory: " << args.input << "\n";
    return 1;
  }
  bool single = !std::filesystem::is_directory(args.input);
  auto inputs = seeker::collect_inputs(args.input);
  seeker::BatchOptions batch{args.workers, args.prefilter};
  auto result = seeker::run_batch(inputs, config, options, batch);
  for (const auto& id : result.skipped) {
    std::cerr << "seeker: prefilter skipped " << id << "\n";
  }

  std::string output;
  if (single && result.reports.size() == 1) {
    output = seeker::emit_report(result.reports.front(), format);
  } else {
    output = seeker::emit_batch(result.reports,
                                seeker::summarize(result.reports), format);
  }
  if (args.out_path.empty()) {
    std::cout << output;
  } else {
    std::ofstream out(args.out_path, std::ios::binary);
    out << output;
    if (!out) {
      std::cerr << "seeker: cannot write " << args.out_path << "\n";
      return 1;
    }
  }

  bool parse_failure = false;
  for (const auto& r : result.reports) {
    if (r.status == seeker::AppStatus::ParseError) {
      std::cerr << "seeker: " << r.app_id << ": " << r.error << "\n";
      parse_failure = true;
    }
  }
  return parse_failure ? args.parse_error_exit_code : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static taint analysis for sensor-data leaks"};
  app.require_subcommand(1);

  AnalyzeArgs args;
  auto* cmd = app.add_subcommand("analyze", "Analyze an IR file or directory");
  cmd->add_option("input", args.input, "IR file, or directory of *.ir files")
      ->required();
  cmd->add_option("--config", args.config_path,
                  "Sources/sinks file (default: built-in sensor config)");
  cmd->add_option("--budget", args.budget_seconds,
                  "Per-app time budget in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", args.workers, "Apps analyzed concurrently")
      ->check(CLI::Range(1, 256));
  cmd->add_flag("--prefilter", args.prefilter,
                "Skip apps that never mention android.hardware.Sensor");
  cmd->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--out", args.out_path, "Write output here instead of stdout");
  cmd->add_flag("--dump-graphs", args.dump_graphs,
                "Write call graph and CFGs as Graphviz text to stderr");
  cmd->add_flag("--no-heap-merge", args.no_heap_merge,
                "Do not merge stores to a field across bases");
  cmd->add_option("--entry", args.entries,
                  "Extra callback root, e.g. onStart() or run(*)");
  cmd->add_option("--parse-error-exit-code", args.parse_error_exit_code,
                  "Exit code when any app fails to parse");

  auto* config_cmd =
      app.add_subcommand("config", "Print the built-in configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (config_cmd->parsed()) {
    std::cout << seeker::default_sensor_config_text();
    return 0;
  }
  return analyze(args);
}
