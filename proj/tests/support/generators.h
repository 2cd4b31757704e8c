#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <seeker/ir.h>

namespace seeker::testing {

/// Splitmix64. Portable across standard libraries, unlike the std
/// distributions, so generated corpora are identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint32_t seed);
  std::uint32_t next();
  /// Uniform in [0, n); n > 0.
  std::size_t below(std::size_t n);
  bool chance(unsigned percent) { return below(100) < percent; }

 private:
  std::uint64_t state_;
};

/// A random loop-free program over sensor sources, fields, boxes, helper
/// calls, threads, arrays, StringBuilder summaries and sinks. At most
/// `kMaxFlowProgramStatements` statements. Deterministic in `seed`.
std::string generate_flow_program(std::uint32_t seed);
inline constexpr std::size_t kMaxFlowProgramStatements = 60;

std::size_t statement_count(const IRProgram& program);

/// One field leak the attribution corpus plants on purpose.
struct PlantedLeak {
  std::string app_id;
  std::string sink_method; // method key containing the sink
  std::uint32_t sink_index = 0;
  /// Expected sensor name, or nullopt for a planted Unknown.
  std::optional<std::string> sensor;
};

struct GeneratedApp {
  std::string app_id;
  std::string text;
};

struct AttributionCorpus {
  std::vector<GeneratedApp> apps;
  std::vector<PlantedLeak> leaks;
};

/// Listener classes whose field leaks are attributable by the single
/// registration rule, by switch or if guards on getType(), or through a
/// constant-propagated guard operand; a few listeners register nothing.
AttributionCorpus generate_attribution_corpus(std::uint32_t seed,
                                              std::size_t apps);

struct SourceCountCorpus {
  std::vector<GeneratedApp> apps;
  /// source id -> planted leak count across the corpus
  std::map<std::string, std::size_t> expected;
};

/// 12 apps that together use every built-in source, each planted source use
/// reaching exactly one sink argument.
SourceCountCorpus generate_source_count_corpus();

/// Many tainted fields, long call chains and a loop that keeps producing
/// facts; meant to exhaust small budgets.
std::string generate_pathological_app(std::size_t width);

/// A listener registering the given sensor constants and switching on
/// getType() with one leaking case per constant, in the given order.
std::string generate_switch_app(const std::vector<std::int64_t>& constants);

} // namespace seeker::testing
