#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <tuple>

#include <seeker/call_graph.h>
#include <seeker/config.h>
#include <seeker/ir.h>

namespace seeker::testing {

/// A source value observed at a sink during concrete execution.
struct DynamicLeak {
  std::string source_id;
  StmtRef origin;
  StmtRef sink;
  CallPosition position;

  auto key() const { return std::tie(origin, sink, position, source_id); }
  bool operator<(const DynamicLeak& o) const { return key() < o.key(); }
  bool operator==(const DynamicLeak& o) const { return key() == o.key(); }
};

struct InterpreterOptions {
  /// Times the whole root sequence is replayed; later rounds see the field
  /// state earlier rounds left behind.
  int rounds = 2;
  /// Explore every successor of every branch, ignoring the condition.
  bool fork_all_branches = false;
  /// Field stores accumulate labels instead of overwriting them.
  bool weak_fields = false;
  /// A value's labels include everything reachable from it through fields
  /// and elements, and loads through a labeled base yield the base's labels.
  bool deep_labels = false;
  /// A null base of a field access or virtual call is first bound to a
  /// fresh object of the declared class, as if the dereference succeeded.
  bool materialize_nulls = false;
  std::size_t max_paths = 1 << 14;
  std::size_t max_steps_per_path = 200000;
};

struct InterpreterResult {
  std::set<DynamicLeak> leaks;
  std::size_t paths = 0;
  /// False when a path or step bound cut the exploration short.
  bool exhaustive = true;
};

/// Executes the roots of `entry_model` with concrete values, tagging source
/// reads with (source, statement) labels and recording the labels that reach
/// sink arguments. Unknown conditions fork; every feasible combination of
/// branch outcomes is explored. External methods follow the config: method
/// sources return fresh labeled values, summaries move labels, anything else
/// returns the union of receiver and argument labels.
InterpreterResult run_interpreter(const IRProgram& program,
                                  const SourceSinkConfig& config,
                                  const EntryPointModel& entry_model,
                                  const InterpreterOptions& options = {});

} // namespace seeker::testing
