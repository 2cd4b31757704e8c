#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <seeker/call_graph.h>
#include <seeker/config.h>
#include <seeker/ir.h>

namespace seeker {

/// Violation of an engine invariant; indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// `base.f1.f2...` with at most `max_depth` fields. `array_tainted` marks the
/// elements of the array reached by the chain. `truncated` marks a chain cut
/// at the depth bound: every path below it is tainted.
struct AccessPath {
  std::string base;
  std::vector<FieldRef> chain;
  bool array_tainted = false;
  bool truncated = false;

  /// The value of `base` itself is tainted.
  bool whole() const { return chain.empty() && !array_tainted; }

  static AccessPath local(std::string base) { return {std::move(base), {}, false, false}; }

  /// Cuts the chain to `max_depth`, marking truncation; a truncated empty
  /// chain becomes whole-object taint.
  void normalize(std::size_t max_depth);

  /// `v`, `v.C#f.D#g`, `v[]`, `v.C#f.*`
  std::string str() const;

  bool operator==(const AccessPath&) const = default;
  auto operator<=>(const AccessPath&) const = default;
};

enum class TraceKind { Source, Step, Call, Return, Heap, Sink };

std::string_view to_string(TraceKind kind);
std::optional<TraceKind> parse_trace_kind(std::string_view text);

/// One propagation step; `parent` points toward the origin.
struct TraceStep {
  StmtRef at;
  TraceKind kind = TraceKind::Step;
  std::shared_ptr<const TraceStep> parent;
  /// Return steps: the call site the fact flowed back into.
  std::optional<StmtRef> site;
};

using Trace = std::shared_ptr<const TraceStep>;

Trace extend_trace(Trace parent, StmtRef at, TraceKind kind);

struct TaintFact {
  AccessPath path;
  std::string source_id;
  StmtRef origin;
  Trace trace; // not part of identity

  bool operator==(const TaintFact& o) const {
    return path == o.path && source_id == o.source_id && origin == o.origin;
  }
  bool operator<(const TaintFact& o) const {
    if (path != o.path) {
      return path < o.path;
    }
    if (source_id != o.source_id) {
      return source_id < o.source_id;
    }
    return origin < o.origin;
  }
};

enum class SourceKind { Field, Method };

std::string_view to_string(SourceKind kind);

struct WitnessStep {
  StmtRef at;
  TraceKind kind = TraceKind::Step;

  bool operator==(const WitnessStep&) const = default;
};

struct LeakFlow {
  std::string source_id;
  SourceKind source_kind = SourceKind::Field;
  StmtRef origin;
  std::string sink_id;
  StmtRef sink;
  CallPosition position;
  std::vector<WitnessStep> witness;
  Trace trace; // not part of identity

  /// The counting unit: one leak per (origin, sink, position, source).
  auto key() const { return std::tie(origin, sink, position, source_id); }

  bool operator==(const LeakFlow& o) const {
    return key() == o.key() && sink_id == o.sink_id &&
        source_kind == o.source_kind && witness == o.witness;
  }
};

/// Origin-to-sink statement sequence with loops cut out, so every
/// (method, statement) appears once. Throws InternalError on a broken trace.
std::vector<WitnessStep> reconstruct_path(const Trace& sink_step);

/// Intraprocedural inputs of the transfer function.
struct TransferContext {
  const SourceSinkConfig* config = nullptr;
  std::size_t max_depth = 3;
  /// Whether the invoke at this statement may reach a body-less method, in
  /// which case its summary applies.
  bool callee_may_be_external = true;
};

/// Out-facts of one statement: every in-fact is transformed and sources are
/// generated. Facts flowing into callees are not included.
std::vector<TaintFact> transfer(const IRStatement& statement,
                                StmtRef at,
                                const std::vector<TaintFact>& in,
                                const TransferContext& context);

struct AnalysisOptions {
  std::size_t max_depth = 3;
  /// A store to `C#f` on one base taints loads of `C#f` on every base.
  bool heap_merge = true;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct AnalysisResult {
  std::vector<LeakFlow> flows; // sorted by key
  bool complete = true;
  std::size_t fact_count = 0;
};

AnalysisResult analyze(const IRProgram& program,
                       const ProgramGraphs& graphs,
                       const SourceSinkConfig& config,
                       const AnalysisOptions& options = {});

} // namespace seeker
