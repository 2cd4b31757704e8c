#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <seeker/cfg.h>
#include <seeker/ir.h>

namespace seeker {

/// Framework callbacks treated as analysis roots, in no particular order.
class EntryPointModel {
 public:
  struct Callback {
    std::string name;
    /// nullopt matches any parameter list.
    std::optional<std::vector<std::string>> params;

    std::string str() const;
    bool matches(const MethodSig& sig) const;
  };

  /// onSensorChanged, onAccuracyChanged, onCreate, onResume, onPause.
  static EntryPointModel android_sensor_default();

  /// Accepts `name(t1,t2)`, `name(*)` or `name`; returns false if malformed.
  bool add(std::string_view pattern);

  const std::vector<Callback>& callbacks() const { return callbacks_; }

  struct Roots {
    std::vector<MethodId> methods;
    std::vector<std::string> warnings;
  };
  /// Methods matching a callback or an entry hint of the program. Callbacks
  /// with no match are dropped with a warning.
  Roots resolve(const IRProgram& program) const;

 private:
  std::vector<Callback> callbacks_;
};

/// How a call site binds its values to the callee's `this`.
enum class CallBinding {
  Direct,         // receiver -> this, arg i -> param i
  ThreadReceiver, // Thread#start(): receiver -> this of run()
  ThreadArgument, // execute/post(Runnable): arg 0 -> this of run()
};

struct CallTarget {
  MethodId callee = 0;
  CallBinding binding = CallBinding::Direct;

  auto operator<=>(const CallTarget&) const = default;
};

struct CallSiteInfo {
  std::vector<CallTarget> targets; // sorted, unique
  bool may_be_external = false;

  bool operator==(const CallSiteInfo&) const = default;
};

/// Class-hierarchy call graph restricted to methods reachable from roots.
class CallGraph {
 public:
  const std::map<StmtRef, CallSiteInfo>& sites() const { return sites_; }
  const CallSiteInfo* site(StmtRef ref) const;
  const std::set<MethodId>& entry_points() const { return entry_points_; }
  const std::set<MethodId>& reachable() const { return reachable_; }
  bool is_reachable(MethodId m) const { return reachable_.count(m) != 0; }
  /// Call sites that may invoke `callee`, with the binding used.
  const std::vector<std::pair<StmtRef, CallBinding>>& callers(
      MethodId callee) const;
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::string to_dot(const IRProgram& program) const;

  bool operator==(const CallGraph& o) const {
    return sites_ == o.sites_ && entry_points_ == o.entry_points_ &&
        reachable_ == o.reachable_;
  }

  friend CallGraph build_callgraph(const IRProgram&, const EntryPointModel&);

 private:
  std::map<StmtRef, CallSiteInfo> sites_;
  std::set<MethodId> entry_points_;
  std::set<MethodId> reachable_;
  std::map<MethodId, std::vector<std::pair<StmtRef, CallBinding>>> callers_;
  std::vector<std::string> warnings_;
};

/// Targets of one invoke under class hierarchy analysis.
CallSiteInfo resolve_call_targets(const IRProgram& program,
                                  const stmt::Invoke& call);

CallGraph build_callgraph(const IRProgram& program,
                          const EntryPointModel& entry_model);

/// CFGs for every method (indexed by MethodId) plus the call graph.
struct ProgramGraphs {
  std::vector<Cfg> cfgs;
  CallGraph callgraph;
};

ProgramGraphs build_graphs(const IRProgram& program,
                           const EntryPointModel& entry_model);

} // namespace seeker
