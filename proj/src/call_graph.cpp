#include <seeker/call_graph.h>

#include <algorithm>
#include <deque>
#include <sstream>

#include "lexical.h"

namespace seeker {

namespace {

using namespace lexical;

constexpr std::string_view kRunnable = "java.lang.Runnable";

bool is_thread_start(const MethodSig& callee) {
  return callee.name == "start" && callee.params.empty();
}

/// `execute(Runnable)`, `post(Runnable)` and friends hand their argument to
/// another thread that calls `run()` on it.
bool is_runnable_handoff(const MethodSig& callee) {
  static const std::vector<std::string_view> names{
      "execute", "post", "postDelayed", "submit", "runOnUiThread"};
  return !callee.params.empty() && callee.params[0] == kRunnable &&
      std::find(names.begin(), names.end(), callee.name) != names.end();
}

void add_run_targets(const IRProgram& program,
                     std::string_view bound_type,
                     CallBinding binding,
                     std::vector<CallTarget>& out) {
  for (const auto& cls : program.classes()) {
    if (!program.is_subtype(cls.name, bound_type)) {
      continue;
    }
    auto r = dispatch(program, cls.name, "run", {});
    if (!r.external()) {
      out.push_back({r.method->id, binding});
    }
  }
}

} // namespace

std::string EntryPointModel::Callback::str() const {
  if (!params) {
    return name + "(*)";
  }
  std::string s = name + "(";
  for (std::size_t i = 0; i < params->size(); ++i) {
    s += (i ? "," : "") + (*params)[i];
  }
  return s + ")";
}

bool EntryPointModel::Callback::matches(const MethodSig& sig) const {
  return sig.name == name && (!params || *params == sig.params);
}

EntryPointModel EntryPointModel::android_sensor_default() {
  EntryPointModel model;
  model.callbacks_ = {
      {"onSensorChanged", std::vector<std::string>{"android.hardware.SensorEvent"}},
      {"onAccuracyChanged",
       std::vector<std::string>{"android.hardware.Sensor", "int"}},
      {"onCreate", std::nullopt},
      {"onResume", std::vector<std::string>{}},
      {"onPause", std::vector<std::string>{}},
  };
  return model;
}

bool EntryPointModel::add(std::string_view pattern) {
  pattern = trim(pattern);
  auto open = pattern.find('(');
  std::string_view name = pattern.substr(0, open);
  if (!is_member_name(name)) {
    return false;
  }
  Callback cb{std::string(name), std::nullopt};
  if (open != std::string_view::npos) {
    if (pattern.back() != ')') {
      return false;
    }
    auto inner = trim(pattern.substr(open + 1, pattern.size() - open - 2));
    if (inner != "*") {
      cb.params.emplace();
      while (!inner.empty()) {
        auto comma = inner.find(',');
        auto type = trim(inner.substr(0, comma));
        if (!is_type_name(type)) {
          return false;
        }
        cb.params->emplace_back(type);
        if (comma == std::string_view::npos) {
          break;
        }
        inner = inner.substr(comma + 1);
      }
    }
  }
  callbacks_.push_back(std::move(cb));
  return true;
}

EntryPointModel::Roots EntryPointModel::resolve(
    const IRProgram& program) const {
  Roots roots;
  std::set<MethodId> found;
  for (const auto& cb : callbacks_) {
    bool any = false;
    for (MethodId id = 0; id < program.method_count(); ++id) {
      if (cb.matches(program.method(id).sig)) {
        found.insert(id);
        any = true;
      }
    }
    if (!any) {
      roots.warnings.push_back("entry callback " + cb.str() +
                               " not present; dropped");
    }
  }
  for (const auto& hint : program.entry_hints()) {
    auto r = resolve_method(program, hint);
    if (r.external()) {
      roots.warnings.push_back("entry hint " + hint.key() +
                               " not present; dropped");
    } else {
      found.insert(r.method->id);
    }
  }
  roots.methods.assign(found.begin(), found.end());
  return roots;
}

CallSiteInfo resolve_call_targets(const IRProgram& program,
                                  const stmt::Invoke& call) {
  CallSiteInfo info;
  const auto& callee = call.callee;
  if (call.kind == InvokeKind::Static || call.kind == InvokeKind::Special) {
    auto r = resolve_method(program, callee);
    if (r.external()) {
      info.may_be_external = true;
    } else {
      info.targets.push_back({r.method->id, CallBinding::Direct});
    }
  } else {
    // A declared type that does not resolve inside the program may be
    // implemented by the framework.
    info.may_be_external = resolve_method(program, callee).external();
    for (const auto& cls : program.classes()) {
      if (!program.is_subtype(cls.name, callee.class_name)) {
        continue;
      }
      auto r = dispatch(program, cls.name, callee.name, callee.params);
      if (!r.external()) {
        info.targets.push_back({r.method->id, CallBinding::Direct});
      }
    }
  }
  if (call.receiver && is_thread_start(callee)) {
    add_run_targets(program, callee.class_name, CallBinding::ThreadReceiver,
                    info.targets);
  }
  if (is_runnable_handoff(callee) && !call.args.empty() &&
      call.args[0].is_local()) {
    add_run_targets(program, kRunnable, CallBinding::ThreadArgument,
                    info.targets);
  }
  std::sort(info.targets.begin(), info.targets.end());
  info.targets.erase(std::unique(info.targets.begin(), info.targets.end()),
                     info.targets.end());
  return info;
}

const CallSiteInfo* CallGraph::site(StmtRef ref) const {
  auto it = sites_.find(ref);
  return it == sites_.end() ? nullptr : &it->second;
}

const std::vector<std::pair<StmtRef, CallBinding>>& CallGraph::callers(
    MethodId callee) const {
  static const std::vector<std::pair<StmtRef, CallBinding>> none;
  auto it = callers_.find(callee);
  return it == callers_.end() ? none : it->second;
}

CallGraph build_callgraph(const IRProgram& program,
                          const EntryPointModel& entry_model) {
  CallGraph graph;
  auto roots = entry_model.resolve(program);
  graph.warnings_ = std::move(roots.warnings);
  graph.entry_points_.insert(roots.methods.begin(), roots.methods.end());

  std::deque<MethodId> queue(roots.methods.begin(), roots.methods.end());
  graph.reachable_ = graph.entry_points_;
  while (!queue.empty()) {
    auto id = queue.front();
    queue.pop_front();
    const auto& body = program.method(id).body;
    for (std::uint32_t i = 0; i < body.size(); ++i) {
      const auto* call = body[i].as<stmt::Invoke>();
      if (call == nullptr) {
        continue;
      }
      StmtRef ref{id, i};
      auto info = resolve_call_targets(program, *call);
      for (const auto& t : info.targets) {
        graph.callers_[t.callee].emplace_back(ref, t.binding);
        if (graph.reachable_.insert(t.callee).second) {
          queue.push_back(t.callee);
        }
      }
      graph.sites_.emplace(ref, std::move(info));
    }
  }
  for (auto& [callee, sites] : graph.callers_) {
    std::sort(sites.begin(), sites.end());
  }
  return graph;
}

std::string CallGraph::to_dot(const IRProgram& program) const {
  std::ostringstream out;
  out << "digraph callgraph {\n";
  for (auto id : reachable_) {
    out << "  m" << id << " [label=\"" << program.method(id).sig.key() << "\""
        << (entry_points_.count(id) ? " shape=box" : "") << "];\n";
  }
  for (const auto& [ref, info] : sites_) {
    for (const auto& t : info.targets) {
      out << "  m" << ref.method << " -> m" << t.callee << " [label=\"@"
          << ref.index
          << (t.binding == CallBinding::Direct ? "" : " thread") << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

ProgramGraphs build_graphs(const IRProgram& program,
                           const EntryPointModel& entry_model) {
  ProgramGraphs graphs;
  graphs.cfgs.reserve(program.method_count());
  for (MethodId id = 0; id < program.method_count(); ++id) {
    graphs.cfgs.push_back(build_cfg(program.method(id)));
  }
  graphs.callgraph = build_callgraph(program, entry_model);
  return graphs;
}

} // namespace seeker
