#include <seeker/taint.h>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_set>

#include "taint_internal.h"

namespace seeker {

namespace {

struct FactHash {
  std::size_t operator()(const TaintFact& f) const {
    std::hash<std::string> h;
    std::size_t seed = h(f.path.base);
    auto mix = [&seed](std::size_t v) {
      seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    };
    for (const auto& field : f.path.chain) {
      mix(h(field.class_name));
      mix(h(field.field_name));
    }
    mix(f.path.array_tainted);
    mix(f.path.truncated);
    mix(h(f.source_id));
    mix(f.origin.method);
    mix(f.origin.index);
    return seed;
  }
};

using FactSet = std::unordered_set<TaintFact, FactHash>;

const std::string kReturnSlot = "@ret";
const std::string kThisSlot = "@this";

std::string param_slot(std::size_t i) {
  return "@p" + std::to_string(i);
}

TaintFact rebase(const TaintFact& f, std::string base, Trace trace) {
  TaintFact out = f;
  out.path.base = std::move(base);
  out.trace = std::move(trace);
  return out;
}

class Solver {
 public:
  Solver(const IRProgram& program,
         const ProgramGraphs& graphs,
         const SourceSinkConfig& config,
         const AnalysisOptions& options)
      : program_(program),
        graphs_(graphs),
        config_(config),
        options_(options),
        callgraph_(graphs.callgraph) {
    offsets_.resize(program.method_count() + 1, 0);
    for (MethodId m = 0; m < program.method_count(); ++m) {
      offsets_[m + 1] = offsets_[m] + program.method(m).body.size();
    }
    seen_.resize(offsets_.back());
    classification_.resize(offsets_.back());
    stable_.resize(program.method_count());
    exits_.resize(program.method_count());
    for (auto m : callgraph_.reachable()) {
      prepare_method(m);
    }
  }

  AnalysisResult run() {
    for (auto m : callgraph_.reachable()) {
      const auto& cfg = graphs_.cfgs[m];
      for (std::uint32_t n = 0; n < cfg.size(); ++n) {
        if (cfg.reachable(n)) {
          work_.push_back({m, n, std::nullopt});
        }
      }
    }
    AnalysisResult result;
    std::size_t steps = 0;
    while (!work_.empty() || !heap_work_.empty()) {
      if (options_.deadline && (++steps & 127U) == 0 &&
          std::chrono::steady_clock::now() > *options_.deadline) {
        result.complete = false;
        break;
      }
      if (!work_.empty()) {
        auto item = std::move(work_.front());
        work_.pop_front();
        process(item.method, item.node,
                item.fact ? &*item.fact : nullptr);
      } else {
        // Heap-merged facts run last so direct flows claim witness paths.
        auto item = std::move(heap_work_.front());
        heap_work_.pop_front();
        propagate_successors(item.method, item.node, item.fact);
      }
    }
    for (const auto& s : seen_) {
      result.fact_count += s.size();
    }
    for (auto& [key, flow] : leaks_) {
      flow.witness = reconstruct_path(flow.trace);
      result.flows.push_back(std::move(flow));
    }
    return result;
  }

 private:
  struct Item {
    MethodId method;
    std::uint32_t node;
    std::optional<TaintFact> fact;
  };
  struct HeapItem {
    MethodId method;
    std::uint32_t node;
    TaintFact fact;
  };
  using LeakKey = std::tuple<StmtRef, StmtRef, CallPosition, std::string>;

  std::size_t index(MethodId m, std::uint32_t n) const {
    return offsets_[m] + n;
  }

  void prepare_method(MethodId m) {
    const auto& method = program_.method(m);
    std::set<std::string> defined;
    for (std::uint32_t n = 0; n < method.body.size(); ++n) {
      const auto& st = method.body[n];
      classification_[index(m, n)] = classify_statement(config_, st);
      if (auto d = st.defined_local()) {
        defined.insert(*d);
      }
      if (const auto* load = st.as<stmt::LoadField>()) {
        load_sites_[load->field.key()].push_back({m, n});
      }
    }
    // Parameters never reassigned still name the caller's objects at exit.
    if (!defined.count(std::string(IRMethod::kThis))) {
      stable_[m].emplace(std::string(IRMethod::kThis), kThisSlot);
    }
    for (std::size_t i = 0; i < method.params.size(); ++i) {
      if (!defined.count(method.params[i].name)) {
        stable_[m].emplace(method.params[i].name, param_slot(i));
      }
    }
  }

  void propagate(MethodId m, std::uint32_t n, const TaintFact& fact) {
    if (seen_[index(m, n)].insert(fact).second) {
      work_.push_back({m, n, fact});
    }
  }

  void propagate_successors(MethodId m,
                            std::uint32_t n,
                            const TaintFact& fact) {
    for (const auto& e : graphs_.cfgs[m].successors(n)) {
      propagate(m, static_cast<std::uint32_t>(e.to), fact);
    }
  }

  void process(MethodId m, std::uint32_t n, const TaintFact* fact) {
    const auto& st = program_.method(m).body[n];
    const auto& classification = classification_[index(m, n)];
    const auto* call = st.as<stmt::Invoke>();
    const CallSiteInfo* site = call ? callgraph_.site({m, n}) : nullptr;
    if (fact != nullptr) {
      if (classification.kind == Classification::Kind::Sink) {
        check_sink(m, n, *call, *classification.sink, *fact);
      }
      if (const auto* ret = st.as<stmt::Return>()) {
        exit_fact(m, n, *ret, *fact);
      }
      if (site != nullptr) {
        enter_callees(m, n, *call, *site, *fact);
      }
    }
    TransferContext context{&config_, options_.max_depth,
                            site == nullptr || site->may_be_external};
    detail::FlowOut out;
    detail::flow_fact(st, {m, n}, fact, classification, context, out);
    for (const auto& f : out.facts) {
      propagate_successors(m, n, f);
    }
    if (options_.heap_merge) {
      for (auto& write : out.heap) {
        heap_store(std::move(write));
      }
    }
  }

  void check_sink(MethodId m,
                  std::uint32_t n,
                  const stmt::Invoke& call,
                  const SinkSpec& sink,
                  const TaintFact& fact) {
    for (const auto& position : sink.positions) {
      const auto* local = detail::local_at(call, position);
      if (local == nullptr || *local != fact.path.base) {
        continue;
      }
      StmtRef at{m, n};
      LeakKey key{fact.origin, at, position, fact.source_id};
      if (leaks_.count(key)) {
        continue;
      }
      LeakFlow flow;
      flow.source_id = fact.source_id;
      flow.source_kind =
          program_.method(fact.origin.method)
                  .body[fact.origin.index]
                  .as<stmt::LoadField>()
              ? SourceKind::Field
              : SourceKind::Method;
      flow.origin = fact.origin;
      flow.sink_id = sink.id();
      flow.sink = at;
      flow.position = position;
      flow.trace = extend_trace(fact.trace, at, TraceKind::Sink);
      leaks_.emplace(std::move(key), std::move(flow));
    }
  }

  void exit_fact(MethodId m,
                 std::uint32_t n,
                 const stmt::Return& ret,
                 const TaintFact& fact) {
    std::vector<std::string> slots;
    if (ret.value && *ret.value == fact.path.base) {
      slots.push_back(kReturnSlot);
    }
    if (auto it = stable_[m].find(fact.path.base); it != stable_[m].end()) {
      slots.push_back(it->second);
    }
    for (auto& slot : slots) {
      auto exit = rebase(fact, std::move(slot),
                         extend_trace(fact.trace, {m, n}, TraceKind::Return));
      if (!exits_[m].insert(exit).second) {
        continue;
      }
      for (const auto& [site, binding] : callgraph_.callers(m)) {
        return_to(site, binding, exit);
      }
    }
  }

  void return_to(StmtRef site, CallBinding binding, const TaintFact& exit) {
    const auto& call =
        *program_.method(site.method).body[site.index].as<stmt::Invoke>();
    const std::string* local = nullptr;
    const auto& slot = exit.path.base;
    if (binding == CallBinding::Direct) {
      if (slot == kReturnSlot) {
        local = call.result ? &*call.result : nullptr;
      } else if (slot == kThisSlot) {
        local = call.receiver ? &*call.receiver : nullptr;
      } else {
        auto i = std::stoi(slot.substr(2));
        local = detail::local_at(call, CallPosition::arg(i));
      }
    } else if (slot == kThisSlot) {
      local = detail::local_at(call, binding == CallBinding::ThreadReceiver
                                         ? CallPosition::receiver()
                                         : CallPosition::arg(0));
    }
    // The call's own result overwrites an argument local it shares.
    if (local != nullptr && slot != kReturnSlot && call.result &&
        *call.result == *local) {
      local = nullptr;
    }
    if (local != nullptr) {
      auto trace = std::make_shared<TraceStep>(*exit.trace);
      trace->site = site;
      propagate_successors(site.method, site.index,
                           rebase(exit, *local, std::move(trace)));
    }
  }

  void enter_callees(MethodId m,
                     std::uint32_t n,
                     const stmt::Invoke& call,
                     const CallSiteInfo& site,
                     const TaintFact& fact) {
    const auto& base = fact.path.base;
    bool from_receiver = call.receiver && *call.receiver == base;
    for (const auto& target : site.targets) {
      const auto& callee = program_.method(target.callee);
      std::vector<std::string> bound;
      switch (target.binding) {
        case CallBinding::Direct:
          if (from_receiver) {
            bound.emplace_back(IRMethod::kThis);
          }
          for (std::size_t i = 0;
               i < call.args.size() && i < callee.params.size(); ++i) {
            if (call.args[i].is_local() && call.args[i].local() == base) {
              bound.push_back(callee.params[i].name);
            }
          }
          break;
        case CallBinding::ThreadReceiver:
          if (from_receiver) {
            bound.emplace_back(IRMethod::kThis);
          }
          break;
        case CallBinding::ThreadArgument:
          if (!call.args.empty() && call.args[0].is_local() &&
              call.args[0].local() == base) {
            bound.emplace_back(IRMethod::kThis);
          }
          break;
      }
      for (auto& local : bound) {
        propagate(target.callee, 0,
                  rebase(fact, std::move(local),
                         extend_trace(fact.trace, {m, n}, TraceKind::Call)));
      }
    }
  }

  void heap_store(detail::HeapWrite write) {
    auto key = write.field.key();
    if (!heap_[key].insert(write.tail).second) {
      return;
    }
    auto sites = load_sites_.find(key);
    if (sites == load_sites_.end()) {
      return;
    }
    for (const auto& at : sites->second) {
      if (!graphs_.cfgs[at.method].reachable(at.index)) {
        continue;
      }
      const auto& load =
          *program_.method(at.method).body[at.index].as<stmt::LoadField>();
      heap_work_.push_back(
          {at.method, at.index,
           rebase(write.tail, load.dst,
                  extend_trace(write.tail.trace, at, TraceKind::Heap))});
    }
  }

  const IRProgram& program_;
  const ProgramGraphs& graphs_;
  const SourceSinkConfig& config_;
  const AnalysisOptions& options_;
  const CallGraph& callgraph_;

  std::vector<std::size_t> offsets_;
  std::vector<FactSet> seen_;
  std::vector<Classification> classification_;
  /// Per method: unmodified `this`/parameter local -> exit slot.
  std::vector<std::map<std::string, std::string>> stable_;
  std::vector<FactSet> exits_;
  std::map<std::string, std::vector<StmtRef>> load_sites_;
  std::map<std::string, FactSet> heap_;
  std::deque<Item> work_;
  std::deque<HeapItem> heap_work_;
  std::map<LeakKey, LeakFlow> leaks_;
};

} // namespace

AnalysisResult analyze(const IRProgram& program,
                       const ProgramGraphs& graphs,
                       const SourceSinkConfig& config,
                       const AnalysisOptions& options) {
  if (graphs.cfgs.size() != program.method_count()) {
    throw InternalError("graphs were built for a different program");
  }
  return Solver(program, graphs, config, options).run();
}

} // namespace seeker
