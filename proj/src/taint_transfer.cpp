#include <seeker/taint.h>

#include <algorithm>
#include <set>

#include "taint_internal.h"

namespace seeker {

namespace {

bool ends_with_brackets(const std::string& type) {
  return type.size() >= 2 && type.compare(type.size() - 2, 2, "[]") == 0;
}

} // namespace

void AccessPath::normalize(std::size_t max_depth) {
  if (chain.size() > max_depth) {
    chain.resize(max_depth);
    truncated = true;
  }
  if (truncated) {
    array_tainted = false;
    if (chain.empty()) {
      truncated = false;
    }
  }
}

std::string AccessPath::str() const {
  std::string s = base;
  for (const auto& f : chain) {
    s += "." + f.key();
  }
  if (truncated) {
    s += ".*";
  }
  if (array_tainted) {
    s += "[]";
  }
  return s;
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Source:
      return "source";
    case TraceKind::Step:
      return "step";
    case TraceKind::Call:
      return "call";
    case TraceKind::Return:
      return "return";
    case TraceKind::Heap:
      return "heap";
    case TraceKind::Sink:
      return "sink";
  }
  return "?";
}

std::optional<TraceKind> parse_trace_kind(std::string_view text) {
  for (auto k : {TraceKind::Source, TraceKind::Step, TraceKind::Call,
                 TraceKind::Return, TraceKind::Heap, TraceKind::Sink}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::Field ? "field" : "method";
}

Trace extend_trace(Trace parent, StmtRef at, TraceKind kind) {
  return std::make_shared<const TraceStep>(
      TraceStep{at, kind, std::move(parent), std::nullopt});
}

std::vector<WitnessStep> reconstruct_path(const Trace& sink_step) {
  if (!sink_step || sink_step->kind != TraceKind::Sink) {
    throw InternalError("trace does not end at a sink");
  }
  std::vector<WitnessStep> path;
  const TraceStep* step = sink_step.get();
  for (; step != nullptr; step = step->parent.get()) {
    path.push_back({step->at, step->kind});
    if (step->kind == TraceKind::Source) {
      break;
    }
    if (path.size() > 1 && step->kind == TraceKind::Sink) {
      throw InternalError("sink step inside a trace");
    }
  }
  if (step == nullptr) {
    throw InternalError("trace does not start at a source");
  }
  if (step->parent) {
    throw InternalError("source step has a parent");
  }
  std::reverse(path.begin(), path.end());

  // Cut loops: a revisited statement drops everything since its first visit.
  std::vector<WitnessStep> simple;
  for (const auto& w : path) {
    auto it = std::find_if(simple.begin(), simple.end(),
                           [&](const WitnessStep& s) { return s.at == w.at; });
    if (it != simple.end()) {
      auto kind = it == simple.begin() ? it->kind : w.kind;
      simple.erase(it, simple.end());
      simple.push_back({w.at, kind});
    } else {
      simple.push_back(w);
    }
  }
  return simple;
}

namespace detail {

const std::string* local_at(const stmt::Invoke& call, CallPosition position) {
  if (position.is_receiver()) {
    return call.receiver ? &*call.receiver : nullptr;
  }
  if (position.is_return()) {
    return call.result ? &*call.result : nullptr;
  }
  auto i = static_cast<std::size_t>(position.value);
  if (i < call.args.size() && call.args[i].is_local()) {
    return &call.args[i].local();
  }
  return nullptr;
}

void flow_fact(const IRStatement& statement,
               StmtRef at,
               const TaintFact* in,
               const Classification& classification,
               const TransferContext& context,
               FlowOut& out) {
  auto emit = [&](AccessPath path, const TaintFact& from, TraceKind kind) {
    path.normalize(context.max_depth);
    out.facts.push_back({std::move(path), from.source_id, from.origin,
                         extend_trace(from.trace, at, kind)});
  };
  auto generate = [&](std::string dst, std::string source_id, bool array) {
    AccessPath path = AccessPath::local(std::move(dst));
    path.array_tainted = array;
    out.facts.push_back({std::move(path), std::move(source_id), at,
                         extend_trace(nullptr, at, TraceKind::Source)});
  };
  // Carries the fact across unless `defined` overwrites its base.
  auto pass = [&](const std::string* defined) {
    if (defined == nullptr || in->path.base != *defined) {
      out.facts.push_back(*in);
    }
  };

  if (in == nullptr) {
    if (classification.kind == Classification::Kind::FieldSource) {
      const auto& load = *statement.as<stmt::LoadField>();
      bool array = classification.field_source->array_valued() ||
          ends_with_brackets(load.field.declared_type);
      generate(load.dst, classification.field_source->id(), array);
    } else if (classification.kind == Classification::Kind::MethodSource) {
      const auto& call = *statement.as<stmt::Invoke>();
      generate(*call.result, classification.method_source->id(), false);
    }
    return;
  }

  const auto& path = in->path;
  if (const auto* s = statement.as<stmt::AssignConst>()) {
    pass(&s->dst);
  } else if (const auto* s = statement.as<stmt::NewObject>()) {
    pass(&s->dst);
  } else if (const auto* s = statement.as<stmt::AssignLocal>()) {
    if (path.base == s->src) {
      AccessPath copy = path;
      copy.base = s->dst;
      if (s->dst != s->src) {
        emit(std::move(copy), *in, TraceKind::Step);
      }
    }
    pass(s->dst == s->src ? nullptr : &s->dst);
  } else if (const auto* s = statement.as<stmt::LoadField>()) {
    if (path.base == s->base) {
      if (path.whole()) {
        emit(AccessPath::local(s->dst), *in, TraceKind::Step);
      } else if (!path.chain.empty() && path.chain.front() == s->field) {
        AccessPath rest = path;
        rest.base = s->dst;
        rest.chain.erase(rest.chain.begin());
        emit(std::move(rest), *in, TraceKind::Step);
      }
    }
    pass(&s->dst);
  } else if (const auto* s = statement.as<stmt::StoreField>()) {
    if (path.base == s->src) {
      AccessPath stored = path;
      stored.base = s->base;
      stored.chain.insert(stored.chain.begin(), s->field);
      emit(std::move(stored), *in, TraceKind::Step);

      AccessPath tail = path;
      tail.base.clear();
      out.heap.push_back({s->field,
                          {std::move(tail), in->source_id, in->origin,
                           extend_trace(in->trace, at, TraceKind::Step)}});
    }
    pass(nullptr);
  } else if (const auto* s = statement.as<stmt::LoadArray>()) {
    if (path.base == s->base && path.chain.empty()) {
      emit(AccessPath::local(s->dst), *in, TraceKind::Step);
    }
    pass(&s->dst);
  } else if (const auto* s = statement.as<stmt::StoreArray>()) {
    if (path.base == s->src) {
      AccessPath elements = AccessPath::local(s->base);
      elements.array_tainted = true;
      emit(std::move(elements), *in, TraceKind::Step);
    }
    pass(nullptr);
  } else if (const auto* call = statement.as<stmt::Invoke>()) {
    if (context.callee_may_be_external) {
      if (const auto* summary = context.config->find_summary(call->callee)) {
        for (const auto& [from, to] : summary->flows) {
          const auto* from_local = local_at(*call, from);
          const auto* to_local = local_at(*call, to);
          if (from_local && to_local && *from_local == path.base) {
            emit(AccessPath::local(*to_local), *in, TraceKind::Step);
          }
        }
      } else if (call->result) {
        bool touches = call->receiver && *call->receiver == path.base;
        for (const auto& a : call->args) {
          touches = touches || (a.is_local() && a.local() == path.base);
        }
        if (touches) {
          emit(AccessPath::local(*call->result), *in, TraceKind::Step);
        }
      }
    }
    pass(call->result ? &*call->result : nullptr);
  } else {
    pass(nullptr);
  }
}

} // namespace detail

std::vector<TaintFact> transfer(const IRStatement& statement,
                                StmtRef at,
                                const std::vector<TaintFact>& in,
                                const TransferContext& context) {
  auto classification = classify_statement(*context.config, statement);
  detail::FlowOut out;
  detail::flow_fact(statement, at, nullptr, classification, context, out);
  for (const auto& fact : in) {
    detail::flow_fact(statement, at, &fact, classification, context, out);
  }
  std::vector<TaintFact> unique;
  std::set<TaintFact> seen;
  for (auto& f : out.facts) {
    if (seen.insert(f).second) {
      unique.push_back(std::move(f));
    }
  }
  std::sort(unique.begin(), unique.end());
  return unique;
}

} // namespace seeker
