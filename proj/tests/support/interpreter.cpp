#include "interpreter.h"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace seeker::testing {

namespace {

using Label = std::pair<std::string, StmtRef>;
using Labels = std::set<Label>;

struct Value {
  enum class Kind { Null, Int, Real, Str, Ref, Opaque };
  Kind kind = Kind::Null;
  std::int64_t i = 0;
  double d = 0;
  std::string s;
  std::size_t ref = 0;
  Labels labels;
};

struct Object {
  std::string class_name;
  bool app = false; // allocated from a class the program declares
  bool array = false;
  std::map<std::string, Value> fields;
  std::optional<Value> element; // arrays are whole-array granular
  Labels labels;                // taint placed on the object by summaries
};

/// Thrown to abandon a path that exceeded its step bound.
struct PathBudget {};

bool is_primitive(std::string_view type) {
  return type == "int" || type == "long" || type == "float" ||
      type == "double" || type == "boolean" || type == "short" ||
      type == "byte" || type == "char";
}

void merge(Labels& into, const Labels& from) {
  into.insert(from.begin(), from.end());
}

/// One execution along a fixed prefix of branch decisions.
class Path {
 public:
  Path(const IRProgram& program,
       const SourceSinkConfig& config,
       const InterpreterOptions& options,
       const std::vector<int>& script)
      : program_(program), config_(config), options_(options),
        script_(script) {}

  void run_roots(const std::vector<MethodId>& roots) {
    for (int round = 0; round < options_.rounds; ++round) {
      for (auto id : roots) {
        const auto& method = program_.method(id);
        Value self = singleton(program_.owner(id).name);
        std::vector<Value> args;
        for (const auto& p : method.params) {
          args.push_back(framework_value(p.type));
        }
        call(id, self, args, 0);
      }
    }
  }

  const std::set<DynamicLeak>& leaks() const { return leaks_; }
  /// (choice taken, alternatives) for every decision on this path.
  const std::vector<std::pair<int, int>>& decisions() const {
    return decisions_;
  }

 private:
  using Frame = std::map<std::string, Value>;

  Value ref_to(std::size_t id) {
    Value v;
    v.kind = Value::Kind::Ref;
    v.ref = id;
    return v;
  }

  std::size_t allocate(const std::string& class_name, bool array) {
    Object obj;
    obj.class_name = class_name;
    obj.app = program_.find_class(class_name) != nullptr;
    obj.array = array;
    heap_.push_back(std::move(obj));
    return heap_.size() - 1;
  }

  Value singleton(const std::string& class_name) {
    auto it = singletons_.find(class_name);
    if (it == singletons_.end()) {
      it = singletons_.emplace(class_name, allocate(class_name, false)).first;
    }
    return ref_to(it->second);
  }

  /// What the framework passes for a callback parameter of `type`.
  Value framework_value(const std::string& type) {
    if (is_primitive(type)) {
      return Value{Value::Kind::Opaque};
    }
    return ref_to(allocate(type, type.ends_with("[]")));
  }

  Labels labels_of(const Value& v) const {
    Labels out = v.labels;
    if (v.kind != Value::Kind::Ref) {
      return out;
    }
    if (!options_.deep_labels) {
      merge(out, heap_[v.ref].labels);
      return out;
    }
    std::set<std::size_t> seen;
    std::vector<std::size_t> work{v.ref};
    while (!work.empty()) {
      auto id = work.back();
      work.pop_back();
      if (!seen.insert(id).second) {
        continue;
      }
      const auto& obj = heap_[id];
      merge(out, obj.labels);
      auto visit = [&](const Value& inner) {
        merge(out, inner.labels);
        if (inner.kind == Value::Kind::Ref) {
          work.push_back(inner.ref);
        }
      };
      for (const auto& [name, field] : obj.fields) {
        visit(field);
      }
      if (obj.element) {
        visit(*obj.element);
      }
    }
    return out;
  }

  Value read(const Frame& frame, const Operand& op) const {
    if (op.is_local()) {
      auto it = frame.find(op.local());
      return it == frame.end() ? Value{} : it->second;
    }
    return constant(op.constant());
  }

  static Value constant(const Constant& c) {
    Value v;
    if (std::holds_alternative<std::int64_t>(c)) {
      v.kind = Value::Kind::Int;
      v.i = std::get<std::int64_t>(c);
    } else if (std::holds_alternative<double>(c)) {
      v.kind = Value::Kind::Real;
      v.d = std::get<double>(c);
    } else if (std::holds_alternative<StringLiteral>(c)) {
      v.kind = Value::Kind::Str;
      v.s = std::get<StringLiteral>(c).value;
    }
    return v;
  }

  int decide(int alternatives) {
    if (alternatives <= 1) {
      return 0;
    }
    std::size_t at = decisions_.size();
    int choice = at < script_.size() ? script_[at] : 0;
    decisions_.emplace_back(choice, alternatives);
    return choice;
  }

  /// nullopt when the comparison cannot be decided concretely.
  static std::optional<bool> compare(const Value& a, RelOp op, const Value& b) {
    using K = Value::Kind;
    auto numeric = [](const Value& v) -> std::optional<double> {
      if (v.kind == K::Int) {
        return static_cast<double>(v.i);
      }
      if (v.kind == K::Real) {
        return v.d;
      }
      return std::nullopt;
    };
    auto x = numeric(a);
    auto y = numeric(b);
    if (x && y) {
      switch (op) {
        case RelOp::Eq: return *x == *y;
        case RelOp::Ne: return *x != *y;
        case RelOp::Lt: return *x < *y;
        case RelOp::Le: return *x <= *y;
        case RelOp::Gt: return *x > *y;
        case RelOp::Ge: return *x >= *y;
      }
    }
    if (op != RelOp::Eq && op != RelOp::Ne) {
      return std::nullopt;
    }
    std::optional<bool> equal;
    bool a_known = a.kind == K::Null || a.kind == K::Ref || a.kind == K::Str;
    bool b_known = b.kind == K::Null || b.kind == K::Ref || b.kind == K::Str;
    if (a_known && b_known) {
      equal = a.kind == b.kind &&
          (a.kind != K::Ref || a.ref == b.ref) &&
          (a.kind != K::Str || a.s == b.s);
    }
    if (!equal) {
      return std::nullopt;
    }
    return op == RelOp::Eq ? *equal : !*equal;
  }

  void tick() {
    if (++steps_ > options_.max_steps_per_path) {
      throw PathBudget{};
    }
  }

  Value call(MethodId id, Value self, std::vector<Value> args, int depth) {
    if (depth > 64) {
      throw PathBudget{};
    }
    const auto& method = program_.method(id);
    Frame frame;
    frame[std::string(IRMethod::kThis)] = std::move(self);
    for (std::size_t i = 0; i < method.params.size(); ++i) {
      frame[method.params[i].name] = i < args.size() ? args[i] : Value{};
    }
    std::size_t pc = 0;
    while (pc < method.body.size()) {
      tick();
      StmtRef at{id, static_cast<std::uint32_t>(pc)};
      const auto& statement = method.body[pc];
      std::optional<std::size_t> jump;
      if (auto* s = statement.as<stmt::AssignConst>()) {
        frame[s->dst] = constant(s->value);
      } else if (auto* s = statement.as<stmt::AssignLocal>()) {
        frame[s->dst] = read(frame, Operand::of_local(s->src));
      } else if (auto* s = statement.as<stmt::NewObject>()) {
        frame[s->dst] =
            ref_to(allocate(s->class_name, s->class_name.ends_with("[]")));
      } else if (auto* s = statement.as<stmt::LoadField>()) {
        frame[s->dst] = load_field(frame, *s, at);
      } else if (auto* s = statement.as<stmt::StoreField>()) {
        store_field(frame, *s);
      } else if (auto* s = statement.as<stmt::LoadArray>()) {
        Value base = read(frame, Operand::of_local(s->base));
        Value out;
        if (base.kind == Value::Kind::Ref && heap_[base.ref].element) {
          out = *heap_[base.ref].element;
        } else if (base.kind != Value::Kind::Ref) {
          out.kind = Value::Kind::Opaque;
        }
        if (options_.deep_labels) {
          merge(out.labels, labels_of(base));
        }
        frame[s->dst] = out;
      } else if (auto* s = statement.as<stmt::StoreArray>()) {
        Value base = read(frame, Operand::of_local(s->base));
        if (base.kind == Value::Kind::Ref) {
          Value src = read(frame, Operand::of_local(s->src));
          auto& slot = heap_[base.ref].element;
          Labels kept = slot ? slot->labels : Labels{};
          slot = src;
          merge(slot->labels, kept);
        }
      } else if (auto* s = statement.as<stmt::Invoke>()) {
        invoke(frame, *s, at, depth);
      } else if (auto* s = statement.as<stmt::IfCmp>()) {
        auto taken = compare(read(frame, Operand::of_local(s->lhs)), s->op,
                             read(frame, s->rhs));
        bool branch = taken && !options_.fork_all_branches ? *taken
                                                           : decide(2) == 1;
        if (branch) {
          jump = method.labels.at(s->target);
        }
      } else if (auto* s = statement.as<stmt::Switch>()) {
        jump = method.labels.at(select_case(frame, *s));
      } else if (auto* s = statement.as<stmt::Goto>()) {
        jump = method.labels.at(s->target);
      } else if (auto* s = statement.as<stmt::Return>()) {
        return s->value ? read(frame, Operand::of_local(*s->value)) : Value{};
      }
      pc = jump ? *jump : pc + 1;
    }
    return Value{};
  }

  const std::string& select_case(const Frame& frame, const stmt::Switch& s) {
    Value v = read(frame, Operand::of_local(s.operand));
    if (v.kind == Value::Kind::Int && !options_.fork_all_branches) {
      for (const auto& [value, label] : s.cases) {
        if (value == v.i) {
          return label;
        }
      }
      return s.default_target;
    }
    std::vector<const std::string*> targets;
    for (const auto& c : s.cases) {
      targets.push_back(&c.second);
    }
    targets.push_back(&s.default_target);
    return *targets[decide(static_cast<int>(targets.size()))];
  }

  /// Binds a null `local` to a fresh `class_name` when the options ask for it.
  Value deref(Frame& frame, const std::string& local,
              const std::string& class_name) {
    Value v = read(frame, Operand::of_local(local));
    if (v.kind == Value::Kind::Null && options_.materialize_nulls) {
      v = ref_to(allocate(class_name, false));
      frame[local] = v;
    }
    return v;
  }

  Value load_field(Frame& frame, const stmt::LoadField& s, StmtRef at) {
    Value base = deref(frame, s.base, s.field.class_name);
    Value out;
    if (base.kind == Value::Kind::Ref) {
      auto& obj = heap_[base.ref];
      auto it = obj.fields.find(s.field.key());
      if (it != obj.fields.end()) {
        out = it->second;
      } else if (!obj.app) {
        // Unset framework state: an unknown value of the declared type.
        const auto& type = s.field.declared_type;
        out = type.empty() || is_primitive(type)
            ? Value{Value::Kind::Opaque}
            : ref_to(allocate(type, type.ends_with("[]")));
        obj.fields[s.field.key()] = out;
      }
    } else {
      out.kind = Value::Kind::Opaque;
    }
    if (options_.deep_labels) {
      merge(out.labels, labels_of(base));
    }
    if (const auto* spec = config_.find_field_source(s.field)) {
      Label label{spec->id(), at};
      if (spec->array_valued() || s.field.declared_type.ends_with("[]")) {
        auto id = allocate(s.field.declared_type, true);
        Value element{Value::Kind::Opaque};
        element.labels.insert(label);
        heap_[id].element = element;
        out = ref_to(id);
      } else {
        out = Value{Value::Kind::Opaque};
      }
      out.labels.insert(label);
    }
    return out;
  }

  void store_field(Frame& frame, const stmt::StoreField& s) {
    Value base = deref(frame, s.base, s.field.class_name);
    if (base.kind != Value::Kind::Ref) {
      return;
    }
    Value src = read(frame, Operand::of_local(s.src));
    auto& slot = heap_[base.ref].fields[s.field.key()];
    if (options_.weak_fields) {
      merge(src.labels, slot.labels);
    }
    slot = std::move(src);
  }

  struct Targets {
    std::optional<MethodId> body; // the method the call itself runs
    std::vector<std::pair<MethodId, Value>> threads; // run() handed off
  };

  Targets app_targets(const stmt::Invoke& s,
                      const Value& receiver,
                      const Value& arg0) {
    Targets out;
    const auto& callee = s.callee;
    ResolvedMethod r;
    bool virtual_call =
        s.kind == InvokeKind::Virtual || s.kind == InvokeKind::Interface;
    if (virtual_call && receiver.kind == Value::Kind::Ref &&
        heap_[receiver.ref].app) {
      r = dispatch(program_, heap_[receiver.ref].class_name, callee.name,
                   callee.params);
    } else {
      r = resolve_method(program_, callee);
    }
    if (!r.external()) {
      out.body = r.method->id;
    }
    auto run_of = [&](const Value& v) -> std::optional<MethodId> {
      if (v.kind != Value::Kind::Ref || !heap_[v.ref].app) {
        return std::nullopt;
      }
      auto run = dispatch(program_, heap_[v.ref].class_name, "run", {});
      if (run.external()) {
        return std::nullopt;
      }
      return run.method->id;
    };
    if (s.receiver && callee.name == "start" && callee.params.empty()) {
      if (auto run = run_of(receiver)) {
        out.threads.emplace_back(*run, receiver);
      }
    }
    static const std::set<std::string> handoffs{
        "execute", "post", "postDelayed", "submit", "runOnUiThread"};
    if (!callee.params.empty() && callee.params[0] == "java.lang.Runnable" &&
        handoffs.count(callee.name)) {
      if (auto run = run_of(arg0)) {
        out.threads.emplace_back(*run, arg0);
      }
    }
    return out;
  }

  void invoke(Frame& frame, const stmt::Invoke& s, StmtRef at, int depth) {
    Value receiver;
    if (s.receiver) {
      receiver = s.kind == InvokeKind::Static
          ? read(frame, Operand::of_local(*s.receiver))
          : deref(frame, *s.receiver, s.callee.class_name);
    }
    std::vector<Value> args;
    for (const auto& a : s.args) {
      args.push_back(read(frame, a));
    }
    auto targets =
        app_targets(s, receiver, args.empty() ? Value{} : args.front());
    if (targets.body) {
      Value result = call(*targets.body, receiver, args, depth + 1);
      if (s.result) {
        frame[*s.result] = std::move(result);
      }
    } else {
      external(frame, s, at, receiver, args);
    }
    // The spawned thread runs to completion before the caller resumes.
    for (auto& [id, self] : targets.threads) {
      call(id, self, {}, depth + 1);
    }
  }

  void external(Frame& frame,
                const stmt::Invoke& s,
                StmtRef at,
                const Value& receiver,
                const std::vector<Value>& args) {
    auto value_at = [&](CallPosition p) -> const Value* {
      if (p.is_receiver()) {
        return s.receiver ? &receiver : nullptr;
      }
      if (p.value >= 0 && static_cast<std::size_t>(p.value) < args.size()) {
        return &args[p.value];
      }
      return nullptr;
    };
    if (const auto* sink = config_.find_sink(s.callee)) {
      for (const auto& p : sink->positions) {
        const auto* v = value_at(p);
        if (v == nullptr) {
          continue;
        }
        for (const auto& [source, origin] : labels_of(*v)) {
          leaks_.insert({source, origin, at, p});
        }
      }
    }

    Value result{Value::Kind::Opaque};
    if (const auto* summary = config_.find_summary(s.callee)) {
      for (const auto& [from, to] : summary->flows) {
        const auto* v = value_at(from);
        if (v == nullptr) {
          continue;
        }
        auto moved = labels_of(*v);
        if (to.is_return()) {
          merge(result.labels, moved);
          continue;
        }
        const std::optional<std::string>* name = nullptr;
        std::optional<std::string> arg_local;
        if (to.is_receiver()) {
          name = &s.receiver;
        } else if (to.value >= 0 &&
                   static_cast<std::size_t>(to.value) < s.args.size() &&
                   s.args[to.value].is_local()) {
          arg_local = s.args[to.value].local();
          name = &arg_local;
        }
        if (name == nullptr || !*name) {
          continue;
        }
        auto& target = frame[**name];
        if (target.kind == Value::Kind::Ref) {
          merge(heap_[target.ref].labels, moved);
        } else {
          merge(target.labels, moved);
        }
      }
    } else {
      if (s.receiver) {
        merge(result.labels, labels_of(receiver));
      }
      for (const auto& a : args) {
        merge(result.labels, labels_of(a));
      }
    }
    if (const auto* source = config_.find_method_source(s.callee)) {
      result.labels.insert({source->id(), at});
    }
    if (s.result) {
      frame[*s.result] = std::move(result);
    }
  }

  const IRProgram& program_;
  const SourceSinkConfig& config_;
  const InterpreterOptions& options_;
  const std::vector<int>& script_;
  std::vector<Object> heap_;
  std::map<std::string, std::size_t> singletons_;
  std::set<DynamicLeak> leaks_;
  std::vector<std::pair<int, int>> decisions_;
  std::size_t steps_ = 0;
};

} // namespace

InterpreterResult run_interpreter(const IRProgram& program,
                                  const SourceSinkConfig& config,
                                  const EntryPointModel& entry_model,
                                  const InterpreterOptions& options) {
  InterpreterResult result;
  auto roots = entry_model.resolve(program).methods;
  std::vector<int> script;
  while (true) {
    if (result.paths >= options.max_paths) {
      result.exhaustive = false;
      break;
    }
    Path path(program, config, options, script);
    try {
      path.run_roots(roots);
    } catch (const PathBudget&) {
      result.exhaustive = false;
    }
    ++result.paths;
    // Leaks seen before a budget cut are still real observations.
    result.leaks.insert(path.leaks().begin(), path.leaks().end());
    // Depth-first enumeration: bump the deepest decision with an untried
    // alternative and drop everything after it.
    const auto& taken = path.decisions();
    std::size_t j = taken.size();
    while (j > 0 && taken[j - 1].first + 1 >= taken[j - 1].second) {
      --j;
    }
    if (j == 0) {
      break;
    }
    script.clear();
    for (std::size_t k = 0; k + 1 < j; ++k) {
      script.push_back(taken[k].first);
    }
    script.push_back(taken[j - 1].first + 1);
  }
  return result;
}

} // namespace seeker::testing
