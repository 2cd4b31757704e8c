#include <seeker/sensor_inference.h>

#include <algorithm>
#include <set>

namespace seeker {

namespace {

constexpr std::string_view kSensorManager = "android.hardware.SensorManager";
constexpr std::string_view kSensor = "android.hardware.Sensor";
constexpr std::string_view kSensorEvent = "android.hardware.SensorEvent";

std::optional<RegistrationApi> registration_api(const MethodSig& callee) {
  if (callee.class_name != kSensorManager || callee.params.empty() ||
      callee.params[0] != "int") {
    return std::nullopt;
  }
  if (callee.name == "getDefaultSensor") {
    return RegistrationApi::GetDefaultSensor;
  }
  if (callee.name == "getSensorList") {
    return RegistrationApi::GetSensorList;
  }
  return std::nullopt;
}

std::optional<std::int64_t> operand_constant(const Operand& operand,
                                             const ConstantState* state) {
  if (!operand.is_local()) {
    return as_int(operand.constant());
  }
  if (state == nullptr) {
    return std::nullopt;
  }
  auto it = state->find(operand.local());
  return it == state->end() ? std::nullopt : it->second;
}

/// Sensor name for a constant, excluding the wildcard and unlisted values.
const SensorType* concrete(const SensorTypeTable& table, std::int64_t c) {
  const auto* t = table.by_constant(c);
  return t != nullptr && !t->wildcard() ? t : nullptr;
}

std::vector<const SensorRegistration*> class_registrations(
    const LeakFlow& leak,
    const IRProgram& program,
    const std::vector<SensorRegistration>& registrations) {
  const auto& owner = program.owner(leak.origin.method).name;
  std::vector<const SensorRegistration*> out;
  for (const auto& r : registrations) {
    if (r.owner_class == owner) {
      out.push_back(&r);
    }
  }
  return out;
}

// Bits of the may-analysis that follows `event.sensor.getType()`.
enum : unsigned { kEvent = 1, kEventSensor = 2, kTypeValue = 4 };
using TagState = std::map<std::string, unsigned>;

std::vector<std::optional<TagState>> propagate_tags(const IRMethod& method,
                                                    const Cfg& cfg) {
  TagState entry;
  for (const auto& p : method.params) {
    if (p.type == kSensorEvent) {
      entry[p.name] = kEvent;
    }
  }
  auto tags_of = [](const TagState& s, const std::string& local) {
    auto it = s.find(local);
    return it == s.end() ? 0U : it->second;
  };
  auto transfer = [&](std::size_t node, const TagState& in) {
    TagState out = in;
    const auto& st = method.body[node];
    auto defined = st.defined_local();
    if (!defined) {
      return out;
    }
    unsigned tags = 0;
    if (const auto* s = st.as<stmt::AssignLocal>()) {
      tags = tags_of(in, s->src);
    } else if (const auto* s = st.as<stmt::LoadField>()) {
      if (s->field.class_name == kSensorEvent &&
          s->field.field_name == "sensor" && (tags_of(in, s->base) & kEvent)) {
        tags = kEventSensor;
      }
    } else if (const auto* s = st.as<stmt::Invoke>()) {
      if (s->callee.class_name == kSensor && s->callee.name == "getType" &&
          s->callee.params.empty() && s->receiver &&
          (tags_of(in, *s->receiver) & kEventSensor)) {
        tags = kTypeValue;
      }
    }
    if (tags != 0) {
      out[*defined] = tags;
    } else {
      out.erase(*defined);
    }
    return out;
  };
  auto join = [](TagState& into, const TagState& from) {
    bool changed = false;
    for (const auto& [local, tags] : from) {
      auto& mine = into[local];
      if ((mine | tags) != mine) {
        mine |= tags;
        changed = true;
      }
    }
    return changed;
  };
  return forward_dataflow<TagState>(cfg, entry, transfer, join);
}

} // namespace

std::string_view to_string(RegistrationApi api) {
  return api == RegistrationApi::GetDefaultSensor ? "getDefaultSensor"
                                                  : "getSensorList";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Inferred:
      return "inferred";
    case Verdict::Ambiguous:
      return "ambiguous";
    case Verdict::Unknown:
      return "unknown";
  }
  return "?";
}

std::string_view to_string(Evidence evidence) {
  switch (evidence) {
    case Evidence::SingleSensorRule:
      return "single-sensor-rule";
    case Evidence::BranchGuard:
      return "branch-guard";
    case Evidence::TypeConstantArgument:
      return "type-constant-argument";
    case Evidence::None:
      return "none";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (auto v : {Verdict::Inferred, Verdict::Ambiguous, Verdict::Unknown}) {
    if (to_string(v) == text) {
      return v;
    }
  }
  return std::nullopt;
}

std::optional<Evidence> parse_evidence(std::string_view text) {
  for (auto e : {Evidence::SingleSensorRule, Evidence::BranchGuard,
                 Evidence::TypeConstantArgument, Evidence::None}) {
    if (to_string(e) == text) {
      return e;
    }
  }
  return std::nullopt;
}

SensorAttribution SensorAttribution::inferred(std::string name,
                                              Evidence evidence) {
  return {Verdict::Inferred, {std::move(name)}, evidence, false};
}

SensorAttribution SensorAttribution::unknown() {
  return {Verdict::Unknown, {}, Evidence::None, false};
}

std::string SensorAttribution::sensor() const {
  return verdict == Verdict::Inferred ? candidates.front() : std::string();
}

std::vector<std::optional<ConstantState>> propagate_constants(
    const IRMethod& method, const Cfg& cfg) {
  ConstantState entry;
  entry[std::string(IRMethod::kThis)] = std::nullopt;
  for (const auto& p : method.params) {
    entry[p.name] = std::nullopt;
  }
  auto transfer = [&](std::size_t node, const ConstantState& in) {
    ConstantState out = in;
    const auto& st = method.body[node];
    auto defined = st.defined_local();
    if (!defined) {
      return out;
    }
    std::optional<std::int64_t> value;
    if (const auto* s = st.as<stmt::AssignConst>()) {
      value = as_int(s->value);
    } else if (const auto* s = st.as<stmt::AssignLocal>()) {
      auto it = in.find(s->src);
      value = it == in.end() ? std::nullopt : it->second;
    }
    out[*defined] = value;
    return out;
  };
  // Missing keys are unassigned so far; differing values become unknown.
  auto join = [](ConstantState& into, const ConstantState& from) {
    bool changed = false;
    for (const auto& [local, value] : from) {
      auto it = into.find(local);
      if (it == into.end()) {
        into.emplace(local, value);
        changed = true;
      } else if (it->second && it->second != value) {
        it->second = std::nullopt;
        changed = true;
      }
    }
    return changed;
  };
  return forward_dataflow<ConstantState>(cfg, entry, transfer, join);
}

std::vector<SensorRegistration> collect_registrations(
    const IRProgram& program, const std::vector<Cfg>& cfgs) {
  std::vector<SensorRegistration> out;
  for (MethodId m = 0; m < program.method_count(); ++m) {
    const auto& method = program.method(m);
    std::optional<std::vector<std::optional<ConstantState>>> constants;
    for (std::uint32_t n = 0; n < method.body.size(); ++n) {
      const auto* call = method.body[n].as<stmt::Invoke>();
      if (call == nullptr || call->args.empty()) {
        continue;
      }
      auto api = registration_api(call->callee);
      if (!api) {
        continue;
      }
      if (!constants) {
        constants = propagate_constants(method, cfgs.at(m));
      }
      const auto& state = (*constants)[n];
      out.push_back({program.owner(m).name, {m, n},
                     operand_constant(call->args[0], state ? &*state : nullptr),
                     *api});
    }
  }
  return out;
}

std::optional<SensorAttribution> infer_single(
    const LeakFlow& leak,
    const IRProgram& program,
    const std::vector<SensorRegistration>& registrations,
    const SensorTypeTable& table) {
  std::set<std::string> names;
  for (const auto* r : class_registrations(leak, program, registrations)) {
    if (!r->type_constant) {
      return std::nullopt;
    }
    if (const auto* t = concrete(table, *r->type_constant)) {
      names.insert(t->name);
    }
  }
  if (names.size() != 1) {
    return std::nullopt;
  }
  return SensorAttribution::inferred(*names.begin(),
                                     Evidence::SingleSensorRule);
}

SensorAttribution infer_branch(
    const LeakFlow& leak,
    const IRProgram& program,
    const Cfg& cfg,
    const std::vector<SensorRegistration>& registrations,
    const SensorTypeTable& table) {
  const auto& method = program.method(leak.origin.method);
  auto guards = dominating_guards(cfg, leak.origin.index);
  if (!guards.empty()) {
    auto tags = propagate_tags(method, cfg);
    auto constants = propagate_constants(method, cfg);
    auto is_type_value = [&](std::size_t node, const std::string& local) {
      if (!tags[node]) {
        return false;
      }
      auto it = tags[node]->find(local);
      return it != tags[node]->end() && (it->second & kTypeValue);
    };
    for (auto g = guards.rbegin(); g != guards.rend(); ++g) {
      const auto& st = method.body[g->node];
      const auto* state = constants[g->node] ? &*constants[g->node] : nullptr;
      std::optional<std::int64_t> value;
      if (const auto* sw = st.as<stmt::Switch>()) {
        if (g->edge.kind == EdgeKind::Case &&
            is_type_value(g->node, sw->operand)) {
          value = g->edge.case_value;
        }
      } else if (const auto* br = st.as<stmt::IfCmp>()) {
        bool positive =
            (br->op == RelOp::Eq && g->edge.kind == EdgeKind::Branch) ||
            (br->op == RelOp::Ne && g->edge.kind == EdgeKind::Fallthrough);
        if (positive) {
          if (is_type_value(g->node, br->lhs)) {
            value = operand_constant(br->rhs, state);
          } else if (br->rhs.is_local() &&
                     is_type_value(g->node, br->rhs.local())) {
            value = operand_constant(Operand::of_local(br->lhs), state);
          }
        }
      }
      if (value) {
        if (const auto* t = concrete(table, *value)) {
          return SensorAttribution::inferred(t->name, Evidence::BranchGuard);
        }
      }
    }
  }
  std::set<std::string> names;
  for (const auto* r : class_registrations(leak, program, registrations)) {
    if (r->type_constant) {
      if (const auto* t = concrete(table, *r->type_constant)) {
        names.insert(t->name);
      }
    }
  }
  if (names.empty()) {
    return SensorAttribution::unknown();
  }
  return {Verdict::Ambiguous, {names.begin(), names.end()}, Evidence::None,
          false};
}

std::vector<SensorAttribution> attribute_all(const std::vector<LeakFlow>& flows,
                                             const IRProgram& program,
                                             const std::vector<Cfg>& cfgs,
                                             const SensorTypeTable& table) {
  auto registrations = collect_registrations(program, cfgs);
  std::vector<SensorAttribution> out;
  out.reserve(flows.size());
  for (const auto& flow : flows) {
    if (flow.source_kind == SourceKind::Field) {
      auto branch = infer_branch(flow, program, cfgs.at(flow.origin.method),
                                 registrations, table);
      auto single = infer_single(flow, program, registrations, table);
      if (branch.verdict == Verdict::Inferred) {
        branch.conflict = single && single->sensor() != branch.sensor();
        out.push_back(std::move(branch));
      } else if (single) {
        out.push_back(std::move(*single));
      } else {
        out.push_back(std::move(branch));
      }
      continue;
    }
    // Method sources resolve only through an explicit type argument.
    const auto& method = program.method(flow.origin.method);
    const auto* call = method.body.at(flow.origin.index).as<stmt::Invoke>();
    std::optional<std::int64_t> constant;
    if (call != nullptr) {
      for (std::size_t i = 0; i < call->callee.params.size() &&
           i < call->args.size(); ++i) {
        if (call->callee.params[i] != "int") {
          continue;
        }
        auto states = propagate_constants(method, cfgs.at(flow.origin.method));
        const auto& state = states[flow.origin.index];
        constant = operand_constant(call->args[i], state ? &*state : nullptr);
        break;
      }
    }
    const SensorType* type = constant ? concrete(table, *constant) : nullptr;
    out.push_back(type ? SensorAttribution::inferred(
                             type->name, Evidence::TypeConstantArgument)
                       : SensorAttribution::unknown());
  }
  return out;
}

} // namespace seeker
