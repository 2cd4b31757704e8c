#include <seeker/ir.h>

#include "lexical.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace seeker {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(
          std::to_string(line) + ":" + std::to_string(column) + ": " +
          message),
      line_(line),
      column_(column),
      message_(message) {}

using lexical::is_member_name;
using lexical::is_name_char;
using lexical::is_qualified_name;
using lexical::is_type_name;

std::optional<FieldRef> FieldRef::parse(std::string_view text) {
  auto hash = text.find('#');
  if (hash == std::string_view::npos) {
    return std::nullopt;
  }
  auto cls = text.substr(0, hash);
  auto field = text.substr(hash + 1);
  if (!is_qualified_name(cls) || field.empty() ||
      !std::all_of(field.begin(), field.end(), is_name_char)) {
    return std::nullopt;
  }
  return FieldRef{std::string(cls), std::string(field), ""};
}

std::string MethodSig::subsignature() const {
  std::string out = name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) {
      out += ",";
    }
    out += params[i];
  }
  return out + ")";
}

std::string MethodSig::key() const {
  return class_name + "#" + subsignature();
}

std::optional<MethodSig> MethodSig::parse(std::string_view text) {
  auto hash = text.find('#');
  auto open = text.find('(');
  if (hash == std::string_view::npos || open == std::string_view::npos ||
      open < hash || text.back() != ')') {
    return std::nullopt;
  }
  MethodSig sig;
  auto cls = text.substr(0, hash);
  auto name = text.substr(hash + 1, open - hash - 1);
  if (!is_qualified_name(cls) || !is_member_name(name)) {
    return std::nullopt;
  }
  sig.class_name = std::string(cls);
  sig.name = std::string(name);
  auto params = text.substr(open + 1, text.size() - open - 2);
  while (!params.empty()) {
    auto comma = params.find(',');
    auto param = params.substr(0, comma);
    param = lexical::trim(param);
    if (!is_type_name(param)) {
      return std::nullopt;
    }
    sig.params.emplace_back(param);
    if (comma == std::string_view::npos) {
      break;
    }
    params.remove_prefix(comma + 1);
    if (params.empty()) {
      return std::nullopt;
    }
  }
  return sig;
}

std::optional<std::int64_t> as_int(const Constant& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) {
    return *i;
  }
  return std::nullopt;
}

std::string_view to_string(InvokeKind kind) {
  switch (kind) {
    case InvokeKind::Static:
      return "static";
    case InvokeKind::Virtual:
      return "virtual";
    case InvokeKind::Interface:
      return "interface";
    case InvokeKind::Special:
      return "special";
  }
  return "?";
}

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::Eq:
      return "==";
    case RelOp::Ne:
      return "!=";
    case RelOp::Lt:
      return "<";
    case RelOp::Le:
      return "<=";
    case RelOp::Gt:
      return ">";
    case RelOp::Ge:
      return ">=";
  }
  return "?";
}

std::optional<std::string> IRStatement::defined_local() const {
  return std::visit(
      [](const auto& s) -> std::optional<std::string> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (
            std::is_same_v<T, stmt::AssignConst> ||
            std::is_same_v<T, stmt::AssignLocal> ||
            std::is_same_v<T, stmt::LoadField> ||
            std::is_same_v<T, stmt::LoadArray> ||
            std::is_same_v<T, stmt::NewObject>) {
          return s.dst;
        } else if constexpr (std::is_same_v<T, stmt::Invoke>) {
          return s.result;
        } else {
          return std::nullopt;
        }
      },
      op);
}

std::optional<std::size_t> IRMethod::param_index(std::string_view name) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == name) {
      return i;
    }
  }
  return std::nullopt;
}

const IRMethod* IRClass::find_method(
    std::string_view method_name,
    const std::vector<std::string>& params) const {
  for (const auto& m : methods) {
    if (m.sig.name == method_name && m.sig.params == params) {
      return &m;
    }
  }
  return nullptr;
}

const TypedName* IRClass::find_field(std::string_view field_name) const {
  for (const auto& f : fields) {
    if (f.name == field_name) {
      return &f;
    }
  }
  return nullptr;
}

bool IRClass::implements(std::string_view interface_name) const {
  return std::find(interfaces.begin(), interfaces.end(), interface_name) !=
      interfaces.end();
}

IRProgram::IRProgram(std::vector<IRClass> classes,
                     std::vector<MethodSig> entry_hints)
    : classes_(std::move(classes)), entry_hints_(std::move(entry_hints)) {
  link();
}

IRProgram::IRProgram(const IRProgram& other)
    : classes_(other.classes_), entry_hints_(other.entry_hints_) {
  link();
}

IRProgram& IRProgram::operator=(const IRProgram& other) {
  if (this != &other) {
    classes_ = other.classes_;
    entry_hints_ = other.entry_hints_;
    link();
  }
  return *this;
}

void IRProgram::link() {
  class_index_.clear();
  methods_.clear();
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    class_index_.emplace(classes_[i].name, i);
  }
  for (auto& cls : classes_) {
    for (auto& m : cls.methods) {
      m.id = static_cast<MethodId>(methods_.size());
      m.sig.class_name = cls.name;
      methods_.emplace_back(&cls, &m);
    }
  }
  std::set<std::string> externals;
  for (const auto& [cls, m] : methods_) {
    for (const auto& s : m->body) {
      if (const auto* call = s.as<stmt::Invoke>()) {
        if (resolve_method(*this, call->callee).external()) {
          externals.insert(call->callee.key());
        }
      }
    }
  }
  externals_.assign(externals.begin(), externals.end());
}

const IRClass* IRProgram::find_class(std::string_view name) const {
  auto it = class_index_.find(std::string(name));
  return it == class_index_.end() ? nullptr : &classes_[it->second];
}

bool IRProgram::is_subtype(std::string_view name,
                           std::string_view ancestor) const {
  if (name == ancestor || ancestor == "java.lang.Object") {
    return true;
  }
  std::vector<std::string> stack{std::string(name)};
  std::unordered_set<std::string> seen;
  while (!stack.empty()) {
    auto current = std::move(stack.back());
    stack.pop_back();
    if (current == ancestor) {
      return true;
    }
    if (!seen.insert(current).second) {
      continue;
    }
    if (const auto* cls = find_class(current)) {
      stack.push_back(cls->superclass);
      for (const auto& i : cls->interfaces) {
        stack.push_back(i);
      }
    }
  }
  return false;
}

ResolvedMethod dispatch(const IRProgram& program,
                        std::string_view class_name,
                        std::string_view name,
                        const std::vector<std::string>& params) {
  std::unordered_set<std::string> seen;
  std::string current(class_name);
  while (seen.insert(current).second) {
    const auto* cls = program.find_class(current);
    if (cls == nullptr) {
      break;
    }
    if (const auto* m = cls->find_method(name, params)) {
      return {cls, m};
    }
    current = cls->superclass;
  }
  return {};
}

ResolvedMethod resolve_method(const IRProgram& program, const MethodSig& sig) {
  return dispatch(program, sig.class_name, sig.name, sig.params);
}

} // namespace seeker
