#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace seeker {

/// Thrown by the IR parser. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// A field reference in the textual form `Class#field`. The declared type is
/// informational; identity is (class_name, field_name).
struct FieldRef {
  std::string class_name;
  std::string field_name;
  std::string declared_type;

  std::string key() const { return class_name + "#" + field_name; }
  static std::optional<FieldRef> parse(std::string_view text);

  bool operator==(const FieldRef& other) const {
    return class_name == other.class_name && field_name == other.field_name;
  }
  std::strong_ordering operator<=>(const FieldRef& other) const {
    if (auto c = class_name <=> other.class_name; c != 0) {
      return c;
    }
    return field_name <=> other.field_name;
  }
};

/// `Class#name(t1,t2)`; the return type is optional and not part of identity.
struct MethodSig {
  std::string class_name;
  std::string name;
  std::vector<std::string> params;
  std::string return_type;

  /// `Class#name(t1,t2)`
  std::string key() const;
  /// `name(t1,t2)`
  std::string subsignature() const;
  static std::optional<MethodSig> parse(std::string_view text);

  bool same_subsignature(const MethodSig& other) const {
    return name == other.name && params == other.params;
  }
  bool operator==(const MethodSig& other) const {
    return class_name == other.class_name && name == other.name &&
        params == other.params;
  }
};

struct NullLiteral {
  bool operator==(const NullLiteral&) const = default;
};
struct StringLiteral {
  std::string value;
  bool operator==(const StringLiteral&) const = default;
};
using Constant = std::variant<NullLiteral, std::int64_t, double, StringLiteral>;

std::optional<std::int64_t> as_int(const Constant& c);

/// A statement operand: a local variable name or a literal.
struct Operand {
  std::variant<std::string, Constant> value;

  bool is_local() const { return value.index() == 0; }
  const std::string& local() const { return std::get<0>(value); }
  const Constant& constant() const { return std::get<1>(value); }

  static Operand of_local(std::string name) { return Operand{std::move(name)}; }
  static Operand of_constant(Constant c) { return Operand{std::move(c)}; }
  bool operator==(const Operand&) const = default;
};

enum class InvokeKind { Static, Virtual, Interface, Special };
enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(InvokeKind kind);
std::string_view to_string(RelOp op);

namespace stmt {

struct AssignConst {
  std::string dst;
  Constant value;
  bool operator==(const AssignConst&) const = default;
};
struct AssignLocal {
  std::string dst;
  std::string src;
  bool operator==(const AssignLocal&) const = default;
};
struct LoadField {
  std::string dst;
  std::string base;
  FieldRef field;
  bool operator==(const LoadField&) const = default;
};
struct StoreField {
  std::string base;
  FieldRef field;
  std::string src;
  bool operator==(const StoreField&) const = default;
};
/// Arrays are whole-array granular: no index is carried.
struct LoadArray {
  std::string dst;
  std::string base;
  bool operator==(const LoadArray&) const = default;
};
struct StoreArray {
  std::string base;
  std::string src;
  bool operator==(const StoreArray&) const = default;
};
struct NewObject {
  std::string dst;
  std::string class_name;
  bool operator==(const NewObject&) const = default;
};
struct Invoke {
  std::optional<std::string> result;
  InvokeKind kind = InvokeKind::Static;
  MethodSig callee;
  std::optional<std::string> receiver;
  std::vector<Operand> args;
  bool operator==(const Invoke&) const = default;
};
struct IfCmp {
  std::string lhs;
  RelOp op = RelOp::Eq;
  Operand rhs;
  std::string target;
  bool operator==(const IfCmp&) const = default;
};
struct Switch {
  std::string operand;
  std::vector<std::pair<std::int64_t, std::string>> cases;
  std::string default_target;
  bool operator==(const Switch&) const = default;
};
struct Goto {
  std::string target;
  bool operator==(const Goto&) const = default;
};
struct Return {
  std::optional<std::string> value;
  bool operator==(const Return&) const = default;
};
struct Label {
  std::string name;
  bool operator==(const Label&) const = default;
};
struct Nop {
  bool operator==(const Nop&) const = default;
};

} // namespace stmt

using StatementOp = std::variant<
    stmt::AssignConst,
    stmt::AssignLocal,
    stmt::LoadField,
    stmt::StoreField,
    stmt::LoadArray,
    stmt::StoreArray,
    stmt::NewObject,
    stmt::Invoke,
    stmt::IfCmp,
    stmt::Switch,
    stmt::Goto,
    stmt::Return,
    stmt::Label,
    stmt::Nop>;

struct IRStatement {
  StatementOp op;
  int source_line = 0; // 0 when synthesized

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&op);
  }
  /// The local this statement strongly defines, if any.
  std::optional<std::string> defined_local() const;

  bool operator==(const IRStatement& other) const { return op == other.op; }
};

struct TypedName {
  std::string type;
  std::string name;
  bool operator==(const TypedName&) const = default;
};

using MethodId = std::uint32_t;

struct IRMethod {
  MethodSig sig;
  /// Parameter locals; unnamed parameters are called p0, p1, ...
  std::vector<TypedName> params;
  std::vector<TypedName> locals;
  std::vector<IRStatement> body;
  std::map<std::string, std::size_t> labels;
  MethodId id = 0;

  static constexpr std::string_view kThis = "this";

  /// Index of `name` among the parameters, or nullopt.
  std::optional<std::size_t> param_index(std::string_view name) const;

  bool operator==(const IRMethod& other) const {
    return sig == other.sig && sig.return_type == other.sig.return_type &&
        params == other.params && locals == other.locals &&
        body == other.body && labels == other.labels;
  }
};

struct IRClass {
  std::string name;
  std::string superclass;
  std::vector<std::string> interfaces;
  std::vector<TypedName> fields;
  std::vector<IRMethod> methods;

  const IRMethod* find_method(std::string_view name,
                              const std::vector<std::string>& params) const;
  const TypedName* find_field(std::string_view name) const;
  bool implements(std::string_view interface_name) const;

  bool operator==(const IRClass&) const = default;
};

/// Reference to one statement of one method.
struct StmtRef {
  MethodId method = 0;
  std::uint32_t index = 0;
  auto operator<=>(const StmtRef&) const = default;
};

/// Result of method resolution: either a parsed method or the external
/// (framework) marker.
struct ResolvedMethod {
  const IRClass* owner = nullptr;
  const IRMethod* method = nullptr;
  bool external() const { return method == nullptr; }
};

/// A parsed, linked application. Immutable after construction.
class IRProgram {
 public:
  IRProgram() = default;
  IRProgram(std::vector<IRClass> classes, std::vector<MethodSig> entry_hints);

  IRProgram(const IRProgram& other);
  IRProgram& operator=(const IRProgram& other);
  IRProgram(IRProgram&&) noexcept = default;
  IRProgram& operator=(IRProgram&&) noexcept = default;

  const std::vector<IRClass>& classes() const { return classes_; }
  const std::vector<MethodSig>& entry_hints() const { return entry_hints_; }

  const IRClass* find_class(std::string_view name) const;

  std::size_t method_count() const { return methods_.size(); }
  const IRMethod& method(MethodId id) const { return *methods_.at(id).second; }
  const IRClass& owner(MethodId id) const { return *methods_.at(id).first; }

  /// Sorted keys of invoked methods that resolve to no parsed body.
  const std::vector<std::string>& external_methods() const {
    return externals_;
  }

  /// True when `name` equals `ancestor` or reaches it through superclasses or
  /// interfaces declared in the program. Everything is a java.lang.Object.
  bool is_subtype(std::string_view name, std::string_view ancestor) const;

  bool operator==(const IRProgram& other) const {
    return classes_ == other.classes_ && entry_hints_ == other.entry_hints_;
  }

 private:
  void link();

  std::vector<IRClass> classes_;
  std::vector<MethodSig> entry_hints_;
  std::unordered_map<std::string, std::size_t> class_index_;
  std::vector<std::pair<const IRClass*, const IRMethod*>> methods_;
  std::vector<std::string> externals_;
};

/// Parses the textual IR. Throws ParseError on malformed input.
IRProgram parse_program(std::string_view text);

/// Canonical textual form; `parse_program(print_program(p)) == p`.
std::string print_program(const IRProgram& program);
std::string print_statement(const IRStatement& statement);
std::string print_constant(const Constant& c);

/// Exact lookup on the named class, then a walk up its superclasses.
ResolvedMethod resolve_method(const IRProgram& program, const MethodSig& sig);

/// Dispatch of `sig`'s subsignature starting at `class_name`.
ResolvedMethod dispatch(const IRProgram& program,
                        std::string_view class_name,
                        std::string_view name,
                        const std::vector<std::string>& params);

} // namespace seeker
