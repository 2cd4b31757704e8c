#include <seeker/ir.h>

#include <charconv>
#include <sstream>

namespace seeker {
namespace {

std::string print_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  std::string out(buffer, ec == std::errc() ? ptr : buffer);
  if (out.find_first_of(".eE") == std::string::npos) {
    out += ".0";
  }
  return out;
}

std::string quote(const std::string& value) {
  std::string out = "\"";
  for (char c : value) {
    switch (c) {
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '"':
        out += "\\\"";
        break;
      default:
        out += c;
    }
  }
  return out + "\"";
}

std::string print_operand(const Operand& op) {
  return op.is_local() ? op.local() : print_constant(op.constant());
}

} // namespace

std::string print_constant(const Constant& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NullLiteral>) {
          return "null";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return print_double(v);
        } else {
          return quote(v.value);
        }
      },
      c);
}

std::string print_statement(const IRStatement& statement) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, stmt::AssignConst>) {
          return s.dst + " = const " + print_constant(s.value);
        } else if constexpr (std::is_same_v<T, stmt::AssignLocal>) {
          return s.dst + " = " + s.src;
        } else if constexpr (std::is_same_v<T, stmt::LoadField>) {
          return s.dst + " = " + s.base + "." + s.field.key();
        } else if constexpr (std::is_same_v<T, stmt::StoreField>) {
          return s.base + "." + s.field.key() + " = " + s.src;
        } else if constexpr (std::is_same_v<T, stmt::LoadArray>) {
          return s.dst + " = " + s.base + "[*]";
        } else if constexpr (std::is_same_v<T, stmt::StoreArray>) {
          return s.base + "[*] = " + s.src;
        } else if constexpr (std::is_same_v<T, stmt::NewObject>) {
          return s.dst + " = new " + s.class_name;
        } else if constexpr (std::is_same_v<T, stmt::Invoke>) {
          std::string out;
          if (s.result) {
            out = *s.result + " = ";
          }
          out += "invoke ";
          out += to_string(s.kind);
          out += " " + s.callee.key();
          if (s.receiver) {
            out += " on " + *s.receiver;
          }
          out += " with (";
          for (std::size_t i = 0; i < s.args.size(); ++i) {
            if (i > 0) {
              out += ", ";
            }
            out += print_operand(s.args[i]);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, stmt::IfCmp>) {
          return "if " + s.lhs + " " + std::string(to_string(s.op)) + " " +
              print_operand(s.rhs) + " goto " + s.target;
        } else if constexpr (std::is_same_v<T, stmt::Switch>) {
          std::string out = "switch " + s.operand + " {";
          for (const auto& [value, label] : s.cases) {
            out += " " + std::to_string(value) + ":" + label;
          }
          return out + " default:" + s.default_target + " }";
        } else if constexpr (std::is_same_v<T, stmt::Goto>) {
          return "goto " + s.target;
        } else if constexpr (std::is_same_v<T, stmt::Return>) {
          return s.value ? "return " + *s.value : "return";
        } else if constexpr (std::is_same_v<T, stmt::Label>) {
          return "label " + s.name;
        } else {
          return "nop";
        }
      },
      statement.op);
}

std::string print_program(const IRProgram& program) {
  std::ostringstream out;
  for (const auto& hint : program.entry_hints()) {
    out << "entry " << hint.key() << "\n";
  }
  for (const auto& cls : program.classes()) {
    out << "class " << cls.name << " extends " << cls.superclass;
    if (!cls.interfaces.empty()) {
      out << " implements ";
      for (std::size_t i = 0; i < cls.interfaces.size(); ++i) {
        out << (i > 0 ? "," : "") << cls.interfaces[i];
      }
    }
    out << " {\n";
    for (const auto& f : cls.fields) {
      out << "  field " << f.type << " " << f.name << "\n";
    }
    for (const auto& m : cls.methods) {
      out << "  method " << m.sig.return_type << " " << m.sig.name << "(";
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        out << (i > 0 ? ", " : "") << m.params[i].type << " "
            << m.params[i].name;
      }
      out << ") {\n";
      for (const auto& l : m.locals) {
        out << "    local " << l.type << " " << l.name << "\n";
      }
      for (const auto& s : m.body) {
        out << "    " << print_statement(s) << "\n";
      }
      out << "  }\n";
    }
    out << "}\n";
  }
  return out.str();
}

} // namespace seeker
