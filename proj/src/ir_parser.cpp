#include <seeker/ir.h>

#include <charconv>
#include <set>

#include "lexical.h"

namespace seeker {
namespace {

const std::set<std::string_view, std::less<>> kKeywords = {
    "class", "extends", "implements", "field", "method", "local", "entry",
    "const", "new", "invoke", "on", "with", "if", "goto", "switch",
    "default", "return", "label", "nop"};

/// Cursor over one source line. Columns reported 1-based.
class LineScanner {
 public:
  LineScanner(std::string_view line, int line_no)
      : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_no_, static_cast<int>(pos_) + 1, message);
  }

  void skip_space() {
    while (pos_ < line_.size() && lexical::is_space(line_[pos_])) {
      ++pos_;
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= line_.size();
  }

  void expect_end() {
    if (!at_end()) {
      fail("unexpected trailing text '" + std::string(line_.substr(pos_)) +
           "'");
    }
  }

  bool peek(char c) {
    skip_space();
    return pos_ < line_.size() && line_[pos_] == c;
  }

  bool peek_word(std::string_view word) {
    skip_space();
    if (line_.substr(pos_, word.size()) != word) {
      return false;
    }
    auto after = pos_ + word.size();
    return after >= line_.size() || !lexical::is_member_char(line_[after]);
  }

  bool consume(std::string_view token) {
    skip_space();
    if (line_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  bool consume_word(std::string_view word) {
    if (peek_word(word)) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!consume(token)) {
      fail("expected '" + std::string(token) + "'");
    }
  }

  void expect_word(std::string_view word) {
    if (!consume_word(word)) {
      fail("expected '" + std::string(word) + "'");
    }
  }

  template <typename Pred>
  std::string_view read_while(Pred pred) {
    skip_space();
    auto start = pos_;
    while (pos_ < line_.size() && pred(line_[pos_])) {
      ++pos_;
    }
    return line_.substr(start, pos_ - start);
  }

  std::string read_local() {
    skip_space();
    auto start = pos_;
    auto name = read_while(lexical::is_name_char);
    if (name.empty() ||
        std::isdigit(static_cast<unsigned char>(name.front()))) {
      pos_ = start;
      fail("expected local name");
    }
    if (kKeywords.count(name) != 0) {
      pos_ = start;
      fail("keyword '" + std::string(name) + "' used as a name");
    }
    return std::string(name);
  }

  std::string read_label() {
    skip_space();
    auto start = pos_;
    auto name = read_while(lexical::is_name_char);
    if (name.empty()) {
      pos_ = start;
      fail("expected label");
    }
    return std::string(name);
  }

  std::string read_qualified() {
    skip_space();
    auto start = pos_;
    auto name = read_while(lexical::is_qualified_char);
    if (!lexical::is_qualified_name(name)) {
      pos_ = start;
      fail("expected qualified name");
    }
    return std::string(name);
  }

  std::string read_type() {
    skip_space();
    auto start = pos_;
    std::string type = read_qualified();
    while (consume("[]")) {
      type += "[]";
    }
    if (!lexical::is_type_name(type)) {
      pos_ = start;
      fail("expected type");
    }
    return type;
  }

  std::string read_member() {
    skip_space();
    auto start = pos_;
    auto name = read_while(lexical::is_member_char);
    if (!lexical::is_member_name(name)) {
      pos_ = start;
      fail("expected member name");
    }
    return std::string(name);
  }

  FieldRef read_field_ref() {
    FieldRef ref;
    ref.class_name = read_qualified();
    if (pos_ >= line_.size() || line_[pos_] != '#') {
      fail("expected '#' in field reference");
    }
    ++pos_;
    auto start = pos_;
    auto name = line_.substr(pos_);
    std::size_t n = 0;
    while (n < name.size() && lexical::is_name_char(name[n])) {
      ++n;
    }
    if (n == 0) {
      fail("expected field name");
    }
    ref.field_name = std::string(line_.substr(start, n));
    pos_ += n;
    return ref;
  }

  MethodSig read_method_sig() {
    MethodSig sig;
    sig.class_name = read_qualified();
    if (pos_ >= line_.size() || line_[pos_] != '#') {
      fail("expected '#' in method signature");
    }
    ++pos_;
    if (pos_ >= line_.size() || !lexical::is_member_char(line_[pos_])) {
      fail("expected method name");
    }
    sig.name = read_member();
    expect("(");
    if (!consume(")")) {
      do {
        sig.params.push_back(read_type());
      } while (consume(","));
      expect(")");
    }
    return sig;
  }

  std::int64_t read_int() {
    skip_space();
    auto start = pos_;
    if (pos_ < line_.size() && line_[pos_] == '-') {
      ++pos_;
    }
    while (pos_ < line_.size() &&
           std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
      ++pos_;
    }
    std::int64_t value = 0;
    auto text = line_.substr(start, pos_ - start);
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      pos_ = start;
      fail("expected integer");
    }
    return value;
  }

  Constant read_constant() {
    skip_space();
    if (consume_word("null")) {
      return NullLiteral{};
    }
    if (peek('"')) {
      return read_string();
    }
    auto start = pos_;
    if (pos_ < line_.size() && line_[pos_] == '-') {
      ++pos_;
    }
    bool is_float = false;
    while (pos_ < line_.size()) {
      char c = line_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        ++pos_;
      } else if ((c == '+' || c == '-') && pos_ > start &&
                 (line_[pos_ - 1] == 'e' || line_[pos_ - 1] == 'E')) {
        ++pos_;
      } else {
        break;
      }
    }
    auto text = line_.substr(start, pos_ - start);
    if (text.empty() || text == "-") {
      pos_ = start;
      fail("expected literal");
    }
    if (is_float) {
      double value = 0;
      auto [ptr, ec] =
          std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        pos_ = start;
        fail("malformed float literal");
      }
      return value;
    }
    std::int64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      pos_ = start;
      fail("malformed integer literal");
    }
    return value;
  }

  StringLiteral read_string() {
    expect("\"");
    std::string value;
    while (true) {
      if (pos_ >= line_.size()) {
        fail("unterminated string literal");
      }
      char c = line_[pos_++];
      if (c == '"') {
        break;
      }
      if (c == '\\') {
        if (pos_ >= line_.size()) {
          fail("unterminated escape");
        }
        char e = line_[pos_++];
        switch (e) {
          case 'n':
            value += '\n';
            break;
          case 't':
            value += '\t';
            break;
          case '\\':
            value += '\\';
            break;
          case '"':
            value += '"';
            break;
          default:
            --pos_;
            fail("unknown escape");
        }
      } else {
        value += c;
      }
    }
    return StringLiteral{std::move(value)};
  }

  Operand read_operand() {
    skip_space();
    if (pos_ < line_.size()) {
      char c = line_[pos_];
      if (c == '"' || c == '-' ||
          std::isdigit(static_cast<unsigned char>(c)) || peek_word("null")) {
        return Operand::of_constant(read_constant());
      }
    }
    return Operand::of_local(read_local());
  }

 private:
  std::string_view line_;
  int line_no_;
  std::size_t pos_ = 0;
};

/// Strips a `#` comment: one at line start or preceded by whitespace, outside
/// a string literal. `Class#field` stays intact.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#' && (i == 0 || lexical::is_space(line[i - 1]))) {
      return line.substr(0, i);
    }
  }
  return line;
}

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view text) : text_(text) {}

  IRProgram parse() {
    std::size_t start = 0;
    int line_no = 0;
    while (start <= text_.size()) {
      auto end = text_.find('\n', start);
      if (end == std::string_view::npos) {
        end = text_.size();
      }
      ++line_no;
      auto line = strip_comment(text_.substr(start, end - start));
      if (!lexical::trim(line).empty()) {
        parse_line(line, line_no);
      }
      last_line_ = line_no;
      start = end + 1;
    }
    if (method_) {
      throw ParseError(last_line_, 1, "unterminated method");
    }
    if (class_) {
      throw ParseError(last_line_, 1, "unterminated class");
    }
    return IRProgram(std::move(classes_), std::move(entry_hints_));
  }

 private:
  void parse_line(std::string_view line, int line_no) {
    LineScanner in(line, line_no);
    if (in.peek('}')) {
      while (in.consume("}")) {
        close_block(in);
      }
      in.expect_end();
      return;
    }
    if (method_) {
      parse_method_line(in, line_no);
    } else if (class_) {
      parse_class_member(in, line_no);
    } else {
      parse_top_level(in, line_no);
    }
  }

  void close_block(LineScanner& in) {
    if (method_) {
      finish_method();
    } else if (class_) {
      for (const auto& existing : classes_) {
        if (existing.name == class_->name) {
          throw ParseError(class_line_, 1, "duplicate class " + class_->name);
        }
      }
      classes_.push_back(std::move(*class_));
      class_.reset();
    } else {
      in.fail("unbalanced '}'");
    }
  }

  void parse_top_level(LineScanner& in, int line_no) {
    if (in.consume_word("entry")) {
      entry_hints_.push_back(in.read_method_sig());
      in.expect_end();
      return;
    }
    in.expect_word("class");
    IRClass cls;
    cls.name = in.read_qualified();
    cls.superclass = "java.lang.Object";
    if (in.consume_word("extends")) {
      cls.superclass = in.read_qualified();
    }
    if (in.consume_word("implements")) {
      do {
        cls.interfaces.push_back(in.read_qualified());
      } while (in.consume(","));
    }
    in.expect("{");
    in.expect_end();
    class_ = std::move(cls);
    class_line_ = line_no;
  }

  void parse_class_member(LineScanner& in, int line_no) {
    if (in.consume_word("field")) {
      TypedName field;
      field.type = in.read_type();
      field.name = in.read_local();
      in.expect_end();
      if (class_->find_field(field.name) != nullptr) {
        in.fail("duplicate field " + field.name);
      }
      class_->fields.push_back(std::move(field));
      return;
    }
    in.expect_word("method");
    IRMethod m;
    m.sig.class_name = class_->name;
    m.sig.return_type = in.read_type();
    m.sig.name = in.read_member();
    in.expect("(");
    if (!in.consume(")")) {
      do {
        TypedName param;
        param.type = in.read_type();
        if (!in.peek(',') && !in.peek(')')) {
          param.name = in.read_local();
        } else {
          param.name = "p" + std::to_string(m.params.size());
        }
        if (param.name == IRMethod::kThis || m.param_index(param.name)) {
          in.fail("duplicate parameter " + param.name);
        }
        m.sig.params.push_back(param.type);
        m.params.push_back(std::move(param));
      } while (in.consume(","));
      in.expect(")");
    }
    in.expect("{");
    in.expect_end();
    if (class_->find_method(m.sig.name, m.sig.params) != nullptr) {
      throw ParseError(line_no, 1, "duplicate method " + m.sig.subsignature());
    }
    method_ = std::move(m);
  }

  void parse_method_line(LineScanner& in, int line_no) {
    if (in.consume_word("local")) {
      TypedName local;
      local.type = in.read_type();
      local.name = in.read_local();
      in.expect_end();
      for (const auto& existing : method_->locals) {
        if (existing.name == local.name) {
          in.fail("duplicate local " + local.name);
        }
      }
      method_->locals.push_back(std::move(local));
      return;
    }
    IRStatement s{parse_statement(in), line_no};
    in.expect_end();
    if (const auto* label = s.as<stmt::Label>()) {
      if (!method_->labels.emplace(label->name, method_->body.size()).second) {
        throw ParseError(line_no, 1, "duplicate label " + label->name);
      }
    }
    method_->body.push_back(std::move(s));
  }

  static stmt::Invoke parse_invoke(LineScanner& in) {
    stmt::Invoke call;
    if (in.consume_word("static")) {
      call.kind = InvokeKind::Static;
    } else if (in.consume_word("virtual")) {
      call.kind = InvokeKind::Virtual;
    } else if (in.consume_word("interface")) {
      call.kind = InvokeKind::Interface;
    } else if (in.consume_word("special")) {
      call.kind = InvokeKind::Special;
    } else {
      in.fail("expected invoke kind");
    }
    call.callee = in.read_method_sig();
    if (in.consume_word("on")) {
      call.receiver = in.read_local();
    }
    if (in.consume_word("with")) {
      in.expect("(");
      if (!in.consume(")")) {
        do {
          call.args.push_back(in.read_operand());
        } while (in.consume(","));
        in.expect(")");
      }
    }
    return call;
  }

  static StatementOp parse_statement(LineScanner& in) {
    if (in.consume_word("nop")) {
      return stmt::Nop{};
    }
    if (in.consume_word("label")) {
      return stmt::Label{in.read_label()};
    }
    if (in.consume_word("goto")) {
      return stmt::Goto{in.read_label()};
    }
    if (in.consume_word("return")) {
      if (in.at_end()) {
        return stmt::Return{};
      }
      return stmt::Return{in.read_local()};
    }
    if (in.consume_word("invoke")) {
      return parse_invoke(in);
    }
    if (in.consume_word("if")) {
      stmt::IfCmp branch;
      branch.lhs = in.read_local();
      if (in.consume("==")) {
        branch.op = RelOp::Eq;
      } else if (in.consume("!=")) {
        branch.op = RelOp::Ne;
      } else if (in.consume("<=")) {
        branch.op = RelOp::Le;
      } else if (in.consume(">=")) {
        branch.op = RelOp::Ge;
      } else if (in.consume("<")) {
        branch.op = RelOp::Lt;
      } else if (in.consume(">")) {
        branch.op = RelOp::Gt;
      } else {
        in.fail("expected relational operator");
      }
      branch.rhs = in.read_operand();
      in.expect_word("goto");
      branch.target = in.read_label();
      return branch;
    }
    if (in.consume_word("switch")) {
      stmt::Switch sw;
      sw.operand = in.read_local();
      in.expect("{");
      while (!in.consume_word("default")) {
        auto value = in.read_int();
        in.expect(":");
        for (const auto& [existing, label] : sw.cases) {
          if (existing == value) {
            in.fail("duplicate switch case " + std::to_string(value));
          }
        }
        sw.cases.emplace_back(value, in.read_label());
      }
      in.expect(":");
      sw.default_target = in.read_label();
      in.expect("}");
      return sw;
    }

    auto lhs = in.read_local();
    if (in.consume(".")) {
      stmt::StoreField store;
      store.base = std::move(lhs);
      store.field = in.read_field_ref();
      in.expect("=");
      store.src = in.read_local();
      return store;
    }
    if (in.consume("[")) {
      in.expect("*");
      in.expect("]");
      in.expect("=");
      return stmt::StoreArray{std::move(lhs), in.read_local()};
    }
    in.expect("=");
    if (in.consume_word("const")) {
      return stmt::AssignConst{std::move(lhs), in.read_constant()};
    }
    if (in.consume_word("new")) {
      return stmt::NewObject{std::move(lhs), in.read_type()};
    }
    if (in.consume_word("invoke")) {
      auto call = parse_invoke(in);
      call.result = std::move(lhs);
      return call;
    }
    auto rhs = in.read_local();
    if (in.consume(".")) {
      return stmt::LoadField{std::move(lhs), std::move(rhs),
                             in.read_field_ref()};
    }
    if (in.consume("[")) {
      in.expect("*");
      in.expect("]");
      return stmt::LoadArray{std::move(lhs), std::move(rhs)};
    }
    return stmt::AssignLocal{std::move(lhs), std::move(rhs)};
  }

  void finish_method() {
    auto& m = *method_;
    auto check = [&](const std::string& label, int line) {
      if (m.labels.count(label) == 0) {
        throw ParseError(line, 1, "dangling label " + label);
      }
    };
    for (const auto& s : m.body) {
      if (const auto* b = s.as<stmt::IfCmp>()) {
        check(b->target, s.source_line);
      } else if (const auto* g = s.as<stmt::Goto>()) {
        check(g->target, s.source_line);
      } else if (const auto* sw = s.as<stmt::Switch>()) {
        for (const auto& [value, label] : sw->cases) {
          check(label, s.source_line);
        }
        check(sw->default_target, s.source_line);
      }
    }
    // Bodies may not fall off the end.
    if (m.body.empty() ||
        !(m.body.back().as<stmt::Return>() || m.body.back().as<stmt::Goto>() ||
          m.body.back().as<stmt::Switch>())) {
      m.body.push_back(IRStatement{stmt::Return{}, 0});
    }
    class_->methods.push_back(std::move(m));
    method_.reset();
  }

  std::string_view text_;
  std::vector<IRClass> classes_;
  std::vector<MethodSig> entry_hints_;
  std::optional<IRClass> class_;
  std::optional<IRMethod> method_;
  int class_line_ = 0;
  int last_line_ = 0;
};

} // namespace

IRProgram parse_program(std::string_view text) {
  return ProgramParser(text).parse();
}

} // namespace seeker
