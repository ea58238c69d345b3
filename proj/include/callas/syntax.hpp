#pragma once

// Concrete syntax for programs (.cal) and type expressions: lexer,
// recursive-descent parser with desugaring into core processes, and the
// canonical printer.
//
// Program grammar (`;` binds loosest, `let` and `if` bodies extend right):
//
//   seq     ::= proc [ ';' [seq] ]
//   proc    ::= 'let' x '=' seq 'in' seq
//             | 'if' expr 'then' seq [ 'else' seq ]
//             | 'send' l '(' args ')'
//             | 'receive'
//             | ('external' | 'extern') l '(' args ')'
//             | 'timer' l '(' args ')' 'every' expr 'expire' expr
//             | 'install' expr                      -- sensor.install
//             | expr
//   expr    ::= sum [ ('>' | '<' | '==') sum ]
//   sum     ::= prod { ('+' | '-') prod }
//   prod    ::= postfix { '*' postfix }
//   postfix ::= primary { '.' l '(' args ')' | '.' 'install' primary }
//   primary ::= int | float | string | 'true' | 'false' | '-' number
//             | x | 'sensor' | module | '(' seq ')'
//   module  ::= '{' { l '=' '(' params ')' [':' type] seq } '}'
//   params  ::= 'self' { ',' x [':' type] }
//
// `P; Q` is `let _k = P in Q` with `_k` unused in the whole source. The
// operators desugar to the reserved externs gt, lt, eq, add, sub, mul;
// operands that are not values are first bound by a fresh let.
//
// Type grammar:
//
//   type ::= 'int' | 'float' | 'bool' | 'string' | a
//          | 'mu' a '.' type
//          | '(' [type {',' type}] ')' '->' type
//          | '{' [entry {',' entry}] '}'          -- anonymous code
//          | '{|' [entry {',' entry}] '|}'        -- sensor code
//   entry ::= l ':' '(' [type {',' type}] ')' '->' type

#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "callas/ast.hpp"
#include "callas/state.hpp"
#include "callas/types.hpp"

namespace callas {

struct SyntaxError : std::runtime_error {
  int line;
  int column;
  std::string message;
  std::vector<std::string> expected;

  SyntaxError(int l, int c, std::string msg, std::vector<std::string> exp = {})
      : std::runtime_error(format(l, c, msg, exp)), line(l), column(c), message(std::move(msg)),
        expected(std::move(exp)) {}

 private:
  static std::string format(int l, int c, const std::string& msg, const std::vector<std::string>& exp) {
    std::string s = std::to_string(l) + ":" + std::to_string(c) + ": " + msg;
    if (!exp.empty()) {
      s += " (expected ";
      for (std::size_t i = 0; i < exp.size(); ++i) s += (i ? ", " : "") + exp[i];
      s += ")";
    }
    return s;
  }
};

/// Labels of the externs the binary operators desugar to.
inline const std::vector<std::pair<std::string, std::string>>& operator_externs() {
  static const std::vector<std::pair<std::string, std::string>> ops{
      {">", "gt"}, {"<", "lt"}, {"==", "eq"}, {"+", "add"}, {"-", "sub"}, {"*", "mul"}};
  return ops;
}

namespace detail {

enum class Tok { Ident, Keyword, Int, Float, String, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
  std::int64_t int_value = 0;
  double float_value = 0;
};

inline bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kws{"install", "timer", "every", "expire", "send",  "receive",
                                              "external", "extern", "let",   "in",     "if",    "then",
                                              "else",    "sensor", "true",  "false"};
  return kws.count(s) != 0;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t{Tok::End, "", line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = is_keyword(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        number(t);
      } else if (c == '"') {
        string(t);
      } else {
        punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (peek() == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (peek() == '/' && peek(1) == '*') {
        int l = line_, c = col_;
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) throw SyntaxError(l, c, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void number(Token& t) {
    std::size_t start = pos_;
    bool is_float = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      is_float = true;
      advance();
      if (peek() == '+' || peek() == '-') advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (is_float) {
      t.kind = Tok::Float;
      auto r = std::from_chars(first, last, t.float_value);
      if (r.ec != std::errc{} || !std::isfinite(t.float_value))
        throw SyntaxError(t.line, t.column, "float literal out of range: " + t.text);
    } else {
      t.kind = Tok::Int;
      auto r = std::from_chars(first, last, t.int_value);
      if (r.ec != std::errc{}) throw SyntaxError(t.line, t.column, "integer literal out of range: " + t.text);
    }
  }

  void string(Token& t) {
    t.kind = Tok::String;
    advance();
    std::string s;
    for (;;) {
      if (pos_ >= src_.size()) throw SyntaxError(t.line, t.column, "unterminated string literal");
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        char e = peek();
        if (pos_ >= src_.size()) throw SyntaxError(t.line, t.column, "unterminated string literal");
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case '"': s += '"'; break;
          case '\\': s += '\\'; break;
          default: throw SyntaxError(line_, col_, std::string("unknown escape \\") + e);
        }
        advance();
        continue;
      }
      s += c;
      advance();
    }
    t.text = std::move(s);
  }

  void punct(Token& t) {
    t.kind = Tok::Punct;
    static const char* two[] = {"==", "->", "{|", "|}"};
    for (auto p : two) {
      if (peek() == p[0] && peek(1) == p[1]) {
        t.text = p;
        advance();
        advance();
        return;
      }
    }
    char c = peek();
    static const std::string singles = "(){},;=.:<>+-*";
    if (singles.find(c) == std::string::npos)
      throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
    t.text = std::string(1, c);
    advance();
  }
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {
    for (auto& t : toks_)
      if (t.kind == Tok::Ident) used_names_.insert(t.text);
  }

  ProcPtr program() {
    auto p = seq();
    expect_end();
    return p;
  }

  TypeRef type_only() {
    auto t = type();
    expect_end();
    return t;
  }

  Message message_only() {
    Message m;
    m.label = label();
    Term args;
    m.args = arg_list(args);
    if (!args.prelude.empty()) fail(cur(), "message arguments must be values");
    expect_end();
    return m;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> used_names_;
  int fresh_counter_ = 0;

  struct Term {
    std::vector<std::pair<Variable, ProcPtr>> prelude;
    ProcPtr proc;  // set when the term is a process
    Value value;   // otherwise
  };

  // -- token helpers ------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is(std::string_view text) const {
    return (cur().kind == Tok::Punct || cur().kind == Tok::Keyword) && cur().text == text;
  }
  bool accept(std::string_view text) {
    if (is(text)) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg, std::vector<std::string> expected = {}) const {
    throw SyntaxError(t.line, t.column, msg, std::move(expected));
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }
  void expect(std::string_view text) {
    if (!accept(text)) fail(cur(), "unexpected " + describe(cur()), {"'" + std::string(text) + "'"});
  }
  void expect_end() {
    if (cur().kind != Tok::End) fail(cur(), "unexpected " + describe(cur()), {"end of input"});
  }
  std::string ident(const char* what) {
    if (cur().kind != Tok::Ident) fail(cur(), "unexpected " + describe(cur()), {what});
    return toks_[pos_++].text;
  }
  Label label() { return Label{ident("label")}; }

  Variable fresh() {
    for (;;) {
      std::string n = "_" + std::to_string(fresh_counter_++);
      if (used_names_.insert(n).second) return Variable{n};
    }
  }

  // -- terms ----------------------------------------------------------------

  static Term of_value(Value v) { return Term{{}, nullptr, std::move(v)}; }
  static Term of_proc(ProcPtr p) {
    if (auto v = p->as<Process::Val>()) return of_value(v->value);
    return Term{{}, std::move(p), Value{}};
  }

  /// Moves t's prelude into `into` and returns t as a value.
  Value value_of(Term t, Term& into) {
    for (auto& b : t.prelude) into.prelude.push_back(std::move(b));
    if (!t.proc) return std::move(t.value);
    auto x = fresh();
    into.prelude.emplace_back(x, std::move(t.proc));
    return Value{x};
  }

  static ProcPtr wrap(std::vector<std::pair<Variable, ProcPtr>> prelude, ProcPtr p) {
    for (auto it = prelude.rbegin(); it != prelude.rend(); ++it) p = proc::let(it->first, it->second, p);
    return p;
  }
  static ProcPtr proc_of(Term t) {
    ProcPtr p = t.proc ? t.proc : proc::value(std::move(t.value));
    return wrap(std::move(t.prelude), std::move(p));
  }

  // -- processes ------------------------------------------------------------

  bool at_seq_end() const {
    const auto& t = cur();
    if (t.kind == Tok::End) return true;
    if ((t.kind == Tok::Punct && (t.text == "}" || t.text == ")")) ||
        (t.kind == Tok::Keyword && (t.text == "else" || t.text == "in")))
      return true;
    return t.kind == Tok::Ident && ahead(1).kind == Tok::Punct && ahead(1).text == "=";
  }

  ProcPtr seq() {
    auto p = proc();
    if (accept(";")) {
      if (at_seq_end()) return p;
      auto rest = seq();
      return proc::let(fresh(), p, rest);
    }
    return p;
  }

  std::vector<Value> arg_list(Term& into) {
    expect("(");
    std::vector<Value> args;
    if (!accept(")")) {
      do {
        args.push_back(value_of(expr(), into));
      } while (accept(","));
      expect(")");
    }
    return args;
  }

  ProcPtr proc() {
    const Token& t = cur();
    if (accept("let")) {
      Variable x{ident("variable")};
      expect("=");
      auto bound = seq();
      expect("in");
      auto body = seq();
      return proc::let(x, bound, body);
    }
    if (accept("if")) {
      Term pre;
      Value c = value_of(expr(), pre);
      expect("then");
      auto th = seq();
      ProcPtr el = accept("else") ? seq() : proc::unit();
      return wrap(std::move(pre.prelude), proc::if_(std::move(c), th, el));
    }
    if (accept("send")) {
      Term pre;
      auto l = label();
      auto args = arg_list(pre);
      return wrap(std::move(pre.prelude), proc::send(l, std::move(args)));
    }
    if (accept("receive")) return proc::receive();
    if (accept("external") || accept("extern")) {
      Term pre;
      auto l = label();
      auto args = arg_list(pre);
      return wrap(std::move(pre.prelude), proc::external(l, std::move(args)));
    }
    if (accept("timer")) {
      Term pre;
      auto l = label();
      auto args = arg_list(pre);
      expect("every");
      Value period = value_of(expr(), pre);
      expect("expire");
      Value duration = value_of(expr(), pre);
      return wrap(std::move(pre.prelude), proc::timer(l, std::move(args), std::move(period), std::move(duration)));
    }
    if (accept("install")) {
      Term pre;
      Value src = value_of(expr(), pre);
      return wrap(std::move(pre.prelude), proc::install(val::sensor(), std::move(src)));
    }
    if (t.kind == Tok::End || at_seq_end())
      fail(t, "unexpected " + describe(t), {"process"});
    return proc_of(expr());
  }

  // -- expressions ----------------------------------------------------------

  Term binary(const std::string& op, Term lhs, Term rhs) {
    std::string name;
    for (auto& [sym, lab] : operator_externs())
      if (sym == op) name = lab;
    Term out;
    Value a = value_of(std::move(lhs), out);
    Value b = value_of(std::move(rhs), out);
    out.proc = proc::external(Label{name}, {std::move(a), std::move(b)});
    return out;
  }

  Term expr() {
    Term lhs = sum();
    for (const char* op : {">", "<", "=="}) {
      if (accept(op)) return binary(op, std::move(lhs), sum());
    }
    return lhs;
  }

  Term sum() {
    Term lhs = prod();
    for (;;) {
      if (accept("+")) {
        lhs = binary("+", std::move(lhs), prod());
      } else if (accept("-")) {
        lhs = binary("-", std::move(lhs), prod());
      } else {
        return lhs;
      }
    }
  }

  Term prod() {
    Term lhs = postfix();
    while (accept("*")) lhs = binary("*", std::move(lhs), postfix());
    return lhs;
  }

  Term postfix() {
    Term t = primary();
    while (is(".")) {
      ++pos_;
      Term out;
      Value target = value_of(std::move(t), out);
      if (accept("install")) {
        Value src = value_of(primary(), out);
        out.proc = proc::install(std::move(target), std::move(src));
      } else {
        auto l = label();
        auto args = arg_list(out);
        out.proc = proc::call(std::move(target), l, std::move(args));
      }
      t = std::move(out);
    }
    return t;
  }

  Term primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Int: ++pos_; return of_value(val::integer(t.int_value));
      case Tok::Float: ++pos_; return of_value(val::real(t.float_value));
      case Tok::String: ++pos_; return of_value(val::string(t.text));
      case Tok::Ident: ++pos_; return of_value(val::var(t.text));
      default: break;
    }
    if (accept("true")) return of_value(val::boolean(true));
    if (accept("false")) return of_value(val::boolean(false));
    if (accept("sensor")) return of_value(val::sensor());
    if (is("-")) {
      const Token& n = ahead(1);
      if (n.kind == Tok::Int) {
        pos_ += 2;
        return of_value(val::integer(-n.int_value));
      }
      if (n.kind == Tok::Float) {
        pos_ += 2;
        return of_value(val::real(-n.float_value));
      }
      fail(n, "unexpected " + describe(n), {"number"});
    }
    if (accept("(")) {
      auto p = seq();
      expect(")");
      return of_proc(p);
    }
    if (is("{")) return of_value(val::module(module()));
    fail(t, "unexpected " + describe(t), {"value", "process"});
  }

  ModuleValue module() {
    expect("{");
    ModuleValue m;
    while (!accept("}")) {
      const Token& at = cur();
      if (at.kind != Tok::Ident) fail(at, "unexpected " + describe(at), {"label", "'}'"});
      auto l = label();
      if (m.contains(l)) fail(at, "duplicate label '" + l.name + "' in module literal");
      expect("=");
      FunctionDef f;
      expect("(");
      const Token& first = cur();
      if (first.kind != Tok::Ident || first.text != kSelf.name) fail(first, "first parameter must be 'self'", {"self"});
      ++pos_;
      f.params.push_back(Param{kSelf, nullptr});
      while (accept(",")) {
        const Token& pt = cur();
        Variable x{ident("parameter")};
        for (auto& p : f.params)
          if (p.name == x) fail(pt, "duplicate parameter '" + x.name + "'");
        TypeRef ann;
        if (accept(":")) ann = type();
        f.params.push_back(Param{x, ann});
      }
      expect(")");
      if (accept(":")) f.ret = type();
      f.body = seq();
      m.entries.push_back(ModuleEntry{l, std::move(f)});
    }
    return m;
  }

  // -- types ----------------------------------------------------------------

  TypeRef type() {
    const Token& t = cur();
    if (t.kind == Tok::Ident) {
      ++pos_;
      if (t.text == "int") return ty::int_();
      if (t.text == "float") return ty::float_();
      if (t.text == "bool") return ty::bool_();
      if (t.text == "string") return ty::string_();
      if (t.text == "mu") {
        std::string a = ident("type variable");
        expect(".");
        return ty::rec(a, type());
      }
      return ty::var(t.text);
    }
    if (accept("(")) {
      std::vector<TypeRef> ps;
      if (!accept(")")) {
        do {
          ps.push_back(type());
        } while (accept(","));
        expect(")");
      }
      expect("->");
      return ty::fun(std::move(ps), type());
    }
    if (accept("{")) return ty::anon(type_entries("}"));
    if (accept("{|")) return ty::sensor_code(type_entries("|}"));
    fail(t, "unexpected " + describe(t), {"type"});
  }

  std::vector<std::pair<Label, TypeRef>> type_entries(const char* close) {
    std::vector<std::pair<Label, TypeRef>> es;
    if (accept(close)) return es;
    do {
      const Token& at = cur();
      auto l = label();
      for (auto& e : es)
        if (e.first == l) fail(at, "duplicate label '" + l.name + "' in record type");
      expect(":");
      const Token& st = cur();
      auto sig = type();
      if (!sig->as<Type::Fun>()) fail(st, "record entries must be function types", {"'('"});
      es.emplace_back(l, sig);
    } while (accept(","));
    expect(close);
    return es;
  }
};

// -- printing -----------------------------------------------------------------

inline void print_value(std::ostream& os, const Value& v);
inline void print_proc(std::ostream& os, const Process& p, bool head);

inline void print_string_literal(std::ostream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default: os << c;
    }
  }
  os << '"';
}

inline void print_float(std::ostream& os, double d) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  os << s;
}

inline void print_args(std::ostream& os, const std::vector<Value>& args) {
  os << '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    print_value(os, args[i]);
  }
  os << ')';
}

inline void print_value(std::ostream& os, const Value& v) {
  if (auto b = v.builtin()) {
    std::visit(
        [&](const auto& x) {
          using X = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<X, std::int64_t>) os << x;
          else if constexpr (std::is_same_v<X, double>) print_float(os, x);
          else if constexpr (std::is_same_v<X, bool>) os << (x ? "true" : "false");
          else print_string_literal(os, x);
        },
        b->v);
  } else if (auto x = v.var()) {
    os << x->name;
  } else if (v.is_sensor()) {
    os << "sensor";
  } else {
    auto& m = *v.module();
    if (m.entries.empty()) {
      os << "{}";
      return;
    }
    os << "{ ";
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      auto& e = m.entries[i];
      if (i) os << "  ";
      os << e.label.name << " = (";
      for (std::size_t k = 0; k < e.fn.params.size(); ++k) {
        if (k) os << ", ";
        os << e.fn.params[k].name.name;
        if (e.fn.params[k].annotation) os << ": " << to_string(*e.fn.params[k].annotation);
      }
      os << ")";
      if (e.fn.ret) os << ": " << to_string(*e.fn.ret);
      os << ' ';
      print_proc(os, *e.fn.body, false);
    }
    os << " }";
  }
}

/// `head` marks positions that a trailing `;`/`in`/`else` would otherwise
/// extend: let-bound parts and the left of a sequence.
inline void print_proc(std::ostream& os, const Process& p, bool head) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Val>) {
          print_value(os, n.value);
        } else if constexpr (std::is_same_v<N, Process::Call>) {
          print_value(os, n.target);
          os << '.' << n.label.name;
          print_args(os, n.args);
        } else if constexpr (std::is_same_v<N, Process::Extern>) {
          os << "external " << n.label.name;
          print_args(os, n.args);
        } else if constexpr (std::is_same_v<N, Process::Timer>) {
          os << "timer " << n.label.name;
          print_args(os, n.args);
          os << " every ";
          print_value(os, n.period);
          os << " expire ";
          print_value(os, n.duration);
        } else if constexpr (std::is_same_v<N, Process::Send>) {
          os << "send " << n.label.name;
          print_args(os, n.args);
        } else if constexpr (std::is_same_v<N, Process::Receive>) {
          os << "receive";
        } else if constexpr (std::is_same_v<N, Process::Install>) {
          if (!n.target.is_sensor()) {
            print_value(os, n.target);
            os << '.';
          }
          os << "install ";
          print_value(os, n.source);
        } else if constexpr (std::is_same_v<N, Process::Let>) {
          if (head) os << '(';
          if (free_vars(*n.body).count(n.var)) {
            os << "let " << n.var.name << " = ";
            print_proc(os, *n.bound, true);
            os << " in ";
          } else {
            print_proc(os, *n.bound, true);
            os << "; ";
          }
          print_proc(os, *n.body, false);
          if (head) os << ')';
        } else {
          if (head) os << '(';
          os << "if ";
          print_value(os, n.cond);
          os << " then ";
          print_proc(os, *n.then_branch, false);
          os << " else ";
          print_proc(os, *n.else_branch, false);
          if (head) os << ')';
        }
      },
      p.node);
}

}  // namespace detail

/// Parses a program. Throws SyntaxError.
inline ProcPtr parse_program(std::string_view src) { return detail::Parser(src).program(); }

/// Parses a type expression. Throws SyntaxError.
inline TypeRef parse_type(std::string_view src) { return detail::Parser(src).type_only(); }

/// Parses `l(v1, ..., vn)` with value arguments.
inline Message parse_message(std::string_view src) { return detail::Parser(src).message_only(); }

inline std::string pretty_print(const Process& p) {
  std::ostringstream os;
  detail::print_proc(os, p, false);
  return os.str();
}
inline std::string pretty_print(const ProcPtr& p) { return pretty_print(*p); }

inline std::string pretty_print(const Value& v) {
  std::ostringstream os;
  detail::print_value(os, v);
  return os.str();
}

inline std::string pretty_print(const Message& m) {
  std::ostringstream os;
  os << m.label.name;
  detail::print_args(os, m.args);
  return os.str();
}

inline std::string pretty_print_args(const std::vector<Value>& args) {
  std::ostringstream os;
  detail::print_args(os, args);
  return os.str();
}

}  // namespace callas
