#pragma once

// Abstract syntax of values, modules and processes, with the syntactic
// operations the rest of the library builds on: substitution, free
// variables, module sum and evaluation-context decomposition.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "callas/names.hpp"
#include "callas/types.hpp"

namespace callas {

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

struct BuiltinValue {
  std::variant<std::int64_t, double, bool, std::string> v;
  bool operator==(const BuiltinValue&) const = default;
};

/// The `sensor` keyword: the module installed at the running sensor.
struct SensorRef {
  bool operator==(const SensorRef&) const = default;
};

struct Param {
  Variable name;
  TypeRef annotation;  // may be null
};

inline bool operator==(const Param& a, const Param& b) {
  return a.name == b.name && (a.annotation == b.annotation ||
                              (a.annotation && b.annotation && same_syntax(a.annotation, b.annotation)));
}

/// l = (self, x1 ... xn) P. params[0] is always `self`.
struct FunctionDef {
  std::vector<Param> params;
  TypeRef ret;  // optional return annotation
  ProcPtr body;
};

bool operator==(const FunctionDef& a, const FunctionDef& b);

struct ModuleEntry {
  Label label;
  FunctionDef fn;
  bool operator==(const ModuleEntry&) const = default;
};

/// Ordered map Label -> FunctionDef, iterated in insertion order.
struct ModuleValue {
  std::vector<ModuleEntry> entries;

  const FunctionDef* find(const Label& l) const {
    for (auto& e : entries)
      if (e.label == l) return &e.fn;
    return nullptr;
  }
  bool contains(const Label& l) const { return find(l) != nullptr; }
  std::set<Label> labels() const {
    std::set<Label> out;
    for (auto& e : entries) out.insert(e.label);
    return out;
  }
  bool operator==(const ModuleValue&) const = default;
};

struct Value {
  std::variant<BuiltinValue, Variable, ModuleValue, SensorRef> v;

  bool is_builtin() const { return std::holds_alternative<BuiltinValue>(v); }
  bool is_var() const { return std::holds_alternative<Variable>(v); }
  bool is_module() const { return std::holds_alternative<ModuleValue>(v); }
  bool is_sensor() const { return std::holds_alternative<SensorRef>(v); }
  const BuiltinValue* builtin() const { return std::get_if<BuiltinValue>(&v); }
  const Variable* var() const { return std::get_if<Variable>(&v); }
  const ModuleValue* module() const { return std::get_if<ModuleValue>(&v); }

  bool operator==(const Value&) const = default;
};

namespace val {
inline Value integer(std::int64_t i) { return Value{BuiltinValue{i}}; }
inline Value real(double d) { return Value{BuiltinValue{d}}; }
inline Value boolean(bool b) { return Value{BuiltinValue{b}}; }
inline Value string(std::string s) { return Value{BuiltinValue{std::move(s)}}; }
inline Value var(std::string name) { return Value{Variable{std::move(name)}}; }
inline Value sensor() { return Value{SensorRef{}}; }
inline Value module(ModuleValue m) { return Value{std::move(m)}; }
/// `{}`: the empty module, which doubles as the unit value.
inline Value unit() { return Value{ModuleValue{}}; }
}  // namespace val

struct Process {
  struct Val {
    Value value;
    bool operator==(const Val&) const = default;
  };
  struct Call {
    Value target;
    Label label;
    std::vector<Value> args;
    bool operator==(const Call&) const = default;
  };
  struct Extern {
    Label label;
    std::vector<Value> args;
    bool operator==(const Extern&) const = default;
  };
  struct Timer {
    Label label;
    std::vector<Value> args;
    Value period;
    Value duration;
    bool operator==(const Timer&) const = default;
  };
  struct Send {
    Label label;
    std::vector<Value> args;
    bool operator==(const Send&) const = default;
  };
  struct Receive {
    bool operator==(const Receive&) const = default;
  };
  struct Install {
    Value target;
    Value source;
    bool operator==(const Install&) const = default;
  };
  struct Let {
    Variable var;
    ProcPtr bound;
    ProcPtr body;
  };
  struct If {
    Value cond;
    ProcPtr then_branch;
    ProcPtr else_branch;
  };

  std::variant<Val, Call, Extern, Timer, Send, Receive, Install, Let, If> node;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  bool is_value() const { return std::holds_alternative<Val>(node); }
};

bool operator==(const Process& a, const Process& b);

inline bool same_proc(const ProcPtr& a, const ProcPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

inline bool operator==(const Process::Let& a, const Process::Let& b) {
  return a.var == b.var && same_proc(a.bound, b.bound) && same_proc(a.body, b.body);
}
inline bool operator==(const Process::If& a, const Process::If& b) {
  return a.cond == b.cond && same_proc(a.then_branch, b.then_branch) && same_proc(a.else_branch, b.else_branch);
}
inline bool operator==(const Process& a, const Process& b) { return a.node == b.node; }
inline bool operator==(const FunctionDef& a, const FunctionDef& b) {
  if (a.params != b.params) return false;
  if ((a.ret == nullptr) != (b.ret == nullptr)) return false;
  if (a.ret && !same_syntax(a.ret, b.ret)) return false;
  return same_proc(a.body, b.body);
}

namespace proc {
inline ProcPtr make(Process p) { return std::make_shared<const Process>(std::move(p)); }
inline ProcPtr value(Value v) { return make(Process{Process::Val{std::move(v)}}); }
inline ProcPtr unit() { return value(val::unit()); }
inline ProcPtr call(Value target, Label l, std::vector<Value> args) {
  return make(Process{Process::Call{std::move(target), std::move(l), std::move(args)}});
}
inline ProcPtr external(Label l, std::vector<Value> args) {
  return make(Process{Process::Extern{std::move(l), std::move(args)}});
}
inline ProcPtr timer(Label l, std::vector<Value> args, Value period, Value duration) {
  return make(Process{Process::Timer{std::move(l), std::move(args), std::move(period), std::move(duration)}});
}
inline ProcPtr send(Label l, std::vector<Value> args) {
  return make(Process{Process::Send{std::move(l), std::move(args)}});
}
inline ProcPtr receive() { return make(Process{Process::Receive{}}); }
inline ProcPtr install(Value target, Value source) {
  return make(Process{Process::Install{std::move(target), std::move(source)}});
}
inline ProcPtr let(Variable x, ProcPtr bound, ProcPtr body) {
  return make(Process{Process::Let{std::move(x), std::move(bound), std::move(body)}});
}
inline ProcPtr if_(Value cond, ProcPtr then_branch, ProcPtr else_branch) {
  return make(Process{Process::If{std::move(cond), std::move(then_branch), std::move(else_branch)}});
}
}  // namespace proc

inline FunctionDef fn(std::vector<std::string> params, ProcPtr body) {
  FunctionDef f;
  for (auto& p : params) f.params.push_back(Param{Variable{p}, nullptr});
  f.body = std::move(body);
  return f;
}

// ---------------------------------------------------------------------------
// Free variables

void free_vars(const Value& v, std::set<Variable>& bound, std::set<Variable>& out);
void free_vars(const Process& p, std::set<Variable>& bound, std::set<Variable>& out);

namespace detail {
struct ScopedBind {
  std::set<Variable>& bound;
  std::vector<Variable> added;
  ScopedBind(std::set<Variable>& b, const std::vector<Variable>& vars) : bound(b) {
    for (auto& v : vars)
      if (bound.insert(v).second) added.push_back(v);
  }
  ~ScopedBind() {
    for (auto& v : added) bound.erase(v);
  }
  ScopedBind(const ScopedBind&) = delete;
  ScopedBind& operator=(const ScopedBind&) = delete;
};
}  // namespace detail

inline void free_vars(const Value& v, std::set<Variable>& bound, std::set<Variable>& out) {
  if (auto x = v.var()) {
    if (!bound.count(*x)) out.insert(*x);
  } else if (auto m = v.module()) {
    for (auto& e : m->entries) {
      std::vector<Variable> ps;
      for (auto& p : e.fn.params) ps.push_back(p.name);
      detail::ScopedBind scope(bound, ps);
      free_vars(*e.fn.body, bound, out);
    }
  }
}

inline void free_vars(const Process& p, std::set<Variable>& bound, std::set<Variable>& out) {
  auto vals = [&](const std::vector<Value>& vs) {
    for (auto& v : vs) free_vars(v, bound, out);
  };
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Val>) {
          free_vars(n.value, bound, out);
        } else if constexpr (std::is_same_v<N, Process::Call>) {
          free_vars(n.target, bound, out);
          vals(n.args);
        } else if constexpr (std::is_same_v<N, Process::Extern> || std::is_same_v<N, Process::Send>) {
          vals(n.args);
        } else if constexpr (std::is_same_v<N, Process::Timer>) {
          vals(n.args);
          free_vars(n.period, bound, out);
          free_vars(n.duration, bound, out);
        } else if constexpr (std::is_same_v<N, Process::Install>) {
          free_vars(n.target, bound, out);
          free_vars(n.source, bound, out);
        } else if constexpr (std::is_same_v<N, Process::Let>) {
          free_vars(*n.bound, bound, out);
          detail::ScopedBind scope(bound, {n.var});
          free_vars(*n.body, bound, out);
        } else if constexpr (std::is_same_v<N, Process::If>) {
          free_vars(n.cond, bound, out);
          free_vars(*n.then_branch, bound, out);
          free_vars(*n.else_branch, bound, out);
        }
      },
      p.node);
}

inline std::set<Variable> free_vars(const Process& p) {
  std::set<Variable> bound, out;
  free_vars(p, bound, out);
  return out;
}
inline std::set<Variable> free_vars(const Value& v) {
  std::set<Variable> bound, out;
  free_vars(v, bound, out);
  return out;
}
inline bool is_closed(const Value& v) { return free_vars(v).empty(); }
inline bool is_closed(const Process& p) { return free_vars(p).empty(); }

// ---------------------------------------------------------------------------
// Substitution

using Bindings = std::map<Variable, Value>;

namespace detail {

inline Value subst_value(const Value& v, const Bindings& b);
inline ProcPtr subst_proc(const ProcPtr& p, const Bindings& b);

inline Bindings without(const Bindings& b, const std::vector<Variable>& vars) {
  Bindings out = b;
  for (auto& v : vars) out.erase(v);
  return out;
}

inline std::vector<Value> subst_values(const std::vector<Value>& vs, const Bindings& b) {
  std::vector<Value> out;
  out.reserve(vs.size());
  for (auto& v : vs) out.push_back(subst_value(v, b));
  return out;
}

inline Value subst_value(const Value& v, const Bindings& b) {
  if (b.empty()) return v;
  if (auto x = v.var()) {
    auto it = b.find(*x);
    return it == b.end() ? v : it->second;
  }
  if (auto m = v.module()) {
    ModuleValue out;
    out.entries.reserve(m->entries.size());
    for (auto& e : m->entries) {
      std::vector<Variable> ps;
      for (auto& p : e.fn.params) ps.push_back(p.name);
      FunctionDef f = e.fn;
      f.body = subst_proc(e.fn.body, without(b, ps));
      out.entries.push_back(ModuleEntry{e.label, std::move(f)});
    }
    return Value{std::move(out)};
  }
  return v;
}

inline ProcPtr subst_proc(const ProcPtr& p, const Bindings& b) {
  if (b.empty()) return p;
  return std::visit(
      [&](const auto& n) -> ProcPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Val>) {
          return proc::value(subst_value(n.value, b));
        } else if constexpr (std::is_same_v<N, Process::Call>) {
          return proc::call(subst_value(n.target, b), n.label, subst_values(n.args, b));
        } else if constexpr (std::is_same_v<N, Process::Extern>) {
          return proc::external(n.label, subst_values(n.args, b));
        } else if constexpr (std::is_same_v<N, Process::Timer>) {
          return proc::timer(n.label, subst_values(n.args, b), subst_value(n.period, b), subst_value(n.duration, b));
        } else if constexpr (std::is_same_v<N, Process::Send>) {
          return proc::send(n.label, subst_values(n.args, b));
        } else if constexpr (std::is_same_v<N, Process::Receive>) {
          return p;
        } else if constexpr (std::is_same_v<N, Process::Install>) {
          return proc::install(subst_value(n.target, b), subst_value(n.source, b));
        } else if constexpr (std::is_same_v<N, Process::Let>) {
          return proc::let(n.var, subst_proc(n.bound, b), subst_proc(n.body, without(b, {n.var})));
        } else {
          return proc::if_(subst_value(n.cond, b), subst_proc(n.then_branch, b), subst_proc(n.else_branch, b));
        }
      },
      p->node);
}

inline void require_closed(const Bindings& b) {
  for (auto& [x, v] : b)
    if (!is_closed(v)) throw InterpreterError("substitution of open value for variable " + x.name);
}

}  // namespace detail

/// Simultaneous substitution of closed values for free variables.
inline ProcPtr substitute(const ProcPtr& p, const Bindings& b) {
  detail::require_closed(b);
  return detail::subst_proc(p, b);
}
inline Value substitute(const Value& v, const Bindings& b) {
  detail::require_closed(b);
  return detail::subst_value(v, b);
}

// ---------------------------------------------------------------------------
// Module sum

/// left + right: right's entries override left's on shared labels. Order:
/// surviving left entries, then right entries.
inline ModuleValue module_sum(const ModuleValue& left, const ModuleValue& right) {
  ModuleValue out;
  for (auto& e : left.entries)
    if (!right.contains(e.label)) out.entries.push_back(e);
  for (auto& e : right.entries) out.entries.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Reduction contexts: C ::= [] | let x = C in P

struct ContextFrame {
  Variable var;
  ProcPtr body;
  bool operator==(const ContextFrame& o) const { return var == o.var && same_proc(body, o.body); }
};

struct Decomposition {
  std::vector<ContextFrame> path;  // outermost first
  ProcPtr redex;
};

/// Splits p into the let-spine context and the redex in its hole. A let
/// whose bound part is already a value is itself the redex.
inline Decomposition decompose(const ProcPtr& p) {
  Decomposition d;
  ProcPtr cur = p;
  while (auto l = cur->as<Process::Let>()) {
    if (l->bound->is_value()) break;
    d.path.push_back(ContextFrame{l->var, l->body});
    cur = l->bound;
  }
  d.redex = cur;
  return d;
}

inline ProcPtr recompose(const std::vector<ContextFrame>& path, ProcPtr hole) {
  for (auto it = path.rbegin(); it != path.rend(); ++it) hole = proc::let(it->var, std::move(hole), it->body);
  return hole;
}
inline ProcPtr recompose(const Decomposition& d) { return recompose(d.path, d.redex); }

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace detail {

class AlphaEqual {
 public:
  bool value(const Value& a, const Value& b) {
    if (a.v.index() != b.v.index()) return false;
    if (auto x = a.var()) return var(*x, *b.var());
    if (auto m = a.module()) return module(*m, *b.module());
    return a == b;
  }

  bool process(const Process& a, const Process& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& n) -> bool {
          using N = std::decay_t<decltype(n)>;
          const N& o = std::get<N>(b.node);
          if constexpr (std::is_same_v<N, Process::Val>) {
            return value(n.value, o.value);
          } else if constexpr (std::is_same_v<N, Process::Call>) {
            return n.label == o.label && value(n.target, o.target) && values(n.args, o.args);
          } else if constexpr (std::is_same_v<N, Process::Extern> || std::is_same_v<N, Process::Send>) {
            return n.label == o.label && values(n.args, o.args);
          } else if constexpr (std::is_same_v<N, Process::Timer>) {
            return n.label == o.label && values(n.args, o.args) && value(n.period, o.period) &&
                   value(n.duration, o.duration);
          } else if constexpr (std::is_same_v<N, Process::Receive>) {
            return true;
          } else if constexpr (std::is_same_v<N, Process::Install>) {
            return value(n.target, o.target) && value(n.source, o.source);
          } else if constexpr (std::is_same_v<N, Process::Let>) {
            if (!process(*n.bound, *o.bound)) return false;
            left_.push_back(n.var);
            right_.push_back(o.var);
            bool r = process(*n.body, *o.body);
            left_.pop_back();
            right_.pop_back();
            return r;
          } else {
            return value(n.cond, o.cond) && process(*n.then_branch, *o.then_branch) &&
                   process(*n.else_branch, *o.else_branch);
          }
        },
        a.node);
  }

 private:
  std::vector<Variable> left_, right_;

  bool values(const std::vector<Value>& a, const std::vector<Value>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!value(a[i], b[i])) return false;
    return true;
  }

  bool var(const Variable& a, const Variable& b) {
    for (std::size_t i = left_.size(); i-- > 0;) {
      const bool la = left_[i] == a, rb = right_[i] == b;
      if (la || rb) return la && rb;
    }
    return a == b;
  }

  bool module(const ModuleValue& a, const ModuleValue& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      auto& fa = a.entries[i].fn;
      auto& fb = b.entries[i].fn;
      if (a.entries[i].label != b.entries[i].label || fa.params.size() != fb.params.size()) return false;
      if ((fa.ret == nullptr) != (fb.ret == nullptr) || (fa.ret && !same_syntax(fa.ret, fb.ret))) return false;
      for (std::size_t k = 0; k < fa.params.size(); ++k) {
        auto& pa = fa.params[k].annotation;
        auto& pb = fb.params[k].annotation;
        if ((pa == nullptr) != (pb == nullptr) || (pa && !same_syntax(pa, pb))) return false;
        left_.push_back(fa.params[k].name);
        right_.push_back(fb.params[k].name);
      }
      bool r = process(*fa.body, *fb.body);
      left_.resize(left_.size() - fa.params.size());
      right_.resize(right_.size() - fb.params.size());
      if (!r) return false;
    }
    return true;
  }
};

}  // namespace detail

/// Equality up to consistent renaming of let- and parameter-bound variables.
inline bool alpha_equal(const Process& a, const Process& b) { return detail::AlphaEqual{}.process(a, b); }
inline bool alpha_equal(const Value& a, const Value& b) { return detail::AlphaEqual{}.value(a, b); }

}  // namespace callas
