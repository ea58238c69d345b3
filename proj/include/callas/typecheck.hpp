#pragma once

// Type checking for values, processes, sensors, queues and networks.
//
// Judgments are parameterised by two closed interfaces: the extern
// signatures and the sensor interface (a mu-type over a sensor-code
// record). Checking, not inference: parameters of module literals that are
// not installed in a sensor must carry annotations.
//
// Two points where this checker is more permissive than a literal reading
// of the rules:
//  * Installing into the sensor accepts any module literal whose labels are
//    a subset of the sensor interface, each entry checked against its
//    interface signature with `self` bound to the interface type.
//  * Installed functions are likewise checked entry by entry, so a sensor
//    need not carry every interface function.

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "callas/ast.hpp"
#include "callas/state.hpp"
#include "callas/syntax.hpp"
#include "callas/types.hpp"

namespace callas {

struct TypeError : std::runtime_error {
  std::string rule;      // e.g. "T-call"; nested failures read "T-send/T-call"
  std::string location;  // e.g. "s1: running", "s1: inbox[2]"
  std::string message;
  TypeRef expected;
  TypeRef found;

  TypeError(std::string r, std::string msg, TypeRef exp = nullptr, TypeRef fnd = nullptr, std::string loc = {})
      : std::runtime_error(r + ": " + msg), rule(std::move(r)), location(std::move(loc)), message(std::move(msg)),
        expected(std::move(exp)), found(std::move(fnd)) {}

  std::string describe() const {
    std::string s;
    if (!location.empty()) s += location + ": ";
    s += rule + ": " + message;
    if (expected) s += " [expected " + to_string(*expected);
    if (found) s += std::string(expected ? ", " : " [") + "found " + to_string(*found);
    if (expected || found) s += "]";
    return s;
  }
};

/// The extern signatures and the sensor interface every judgment is
/// parameterised by.
struct Interfaces {
  std::vector<std::pair<Label, TypeRef>> externs;  // each a Fun type
  TypeRef sensor;                                  // mu a. {| l: (a, ...) -> t ... |}

  const TypeRef* find_extern(const Label& l) const {
    for (auto& e : externs)
      if (e.first == l) return &e.second;
    return nullptr;
  }

  /// The unfolded sensor-code record of the sensor interface.
  const Type::Code& sensor_record() const {
    if (!record_) record_ = unfold_head(sensor);
    return *record_->as<Type::Code>();
  }

  /// Builds the sensor interface from self-less signatures:
  /// {l: (t1..tn) -> t}  becomes  mu M. {| l: (M, t1..tn) -> t |}.
  static TypeRef make_sensor_interface(const std::vector<std::pair<Label, TypeRef>>& sigs,
                                       const std::string& self_var = "M") {
    std::vector<std::pair<Label, TypeRef>> entries;
    for (auto& [l, sig] : sigs) {
      auto f = sig->as<Type::Fun>();
      if (!f) throw std::invalid_argument("sensor interface entry " + l.name + " is not a function type");
      std::vector<TypeRef> ps{ty::var(self_var)};
      ps.insert(ps.end(), f->params.begin(), f->params.end());
      entries.emplace_back(l, ty::fun(std::move(ps), f->ret));
    }
    return ty::rec(self_var, ty::sensor_code(std::move(entries)));
  }

  /// Signatures of the externs the binary operators desugar to.
  static std::vector<std::pair<Label, TypeRef>> operator_signatures() {
    auto ii_b = ty::fun({ty::int_(), ty::int_()}, ty::bool_());
    auto ii_i = ty::fun({ty::int_(), ty::int_()}, ty::int_());
    return {{Label{"gt"}, ii_b}, {Label{"lt"}, ii_b}, {Label{"eq"}, ii_b},
            {Label{"add"}, ii_i}, {Label{"sub"}, ii_i}, {Label{"mul"}, ii_i}};
  }

 private:
  mutable TypeRef record_;
};

/// Variable typing, rightmost binding wins.
class TypeEnv {
 public:
  TypeEnv() = default;

  TypeRef lookup(const Variable& x) const {
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it)
      if (it->first == x) return it->second;
    return nullptr;
  }
  TypeEnv extended(const Variable& x, TypeRef t) const {
    TypeEnv e = *this;
    e.bindings_.emplace_back(x, std::move(t));
    return e;
  }
  /// (this \ other) U other.
  TypeEnv operator+(const TypeEnv& other) const {
    TypeEnv e;
    for (auto& b : bindings_)
      if (!other.lookup(b.first)) e.bindings_.push_back(b);
    e.bindings_.insert(e.bindings_.end(), other.bindings_.begin(), other.bindings_.end());
    return e;
  }
  const std::vector<std::pair<Variable, TypeRef>>& bindings() const { return bindings_; }

 private:
  std::vector<std::pair<Variable, TypeRef>> bindings_;
};

namespace detail {

inline std::string chain(const std::string& outer, const std::string& inner) {
  return inner.rfind(outer, 0) == 0 ? inner : outer + "/" + inner;
}

class Checker {
 public:
  explicit Checker(const Interfaces& ifaces) : ifaces_(ifaces) {}

  // -- values ---------------------------------------------------------------

  TypeRef value(const TypeEnv& env, const Value& v) const {
    if (auto b = v.builtin()) {
      return std::visit(
          [](const auto& x) -> TypeRef {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, std::int64_t>) return ty::int_();
            else if constexpr (std::is_same_v<X, double>) return ty::float_();
            else if constexpr (std::is_same_v<X, bool>) return ty::bool_();
            else return ty::string_();
          },
          b->v);
    }
    if (auto x = v.var()) {
      auto t = env.lookup(*x);
      if (!t) throw TypeError("T-var", "unbound variable '" + x->name + "'");
      return t;
    }
    if (v.is_sensor()) return ifaces_.sensor;
    return module(env, *v.module());
  }

  /// Synthesises mu a. {l_i: (a, t_i) -> r_i} for an anonymous module.
  /// Return types come from annotations or from the bodies; bodies that call
  /// their own module are retried once more signatures are known.
  TypeRef module(const TypeEnv& env, const ModuleValue& m) const {
    const std::string self_var = "m";
    std::vector<std::vector<TypeRef>> params(m.entries.size());
    std::vector<TypeRef> rets(m.entries.size());
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      auto& e = m.entries[i];
      if (e.fn.params.empty() || e.fn.params[0].name != kSelf)
        throw TypeError("T-code", "function '" + e.label.name + "' lacks a self parameter");
      for (std::size_t k = 1; k < e.fn.params.size(); ++k) {
        auto& p = e.fn.params[k];
        if (!p.annotation)
          throw TypeError("T-code",
                          "parameter '" + p.name.name + "' of '" + e.label.name + "' needs a type annotation");
        params[i].push_back(p.annotation);
      }
      rets[i] = e.fn.ret;
    }
    auto build = [&](bool only_known) {
      std::vector<std::pair<Label, TypeRef>> es;
      for (std::size_t i = 0; i < m.entries.size(); ++i) {
        if (!rets[i] && only_known) continue;
        std::vector<TypeRef> ps{ty::var(self_var)};
        ps.insert(ps.end(), params[i].begin(), params[i].end());
        es.emplace_back(m.entries[i].label, ty::fun(std::move(ps), rets[i]));
      }
      return ty::rec(self_var, ty::anon(std::move(es)));
    };
    auto body_env = [&](std::size_t i, const TypeRef& self_t) {
      TypeEnv e = env.extended(kSelf, self_t);
      auto& fp = m.entries[i].fn.params;
      for (std::size_t k = 1; k < fp.size(); ++k) e = e.extended(fp[k].name, params[i][k - 1]);
      return e;
    };

    // Infer missing return types, a round at a time.
    for (;;) {
      bool pending = false, progress = false;
      std::optional<TypeError> last;
      for (std::size_t i = 0; i < m.entries.size(); ++i) {
        if (rets[i]) continue;
        pending = true;
        try {
          rets[i] = process(body_env(i, build(true)), *m.entries[i].fn.body);
          progress = true;
        } catch (const TypeError& err) {
          last = err;
        }
      }
      if (!pending) break;
      if (!progress) throw TypeError(chain("T-code", last->rule), "in '" + label_of_pending(m, rets) + "': " +
                                                                      last->message,
                                     last->expected, last->found);
    }

    TypeRef self_t = build(false);
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      TypeRef got;
      try {
        got = process(body_env(i, self_t), *m.entries[i].fn.body);
      } catch (const TypeError& err) {
        throw TypeError(chain("T-code", err.rule), "in '" + m.entries[i].label.name + "': " + err.message,
                        err.expected, err.found);
      }
      if (!type_equal(got, rets[i]))
        throw TypeError("T-code", "body of '" + m.entries[i].label.name + "' does not match its return type",
                        rets[i], got);
    }
    return self_t;
  }

  /// Checks a module destined for the sensor against the sensor interface:
  /// every label must be declared there and every body must have the
  /// declared type with `self` bound to the interface.
  void module_against_interface(const TypeEnv& env, const ModuleValue& m, const std::string& rule) const {
    auto& rec = ifaces_.sensor_record();
    for (auto& e : m.entries) {
      auto sig_ref = find_entry(rec, e.label);
      if (!sig_ref) throw TypeError(rule, "label '" + e.label.name + "' is not part of the sensor interface");
      auto sig = (*sig_ref)->as<Type::Fun>();
      if (e.fn.params.empty() || e.fn.params[0].name != kSelf)
        throw TypeError(rule, "function '" + e.label.name + "' lacks a self parameter");
      if (e.fn.params.size() != sig->params.size())
        throw TypeError(rule, "function '" + e.label.name + "' takes " + std::to_string(e.fn.params.size() - 1) +
                                  " argument(s), interface declares " + std::to_string(sig->params.size() - 1));
      TypeEnv body_env = env.extended(kSelf, ifaces_.sensor);
      for (std::size_t k = 1; k < e.fn.params.size(); ++k) {
        auto& p = e.fn.params[k];
        if (p.annotation && !type_equal(p.annotation, sig->params[k]))
          throw TypeError(rule, "parameter '" + p.name.name + "' of '" + e.label.name + "' is annotated wrongly",
                          sig->params[k], p.annotation);
        body_env = body_env.extended(p.name, sig->params[k]);
      }
      if (e.fn.ret && !type_equal(e.fn.ret, sig->ret))
        throw TypeError(rule, "return annotation of '" + e.label.name + "' disagrees with the interface", sig->ret,
                        e.fn.ret);
      TypeRef got;
      try {
        got = process(body_env, *e.fn.body);
      } catch (const TypeError& err) {
        throw TypeError(chain(rule, err.rule), "in '" + e.label.name + "': " + err.message, err.expected, err.found);
      }
      if (!type_equal(got, sig->ret))
        throw TypeError(rule, "body of '" + e.label.name + "' does not have the interface return type", sig->ret, got);
    }
  }

  // -- processes ------------------------------------------------------------

  TypeRef process(const TypeEnv& env, const Process& p) const {
    return std::visit([&](const auto& n) -> TypeRef { return on(env, n); }, p.node);
  }

  TypeRef call(const TypeEnv& env, const Value& target, const Label& l, const std::vector<Value>& args) const {
    TypeRef t1 = value(env, target);
    TypeRef head = unfold_head(t1);
    auto code = head->as<Type::Code>();
    if (!code) throw TypeError("T-call", "call target is not a code module", nullptr, t1);
    auto sig_ref = find_entry(*code, l);
    if (!sig_ref) throw TypeError("T-label", "label '" + l.name + "' not found in " + to_string(*t1));
    auto sig = (*sig_ref)->as<Type::Fun>();
    if (!sig || sig->params.empty())
      throw TypeError("T-label", "entry '" + l.name + "' is not a function taking the module");
    if (!type_equal(sig->params[0], t1))
      throw TypeError("T-call", "first parameter of '" + l.name + "' is not its module type", t1, sig->params[0]);
    if (args.size() + 1 != sig->params.size())
      throw TypeError("T-call", "'" + l.name + "' expects " + std::to_string(sig->params.size() - 1) +
                                    " argument(s), found " + std::to_string(args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto got = value(env, args[i]);
      if (!type_equal(got, sig->params[i + 1]))
        throw TypeError("T-call", "argument " + std::to_string(i + 1) + " of '" + l.name + "'", sig->params[i + 1],
                        got);
    }
    return sig->ret;
  }

  /// sensor.l(args) must type, with result {} when `must_be_unit`.
  void local_call(const TypeEnv& env, const Label& l, const std::vector<Value>& args, const std::string& rule,
                  bool must_be_unit) const {
    TypeRef r;
    try {
      r = call(env, val::sensor(), l, args);
    } catch (const TypeError& err) {
      throw TypeError(chain(rule, err.rule), err.message, err.expected, err.found);
    }
    if (must_be_unit && !type_equal(r, ty::unit()))
      throw TypeError(rule, "'" + l.name + "' must return {}", ty::unit(), r);
  }

 private:
  const Interfaces& ifaces_;

  static std::string label_of_pending(const ModuleValue& m, const std::vector<TypeRef>& rets) {
    for (std::size_t i = 0; i < m.entries.size(); ++i)
      if (!rets[i]) return m.entries[i].label.name;
    return "?";
  }

  void expect(const std::string& rule, const std::string& what, const TypeRef& want, const TypeRef& got) const {
    if (!type_equal(want, got)) throw TypeError(rule, what, want, got);
  }

  TypeRef on(const TypeEnv& env, const Process::Val& n) const { return value(env, n.value); }

  TypeRef on(const TypeEnv& env, const Process::Call& n) const { return call(env, n.target, n.label, n.args); }

  TypeRef on(const TypeEnv& env, const Process::Extern& n) const {
    auto sig_ref = ifaces_.find_extern(n.label);
    if (!sig_ref) throw TypeError("T-extern", "undeclared extern '" + n.label.name + "'");
    auto sig = (*sig_ref)->as<Type::Fun>();
    if (n.args.size() != sig->params.size())
      throw TypeError("T-extern", "extern '" + n.label.name + "' expects " + std::to_string(sig->params.size()) +
                                      " argument(s), found " + std::to_string(n.args.size()));
    for (std::size_t i = 0; i < n.args.size(); ++i)
      expect("T-extern", "argument " + std::to_string(i + 1) + " of extern '" + n.label.name + "'", sig->params[i],
             value(env, n.args[i]));
    return sig->ret;
  }

  TypeRef on(const TypeEnv& env, const Process::Send& n) const {
    local_call(env, n.label, n.args, "T-send", true);
    return ty::unit();
  }

  TypeRef on(const TypeEnv&, const Process::Receive&) const { return ty::unit(); }

  TypeRef on(const TypeEnv& env, const Process::Timer& n) const {
    local_call(env, n.label, n.args, "T-timer", true);
    expect("T-timer", "timer period", ty::int_(), value(env, n.period));
    expect("T-timer", "timer duration", ty::int_(), value(env, n.duration));
    return ty::unit();
  }

  TypeRef on(const TypeEnv& env, const Process::Install& n) const {
    TypeRef t1 = value(env, n.target);
    TypeRef head = unfold_head(t1);
    auto code = head->as<Type::Code>();
    if (!code) throw TypeError("T-sInstall/T-mInstall", "install target is not a code module", nullptr, t1);
    if (code->kind == CodeKind::Sensor) {
      expect("T-sInstall", "install target", ifaces_.sensor, t1);
      auto m = n.source.module();
      if (!m)
        throw TypeError("T-sInstall", "source of a sensor install must be a module literal", nullptr,
                        value(env, n.source));
      module_against_interface(env, *m, "T-sInstall");
      return ty::unit();
    }
    TypeRef t2 = value(env, n.source);
    TypeRef head2 = unfold_head(t2);
    auto code2 = head2->as<Type::Code>();
    if (!code2 || code2->kind != CodeKind::Anonymous)
      throw TypeError("T-mInstall", "installed value is not an anonymous module", nullptr, t2);
    // Shared labels must agree, the module parameter aside.
    for (auto& [l, sig] : code->entries) {
      auto other = find_entry(*code2, l);
      if (!other) continue;
      auto a = sig->as<Type::Fun>();
      auto b = (*other)->as<Type::Fun>();
      bool same = a->params.size() == b->params.size() && type_equal(a->ret, b->ret);
      for (std::size_t i = 1; same && i < a->params.size(); ++i) same = type_equal(a->params[i], b->params[i]);
      if (!same) throw TypeError("T-mInstall", "modules disagree on the type of '" + l.name + "'", sig, *other);
    }
    return code_type_sum(t1, t2);
  }

  TypeRef on(const TypeEnv& env, const Process::Let& n) const {
    TypeRef t1 = process(env, *n.bound);
    return process(env.extended(n.var, t1), *n.body);
  }

  TypeRef on(const TypeEnv& env, const Process::If& n) const {
    expect("T-if", "condition", ty::bool_(), value(env, n.cond));
    TypeRef a = process(env, *n.then_branch);
    TypeRef b = process(env, *n.else_branch);
    if (!type_equal(a, b)) throw TypeError("T-if", "branches have different types", a, b);
    return a;
  }
};

}  // namespace detail

inline TypeRef check_value(const Interfaces& ifaces, const TypeEnv& env, const Value& v) {
  return detail::Checker(ifaces).value(env, v);
}

inline TypeRef check_process(const Interfaces& ifaces, const TypeEnv& env, const Process& p) {
  return detail::Checker(ifaces).process(env, p);
}
inline TypeRef check_process(const Interfaces& ifaces, const TypeEnv& env, const ProcPtr& p) {
  return check_process(ifaces, env, *p);
}

/// Queues of one sensor: run-queue processes, messages as local calls,
/// timer entries as local calls with integer fields.
inline std::vector<TypeError> check_queues(const Interfaces& ifaces, const SensorState& s) {
  std::vector<TypeError> errors;
  detail::Checker c(ifaces);
  const TypeEnv empty;
  auto at = [&](const std::string& where, auto&& f) {
    try {
      f();
    } catch (TypeError& e) {
      e.location = s.id + ": " + where;
      errors.push_back(std::move(e));
    }
  };
  for (std::size_t i = 0; i < s.run_queue.size(); ++i)
    at("run-queue[" + std::to_string(i) + "]", [&] {
      try {
        c.process(empty, *s.run_queue[i]);
      } catch (const TypeError& e) {
        throw TypeError(detail::chain("T-run-queue", e.rule), e.message, e.expected, e.found);
      }
    });
  auto messages = [&](const std::deque<Packet>& q, const char* name) {
    for (std::size_t i = 0; i < q.size(); ++i)
      at(std::string(name) + "[" + std::to_string(i) + "]",
         [&] { c.local_call(empty, q[i].message.label, q[i].message.args, "T-comm-queue", false); });
  };
  messages(s.inbox, "inbox");
  messages(s.outbox, "outbox");
  for (std::size_t i = 0; i < s.timers.size(); ++i)
    at("timers[" + std::to_string(i) + "]", [&] {
      c.local_call(empty, s.timers[i].label, s.timers[i].args, "T-event-queue", false);
      if (s.timers[i].period < 1) throw TypeError("T-event-queue", "timer period must be at least 1");
    });
  return errors;
}

/// One sensor: running process, installed module, queues, clock.
inline std::vector<TypeError> check_sensor(const Interfaces& ifaces, const SensorState& s) {
  std::vector<TypeError> errors;
  detail::Checker c(ifaces);
  const TypeEnv empty;
  try {
    c.process(empty, *s.running);
  } catch (TypeError& e) {
    e.location = s.id + ": running";
    errors.push_back(std::move(e));
  }
  try {
    c.module_against_interface(empty, s.installed, "T-sensor");
  } catch (TypeError& e) {
    e.location = s.id + ": installed";
    errors.push_back(std::move(e));
  }
  if (s.clock < 0) errors.emplace_back("T-sensor", "negative clock", nullptr, nullptr, s.id + ": clock");
  auto q = check_queues(ifaces, s);
  errors.insert(errors.end(), std::make_move_iterator(q.begin()), std::make_move_iterator(q.end()));
  return errors;
}

/// Every free and captive sensor.
inline std::vector<TypeError> check_network(const Interfaces& ifaces, const Network& n) {
  std::vector<TypeError> errors;
  for (auto* s : n.all_sensors()) {
    auto e = check_sensor(ifaces, *s);
    errors.insert(errors.end(), std::make_move_iterator(e.begin()), std::make_move_iterator(e.end()));
  }
  return errors;
}

}  // namespace callas
