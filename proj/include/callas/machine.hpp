#pragma once

// Small-step reduction of a single sensor.
//
// Rule selection is deterministic: a due timer entry (nextAt == clock) is
// served first, in table order; otherwise the redex of the running process
// decides; a running value pulls the next process off the run-queue or
// idles.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "callas/ast.hpp"
#include "callas/state.hpp"
#include "callas/syntax.hpp"

namespace callas {

enum class Rule {
  Extern,
  InstallSensor,
  InstallModule,
  Send,
  Receive,
  NoMessage,
  Idle,
  Next,
  Move,
  Let,
  CallSensor,
  CallModule,
  NoFunction,
  Timer,
  Trigger,
  Expire,
  IfTrue,
  IfFalse,
  Broadcast,
  Release,
  Stuck,
};

inline const std::vector<std::pair<Rule, std::string_view>>& rule_names() {
  static const std::vector<std::pair<Rule, std::string_view>> names{
      {Rule::Extern, "extern"},         {Rule::InstallSensor, "install-sensor"},
      {Rule::InstallModule, "install-module"}, {Rule::Send, "send"},
      {Rule::Receive, "receive"},       {Rule::NoMessage, "no-message"},
      {Rule::Idle, "idle"},             {Rule::Next, "next"},
      {Rule::Move, "move"},             {Rule::Let, "let"},
      {Rule::CallSensor, "call-sensor"}, {Rule::CallModule, "call-module"},
      {Rule::NoFunction, "no-function"}, {Rule::Timer, "timer"},
      {Rule::Trigger, "trigger"},       {Rule::Expire, "expire"},
      {Rule::IfTrue, "if-true"},        {Rule::IfFalse, "if-false"},
      {Rule::Broadcast, "broadcast"},   {Rule::Release, "release"},
      {Rule::Stuck, "stuck"},
  };
  return names;
}

inline std::string_view to_string(Rule r) {
  for (auto& [rule, name] : rule_names())
    if (rule == r) return name;
  return "?";
}

inline std::optional<Rule> rule_from_string(std::string_view s) {
  for (auto& [rule, name] : rule_names())
    if (name == s) return rule;
  return std::nullopt;
}

/// Rules that leave the clock alone.
inline bool is_clock_neutral(Rule r) {
  switch (r) {
    case Rule::Let:
    case Rule::Trigger:
    case Rule::Expire:
    case Rule::Move:
    case Rule::IfTrue:
    case Rule::IfFalse:
    case Rule::Broadcast:
    case Rule::Release:
    case Rule::Stuck:
      return true;
    default:
      return false;
  }
}

/// Why no rule applies. The first four are the run-time error shapes; the
/// rest come from ill-typed data the error relation does not classify.
enum class StuckReason {
  BadCallTarget,
  UnknownLabel,
  ArityMismatch,
  BadInstall,
  NonBoolCondition,
  ExternFailure,
  BadTimerFields,
};

inline std::string_view to_string(StuckReason r) {
  switch (r) {
    case StuckReason::BadCallTarget: return "bad-call-target";
    case StuckReason::UnknownLabel: return "unknown-label";
    case StuckReason::ArityMismatch: return "arity-mismatch";
    case StuckReason::BadInstall: return "bad-install";
    case StuckReason::NonBoolCondition: return "non-bool-condition";
    case StuckReason::ExternFailure: return "extern-failure";
    case StuckReason::BadTimerFields: return "bad-timer-fields";
  }
  return "?";
}

inline bool is_error_shape(StuckReason r) {
  return r == StuckReason::BadCallTarget || r == StuckReason::UnknownLabel || r == StuckReason::ArityMismatch ||
         r == StuckReason::BadInstall;
}

/// Source of external function results. Implementations must return closed
/// values and be deterministic in (sensor, label, args, clock, own cursor).
class ExternEnv {
 public:
  virtual ~ExternEnv() = default;
  /// nullopt when the call cannot be served; the sensor then gets stuck.
  virtual std::optional<Value> dispatch(const std::string& sensor, const Label& label, const std::vector<Value>& args,
                                        Clock clock) = 0;
};

/// The reserved externs behind the binary operators, on ints.
inline std::optional<Value> operator_extern(const Label& label, const std::vector<Value>& args) {
  if (args.size() != 2) return std::nullopt;
  auto a = args[0].builtin(), b = args[1].builtin();
  if (!a || !b) return std::nullopt;
  auto x = std::get_if<std::int64_t>(&a->v), y = std::get_if<std::int64_t>(&b->v);
  if (!x || !y) return std::nullopt;
  // Wrapping arithmetic: overflow must not be undefined behaviour.
  auto wrap = [](unsigned long long v) { return val::integer(static_cast<std::int64_t>(v)); };
  auto ux = static_cast<unsigned long long>(*x), uy = static_cast<unsigned long long>(*y);
  const auto& n = label.name;
  if (n == "gt") return val::boolean(*x > *y);
  if (n == "lt") return val::boolean(*x < *y);
  if (n == "eq") return val::boolean(*x == *y);
  if (n == "add") return wrap(ux + uy);
  if (n == "sub") return wrap(ux - uy);
  if (n == "mul") return wrap(ux * uy);
  return std::nullopt;
}

inline bool is_operator_extern(const Label& l) {
  for (auto& [sym, name] : operator_externs())
    if (name == l.name) return true;
  return false;
}

using Detail = std::vector<std::pair<std::string, std::string>>;

struct StepOutcome {
  Rule rule = Rule::Idle;
  Clock clock = 0;  // before the step
  Detail detail;
  std::optional<StuckReason> stuck;  // set iff rule == Stuck
};

/// True iff no timer entry is due at `clock`.
inline bool no_event(const std::vector<TimerEntry>& timers, Clock clock) {
  for (auto& t : timers)
    if (t.next_at == clock) return false;
  return true;
}

/// Calls the timer started at some t0 makes: the immediate one plus one per
/// instant t0 + k*period that does not pass t0 + duration.
inline std::int64_t count_timer_firings(std::int64_t period, std::int64_t duration) {
  return 1 + duration / period;
}

namespace detail {

inline ProcPtr sensor_call(const Label& l, std::vector<Value> args) {
  return proc::call(val::sensor(), l, std::move(args));
}

inline const std::int64_t* as_int(const Value& v) {
  auto b = v.builtin();
  return b ? std::get_if<std::int64_t>(&b->v) : nullptr;
}

/// Binds self and the parameters of f.
inline ProcPtr instantiate(const FunctionDef& f, const Value& self, const std::vector<Value>& args) {
  Bindings b;
  b[f.params[0].name] = self;
  for (std::size_t i = 0; i < args.size(); ++i) b[f.params[i + 1].name] = args[i];
  return substitute(f.body, b);
}

}  // namespace detail

/// Applies exactly one rule to `s` in place. When no rule applies `s` is
/// left unchanged and the outcome carries the reason.
inline StepOutcome sensor_step(SensorState& s, ExternEnv& env) {
  StepOutcome out;
  out.clock = s.clock;

  // Timers first.
  for (std::size_t i = 0; i < s.timers.size(); ++i) {
    auto& t = s.timers[i];
    if (t.next_at != s.clock) continue;
    out.detail = {{"call", pretty_print(Message{t.label, t.args})}};
    if (s.clock > t.expire_at) {
      out.rule = Rule::Expire;
      s.timers.erase(s.timers.begin() + static_cast<long>(i));
    } else {
      out.rule = Rule::Trigger;
      s.run_queue.push_front(detail::sensor_call(t.label, t.args));
      t.next_at += t.period;
      out.detail.emplace_back("next_at", std::to_string(t.next_at));
    }
    return out;
  }

  auto stuck = [&](StuckReason why, const ProcPtr& redex) {
    out.rule = Rule::Stuck;
    out.stuck = why;
    out.detail = {{"reason", std::string(to_string(why))}, {"redex", pretty_print(redex)}};
    return out;
  };

  if (auto v = s.running->as<Process::Val>()) {
    (void)v;
    if (!s.run_queue.empty()) {
      out.rule = Rule::Next;
      s.running = s.run_queue.front();
      s.run_queue.pop_front();
      out.detail = {{"process", pretty_print(s.running)}};
    } else {
      out.rule = Rule::Idle;
    }
    ++s.clock;
    return out;
  }

  auto d = decompose(s.running);
  const ProcPtr& redex = d.redex;
  ProcPtr result;
  bool tick = true;

  if (auto n = redex->as<Process::Let>()) {
    out.rule = Rule::Let;
    tick = false;
    auto bound = n->bound->as<Process::Val>()->value;
    out.detail = {{"var", n->var.name}, {"value", pretty_print(bound)}};
    result = substitute(n->body, {{n->var, bound}});
  } else if (auto n = redex->as<Process::Extern>()) {
    auto r = env.dispatch(s.id, n->label, n->args, s.clock);
    if (!r || !is_closed(*r)) return stuck(StuckReason::ExternFailure, redex);
    out.rule = Rule::Extern;
    out.detail = {{"call", pretty_print(Message{n->label, n->args})}, {"result", pretty_print(*r)}};
    result = proc::value(*r);
  } else if (auto n = redex->as<Process::Install>()) {
    const ModuleValue* target = n->target.module();
    if (!target && !n->target.is_sensor()) return stuck(StuckReason::BadInstall, redex);
    ModuleValue source;
    if (auto m = n->source.module()) source = *m;
    else if (n->source.is_sensor()) source = s.installed;
    else return stuck(StuckReason::BadInstall, redex);
    out.detail = {{"labels", [&] {
                     std::string ls;
                     for (auto& e : source.entries) ls += (ls.empty() ? "" : ",") + e.label.name;
                     return ls;
                   }()}};
    if (n->target.is_sensor()) {
      out.rule = Rule::InstallSensor;
      s.installed = module_sum(s.installed, source);
      result = proc::unit();
    } else {
      out.rule = Rule::InstallModule;
      result = proc::value(val::module(module_sum(*target, source)));
    }
  } else if (auto n = redex->as<Process::Send>()) {
    out.rule = Rule::Send;
    Message m{n->label, n->args};
    out.detail = {{"message", pretty_print(m)}};
    s.outbox.push_back(Packet{std::move(m), MessageId{s.id, s.next_seq++}});
    result = proc::unit();
  } else if (redex->as<Process::Receive>()) {
    if (s.inbox.empty()) {
      out.rule = Rule::NoMessage;
    } else {
      out.rule = Rule::Receive;
      Packet p = std::move(s.inbox.front());
      s.inbox.pop_front();
      out.detail = {{"message", pretty_print(p.message)}};
      s.run_queue.push_back(detail::sensor_call(p.message.label, std::move(p.message.args)));
    }
    result = proc::unit();
  } else if (auto n = redex->as<Process::Call>()) {
    out.detail = {{"call", pretty_print(Message{n->label, n->args})}};
    if (n->target.is_sensor()) {
      const FunctionDef* f = s.installed.find(n->label);
      if (!f) {
        // The function may not have arrived yet: defer the whole process.
        out.rule = Rule::NoFunction;
        s.run_queue.push_back(s.running);
        s.running = proc::unit();
        ++s.clock;
        return out;
      }
      if (f->params.size() != n->args.size() + 1) return stuck(StuckReason::ArityMismatch, redex);
      out.rule = Rule::CallSensor;
      result = detail::instantiate(*f, val::sensor(), n->args);
    } else if (auto m = n->target.module()) {
      const FunctionDef* f = m->find(n->label);
      if (!f) return stuck(StuckReason::UnknownLabel, redex);
      if (f->params.size() != n->args.size() + 1) return stuck(StuckReason::ArityMismatch, redex);
      out.rule = Rule::CallModule;
      result = detail::instantiate(*f, n->target, n->args);
    } else {
      return stuck(StuckReason::BadCallTarget, redex);
    }
  } else if (auto n = redex->as<Process::Timer>()) {
    auto period = detail::as_int(n->period);
    auto duration = detail::as_int(n->duration);
    if (!period || !duration) return stuck(StuckReason::BadTimerFields, redex);
    const Clock p = std::max<std::int64_t>(*period, 1);
    const Clock dur = std::max<std::int64_t>(*duration, 0);
    out.rule = Rule::Timer;
    s.timers.push_back(TimerEntry{n->label, n->args, p, s.clock + dur, s.clock + p});
    s.run_queue.push_front(detail::sensor_call(n->label, n->args));
    out.detail = {{"call", pretty_print(Message{n->label, n->args})},
                  {"period", std::to_string(p)},
                  {"expire_at", std::to_string(s.clock + dur)}};
    result = proc::unit();
  } else if (auto n = redex->as<Process::If>()) {
    auto b = n->cond.builtin();
    auto c = b ? std::get_if<bool>(&b->v) : nullptr;
    if (!c) return stuck(StuckReason::NonBoolCondition, redex);
    out.rule = *c ? Rule::IfTrue : Rule::IfFalse;
    tick = false;
    result = *c ? n->then_branch : n->else_branch;
  } else {
    throw InterpreterError("decompose returned a value redex");
  }

  s.running = recompose(d.path, std::move(result));
  if (tick) ++s.clock;
  return out;
}

/// Moves the sensor; the clock does not change.
inline StepOutcome sensor_move(SensorState& s, Position to) {
  StepOutcome out;
  out.rule = Rule::Move;
  out.clock = s.clock;
  std::ostringstream os;
  os << to.x << "," << to.y;
  out.detail = {{"to", os.str()}};
  s.position = to;
  return out;
}

}  // namespace callas
