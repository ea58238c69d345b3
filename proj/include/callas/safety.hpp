#pragma once

// The run-time error relation, a generator of well-typed networks, a
// shrinker, and the subject-reduction and type-safety properties.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "callas/gen.hpp"
#include "callas/machine.hpp"
#include "callas/network.hpp"
#include "callas/typecheck.hpp"

namespace callas {

// ---------------------------------------------------------------------------
// Run-time errors

enum class ErrKind { BadCallTarget, UnknownOrArity, BadInstallTarget };

inline std::string_view err_rule(ErrKind k) {
  switch (k) {
    case ErrKind::BadCallTarget: return "eCall";
    case ErrKind::UnknownOrArity: return "eCFunction";
    case ErrKind::BadInstallTarget: return "eInstall";
  }
  return "?";
}

struct ErrReport {
  std::string sensor;
  ErrKind kind;
  std::string snippet;  // the offending redex, printed
  std::string rule() const { return std::string(err_rule(kind)); }
  std::string describe() const { return sensor + ": " + rule() + ": " + snippet; }
};

/// Classifies the redex of one sensor's running process. Written from the
/// error rules, independently of sensor_step, so the two can be compared.
inline std::optional<ErrReport> sensor_err(const SensorState& s) {
  const ProcPtr redex = decompose(s.running).redex;
  auto report = [&](ErrKind k) { return ErrReport{s.id, k, pretty_print(redex)}; };
  if (auto c = redex->as<Process::Call>()) {
    if (c->target.is_builtin()) return report(ErrKind::BadCallTarget);
    const FunctionDef* f = nullptr;
    if (auto m = c->target.module()) {
      f = m->find(c->label);
      if (!f) return report(ErrKind::UnknownOrArity);
    } else if (c->target.is_sensor()) {
      f = s.installed.find(c->label);  // absent: deferred, not an error
    }
    if (f && f->params.size() != c->args.size() + 1) return report(ErrKind::UnknownOrArity);
  } else if (auto i = redex->as<Process::Install>()) {
    if (i->target.is_builtin() || i->source.is_builtin()) return report(ErrKind::BadInstallTarget);
  }
  return std::nullopt;
}

/// First error in id order, captives included.
inline std::optional<ErrReport> check_err(const Network& n) {
  for (auto* s : n.all_sensors())
    if (auto e = sensor_err(*s)) return e;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Externs answered from their declared types

/// Answers every declared extern with a value of its return type.
/// time/getTime give the clock, mac the sensor id, operators compute.
class TypedEnv : public ExternEnv {
 public:
  explicit TypedEnv(Interfaces ifaces) : ifaces_(std::move(ifaces)) {}

  std::optional<Value> dispatch(const std::string& sensor, const Label& l, const std::vector<Value>& args,
                                Clock clock) override {
    if (is_operator_extern(l)) return operator_extern(l, args);
    auto sig = ifaces_.find_extern(l);
    if (!sig) return std::nullopt;
    if (l.name == "time" || l.name == "getTime") return val::integer(clock);
    auto ret = (*sig)->as<Type::Fun>()->ret;
    auto b = ret->as<Type::Base>();
    if (!b) {
      if (type_equal(ret, ty::unit())) return val::unit();
      if (type_equal(ret, ifaces_.sensor)) return val::sensor();
      return std::nullopt;
    }
    const auto h = static_cast<std::int64_t>(std::hash<std::string>{}(sensor + l.name) % 97);
    switch (b->kind) {
      case BaseKind::Int: return val::integer((h + clock * 7) % 100);
      case BaseKind::Bool: return val::boolean((h + clock) % 2 == 0);
      case BaseKind::Float: return val::real(static_cast<double>(clock) / 2);
      case BaseKind::String: return val::string(sensor);
    }
    return std::nullopt;
  }

 private:
  Interfaces ifaces_;
};

// ---------------------------------------------------------------------------
// Typed generation

struct GenParams {
  std::uint64_t seed = 0;
  int max_sensors = 5;
  int max_module_size = 4;  // entries in a generated sensor interface
  int max_depth = 3;
  std::optional<Interfaces> interfaces;  // drawn per seed when absent
};

/// Externs used for generation.
inline std::vector<std::pair<Label, TypeRef>> generator_externs() {
  std::vector<std::pair<Label, TypeRef>> es{
      {Label{"time"}, ty::fun({}, ty::int_())},
      {Label{"data"}, ty::fun({}, ty::int_())},
      {Label{"flag"}, ty::fun({}, ty::bool_())},
      {Label{"mac"}, ty::fun({}, ty::string_())},
      {Label{"log"}, ty::fun({ty::int_(), ty::int_()}, ty::unit())},
  };
  for (auto& op : Interfaces::operator_signatures()) es.push_back(op);
  return es;
}

/// A random sensor interface with 1..max_entries entries, at least one of
/// which returns {} so that sends and timers are possible.
inline Interfaces random_interfaces(Rng& r, int max_entries) {
  static const std::vector<TypeRef> params{ty::int_(), ty::bool_(), ty::string_()};
  static const std::vector<TypeRef> rets{ty::unit(), ty::unit(), ty::int_(), ty::bool_()};
  auto labels = gen::label_pool();
  const auto n = 1 + r.below(static_cast<std::uint64_t>(std::max(1, max_entries)));
  std::vector<std::pair<Label, TypeRef>> sigs;
  for (std::size_t i = 0; i < n; ++i) {
    auto idx = r.below(labels.size());
    std::vector<TypeRef> ps;
    for (auto k = r.below(3); k > 0; --k) ps.push_back(r.pick(params));
    sigs.emplace_back(Label{labels[idx]}, ty::fun(std::move(ps), i == 0 ? ty::unit() : r.pick(rets)));
    labels.erase(labels.begin() + static_cast<long>(idx));
  }
  Interfaces I;
  I.externs = generator_externs();
  I.sensor = Interfaces::make_sensor_interface(sigs);
  return I;
}

/// Builds terms that are well-typed by construction.
class TypedGen {
 public:
  using Env = std::vector<std::pair<std::string, TypeRef>>;

  struct Sig {
    Label label;
    std::vector<TypeRef> params;  // without the module parameter
    TypeRef ret;
  };

  TypedGen(Rng& r, const Interfaces& ifaces) : r_(r), I_(ifaces) {
    for (auto& [l, t] : I_.sensor_record().entries) {
      auto f = t->as<Type::Fun>();
      sensor_sigs_.push_back(Sig{l, {f->params.begin() + 1, f->params.end()}, f->ret});
    }
    for (auto& [l, t] : I_.externs) {
      auto f = t->as<Type::Fun>();
      extern_sigs_.push_back(Sig{l, f->params, f->ret});
    }
  }

  const std::vector<Sig>& sensor_sigs() const { return sensor_sigs_; }

  TypeRef any_value_type() {
    switch (r_.below(5)) {
      case 0: return ty::int_();
      case 1: return ty::bool_();
      case 2: return ty::string_();
      case 3: return I_.sensor;
      default: return ty::unit();
    }
  }

  /// A closed-under-env value of type t.
  Value value(const Env& env, const TypeRef& t, int depth = 1) {
    std::vector<std::string> vars;
    for (auto& [x, xt] : env)
      if (type_equal(xt, t) && visible(env, x, xt)) vars.push_back(x);
    if (!vars.empty() && r_.chance(45)) return val::var(r_.pick(vars));
    if (auto b = t->as<Type::Base>()) {
      switch (b->kind) {
        case BaseKind::Int: return val::integer(r_.range(-3, 20));
        case BaseKind::Bool: return val::boolean(r_.chance(50));
        case BaseKind::Float: return val::real(static_cast<double>(r_.range(0, 8)) / 4);
        case BaseKind::String: return val::string(r_.pick(std::vector<std::string>{"", "a", "mac-1", "x y"}));
      }
    }
    if (type_equal(t, I_.sensor)) return val::sensor();
    if (type_equal(t, ty::unit())) return val::unit();
    auto head = unfold_head(t);
    if (auto c = head->as<Type::Code>(); c && c->kind == CodeKind::Anonymous) {
      std::vector<Sig> sigs;
      for (auto& [l, ft] : c->entries) {
        auto f = ft->as<Type::Fun>();
        sigs.push_back(Sig{l, {f->params.begin() + 1, f->params.end()}, f->ret});
      }
      return val::module(module_literal(env, sigs, depth));
    }
    if (!vars.empty()) return val::var(r_.pick(vars));
    throw InterpreterError("generator cannot build a value of type " + to_string(*t));
  }

  /// An anonymous module literal with the given signatures. Its bodies do
  /// not mention `self`.
  ModuleValue module_literal(const Env& env, const std::vector<Sig>& sigs, int depth) {
    ModuleValue m;
    Env outer;
    for (auto& b : env)
      if (b.first != kSelf.name) outer.push_back(b);
    for (auto& s : sigs) {
      FunctionDef f;
      f.params.push_back(Param{kSelf, nullptr});
      Env inner = outer;
      for (auto& p : s.params) {
        auto x = fresh("p");
        f.params.push_back(Param{Variable{x}, p});
        inner.emplace_back(x, p);
      }
      f.ret = s.ret;
      f.body = process(inner, s.ret, depth - 1);
      m.entries.push_back(ModuleEntry{s.label, std::move(f)});
    }
    return m;
  }

  /// The type T-code assigns to a literal built from `sigs`.
  static TypeRef literal_type(const std::vector<Sig>& sigs) {
    std::vector<std::pair<Label, TypeRef>> es;
    for (auto& s : sigs) {
      std::vector<TypeRef> ps{ty::var("m")};
      ps.insert(ps.end(), s.params.begin(), s.params.end());
      es.emplace_back(s.label, ty::fun(std::move(ps), s.ret));
    }
    return ty::rec("m", ty::anon(std::move(es)));
  }

  /// Random signatures for an anonymous module, one of which is `must`.
  std::vector<Sig> anon_sigs(const Sig& must, std::size_t extra) {
    std::vector<Sig> out{must};
    auto labels = gen::label_pool();
    for (std::size_t i = 0; i < extra; ++i) {
      Label l{r_.pick(labels)};
      bool dup = false;
      for (auto& s : out) dup |= s.label == l;
      if (dup) continue;
      out.push_back(Sig{l, random_params(), base_or_unit()});
    }
    return out;
  }

  /// A process of type t under env.
  ProcPtr process(const Env& env, const TypeRef& t, int depth) {
    const bool unit = type_equal(t, ty::unit());
    std::vector<const Sig*> externs, locals;
    for (auto& s : extern_sigs_)
      if (type_equal(s.ret, t)) externs.push_back(&s);
    for (auto& s : sensor_sigs_)
      if (type_equal(s.ret, t)) locals.push_back(&s);

    // Weighted menu; each entry yields a process or nullptr to retry.
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto k = r_.below(depth > 0 ? 12 : 6);
      switch (k) {
        case 0:
          return proc::value(value(env, t, depth));
        case 1:
          if (externs.empty()) break;
          return extern_call(env, *r_.pick(externs));
        case 2:
          if (locals.empty()) break;
          return local_call(env, *r_.pick(locals));
        case 3:
          if (!unit) break;
          if (auto s = pick_unit_sig()) return proc::send(s->label, args(env, s->params));
          break;
        case 4:
          if (!unit) break;
          if (r_.chance(50)) return proc::receive();
          if (auto s = pick_unit_sig())
            return proc::timer(s->label, args(env, s->params), val::integer(r_.range(1, 30)),
                               val::integer(r_.range(0, 120)));
          break;
        case 5:
          if (!unit) break;
          return proc::install(install_target(env), val::module(sensor_module(depth)));
        case 6:
        case 7: {
          auto t1 = any_value_type();
          auto bound = process(env, t1, depth - 1);
          auto x = fresh("v");
          Env inner = env;
          inner.emplace_back(x, t1);
          return proc::let(Variable{x}, bound, process(inner, t, depth - 1));
        }
        case 8:
          return proc::if_(value(env, ty::bool_()), process(env, t, depth - 1), process(env, t, depth - 1));
        case 9: {
          Sig target{Label{r_.pick(gen::label_pool())}, random_params(), t};
          auto sigs = anon_sigs(target, r_.below(2));
          auto m = module_literal(env, sigs, depth);
          return proc::call(val::module(std::move(m)), target.label, args(env, target.params));
        }
        case 10: {
          // let x = M1.install M2 in x.l(args)
          Sig target{Label{r_.pick(gen::label_pool())}, random_params(), t};
          auto left = anon_sigs(target, r_.below(2));
          std::vector<Sig> right;
          for (auto& s : left)
            if (r_.chance(40)) right.push_back(s);  // overrides agree on the signature
          auto labels = gen::label_pool();
          if (r_.chance(50)) {
            Label l{r_.pick(labels)};
            bool taken = false;
            for (auto& s : left) taken |= s.label == l;
            if (!taken) right.push_back(Sig{l, random_params(), base_or_unit()});
          }
          if (r_.chance(50)) std::swap(left, right);
          if (left.empty()) std::swap(left, right);
          auto m1 = module_literal(env, left, depth - 1);
          auto m2 = module_literal(env, right, depth - 1);
          auto x = fresh("v");
          return proc::let(Variable{x}, proc::install(val::module(std::move(m1)), val::module(std::move(m2))),
                           proc::call(val::var(x), target.label, args(env, target.params)));
        }
        default: {
          // Sequencing: a unit process then the rest.
          auto x = fresh("v");
          auto first = process(env, ty::unit(), depth - 1);
          return proc::let(Variable{x}, first, process(env, t, depth - 1));
        }
      }
    }
    return proc::value(value(env, t, depth));
  }

  /// A module for the sensor: a random subset of the interface, bodies
  /// typed with `self` bound to the interface.
  ModuleValue sensor_module(int depth, int percent = 50) {
    ModuleValue m;
    for (auto& s : sensor_sigs_) {
      if (!r_.chance(static_cast<unsigned>(percent))) continue;
      FunctionDef f;
      f.params.push_back(Param{kSelf, nullptr});
      Env env{{kSelf.name, I_.sensor}};
      for (auto& p : s.params) {
        auto x = fresh("p");
        f.params.push_back(Param{Variable{x}, r_.chance(30) ? p : nullptr});
        env.emplace_back(x, p);
      }
      f.body = process(env, s.ret, depth - 1);
      m.entries.push_back(ModuleEntry{s.label, std::move(f)});
    }
    return m;
  }

  Message message() {
    auto& s = r_.pick(sensor_sigs_);
    return Message{s.label, args({}, s.params)};
  }

  TimerEntry timer_entry(Clock clock) {
    auto& s = r_.pick(sensor_sigs_);
    const Clock period = r_.range(1, 20);
    return TimerEntry{s.label, args({}, s.params), period, clock + r_.range(0, 100), clock + r_.range(0, period)};
  }

 private:
  Rng& r_;
  const Interfaces& I_;
  std::vector<Sig> sensor_sigs_, extern_sigs_;
  int fresh_ = 0;

  std::string fresh(const char* prefix) { return prefix + std::to_string(fresh_++); }

  /// x is visible unless a later binding of the same name shadows it.
  static bool visible(const Env& env, const std::string& x, const TypeRef& t) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x) return it->second == t;
    return false;
  }

  std::vector<TypeRef> random_params() {
    static const std::vector<TypeRef> ps{ty::int_(), ty::bool_(), ty::string_()};
    std::vector<TypeRef> out;
    for (auto n = r_.below(3); n > 0; --n) out.push_back(r_.pick(ps));
    return out;
  }

  TypeRef base_or_unit() {
    static const std::vector<TypeRef> ts{ty::int_(), ty::bool_(), ty::unit()};
    return r_.pick(ts);
  }

  std::vector<Value> args(const Env& env, const std::vector<TypeRef>& ps) {
    std::vector<Value> out;
    for (auto& p : ps) out.push_back(value(env, p, 0));
    return out;
  }

  const Sig* pick_unit_sig() {
    std::vector<const Sig*> us;
    for (auto& s : sensor_sigs_)
      if (type_equal(s.ret, ty::unit())) us.push_back(&s);
    return us.empty() ? nullptr : r_.pick(us);
  }

  Value install_target(const Env& env) {
    for (auto& [x, t] : env)
      if (type_equal(t, I_.sensor) && visible(env, x, t) && r_.chance(30)) return val::var(x);
    return val::sensor();
  }

  ProcPtr extern_call(const Env& env, const Sig& s) { return proc::external(s.label, args(env, s.params)); }

  ProcPtr local_call(const Env& env, const Sig& s) {
    return proc::call(install_target(env), s.label, args(env, s.params));
  }
};

/// The interfaces gp generates against.
inline Interfaces generation_interfaces(const GenParams& gp) {
  if (gp.interfaces) return *gp.interfaces;
  Rng r(gp.seed ^ 0x5bd1e995ULL);
  return random_interfaces(r, gp.max_module_size);
}

/// A flat network that type-checks against generation_interfaces(gp).
inline Network generate_network(const GenParams& gp) {
  const Interfaces I = generation_interfaces(gp);
  Rng r(gp.seed);
  TypedGen g(r, I);
  Network n;
  const auto count = 1 + r.below(static_cast<std::uint64_t>(std::max(1, gp.max_sensors)));
  const int depth = std::max(1, gp.max_depth);
  for (std::size_t i = 0; i < count; ++i) {
    SensorState s;
    s.id = "n" + std::to_string(i);
    s.position = {static_cast<double>(r.range(0, 20)), static_cast<double>(r.range(0, 20))};
    s.clock = r.range(0, 50);
    s.installed = g.sensor_module(depth, 70);
    s.running = g.process({}, g.any_value_type(), depth);
    for (auto k = r.below(3); k > 0; --k) s.run_queue.push_back(g.process({}, g.any_value_type(), depth - 1));
    for (auto k = r.below(3); k > 0; --k) s.inbox.push_back(Packet{g.message(), MessageId{"pre" + s.id, k}});
    for (auto k = r.below(3); k > 0; --k) s.outbox.push_back(Packet{g.message(), MessageId{s.id, s.next_seq++}});
    for (auto k = r.below(3); k > 0; --k) s.timers.push_back(g.timer_entry(s.clock));
    n.nodes.push_back(NetworkNode{std::move(s), {}});
  }
  n.normalize();
  return n;
}

// ---------------------------------------------------------------------------
// Shrinking

namespace detail {

inline std::size_t count_ints(const Value& v);
inline std::size_t count_ints(const ProcPtr& p);

inline std::size_t count_ints(const std::vector<Value>& vs) {
  std::size_t n = 0;
  for (auto& v : vs) n += count_ints(v);
  return n;
}

inline std::size_t count_ints(const Value& v) {
  if (auto i = as_int(v)) return *i != 0;
  if (auto m = v.module()) {
    std::size_t n = 0;
    for (auto& e : m->entries) n += count_ints(e.fn.body);
    return n;
  }
  return 0;
}

inline std::size_t count_ints(const ProcPtr& p) {
  return std::visit(
      [](const auto& n) -> std::size_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Val>) return count_ints(n.value);
        else if constexpr (std::is_same_v<N, Process::Call>) return count_ints(n.target) + count_ints(n.args);
        else if constexpr (std::is_same_v<N, Process::Extern> || std::is_same_v<N, Process::Send>)
          return count_ints(n.args);
        else if constexpr (std::is_same_v<N, Process::Timer>)
          return count_ints(n.args) + count_ints(n.period) + count_ints(n.duration);
        else if constexpr (std::is_same_v<N, Process::Install>) return count_ints(n.target) + count_ints(n.source);
        else if constexpr (std::is_same_v<N, Process::Let>) return count_ints(n.bound) + count_ints(n.body);
        else if constexpr (std::is_same_v<N, Process::If>)
          return count_ints(n.cond) + count_ints(n.then_branch) + count_ints(n.else_branch);
        else return 0;
      },
      p->node);
}

/// Halves the k-th non-zero int literal (counting from 0); k is consumed.
class IntShrinker {
 public:
  explicit IntShrinker(std::size_t k) : k_(k) {}

  Value value(const Value& v) {
    if (auto i = as_int(v)) {
      if (*i != 0 && k_-- == 0) return val::integer(*i / 2);
      return v;
    }
    if (auto m = v.module()) {
      ModuleValue out = *m;
      for (auto& e : out.entries) e.fn.body = process(e.fn.body);
      return val::module(std::move(out));
    }
    return v;
  }

  std::vector<Value> values(const std::vector<Value>& vs) {
    std::vector<Value> out;
    for (auto& v : vs) out.push_back(value(v));
    return out;
  }

  ProcPtr process(const ProcPtr& p) {
    return std::visit(
        [&](const auto& n) -> ProcPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Process::Val>) return proc::value(value(n.value));
          else if constexpr (std::is_same_v<N, Process::Call>) {
            auto t = value(n.target);
            return proc::call(t, n.label, values(n.args));
          } else if constexpr (std::is_same_v<N, Process::Extern>) return proc::external(n.label, values(n.args));
          else if constexpr (std::is_same_v<N, Process::Send>) return proc::send(n.label, values(n.args));
          else if constexpr (std::is_same_v<N, Process::Timer>) {
            auto a = values(n.args);
            auto per = value(n.period);
            return proc::timer(n.label, a, per, value(n.duration));
          } else if constexpr (std::is_same_v<N, Process::Install>) {
            auto t = value(n.target);
            return proc::install(t, value(n.source));
          } else if constexpr (std::is_same_v<N, Process::Let>) {
            auto b = process(n.bound);
            return proc::let(n.var, b, process(n.body));
          } else if constexpr (std::is_same_v<N, Process::If>) {
            auto c = value(n.cond);
            auto a = process(n.then_branch);
            return proc::if_(c, a, process(n.else_branch));
          } else return p;
        },
        p->node);
  }

 private:
  std::size_t k_;
};

/// One-step simplifications of n, smallest-effect last.
inline std::vector<Network> shrink_candidates(const Network& n) {
  std::vector<Network> out;
  if (n.nodes.size() > 1)
    for (std::size_t i = 0; i < n.nodes.size(); ++i) {
      Network c = n;
      c.nodes.erase(c.nodes.begin() + static_cast<long>(i));
      out.push_back(std::move(c));
    }
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const SensorState& s = n.nodes[i].sensor;
    auto with = [&](auto&& edit) {
      Network c = n;
      edit(c.nodes[i].sensor);
      out.push_back(std::move(c));
    };
    auto drop_each = [&](auto member) {
      for (std::size_t k = 0; k < (s.*member).size(); ++k)
        with([&](SensorState& t) { (t.*member).erase((t.*member).begin() + static_cast<long>(k)); });
    };
    drop_each(&SensorState::run_queue);
    drop_each(&SensorState::inbox);
    drop_each(&SensorState::outbox);
    drop_each(&SensorState::timers);
    for (std::size_t k = 0; k < s.installed.entries.size(); ++k)
      with([&](SensorState& t) { t.installed.entries.erase(t.installed.entries.begin() + static_cast<long>(k)); });
    if (!same_proc(s.running, proc::unit())) with([](SensorState& t) { t.running = proc::unit(); });
    for (std::size_t k = 0; k < s.run_queue.size(); ++k)
      if (!same_proc(s.run_queue[k], proc::unit())) with([&](SensorState& t) { t.run_queue[k] = proc::unit(); });
    for (std::size_t k = 0; k < s.installed.entries.size(); ++k)
      if (!same_proc(s.installed.entries[k].fn.body, proc::unit()))
        with([&](SensorState& t) { t.installed.entries[k].fn.body = proc::unit(); });
    if (s.clock > 0 && s.timers.empty()) with([](SensorState& t) { t.clock = 0; });
    for (std::size_t k = 0; k < count_ints(s.running); ++k)
      with([&](SensorState& t) { t.running = IntShrinker(k).process(t.running); });
  }
  return out;
}

}  // namespace detail

/// Greedy shrinking: keeps taking the first candidate that is still
/// well-typed and still satisfies `fails`.
inline Network shrink(Network n, const Interfaces& ifaces, const std::function<bool(const Network&)>& fails,
                      int budget = 400) {
  bool progress = true;
  while (progress && budget > 0) {
    progress = false;
    for (auto& c : detail::shrink_candidates(n)) {
      if (--budget <= 0) break;
      if (!check_network(ifaces, c).empty()) continue;
      if (!fails(c)) continue;
      n = std::move(c);
      progress = true;
      break;
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Properties

struct Verdict {
  enum class Outcome { Pass, Fail, Rejected };
  std::string property;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;  // rounds run
  Outcome outcome = Outcome::Pass;
  std::int64_t failed_step = -1;
  std::string rule;     // tag of the last step the failing sensor took
  std::string message;  // first diagnostic
  std::optional<Network> counterexample;
  std::string counterexample_path;  // set once the counterexample is dumped

  bool passed() const { return outcome == Outcome::Pass; }

  std::string record() const {
    std::ostringstream os;
    os << "{property: " << property << ", seed: " << seed << ", steps: " << steps << ", outcome: "
       << (outcome == Outcome::Pass ? "pass" : outcome == Outcome::Fail ? "fail" : "rejected");
    if (outcome == Outcome::Fail) os << ", step: " << failed_step << ", rule: " << rule;
    if (!message.empty()) os << ", message: \"" << message << "\"";
    if (!counterexample_path.empty()) os << ", counterexample: " << counterexample_path;
    else if (counterexample) os << ", counterexample sensors: " << counterexample->nodes.size();
    os << "}";
    return os.str();
  }
};

/// Scheduler settings the properties run under; odd seeds shuffle and move.
inline SchedulerConfig property_config(std::uint64_t seed) {
  SchedulerConfig cfg;
  cfg.seed = seed;
  cfg.mode = seed % 2 ? SchedulerMode::SeededShuffle : SchedulerMode::RoundRobin;
  cfg.spontaneous_moves = seed % 2 == 1;
  cfg.radio_range = 10;
  return cfg;
}

inline RoutingPolicy property_routing(std::uint64_t seed) {
  return RoutingPolicy{seed % 3 == 2 ? RoutingKind::Flood : RoutingKind::DeliverOrRelay, seed % 5 != 4, {}};
}

namespace detail {

/// Runs `steps` rounds, calling `bad` after each; returns the failing round.
struct Failure {
  std::int64_t step;
  std::string sensor;
  std::string message;
  std::string rule;
};

inline std::optional<Failure> run_until(const Network& n, const Interfaces& I, std::uint64_t seed,
                                        std::int64_t steps,
                                        const std::function<std::optional<std::pair<std::string, std::string>>(
                                            const Network&)>& bad) {
  TypedEnv env(I);
  Simulation sim(n, property_config(seed), property_routing(seed), env);
  for (std::int64_t k = 0; k < steps; ++k) {
    auto events = sim.step();
    if (auto b = bad(sim.network())) {
      std::string rule;
      for (auto& e : events)
        if (e.sensor == b->first) rule = std::string(to_string(e.rule));
      return Failure{k, b->first, b->second, rule};
    }
  }
  return std::nullopt;
}

inline Verdict run_property(const std::string& name, const Network& n, const Interfaces& I, std::uint64_t seed,
                            std::int64_t steps,
                            const std::function<std::optional<std::pair<std::string, std::string>>(const Network&)>&
                                bad,
                            bool shrink_failures) {
  Verdict v;
  v.property = name;
  v.seed = seed;
  v.steps = steps;
  if (auto pre = check_network(I, n); !pre.empty()) {
    v.outcome = Verdict::Outcome::Rejected;
    v.message = pre.front().describe();
    return v;
  }
  if (auto b = bad(n)) {
    v.outcome = Verdict::Outcome::Fail;
    v.failed_step = -1;
    v.message = b->second;
    v.counterexample = n;
    return v;
  }
  auto f = run_until(n, I, seed, steps, bad);
  if (!f) return v;
  v.outcome = Verdict::Outcome::Fail;
  v.failed_step = f->step;
  v.rule = f->rule;
  v.message = f->message;
  v.counterexample = n;
  if (shrink_failures)
    v.counterexample = shrink(n, I, [&](const Network& c) { return run_until(c, I, seed, steps, bad).has_value(); });
  return v;
}

}  // namespace detail

/// Re-type-checks the network after every round.
inline Verdict prop_subject_reduction(const Network& n, const Interfaces& I, std::uint64_t seed, std::int64_t steps,
                                      bool shrink_failures = true) {
  return detail::run_property(
      "subject-reduction", n, I, seed, steps,
      [&](const Network& m) -> std::optional<std::pair<std::string, std::string>> {
        auto errs = check_network(I, m);
        if (errs.empty()) return std::nullopt;
        return std::pair{errs.front().location.substr(0, errs.front().location.find(':')), errs.front().describe()};
      },
      shrink_failures);
}

inline Verdict prop_subject_reduction(const GenParams& gp, std::int64_t steps) {
  return prop_subject_reduction(generate_network(gp), generation_interfaces(gp), gp.seed, steps);
}

/// Asserts check_err = none, and that no sensor is stuck, after every round.
inline Verdict prop_type_safety(const Network& n, const Interfaces& I, std::uint64_t seed, std::int64_t steps,
                                bool shrink_failures = true) {
  return detail::run_property(
      "type-safety", n, I, seed, steps,
      [&](const Network& m) -> std::optional<std::pair<std::string, std::string>> {
        if (auto e = check_err(m)) return std::pair{e->sensor, e->describe()};
        if (!m.stuck.empty()) return std::pair{*m.stuck.begin(), *m.stuck.begin() + ": stuck"};
        return std::nullopt;
      },
      shrink_failures);
}

inline Verdict prop_type_safety(const GenParams& gp, std::int64_t steps) {
  return prop_type_safety(generate_network(gp), generation_interfaces(gp), gp.seed, steps);
}

}  // namespace callas
