#pragma once

// Seeded random generation of syntax and types, shared by the property
// suites. Draws use `engine() % n` so that streams are identical across
// standard libraries.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "callas/ast.hpp"
#include "callas/types.hpp"

namespace callas {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool chance(unsigned percent) { return below(100) < percent; }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

 private:
  std::mt19937_64 engine_;
};

namespace gen {

inline const std::vector<std::string>& var_pool() {
  static const std::vector<std::string> v{"x", "y", "z", "a", "b", "val", "mac", "t"};
  return v;
}
inline const std::vector<std::string>& label_pool() {
  static const std::vector<std::string> v{"f", "g", "h", "gather", "setup", "sample", "max_data"};
  return v;
}

inline double any_float(Rng& r) {
  static const std::vector<double> specials{0.0, 0.5, -2.25, 1e-7, 3.0e21, 123.456};
  if (r.chance(40)) return r.pick(specials);
  return static_cast<double>(r.range(-100000, 100000)) / 64.0;
}

inline std::string any_string(Rng& r) {
  static const std::string alphabet = "ab Z09_-\"\\\n\t";
  std::string s;
  auto n = r.below(6);
  for (std::size_t i = 0; i < n; ++i) s += alphabet[r.below(alphabet.size())];
  return s;
}

inline Value any_builtin(Rng& r) {
  switch (r.below(4)) {
    case 0: return val::integer(r.range(-1000, 1000));
    case 1: return val::real(any_float(r));
    case 2: return val::boolean(r.chance(50));
    default: return val::string(any_string(r));
  }
}

TypeRef any_type(Rng& r, int depth, std::vector<std::string>& in_scope);

ProcPtr any_process(Rng& r, int depth, std::vector<std::string>& scope);

/// An arbitrary (not necessarily well-typed) module literal.
inline ModuleValue any_module(Rng& r, int depth, std::vector<std::string>& scope) {
  ModuleValue m;
  auto n = r.below(3);
  auto labels = label_pool();
  for (std::size_t i = 0; i < n; ++i) {
    auto idx = r.below(labels.size());
    Label l{labels[idx]};
    labels.erase(labels.begin() + static_cast<long>(idx));
    FunctionDef f;
    f.params.push_back(Param{kSelf, nullptr});
    auto pool = var_pool();
    auto arity = r.below(3);
    for (std::size_t k = 0; k < arity; ++k) {
      auto j = r.below(pool.size());
      TypeRef ann;
      if (r.chance(50)) {
        std::vector<std::string> none;
        ann = any_type(r, 1, none);
      }
      f.params.push_back(Param{Variable{pool[j]}, ann});
      pool.erase(pool.begin() + static_cast<long>(j));
    }
    if (r.chance(30)) {
      std::vector<std::string> none;
      f.ret = any_type(r, 1, none);
    }
    auto saved = scope.size();
    for (auto& p : f.params) scope.push_back(p.name.name);
    f.body = any_process(r, depth - 1, scope);
    scope.resize(saved);
    m.entries.push_back(ModuleEntry{l, std::move(f)});
  }
  return m;
}

/// Values; variables come from `scope` when `closed`, else from the pool.
inline Value any_value(Rng& r, int depth, std::vector<std::string>& scope, bool closed = true) {
  auto k = r.below(10);
  if (k < 4) return any_builtin(r);
  if (k < 7) {
    if (!closed && r.chance(30)) return val::var(r.pick(var_pool()));
    if (!scope.empty()) return val::var(r.pick(scope));
    return any_builtin(r);
  }
  if (k < 8) return val::sensor();
  if (depth <= 0) return val::unit();
  return val::module(any_module(r, depth, scope));
}

inline std::vector<Value> any_args(Rng& r, int depth, std::vector<std::string>& scope) {
  std::vector<Value> out;
  auto n = r.below(4);
  for (std::size_t i = 0; i < n; ++i) out.push_back(any_value(r, depth - 1, scope));
  return out;
}

/// Processes drawn from every syntactic form; variables are bound unless the
/// caller seeds `scope` with free names.
inline ProcPtr any_process(Rng& r, int depth, std::vector<std::string>& scope) {
  auto lab = [&] { return Label{r.pick(label_pool())}; };
  auto k = r.below(depth <= 0 ? 6 : 10);
  switch (k) {
    case 0: return proc::value(any_value(r, depth, scope));
    case 1: return proc::call(any_value(r, depth - 1, scope), lab(), any_args(r, depth, scope));
    case 2: return proc::external(lab(), any_args(r, depth, scope));
    case 3: return proc::send(lab(), any_args(r, depth, scope));
    case 4: return proc::receive();
    case 5:
      return proc::timer(lab(), any_args(r, depth, scope), any_value(r, 0, scope), any_value(r, 0, scope));
    case 6: return proc::install(any_value(r, depth - 1, scope), any_value(r, depth - 1, scope));
    case 7:
    case 8: {
      Variable x{r.pick(var_pool())};
      auto bound = any_process(r, depth - 1, scope);
      scope.push_back(x.name);
      auto body = any_process(r, depth - 1, scope);
      scope.pop_back();
      return proc::let(x, bound, body);
    }
    default:
      return proc::if_(any_value(r, 0, scope), any_process(r, depth - 1, scope), any_process(r, depth - 1, scope));
  }
}

inline ProcPtr any_process(Rng& r, int depth) {
  std::vector<std::string> scope;
  return any_process(r, depth, scope);
}

/// Closed contractive types. Type variables only occur under a binder and
/// never as the immediate body of a mu.
inline TypeRef any_type(Rng& r, int depth, std::vector<std::string>& in_scope) {
  static const std::vector<BaseKind> bases{BaseKind::Int, BaseKind::Float, BaseKind::Bool, BaseKind::String};
  auto k = r.below(depth <= 0 ? 2 : 6);
  if (k == 0) return ty::base(r.pick(bases));
  if (k == 1) {
    if (!in_scope.empty() && r.chance(60)) return ty::var(r.pick(in_scope));
    return ty::base(r.pick(bases));
  }
  if (k == 2) {
    std::vector<TypeRef> ps;
    auto n = r.below(3);
    for (std::size_t i = 0; i < n; ++i) ps.push_back(any_type(r, depth - 1, in_scope));
    return ty::fun(std::move(ps), any_type(r, depth - 1, in_scope));
  }
  // Code records, usually self-typed.
  const bool recursive = k != 3;
  std::string var = "a" + std::to_string(in_scope.size());
  if (recursive) in_scope.push_back(var);
  std::vector<std::pair<Label, TypeRef>> es;
  auto labels = label_pool();
  auto n = r.below(4);
  for (std::size_t i = 0; i < n; ++i) {
    auto idx = r.below(labels.size());
    std::vector<TypeRef> ps;
    if (recursive) ps.push_back(ty::var(var));
    auto arity = r.below(3);
    for (std::size_t j = 0; j < arity; ++j) ps.push_back(any_type(r, depth - 1, in_scope));
    es.emplace_back(Label{labels[idx]}, ty::fun(std::move(ps), any_type(r, depth - 1, in_scope)));
    labels.erase(labels.begin() + static_cast<long>(idx));
  }
  auto body = ty::code(r.chance(30) ? CodeKind::Sensor : CodeKind::Anonymous, std::move(es));
  if (!recursive) return body;
  in_scope.pop_back();
  return ty::rec(var, body);
}

inline TypeRef any_type(Rng& r, int depth) {
  std::vector<std::string> scope;
  return any_type(r, depth, scope);
}

/// A syntactically different but equal type: unfolds some mu-binders and
/// renames others. `unfolds` bounds the growth.
inline TypeRef disguise(Rng& r, const TypeRef& t, int unfolds = 1) {
  if (auto rec = t->as<Type::Rec>()) {
    if (unfolds > 0 && r.chance(40)) return disguise(r, unfold(t), unfolds - 1);
    if (r.chance(50)) {
      std::string fresh = rec->var + "'";
      return ty::rec(fresh, disguise(r, subst_type(rec->body, rec->var, ty::var(fresh)), unfolds));
    }
    return ty::rec(rec->var, disguise(r, rec->body, unfolds));
  }
  if (auto f = t->as<Type::Fun>()) {
    std::vector<TypeRef> ps;
    for (auto& p : f->params) ps.push_back(disguise(r, p, unfolds));
    return ty::fun(std::move(ps), disguise(r, f->ret, unfolds));
  }
  if (auto c = t->as<Type::Code>()) {
    std::vector<std::pair<Label, TypeRef>> es;
    for (auto& e : c->entries) es.emplace_back(e.first, disguise(r, e.second, unfolds));
    if (es.size() > 1 && r.chance(50)) std::swap(es.front(), es.back());
    return ty::code(c->kind, std::move(es));
  }
  return t;
}

}  // namespace gen
}  // namespace callas
