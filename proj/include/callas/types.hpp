#pragma once

// Type syntax: built-in types, function types, sensor-code and
// anonymous-code record types, recursive types and type variables.
// Recursive types are equi-recursive: equality ignores the distinction
// between mu a.T and its unfolding.

#include <algorithm>
#include <memory>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "callas/names.hpp"

namespace callas {

enum class BaseKind { Int, Float, Bool, String };

inline const char* to_string(BaseKind k) {
  switch (k) {
    case BaseKind::Int: return "int";
    case BaseKind::Float: return "float";
    case BaseKind::Bool: return "bool";
    case BaseKind::String: return "string";
  }
  return "?";
}

enum class CodeKind { Sensor, Anonymous };

struct Type;
using TypeRef = std::shared_ptr<const Type>;

struct Type {
  struct Base {
    BaseKind kind;
  };
  struct Fun {
    std::vector<TypeRef> params;
    TypeRef ret;
  };
  /// Record of function signatures; each entry is a Fun whose first
  /// parameter is the type of the module itself.
  struct Code {
    CodeKind kind;
    std::vector<std::pair<Label, TypeRef>> entries;
  };
  struct Rec {
    std::string var;
    TypeRef body;
  };
  struct Var {
    std::string name;
  };

  std::variant<Base, Fun, Code, Rec, Var> node;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
};

namespace ty {

inline TypeRef base(BaseKind k) { return std::make_shared<const Type>(Type{Type::Base{k}}); }
inline TypeRef int_() {
  static const TypeRef t = base(BaseKind::Int);
  return t;
}
inline TypeRef float_() {
  static const TypeRef t = base(BaseKind::Float);
  return t;
}
inline TypeRef bool_() {
  static const TypeRef t = base(BaseKind::Bool);
  return t;
}
inline TypeRef string_() {
  static const TypeRef t = base(BaseKind::String);
  return t;
}
inline TypeRef fun(std::vector<TypeRef> params, TypeRef ret) {
  return std::make_shared<const Type>(Type{Type::Fun{std::move(params), std::move(ret)}});
}
inline TypeRef code(CodeKind kind, std::vector<std::pair<Label, TypeRef>> entries) {
  return std::make_shared<const Type>(Type{Type::Code{kind, std::move(entries)}});
}
inline TypeRef anon(std::vector<std::pair<Label, TypeRef>> entries) {
  return code(CodeKind::Anonymous, std::move(entries));
}
inline TypeRef sensor_code(std::vector<std::pair<Label, TypeRef>> entries) {
  return code(CodeKind::Sensor, std::move(entries));
}
/// The empty anonymous code type `{}`, also the unit type.
inline TypeRef unit() {
  static const TypeRef t = anon({});
  return t;
}
inline TypeRef rec(std::string var, TypeRef body) {
  return std::make_shared<const Type>(Type{Type::Rec{std::move(var), std::move(body)}});
}
inline TypeRef var(std::string name) {
  return std::make_shared<const Type>(Type{Type::Var{std::move(name)}});
}

}  // namespace ty

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline void print_type(std::ostream& os, const Type& t);

inline void print_sig(std::ostream& os, const Type& t) {
  if (auto f = t.as<Type::Fun>()) {
    os << '(';
    for (std::size_t i = 0; i < f->params.size(); ++i) {
      if (i) os << ", ";
      print_type(os, *f->params[i]);
    }
    os << ") -> ";
    print_type(os, *f->ret);
  } else {
    print_type(os, t);
  }
}

inline void print_type(std::ostream& os, const Type& t) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Type::Base>) {
          os << to_string(n.kind);
        } else if constexpr (std::is_same_v<N, Type::Fun>) {
          print_sig(os, t);
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          const bool s = n.kind == CodeKind::Sensor;
          if (n.entries.empty()) {
            os << (s ? "{||}" : "{}");
            return;
          }
          os << (s ? "{| " : "{ ");
          for (std::size_t i = 0; i < n.entries.size(); ++i) {
            if (i) os << ", ";
            os << n.entries[i].first.name << ": ";
            print_sig(os, *n.entries[i].second);
          }
          os << (s ? " |}" : " }");
        } else if constexpr (std::is_same_v<N, Type::Rec>) {
          os << "mu " << n.var << ". ";
          print_type(os, *n.body);
        } else {
          os << n.name;
        }
      },
      t.node);
}

}  // namespace detail

inline std::string to_string(const Type& t) {
  std::ostringstream os;
  detail::print_type(os, t);
  return os.str();
}
inline std::string to_string(const TypeRef& t) { return t ? to_string(*t) : std::string("<none>"); }

// ---------------------------------------------------------------------------
// Syntactic operations

/// Exact syntactic identity (bound names included).
inline bool same_syntax(const TypeRef& a, const TypeRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto x = a->as<Type::Base>()) return x->kind == b->as<Type::Base>()->kind;
  if (auto x = a->as<Type::Var>()) return x->name == b->as<Type::Var>()->name;
  if (auto x = a->as<Type::Rec>()) {
    auto y = b->as<Type::Rec>();
    return x->var == y->var && same_syntax(x->body, y->body);
  }
  if (auto x = a->as<Type::Fun>()) {
    auto y = b->as<Type::Fun>();
    if (x->params.size() != y->params.size()) return false;
    for (std::size_t i = 0; i < x->params.size(); ++i)
      if (!same_syntax(x->params[i], y->params[i])) return false;
    return same_syntax(x->ret, y->ret);
  }
  auto x = a->as<Type::Code>();
  auto y = b->as<Type::Code>();
  if (x->kind != y->kind || x->entries.size() != y->entries.size()) return false;
  for (std::size_t i = 0; i < x->entries.size(); ++i)
    if (x->entries[i].first != y->entries[i].first || !same_syntax(x->entries[i].second, y->entries[i].second))
      return false;
  return true;
}

inline void free_type_vars(const TypeRef& t, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Type::Var>) {
          if (!bound.count(n.name)) out.insert(n.name);
        } else if constexpr (std::is_same_v<N, Type::Rec>) {
          const bool fresh = bound.insert(n.var).second;
          free_type_vars(n.body, bound, out);
          if (fresh) bound.erase(n.var);
        } else if constexpr (std::is_same_v<N, Type::Fun>) {
          for (auto& p : n.params) free_type_vars(p, bound, out);
          free_type_vars(n.ret, bound, out);
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          for (auto& e : n.entries) free_type_vars(e.second, bound, out);
        }
      },
      t->node);
}

inline std::set<std::string> free_type_vars(const TypeRef& t) {
  std::set<std::string> bound, out;
  free_type_vars(t, bound, out);
  return out;
}

inline bool is_closed(const TypeRef& t) { return free_type_vars(t).empty(); }

/// Replaces free occurrences of `var` by `with`. `with` must be closed, so
/// no capture can happen.
inline TypeRef subst_type(const TypeRef& t, const std::string& var, const TypeRef& with) {
  return std::visit(
      [&](const auto& n) -> TypeRef {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Type::Var>) {
          return n.name == var ? with : t;
        } else if constexpr (std::is_same_v<N, Type::Rec>) {
          if (n.var == var) return t;
          return ty::rec(n.var, subst_type(n.body, var, with));
        } else if constexpr (std::is_same_v<N, Type::Fun>) {
          std::vector<TypeRef> ps;
          ps.reserve(n.params.size());
          for (auto& p : n.params) ps.push_back(subst_type(p, var, with));
          return ty::fun(std::move(ps), subst_type(n.ret, var, with));
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          std::vector<std::pair<Label, TypeRef>> es;
          es.reserve(n.entries.size());
          for (auto& e : n.entries) es.emplace_back(e.first, subst_type(e.second, var, with));
          return ty::code(n.kind, std::move(es));
        } else {
          return t;
        }
      },
      t->node);
}

/// One unfolding step: mu a.T  ->  T{mu a.T / a}. Identity on non-mu types.
inline TypeRef unfold(const TypeRef& t) {
  if (auto r = t->as<Type::Rec>()) return subst_type(r->body, r->var, t);
  return t;
}

/// Unfolds until the head is not a mu. Requires contractiveness.
inline TypeRef unfold_head(TypeRef t) {
  while (t->as<Type::Rec>()) t = unfold(t);
  return t;
}

/// True when no mu-binder has a bare type variable (possibly behind other
/// binders) as its body.
inline bool is_contractive(const TypeRef& t) {
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Type::Rec>) {
          std::set<std::string> binders{n.var};
          TypeRef b = n.body;
          while (auto r = b->as<Type::Rec>()) {
            binders.insert(r->var);
            b = r->body;
          }
          if (auto v = b->as<Type::Var>(); v && binders.count(v->name)) return false;
          return is_contractive(n.body);
        } else if constexpr (std::is_same_v<N, Type::Fun>) {
          for (auto& p : n.params)
            if (!is_contractive(p)) return false;
          return is_contractive(n.ret);
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          for (auto& e : n.entries)
            if (!is_contractive(e.second)) return false;
          return true;
        } else {
          return true;
        }
      },
      t->node);
}

/// Entry lookup on a code record (after unfolding the head).
inline const TypeRef* find_entry(const Type::Code& c, const Label& l) {
  for (auto& e : c.entries)
    if (e.first == l) return &e.second;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Equi-recursive equality

namespace detail {

/// Both operands laid out as one graph in which a mu-binder is an alias of
/// its body and a bound variable points back at its binder. Equality is then
/// a bisimulation over node pairs, polynomial in the operand sizes.
class TypeEqual {
 public:
  bool operator()(const TypeRef& a, const TypeRef& b) {
    if (same_syntax(a, b)) return true;
    std::map<std::string, int> ea, eb;
    int x = add(a, ea);
    int y = add(b, eb);
    return eq(x, y);
  }

 private:
  enum class K { Base, Fun, Code, Alias, Free };
  struct Node {
    K kind = K::Alias;
    BaseKind base = BaseKind::Int;
    CodeKind code = CodeKind::Anonymous;
    std::string name;               // free variables
    std::vector<Label> labels;      // code entries
    std::vector<int> children;      // fun: params then result; code: entries
    int target = -1;                // alias
  };
  std::vector<Node> nodes_;
  std::set<std::pair<int, int>> assumed_;

  int add(const TypeRef& t, std::map<std::string, int>& env) {
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (auto x = t->as<Type::Base>()) {
      nodes_[id].kind = K::Base;
      nodes_[id].base = x->kind;
    } else if (auto x = t->as<Type::Var>()) {
      auto it = env.find(x->name);
      if (it != env.end()) {
        nodes_[id].target = it->second;
      } else {
        nodes_[id].kind = K::Free;
        nodes_[id].name = x->name;
      }
    } else if (auto x = t->as<Type::Rec>()) {
      auto saved = env.find(x->var) == env.end() ? std::optional<int>{} : std::optional<int>{env[x->var]};
      env[x->var] = id;
      int body = add(x->body, env);
      nodes_[id].target = body;
      if (saved) env[x->var] = *saved; else env.erase(x->var);
    } else if (auto x = t->as<Type::Fun>()) {
      std::vector<int> cs;
      for (auto& p : x->params) cs.push_back(add(p, env));
      cs.push_back(add(x->ret, env));
      nodes_[id].kind = K::Fun;
      nodes_[id].children = std::move(cs);
    } else {
      auto c = t->as<Type::Code>();
      std::vector<int> cs;
      std::vector<Label> ls;
      for (auto& e : c->entries) {
        ls.push_back(e.first);
        cs.push_back(add(e.second, env));
      }
      nodes_[id].kind = K::Code;
      nodes_[id].code = c->kind;
      nodes_[id].labels = std::move(ls);
      nodes_[id].children = std::move(cs);
    }
    return id;
  }

  int resolve(int i) const {
    // Contractive types have no alias cycles; the bound is a safety net.
    for (std::size_t hops = 0; nodes_[i].kind == K::Alias && hops <= nodes_.size(); ++hops) i = nodes_[i].target;
    return i;
  }

  bool eq(int i, int j) {
    i = resolve(i);
    j = resolve(j);
    if (!assumed_.insert({i, j}).second) return true;
    const Node& a = nodes_[i];
    const Node& b = nodes_[j];
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case K::Base: return a.base == b.base;
      case K::Free: return a.name == b.name;
      case K::Alias: return false;  // non-contractive
      case K::Fun:
        if (a.children.size() != b.children.size()) return false;
        for (std::size_t k = 0; k < a.children.size(); ++k)
          if (!eq(a.children[k], b.children[k])) return false;
        return true;
      case K::Code:
        if (a.code != b.code || a.labels.size() != b.labels.size()) return false;
        for (std::size_t k = 0; k < a.labels.size(); ++k) {
          auto it = std::find(b.labels.begin(), b.labels.end(), a.labels[k]);
          if (it == b.labels.end()) return false;
          if (!eq(a.children[k], b.children[static_cast<std::size_t>(it - b.labels.begin())])) return false;
        }
        return true;
    }
    return false;
  }
};

}  // namespace detail

/// Decides equality of the infinite unfoldings of two closed, contractive
/// types. Record entries are compared as label sets; sensor-code and
/// anonymous-code records are never equal.
inline bool type_equal(const TypeRef& a, const TypeRef& b) { return detail::TypeEqual{}(a, b); }

// ---------------------------------------------------------------------------
// Sum of code types (right-biased record union)

namespace detail {

inline std::string fresh_type_var(const std::vector<TypeRef>& avoid_in) {
  std::set<std::string> names;
  for (auto& t : avoid_in) {
    std::set<std::string> bound, out;
    free_type_vars(t, bound, out);
    names.insert(out.begin(), out.end());
    // Binder names too, to keep printed forms readable.
    std::vector<TypeRef> stack{t};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      if (auto r = cur->as<Type::Rec>()) {
        names.insert(r->var);
        stack.push_back(r->body);
      } else if (auto f = cur->as<Type::Fun>()) {
        for (auto& p : f->params) stack.push_back(p);
        stack.push_back(f->ret);
      } else if (auto c = cur->as<Type::Code>()) {
        for (auto& e : c->entries) stack.push_back(e.second);
      }
    }
  }
  for (int i = 0;; ++i) {
    std::string n = i == 0 ? "m" : "m" + std::to_string(i);
    if (!names.count(n)) return n;
  }
}

}  // namespace detail

/// a + b on anonymous code types: entries of b, plus entries of a whose
/// labels b lacks. Order: surviving a-entries, then b-entries. When an
/// operand is a mu-type over a record, its self-references are re-pointed
/// to the result's own binder so that the sum stays a self-typed module type.
inline TypeRef code_type_sum(const TypeRef& a, const TypeRef& b) {
  if (!unfold_head(a)->as<Type::Code>() || !unfold_head(b)->as<Type::Code>()) throw std::invalid_argument("code_type_sum: operands must be code types");
  const bool recursive = a->as<Type::Rec>() || b->as<Type::Rec>();
  const std::string self = recursive ? detail::fresh_type_var({a, b}) : std::string{};
  auto entries_of = [&](const TypeRef& t) {
    if (auto r = t->as<Type::Rec>()) {
      auto body = subst_type(r->body, r->var, ty::var(self));
      return unfold_head(body)->as<Type::Code>()->entries;
    }
    return unfold_head(t)->as<Type::Code>()->entries;
  };
  auto left = entries_of(a);
  auto right = entries_of(b);
  std::vector<std::pair<Label, TypeRef>> out;
  for (auto& e : left) {
    bool overridden = std::any_of(right.begin(), right.end(), [&](auto& r) { return r.first == e.first; });
    if (!overridden) out.push_back(e);
  }
  out.insert(out.end(), right.begin(), right.end());
  auto rec = ty::anon(std::move(out));
  return recursive ? ty::rec(self, rec) : rec;
}

}  // namespace callas
