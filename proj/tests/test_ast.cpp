#include <gtest/gtest.h>

#include "callas/ast.hpp"
#include "callas/gen.hpp"
#include "callas/syntax.hpp"

using namespace callas;

namespace {

Variable X(const char* n) { return Variable{n}; }
Label L(const char* n) { return Label{n}; }

ModuleValue mod(std::vector<std::pair<std::string, std::int64_t>> entries) {
  ModuleValue m;
  for (auto& [l, v] : entries) m.entries.push_back(ModuleEntry{Label{l}, fn({"self"}, proc::value(val::integer(v)))});
  return m;
}

/// Closed values only: substitution never sees an open value.
Value closed_value(Rng& r) {
  std::vector<std::string> scope;
  return gen::any_value(r, 2, scope, true);
}

}  // namespace

// -- substitute ---------------------------------------------------------------

TEST(Substitute, DirectFreeOccurrence) {
  auto p = proc::value(val::var("x"));
  EXPECT_TRUE(same_proc(substitute(p, {{X("x"), val::integer(5)}}), proc::value(val::integer(5))));
}

TEST(Substitute, LetBindsOnlyItsBody) {
  auto p = proc::let(X("x"), proc::value(val::var("x")), proc::value(val::var("x")));
  auto want = proc::let(X("x"), proc::value(val::integer(7)), proc::value(val::var("x")));
  EXPECT_TRUE(same_proc(substitute(p, {{X("x"), val::integer(7)}}), want));
}

TEST(Substitute, SelfAndParameters) {
  ModuleValue m = mod({{"gather", 0}});
  auto p = proc::call(val::var("self"), L("gather"), {val::var("x"), val::var("y")});
  auto got = substitute(p, {{kSelf, val::module(m)}, {X("x"), val::integer(3)}, {X("y"), val::integer(4)}});
  EXPECT_TRUE(same_proc(got, proc::call(val::module(m), L("gather"), {val::integer(3), val::integer(4)})));
}

TEST(Substitute, FunctionParametersShadow) {
  ModuleValue m;
  m.entries.push_back(ModuleEntry{L("f"), fn({"self", "a"}, proc::value(val::var("a")))});
  m.entries.push_back(ModuleEntry{L("g"), fn({"self"}, proc::value(val::var("a")))});
  auto got = substitute(val::module(m), {{X("a"), val::integer(1)}});
  EXPECT_EQ(pretty_print(got), "{ f = (self, a) a  g = (self) 1 }");
}

TEST(Substitute, RejectsOpenValues) {
  auto p = proc::value(val::var("x"));
  EXPECT_THROW(substitute(p, {{X("x"), val::var("y")}}), InterpreterError);
}

TEST(SubstituteProperty, IdempotentOnAbsentVariables) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng r(seed);
    std::vector<std::string> scope{"x", "y"};
    auto p = gen::any_process(r, 4, scope);
    auto v = closed_value(r);
    for (auto& name : gen::var_pool()) {
      Variable y{name};
      if (free_vars(*p).count(y)) continue;
      ASSERT_TRUE(same_proc(substitute(p, {{y, v}}), p)) << "seed " << seed;
    }
  }
}

TEST(SubstituteProperty, RemovesExactlyTheSubstitutedVariable) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng r(seed);
    std::vector<std::string> scope{"x", "y", "z"};
    auto p = gen::any_process(r, 4, scope);
    auto v = closed_value(r);
    auto before = free_vars(*p);
    before.erase(X("x"));
    ASSERT_EQ(free_vars(*substitute(p, {{X("x"), v}})), before) << "seed " << seed;
  }
}

// -- free_vars ----------------------------------------------------------------

TEST(FreeVars, Examples) {
  EXPECT_TRUE(free_vars(*proc::value(val::integer(5))).empty());
  auto p = proc::let(X("x"), proc::value(val::var("y")), proc::value(val::var("x")));
  EXPECT_EQ(free_vars(*p), std::set<Variable>{X("y")});
  ModuleValue m;
  m.entries.push_back(ModuleEntry{L("f"), fn({"self", "a"}, proc::value(val::var("b")))});
  EXPECT_EQ(free_vars(val::module(m)), std::set<Variable>{X("b")});
}

TEST(FreeVars, LetBoundPartSeesOuterScope) {
  auto p = proc::let(X("x"), proc::value(val::var("x")), proc::value(val::integer(1)));
  EXPECT_EQ(free_vars(*p), std::set<Variable>{X("x")});
}

// -- module_sum ---------------------------------------------------------------

TEST(ModuleSum, RightBiasedOverride) {
  auto got = module_sum(mod({{"f", 1}, {"g", 2}}), mod({{"g", 3}}));
  EXPECT_EQ(got, mod({{"f", 1}, {"g", 3}}));
}

TEST(ModuleSum, Identity) {
  auto m = mod({{"a", 1}, {"b", 2}});
  EXPECT_EQ(module_sum(ModuleValue{}, m), m);
  EXPECT_EQ(module_sum(m, ModuleValue{}), m);
}

TEST(ModuleSum, DisjointUnion) {
  EXPECT_EQ(module_sum(mod({{"a", 1}}), mod({{"b", 2}})), mod({{"a", 1}, {"b", 2}}));
}

TEST(ModuleSum, OrderIsSurvivorsThenRight) {
  auto got = module_sum(mod({{"a", 1}, {"b", 2}, {"c", 3}}), mod({{"b", 9}, {"d", 4}}));
  EXPECT_EQ(got, mod({{"a", 1}, {"c", 3}, {"b", 9}, {"d", 4}}));
}

TEST(ModuleSumProperty, AssociativeAndOverriding) {
  const std::vector<std::string> labels{"a", "b", "c", "d"};
  auto random_mod = [&](Rng& r) {
    std::vector<std::pair<std::string, std::int64_t>> es;
    for (auto& l : labels)
      if (r.chance(50)) es.emplace_back(l, r.range(0, 9));
    return mod(es);
  };
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng r(seed);
    auto a = random_mod(r), b = random_mod(r), c = random_mod(r);
    ASSERT_EQ(module_sum(module_sum(a, b), c), module_sum(a, module_sum(b, c))) << "seed " << seed;
    auto ab = module_sum(a, b);
    for (auto& e : b.entries) ASSERT_EQ(*ab.find(e.label), e.fn);
    for (auto& e : a.entries)
      if (!b.contains(e.label)) ASSERT_EQ(*ab.find(e.label), e.fn);
    ASSERT_EQ(ab.labels().size(), [&] {
      auto s = a.labels();
      auto t = b.labels();
      s.insert(t.begin(), t.end());
      return s.size();
    }());
  }
}

// -- decompose ----------------------------------------------------------------

TEST(Decompose, HoleAtTop) {
  auto p = proc::send(L("l"), {});
  auto d = decompose(p);
  EXPECT_TRUE(d.path.empty());
  EXPECT_TRUE(same_proc(d.redex, p));
}

TEST(Decompose, OneFrame) {
  auto body = proc::value(val::var("x"));
  auto p = proc::let(X("x"), proc::receive(), body);
  auto d = decompose(p);
  ASSERT_EQ(d.path.size(), 1u);
  EXPECT_EQ(d.path[0], (ContextFrame{X("x"), body}));
  EXPECT_TRUE(same_proc(d.redex, proc::receive()));
}

TEST(Decompose, LetOfValueIsTheRedex) {
  auto p = proc::let(X("x"), proc::value(val::integer(5)), proc::value(val::var("x")));
  auto d = decompose(p);
  EXPECT_TRUE(d.path.empty());
  EXPECT_TRUE(same_proc(d.redex, p));
}

TEST(Decompose, NestedSpine) {
  auto inner = proc::let(X("b"), proc::receive(), proc::unit());
  auto p = proc::let(X("a"), inner, proc::value(val::var("a")));
  auto d = decompose(p);
  ASSERT_EQ(d.path.size(), 2u);
  EXPECT_EQ(d.path[0].var, X("a"));
  EXPECT_EQ(d.path[1].var, X("b"));
  EXPECT_TRUE(same_proc(d.redex, proc::receive()));
}

TEST(DecomposeProperty, RecomposeRoundTrip) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng r(seed);
    auto p = gen::any_process(r, 5);
    auto d = decompose(p);
    ASSERT_TRUE(same_proc(recompose(d), p)) << "seed " << seed;
    ASSERT_TRUE(!d.redex->as<Process::Let>() || d.redex->as<Process::Let>()->bound->is_value());
  }
}

// -- alpha equivalence ----------------------------------------------------------

TEST(AlphaEqual, RenamesBoundVariablesOnly) {
  auto a = proc::let(X("x"), proc::receive(), proc::value(val::var("x")));
  auto b = proc::let(X("y"), proc::receive(), proc::value(val::var("y")));
  auto c = proc::let(X("y"), proc::receive(), proc::value(val::var("x")));
  EXPECT_TRUE(alpha_equal(*a, *b));
  EXPECT_FALSE(alpha_equal(*a, *c));
}
