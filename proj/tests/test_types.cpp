#include <gtest/gtest.h>

#include "callas/gen.hpp"
#include "callas/syntax.hpp"
#include "callas/types.hpp"

using namespace callas;

namespace {
TypeRef T(const char* src) { return parse_type(src); }
}  // namespace

TEST(TypeEqual, RecursiveTypeEqualsItsUnfolding) {
  EXPECT_TRUE(type_equal(T("mu a. { f: (a) -> int }"), T("{ f: (mu a. { f: (a) -> int }) -> int }")));
}

TEST(TypeEqual, BaseTypes) {
  EXPECT_TRUE(type_equal(ty::int_(), ty::int_()));
  EXPECT_FALSE(type_equal(ty::int_(), ty::bool_()));
}

TEST(TypeEqual, SensorCodeNeverEqualsAnonymousCode) {
  EXPECT_FALSE(type_equal(T("mu a. {| f: (a) -> int |}"), T("mu a. { f: (a) -> int }")));
  EXPECT_FALSE(type_equal(T("{||}"), T("{}")));
}

TEST(TypeEqual, BinderNamesDoNotMatter) {
  EXPECT_TRUE(type_equal(T("mu a. { f: (a, int) -> {} }"), T("mu b. { f: (b, int) -> {} }")));
}

TEST(TypeEqual, EntryOrderDoesNotMatter) {
  EXPECT_TRUE(type_equal(T("{ f: () -> int, g: () -> bool }"), T("{ g: () -> bool, f: () -> int }")));
}

TEST(TypeEqual, DoubledUnrolling) {
  // mu a. {f: (a) -> int} against the type whose self-reference skips a level.
  auto once = T("mu a. { f: (a) -> int }");
  auto twice = T("mu b. { f: ({ f: (b) -> int }) -> int }");
  EXPECT_TRUE(type_equal(once, twice));
  EXPECT_FALSE(type_equal(once, T("mu b. { f: ({ f: (b) -> bool }) -> int }")));
}

TEST(TypeEqual, ArityAndResultsMatter) {
  EXPECT_FALSE(type_equal(T("(int) -> int"), T("(int, int) -> int")));
  EXPECT_FALSE(type_equal(T("(int) -> int"), T("(int) -> bool")));
  EXPECT_FALSE(type_equal(T("{ f: () -> int }"), T("{ f: () -> int, g: () -> int }")));
}

TEST(Unfold, SubstitutesTheWholeType) {
  auto t = T("mu a. { f: (a) -> int }");
  EXPECT_EQ(to_string(unfold(t)), "{ f: (mu a. { f: (a) -> int }) -> int }");
  EXPECT_TRUE(same_syntax(unfold(ty::int_()), ty::int_()));
}

TEST(Contractive, Detection) {
  EXPECT_TRUE(is_contractive(T("mu a. { f: (a) -> int }")));
  EXPECT_FALSE(is_contractive(T("mu a. a")));
  EXPECT_FALSE(is_contractive(T("mu a. mu b. a")));
  EXPECT_TRUE(is_closed(T("mu a. { f: (a) -> int }")));
  EXPECT_FALSE(is_closed(T("{ f: (a) -> int }")));
}

TEST(CodeTypeSum, Examples) {
  EXPECT_TRUE(same_syntax(code_type_sum(T("{ f: () -> int }"), T("{ f: () -> bool }")), T("{ f: () -> bool }")));
  auto t = T("{ g: () -> string }");
  EXPECT_TRUE(same_syntax(code_type_sum(T("{}"), t), t));
  EXPECT_TRUE(same_syntax(code_type_sum(T("{ f: () -> int }"), T("{ g: () -> int }")),
                          T("{ f: () -> int, g: () -> int }")));
}

TEST(CodeTypeSum, SelfTypesArePointedAtTheSum) {
  auto a = T("mu a. { f: (a) -> int, g: (a) -> int }");
  auto b = T("mu b. { g: (b) -> int, h: (b, int) -> bool }");
  auto s = code_type_sum(a, b);
  EXPECT_EQ(to_string(s), "mu m. { f: (m) -> int, g: (m) -> int, h: (m, int) -> bool }");
  EXPECT_THROW(code_type_sum(ty::int_(), b), std::invalid_argument);
}

TEST(TypeEqualProperty, EquivalenceRelation) {
  int cases = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    Rng r(seed);
    auto a = gen::any_type(r, 3);
    auto b = gen::disguise(r, a);
    auto c = gen::disguise(r, b);
    auto other = gen::any_type(r, 3);
    ASSERT_TRUE(type_equal(a, a)) << to_string(a);
    ASSERT_TRUE(type_equal(a, b)) << to_string(a) << " vs " << to_string(b);
    ASSERT_TRUE(type_equal(b, a)) << to_string(a) << " vs " << to_string(b);
    ASSERT_TRUE(type_equal(b, c) && type_equal(a, c));
    ASSERT_EQ(type_equal(a, other), type_equal(other, a)) << to_string(a) << " vs " << to_string(other);
    if (type_equal(a, other)) ASSERT_TRUE(type_equal(b, other));
    ++cases;
  }
  EXPECT_GE(cases, 500);
}

TEST(TypeEqualProperty, TransitivityOnRandomTriples) {
  // Small types collide often enough to exercise transitivity on unrelated draws.
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng r(seed);
    auto a = gen::any_type(r, 1), b = gen::any_type(r, 1), c = gen::any_type(r, 1);
    if (type_equal(a, b) && type_equal(b, c)) {
      ++hits;
      ASSERT_TRUE(type_equal(a, c));
    }
  }
  EXPECT_GT(hits, 0);
}

TEST(TypeEqualProperty, UnfoldingPreservesEquality) {
  int recs = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng r(seed);
    auto t = gen::any_type(r, 4);
    ASSERT_TRUE(is_closed(t) && is_contractive(t)) << to_string(t);
    if (!t->as<Type::Rec>()) continue;
    ++recs;
    ASSERT_TRUE(type_equal(t, unfold(t))) << to_string(t);
    ASSERT_TRUE(type_equal(unfold(unfold(t)), t)) << to_string(t);
  }
  EXPECT_GE(recs, 500);
}
