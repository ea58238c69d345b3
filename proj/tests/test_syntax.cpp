#include <gtest/gtest.h>

#include "callas/gen.hpp"
#include "callas/syntax.hpp"

using namespace callas;

namespace {

const char* kStreamingSink = R"(// sink
install {
   receiver = (self)
      receive
   gather = (self,x,y)
      external log(x,y)             };
timer receiver() every 5 expire 10000;
send setup(100,10000)
)";

const char* kMaxSensor = R"(install {
   receiver = (self)
      receive
   setup = (self)
      let x = external data() in
      let y = external  mac()  in
      self.install { max_data = (self) x
                     max_mac  = (self) y };
      send gather (x,y)
   gather = (self,x,y)
      let val = self.max_data() in
      if x > val then
         self.install { max_data = (self) x
                        max_mac  = (self) y };
         send gather(x,y);          };
timer receiver() every 5 expire 10000;
)";

/// Strips the leading `let _k = P in` wrappers that sequencing produces.
std::vector<ProcPtr> statements(ProcPtr p) {
  std::vector<ProcPtr> out;
  while (auto l = p->as<Process::Let>()) {
    if (free_vars(*l->body).count(l->var)) break;
    out.push_back(l->bound);
    p = l->body;
  }
  out.push_back(p);
  return out;
}

}  // namespace

TEST(Parse, SendWithArguments) {
  auto p = parse_program("send setup(100,10000)");
  EXPECT_TRUE(same_proc(p, proc::send(Label{"setup"}, {val::integer(100), val::integer(10000)})));
}

TEST(Parse, Receive) { EXPECT_TRUE(same_proc(parse_program("receive"), proc::receive())); }

TEST(Parse, Timer) {
  auto p = parse_program("timer receiver() every 5 expire 10000");
  EXPECT_TRUE(same_proc(p, proc::timer(Label{"receiver"}, {}, val::integer(5), val::integer(10000))));
}

TEST(Parse, InstallIsSensorInstall) {
  auto p = parse_program("install {}");
  EXPECT_TRUE(same_proc(p, proc::install(val::sensor(), val::unit())));
}

TEST(Parse, ExternKeywordsAreSynonyms) {
  EXPECT_TRUE(same_proc(parse_program("extern time()"), parse_program("external time()")));
}

TEST(Parse, IfWithoutElseGetsUnit) {
  auto p = parse_program("if true then receive");
  EXPECT_TRUE(same_proc(p, proc::if_(val::boolean(true), proc::receive(), proc::unit())));
}

TEST(Parse, OperatorsDesugarToExterns) {
  auto p = parse_program("x > y");
  EXPECT_TRUE(same_proc(p, proc::external(Label{"gt"}, {val::var("x"), val::var("y")})));
  // Precedence: * over +/- over comparisons.
  auto q = parse_program("a + b * c == d");
  EXPECT_EQ(pretty_print(q), "let _0 = external mul(b, c) in let _1 = external add(a, _0) in external eq(_1, d)");
}

TEST(Parse, SubtractionIsLeftAssociative) {
  auto p = parse_program("a - b - c");
  EXPECT_EQ(pretty_print(p), "let _0 = external sub(a, b) in external sub(_0, c)");
}

TEST(Parse, StreamingSinkListing) {
  auto stmts = statements(parse_program(kStreamingSink));
  ASSERT_EQ(stmts.size(), 3u);
  auto inst = stmts[0]->as<Process::Install>();
  ASSERT_TRUE(inst);
  EXPECT_TRUE(inst->target.is_sensor());
  auto m = inst->source.module();
  ASSERT_TRUE(m);
  EXPECT_EQ(m->entries.size(), 2u);
  EXPECT_EQ(m->find(Label{"gather"})->params.size(), 3u);
  EXPECT_TRUE(same_proc(stmts[1], proc::timer(Label{"receiver"}, {}, val::integer(5), val::integer(10000))));
  EXPECT_TRUE(same_proc(stmts[2], proc::send(Label{"setup"}, {val::integer(100), val::integer(10000)})));
}

TEST(Parse, MaxSensorListing) {
  auto stmts = statements(parse_program(kMaxSensor));
  ASSERT_EQ(stmts.size(), 2u);
  auto m = stmts[0]->as<Process::Install>()->source.module();
  ASSERT_TRUE(m);
  ASSERT_EQ(m->entries.size(), 3u);
  auto gather = m->find(Label{"gather"});
  auto body = gather->body->as<Process::Let>();
  ASSERT_TRUE(body);
  EXPECT_EQ(body->var, Variable{"val"});
  // let _k = external gt(x, val) in if _k then (install; send) else {}
  auto cmp = body->body->as<Process::Let>();
  ASSERT_TRUE(cmp);
  EXPECT_TRUE(same_proc(cmp->bound, proc::external(Label{"gt"}, {val::var("x"), val::var("val")})));
  auto branch = cmp->body->as<Process::If>();
  ASSERT_TRUE(branch);
  EXPECT_EQ(statements(branch->then_branch).size(), 2u);
  EXPECT_TRUE(same_proc(branch->else_branch, proc::unit()));
}

TEST(Parse, AnnotationsAreKept) {
  auto p = parse_program("{ id = (self, x: int): int x }");
  auto m = p->as<Process::Val>()->value.module();
  ASSERT_TRUE(m);
  auto f = m->find(Label{"id"});
  EXPECT_TRUE(same_syntax(f->params[1].annotation, ty::int_()));
  EXPECT_TRUE(same_syntax(f->ret, ty::int_()));
}

TEST(Parse, SequencingVariableIsFresh) {
  auto p = parse_program("let _0 = 1 in _0; send f(_0)");
  auto outer = p->as<Process::Let>();
  ASSERT_TRUE(outer);
  auto seq = outer->body->as<Process::Let>();
  ASSERT_TRUE(seq);
  EXPECT_NE(seq->var, Variable{"_0"});
  EXPECT_FALSE(free_vars(*seq->body).count(seq->var));
}

TEST(ParseErrors, DuplicateLabel) {
  try {
    parse_program("{ f = (self) 1  f = (self) 2 }");
    FAIL() << "accepted duplicate label";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line, 1);
    EXPECT_EQ(e.column, 17);
  }
}

TEST(ParseErrors, SelfMustComeFirst) {
  EXPECT_THROW(parse_program("{ f = (x) 1 }"), SyntaxError);
  EXPECT_THROW(parse_program("{ f = (self, x, x) 1 }"), SyntaxError);
}

TEST(ParseErrors, PositionsPointIntoTheInput) {
  const std::vector<std::string> bad{"send", "let x = in y", "timer f() every 1", "{ f = (self) }", "1 +",
                                     "\"abc", "/* open", "x.", "install", "send f(1,", "if x", "@", "(1",
                                     "9999999999999999999999"};
  for (auto& src : bad) {
    try {
      parse_program(src);
      ADD_FAILURE() << "accepted: " << src;
    } catch (const SyntaxError& e) {
      EXPECT_GE(e.line, 1) << src;
      EXPECT_GE(e.column, 1) << src;
      // Lines are 1-based; column may point one past the last character.
      EXPECT_LE(static_cast<std::size_t>(e.column), src.size() + 1) << src;
    }
  }
}

TEST(ParseErrors, ExpectedTokensAreReported) {
  try {
    parse_program("timer f() 5 expire 6");
    FAIL();
  } catch (const SyntaxError& e) {
    ASSERT_FALSE(e.expected.empty());
    EXPECT_EQ(e.expected[0], "'every'");
  }
}

TEST(Print, Examples) {
  EXPECT_EQ(pretty_print(proc::send(Label{"setup"}, {val::integer(100), val::integer(10000)})),
            "send setup(100, 10000)");
  auto p = proc::let(Variable{"x"}, proc::external(Label{"time"}, {}),
                     proc::send(Label{"gather"}, {val::var("x")}));
  EXPECT_EQ(pretty_print(p), "let x = external time() in send gather(x)");
  EXPECT_EQ(pretty_print(val::unit()), "{}");
}

TEST(Print, HeadPositionsAreParenthesised) {
  auto inner = proc::let(Variable{"a"}, proc::receive(), proc::value(val::var("a")));
  auto p = proc::let(Variable{"b"}, inner, proc::value(val::var("b")));
  EXPECT_EQ(pretty_print(p), "let b = (let a = receive in a) in b");
  auto q = proc::let(Variable{"u"}, proc::if_(val::boolean(true), proc::receive(), proc::unit()), proc::unit());
  EXPECT_EQ(pretty_print(q), "(if true then receive else {}); {}");
}

TEST(Print, Floats) {
  EXPECT_EQ(pretty_print(val::real(2.0)), "2.0");
  EXPECT_EQ(pretty_print(val::real(-0.5)), "-0.5");
  EXPECT_EQ(pretty_print(val::real(3e21)), "3e+21");
}

TEST(Types, ParseAndPrint) {
  auto t = parse_type("mu m. { f: (m, int) -> {}, g: (m) -> bool }");
  EXPECT_EQ(to_string(t), "mu m. { f: (m, int) -> {}, g: (m) -> bool }");
  EXPECT_EQ(to_string(parse_type("{||}")), "{||}");
  EXPECT_EQ(to_string(parse_type("{| f: (int) -> int |}")), "{| f: (int) -> int |}");
  EXPECT_THROW(parse_type("{ f: int }"), SyntaxError);
}

TEST(Messages, ParseAndPrint) {
  auto m = parse_message("gather(3, -7)");
  EXPECT_EQ(m.label, Label{"gather"});
  EXPECT_EQ(m.args, (std::vector<Value>{val::integer(3), val::integer(-7)}));
  EXPECT_EQ(pretty_print(m), "gather(3, -7)");
  EXPECT_THROW(parse_message("gather(x > 1)"), SyntaxError);
}

TEST(RoundTripProperty, ParsePrintIsAlphaEquivalent) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng r(seed);
    std::vector<std::string> scope{"x", "y"};
    auto p = gen::any_process(r, 5, scope);
    auto text = pretty_print(p);
    ProcPtr back;
    try {
      back = parse_program(text);
    } catch (const SyntaxError& e) {
      FAIL() << "seed " << seed << ": " << e.what() << "\n" << text;
    }
    ASSERT_TRUE(alpha_equal(*back, *p)) << "seed " << seed << "\n" << text << "\n" << pretty_print(back);
  }
}

TEST(RoundTripProperty, TypesPrintAndParse) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng r(seed);
    auto t = gen::any_type(r, 4);
    auto back = parse_type(to_string(t));
    ASSERT_TRUE(same_syntax(back, t)) << to_string(t);
  }
}
