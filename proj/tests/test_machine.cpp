#include <gtest/gtest.h>

#include "callas/gen.hpp"
#include "callas/machine.hpp"
#include "callas/syntax.hpp"

using namespace callas;

namespace {

/// Answers every extern from a counter; operators go to the int externs.
class CountingEnv : public ExternEnv {
 public:
  int calls = 0;
  std::optional<Value> dispatch(const std::string&, const Label& l, const std::vector<Value>& args,
                                Clock clock) override {
    ++calls;
    if (is_operator_extern(l)) return operator_extern(l, args);
    if (l.name == "time") return val::integer(clock);
    if (l.name == "fail") return std::nullopt;
    return val::integer(calls);
  }
};

TimerEntry entry(const char* label, Clock period, Clock expire, Clock next) {
  return TimerEntry{Label{label}, {}, period, expire, next};
}

SensorState running(ProcPtr p) {
  SensorState s;
  s.id = "s";
  s.running = std::move(p);
  return s;
}

}  // namespace

TEST(NoEvent, Examples) {
  EXPECT_TRUE(no_event({}, 0));
  EXPECT_FALSE(no_event({entry("sample", 5, 100, 7)}, 7));
  EXPECT_TRUE(no_event({entry("sample", 5, 100, 7)}, 6));
}

TEST(CountTimerFirings, Examples) {
  EXPECT_EQ(count_timer_firings(100, 10000), 101);
  EXPECT_EQ(count_timer_firings(5, 0), 1);
  EXPECT_EQ(count_timer_firings(1, 1), 2);
}

TEST(SensorStep, TimerInstallsEntryAndPrependsCall) {
  auto s = running(proc::timer(Label{"receiver"}, {}, val::integer(5), val::integer(10000)));
  s.run_queue.push_back(proc::receive());
  CountingEnv env;
  auto o = sensor_step(s, env);
  EXPECT_EQ(o.rule, Rule::Timer);
  ASSERT_EQ(s.timers.size(), 1u);
  EXPECT_EQ(s.timers[0], (TimerEntry{Label{"receiver"}, {}, 5, 10000, 5}));
  ASSERT_EQ(s.run_queue.size(), 2u);
  EXPECT_TRUE(same_proc(s.run_queue.front(), proc::call(val::sensor(), Label{"receiver"}, {})));
  EXPECT_TRUE(same_proc(s.running, proc::unit()));
  EXPECT_EQ(s.clock, 1);
}

TEST(SensorStep, IdleTicks) {
  auto s = running(proc::unit());
  CountingEnv env;
  auto before = s;
  auto o = sensor_step(s, env);
  EXPECT_EQ(o.rule, Rule::Idle);
  before.clock += 1;
  EXPECT_TRUE(same_state(s, before));
}

TEST(SensorStep, TriggerKeepsClock) {
  auto s = running(proc::receive());
  s.timers = {entry("sample", 100, 10000, 50)};
  s.clock = 50;
  CountingEnv env;
  auto o = sensor_step(s, env);
  EXPECT_EQ(o.rule, Rule::Trigger);
  EXPECT_TRUE(same_proc(s.run_queue.front(), proc::call(val::sensor(), Label{"sample"}, {})));
  EXPECT_EQ(s.timers[0], entry("sample", 100, 10000, 150));
  EXPECT_EQ(s.clock, 50);
  // The running process was not touched.
  EXPECT_TRUE(same_proc(s.running, proc::receive()));
}

TEST(SensorStep, ExpireRemovesEntry) {
  auto s = running(proc::unit());
  s.timers = {entry("sample", 100, 10000, 10050)};
  s.clock = 10050;
  CountingEnv env;
  EXPECT_EQ(sensor_step(s, env).rule, Rule::Expire);
  EXPECT_TRUE(s.timers.empty());
  EXPECT_EQ(s.clock, 10050);
}

TEST(SensorStep, TriggerAtExactExpiryStillFires) {
  auto s = running(proc::unit());
  s.timers = {entry("f", 10, 100, 100)};
  s.clock = 100;
  CountingEnv env;
  EXPECT_EQ(sensor_step(s, env).rule, Rule::Trigger);
}

TEST(SensorStep, DueTimersFireInTableOrder) {
  auto s = running(proc::unit());
  s.timers = {entry("a", 3, 100, 9), entry("b", 3, 100, 9)};
  s.clock = 9;
  CountingEnv env;
  sensor_step(s, env);
  sensor_step(s, env);
  ASSERT_EQ(s.run_queue.size(), 2u);
  // b was prepended last, so it runs first.
  EXPECT_EQ(s.run_queue[0]->as<Process::Call>()->label, Label{"b"});
  EXPECT_EQ(s.run_queue[1]->as<Process::Call>()->label, Label{"a"});
}

TEST(SensorStep, ReceiveAppendsAndNoMessageLeavesInboxEmpty) {
  auto s = running(proc::receive());
  s.run_queue.push_back(proc::unit());
  s.inbox.push_back(Packet{Message{Label{"gather"}, {val::integer(1)}}, {"x", 0}});
  CountingEnv env;
  EXPECT_EQ(sensor_step(s, env).rule, Rule::Receive);
  EXPECT_TRUE(same_proc(s.run_queue.back(), proc::call(val::sensor(), Label{"gather"}, {val::integer(1)})));
  EXPECT_TRUE(s.inbox.empty());

  auto t = running(proc::receive());
  EXPECT_EQ(sensor_step(t, env).rule, Rule::NoMessage);
  EXPECT_TRUE(t.inbox.empty());
  EXPECT_TRUE(same_proc(t.running, proc::unit()));
  EXPECT_EQ(t.clock, 1);
}

TEST(SensorStep, SendAppendsToOutbox) {
  auto s = running(parse_program("send a(1); send b(2)"));
  CountingEnv env;
  sensor_step(s, env);
  sensor_step(s, env);  // let
  sensor_step(s, env);
  ASSERT_EQ(s.outbox.size(), 2u);
  EXPECT_EQ(s.outbox[0].message.label, Label{"a"});
  EXPECT_EQ(s.outbox[1].message.label, Label{"b"});
  EXPECT_EQ(s.outbox[0].id, (MessageId{"s", 0}));
  EXPECT_EQ(s.outbox[1].id, (MessageId{"s", 1}));
}

TEST(SensorStep, NoFunctionDefersWholeProcess) {
  auto p = parse_program("let x = sensor.gather(1) in send f(x)");
  auto s = running(p);
  CountingEnv env;
  auto o = sensor_step(s, env);
  EXPECT_EQ(o.rule, Rule::NoFunction);
  EXPECT_TRUE(same_proc(s.running, proc::unit()));
  ASSERT_EQ(s.run_queue.size(), 1u);
  EXPECT_TRUE(same_proc(s.run_queue.back(), p));
  EXPECT_EQ(s.clock, 1);
}

TEST(SensorStep, CallSensorBindsSelfToSensor) {
  auto s = running(parse_program("sensor.f(3)"));
  s.installed = *parse_program("{ f = (self, x) self.g(x) }")->as<Process::Val>()->value.module();
  CountingEnv env;
  EXPECT_EQ(sensor_step(s, env).rule, Rule::CallSensor);
  EXPECT_TRUE(same_proc(s.running, proc::call(val::sensor(), Label{"g"}, {val::integer(3)})));
}

TEST(SensorStep, CallModuleBindsSelfToModule) {
  auto p = parse_program("{ f = (self, x) self.g(x)  g = (self, y) y }.f(7)");
  auto s = running(p);
  CountingEnv env;
  EXPECT_EQ(sensor_step(s, env).rule, Rule::CallModule);
  EXPECT_EQ(sensor_step(s, env).rule, Rule::CallModule);
  EXPECT_TRUE(same_proc(s.running, proc::value(val::integer(7))));
}

TEST(SensorStep, InstallSumsModules) {
  auto s = running(parse_program("install { f = (self) 1 }; install { f = (self) 2  g = (self) 3 }"));
  CountingEnv env;
  while (!s.running->is_value()) sensor_step(s, env);
  ASSERT_EQ(s.installed.entries.size(), 2u);
  EXPECT_TRUE(same_proc(s.installed.find(Label{"f"})->body, proc::value(val::integer(2))));

  auto t = running(parse_program("{ f = (self) 1 }.install { g = (self) 2 }"));
  EXPECT_EQ(sensor_step(t, env).rule, Rule::InstallModule);
  auto m = t.running->as<Process::Val>()->value.module();
  ASSERT_TRUE(m);
  EXPECT_EQ(m->labels(), (std::set<Label>{Label{"f"}, Label{"g"}}));
}

TEST(SensorStep, IfSelectsBranchWithoutTicking) {
  auto s = running(parse_program("if 3 > 2 then send yes() else send no()"));
  CountingEnv env;
  EXPECT_EQ(sensor_step(s, env).rule, Rule::Extern);
  EXPECT_EQ(sensor_step(s, env).rule, Rule::Let);
  EXPECT_EQ(sensor_step(s, env).rule, Rule::IfTrue);
  EXPECT_EQ(s.clock, 1);
  sensor_step(s, env);
  EXPECT_EQ(s.outbox.front().message.label, Label{"yes"});
}

TEST(SensorStep, StuckShapes) {
  CountingEnv env;
  auto expect_stuck = [&](const char* src, StuckReason why) {
    auto s = running(parse_program(src));
    auto before = s;
    auto o = sensor_step(s, env);
    EXPECT_EQ(o.rule, Rule::Stuck) << src;
    EXPECT_EQ(o.stuck, why) << src;
    EXPECT_TRUE(same_state(s, before)) << src;
  };
  expect_stuck("5.foo()", StuckReason::BadCallTarget);
  expect_stuck("{ f = (self) 1 }.g()", StuckReason::UnknownLabel);
  expect_stuck("{ gather = (self, x, y) x }.gather(1)", StuckReason::ArityMismatch);
  expect_stuck("5.install {}", StuckReason::BadInstall);
  expect_stuck("install 5", StuckReason::BadInstall);
  expect_stuck("if 1 then {} else {}", StuckReason::NonBoolCondition);
  expect_stuck("external fail()", StuckReason::ExternFailure);
  expect_stuck("timer f() every true expire 1", StuckReason::BadTimerFields);

  // A sensor call with a wrong argument count is an error, a missing label is not.
  auto s = running(parse_program("sensor.f(1, 2)"));
  s.installed.entries.push_back(ModuleEntry{Label{"f"}, fn({"self", "x"}, proc::unit())});
  EXPECT_EQ(sensor_step(s, env).stuck, StuckReason::ArityMismatch);
}

TEST(SensorStep, OpenStateIsAnInterpreterBug) {
  auto s = running(proc::let(Variable{"x"}, proc::value(val::var("y")), proc::unit()));
  CountingEnv env;
  EXPECT_THROW(sensor_step(s, env), InterpreterError);
}

TEST(OperatorExterns, IntsOnly) {
  EXPECT_EQ(operator_extern(Label{"gt"}, {val::integer(9), val::integer(3)}), val::boolean(true));
  EXPECT_EQ(operator_extern(Label{"mul"}, {val::integer(6), val::integer(7)}), val::integer(42));
  EXPECT_EQ(operator_extern(Label{"add"}, {val::integer(INT64_MAX), val::integer(1)}), val::integer(INT64_MIN));
  EXPECT_FALSE(operator_extern(Label{"gt"}, {val::boolean(true), val::integer(3)}));
}

TEST(Rules, NamesRoundTrip) {
  for (auto& [rule, name] : rule_names()) EXPECT_EQ(rule_from_string(name), rule);
  EXPECT_FALSE(rule_from_string("nope"));
}

// ---------------------------------------------------------------------------
// Properties over random sensors.

namespace {

SensorState random_sensor(Rng& r) {
  SensorState s;
  s.id = "s";
  s.clock = r.range(0, 40);
  s.running = gen::any_process(r, 4);
  for (auto n = r.below(3); n > 0; --n) s.run_queue.push_back(gen::any_process(r, 2));
  std::vector<std::string> none;
  s.installed = gen::any_module(r, 2, none);
  for (auto n = r.below(3); n > 0; --n) {
    Clock period = r.range(1, 10);
    s.timers.push_back(TimerEntry{Label{r.pick(gen::label_pool())}, {}, period, s.clock + r.range(-5, 50),
                                  s.clock + r.range(0, period)});
  }
  for (auto n = r.below(3); n > 0; --n)
    s.inbox.push_back(Packet{Message{Label{r.pick(gen::label_pool())}, {val::integer(r.range(0, 9))}}, {"o", n}});
  return s;
}

}  // namespace

TEST(MachineProperty, ClockQueueAndTimerDiscipline) {
  int steps = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    Rng r(seed);
    auto s = random_sensor(r);
    CountingEnv env;
    for (int i = 0; i < 40; ++i) {
      auto before = s;
      const bool quiet = no_event(s.timers, s.clock);
      auto o = sensor_step(s, env);
      ++steps;
      ASSERT_EQ(o.clock, before.clock);
      if (o.rule == Rule::Stuck) {
        ASSERT_TRUE(same_state(s, before));
        break;
      }
      // Guard discipline.
      if (o.rule != Rule::Trigger && o.rule != Rule::Expire) ASSERT_TRUE(quiet) << "seed " << seed;
      else ASSERT_FALSE(quiet);
      // Clock accounting.
      ASSERT_EQ(s.clock - before.clock, is_clock_neutral(o.rule) ? 0 : 1) << to_string(o.rule);
      // Queue discipline.
      switch (o.rule) {
        case Rule::Receive:
        case Rule::NoFunction:
          ASSERT_EQ(s.run_queue.size(), before.run_queue.size() + 1);
          for (std::size_t k = 0; k < before.run_queue.size(); ++k)
            ASSERT_TRUE(same_proc(s.run_queue[k], before.run_queue[k]));
          break;
        case Rule::Trigger:
        case Rule::Timer:
          ASSERT_EQ(s.run_queue.size(), before.run_queue.size() + 1);
          for (std::size_t k = 0; k < before.run_queue.size(); ++k)
            ASSERT_TRUE(same_proc(s.run_queue[k + 1], before.run_queue[k]));
          break;
        case Rule::Next:
          ASSERT_EQ(s.run_queue.size() + 1, before.run_queue.size());
          break;
        default:
          ASSERT_EQ(s.run_queue.size(), before.run_queue.size());
      }
      // Timer monotonicity: entries touched by this step lie in the future.
      if (o.rule == Rule::Trigger) {
        bool advanced = false;
        for (std::size_t k = 0; k < s.timers.size(); ++k)
          if (s.timers[k].next_at == before.timers[k].next_at + s.timers[k].period) {
            ASSERT_GT(s.timers[k].next_at, s.clock);
            advanced = true;
          }
        ASSERT_TRUE(advanced);
      }
      if (o.rule == Rule::Timer) ASSERT_GE(s.timers.back().next_at, s.clock);
    }
  }
  EXPECT_GE(steps, 500);
}

TEST(MachineProperty, TimerEntriesStayInTheFuture) {
  // Entries created by the timer rule are never overtaken by the clock.
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng r(seed);
    auto s = running(proc::timer(Label{"f"}, {}, val::integer(r.range(-3, 20)), val::integer(r.range(-5, 60))));
    s.installed.entries.push_back(ModuleEntry{Label{"f"}, fn({"self"}, proc::unit())});
    CountingEnv env;
    int calls = 0;
    for (int i = 0; i < 200; ++i) {
      auto o = sensor_step(s, env);
      if (o.rule == Rule::CallSensor) ++calls;
      for (auto& t : s.timers) ASSERT_GE(t.next_at, s.clock);
    }
    ASSERT_TRUE(s.timers.empty()) << "seed " << seed;
    ASSERT_GE(calls, 1);
  }
}

TEST(MachineProperty, FiringCountMatchesClosedForm) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng r(seed);
    const std::int64_t period = r.range(1, 12), duration = r.range(0, 80);
    auto s = running(proc::timer(Label{"f"}, {}, val::integer(period), val::integer(duration)));
    s.clock = r.range(0, 30);
    s.installed.entries.push_back(ModuleEntry{Label{"f"}, fn({"self"}, proc::unit())});
    CountingEnv env;
    int calls = 0;
    while (!(s.timers.empty() && s.run_queue.empty() && s.running->is_value() && calls > 0)) {
      if (sensor_step(s, env).rule == Rule::CallSensor) ++calls;
    }
    ASSERT_EQ(calls, count_timer_firings(period, duration)) << period << " " << duration;
  }
}

TEST(MachineProperty, Determinism) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng r(seed);
    auto a = random_sensor(r);
    auto b = a;
    CountingEnv ea, eb;
    for (int i = 0; i < 30; ++i) {
      auto oa = sensor_step(a, ea);
      auto ob = sensor_step(b, eb);
      ASSERT_EQ(oa.rule, ob.rule);
      ASSERT_EQ(oa.detail, ob.detail);
      ASSERT_TRUE(same_state(a, b));
    }
  }
}
