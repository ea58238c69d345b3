// callas check | run | replay

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "callas/callas.hpp"

using namespace callas;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;  // type errors, run-time errors
constexpr int kInput = 2;   // unreadable or malformed input, bad usage

int cmd_check(const std::string& path) {
  Scenario sc;
  try {
    sc = load_scenario(path);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kInput;
  }
  auto errors = check_network(sc.ifaces, sc.build_network());
  for (auto& e : errors) std::cout << e.describe() << "\n";
  if (!errors.empty()) {
    std::cout << errors.size() << " type error(s)\n";
    return kFailed;
  }
  std::cout << "ok: " << sc.sensors.size() << " sensor(s) well-typed\n";
  return kOk;
}

struct RunOptions {
  std::string scenario;
  std::optional<std::int64_t> max_steps;
  std::optional<std::uint64_t> seed;
  std::string trace;
  bool unchecked = false;
  std::string routing;
  bool no_dedup = false;
  bool quiet = false;
};

void print_log(const SinkLog& log) {
  std::cout << "sink log (" << log.size() << " entries)\n";
  for (auto& e : log) {
    std::cout << "  " << e.sensor << " @" << e.clock << "  " << pretty_print_args(e.args) << "\n";
  }
}

void print_summary(const RunSummary& s, const std::vector<std::string>& warnings) {
  std::cout << "steps: " << s.steps << (s.fixpoint ? " (fixpoint)" : " (step limit)") << "\n";
  std::cout << "messages: sent " << s.sent << ", broadcasts " << s.broadcasts << ", delivered " << s.delivered
            << ", relayed " << s.relayed << ", dropped " << s.dropped << "\n";
  for (auto& [sensor, calls] : s.timer_calls) {
    std::cout << "timer calls " << sensor << ":";
    for (auto& [label, n] : calls) std::cout << " " << label << "=" << n;
    std::cout << "\n";
  }
  std::cout << "final clocks:";
  for (auto& [id, c] : s.final_clocks) std::cout << " " << id << "=" << c;
  std::cout << "\n";
  if (!s.stuck.empty()) {
    std::cout << "stuck:";
    for (auto& id : s.stuck) std::cout << " " << id;
    std::cout << "\n";
  }
  for (auto& w : warnings) std::cout << "warning: " << w << "\n";
}

int cmd_run(const RunOptions& o) {
  Scenario sc;
  try {
    sc = load_scenario(o.scenario);
  } catch (const std::exception& e) {
    std::cerr << o.scenario << ": " << e.what() << "\n";
    return kInput;
  }
  SchedulerConfig cfg = sc.config();
  if (const char* env = std::getenv("CALLAS_SEED")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      std::cerr << "CALLAS_SEED must be a non-negative integer\n";
      return kInput;
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.max_steps) cfg.max_steps = *o.max_steps;
  RoutingPolicy routing = sc.routing;
  if (!o.routing.empty()) routing.kind = *routing_from_string(o.routing);
  if (o.no_dedup) routing.dedup = false;

  if (!o.unchecked) {
    auto errors = check_network(sc.ifaces, sc.build_network());
    if (!errors.empty()) {
      for (auto& e : errors) std::cout << e.describe() << "\n";
      std::cout << "refusing to run an ill-typed scenario (use --unchecked to run anyway)\n";
      return kFailed;
    }
  }

  std::ofstream trace;
  if (!o.trace.empty()) {
    trace.open(o.trace, std::ios::binary | std::ios::trunc);
    if (!trace) {
      std::cerr << "cannot write " << o.trace << "\n";
      return kInput;
    }
  }
  auto result = run_scenario(
      sc, cfg, routing,
      [&](const std::vector<TraceEvent>& events) {
        if (trace.is_open()) write_trace(trace, events);
      },
      false);
  if (trace.is_open()) trace.close();

  if (!o.quiet) print_log(result.log);
  print_summary(result.summary, result.warnings);
  if (result.error) {
    std::cout << "run-time error: " << result.error->rule() << " at " << result.error->sensor << ": "
              << result.error->snippet << "\n";
    return kFailed;
  }
  return kOk;
}

struct ReplayOptions {
  std::string trace;
  std::string sensor;
  std::string rule;
  std::optional<std::int64_t> from, to;
};

int cmd_replay(const ReplayOptions& o) {
  std::optional<Rule> rule;
  if (!o.rule.empty()) {
    rule = rule_from_string(o.rule);
    if (!rule) {
      std::cerr << "unknown rule tag \"" << o.rule << "\"\n";
      return kInput;
    }
  }
  std::ifstream in(o.trace, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << o.trace << "\n";
    return kInput;
  }
  std::vector<TraceEvent> events;
  try {
    events = read_trace(in);
  } catch (const TraceError& e) {
    std::cerr << o.trace << ": " << e.what() << "\n";
    return kInput;
  }
  for (auto& e : events) {
    if (!o.sensor.empty() && e.sensor != o.sensor) continue;
    if (rule && e.rule != *rule) continue;
    if (o.from && e.step < *o.from) continue;
    if (o.to && e.step > *o.to) continue;
    std::cout << describe(e) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Callas sensor network toolkit: type-check, run and replay scenarios"};
  app.require_subcommand(1);

  std::string check_path;
  auto* check = app.add_subcommand("check", "Type-check a scenario's initial network");
  check->add_option("scenario", check_path, "Scenario file (JSON)")->required();

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a scenario and print the sink log and a summary");
  run->add_option("scenario", run_opts.scenario, "Scenario file (JSON)")->required();
  run->add_option("--max-steps", run_opts.max_steps, "Round limit")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", run_opts.seed, "Scheduler seed (overrides CALLAS_SEED and the scenario)");
  run->add_option("--trace", run_opts.trace, "Write the JSONL trace here");
  run->add_flag("--unchecked", run_opts.unchecked, "Skip the type check");
  run->add_option("--routing", run_opts.routing, "Routing policy")
      ->check(CLI::IsMember({"flood", "deliver-or-relay"}));
  run->add_flag("--no-dedup", run_opts.no_dedup, "Disable the per-sensor seen cache");
  run->add_flag("-q,--quiet", run_opts.quiet, "Do not print the sink log");

  ReplayOptions replay_opts;
  auto* replay = app.add_subcommand("replay", "Print selected events of a trace file");
  replay->add_option("trace", replay_opts.trace, "Trace file (JSONL)")->required();
  replay->add_option("--sensor", replay_opts.sensor, "Only this sensor");
  replay->add_option("--rule", replay_opts.rule, "Only this rule tag");
  replay->add_option("--from", replay_opts.from, "First step");
  replay->add_option("--to", replay_opts.to, "Last step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*check) return cmd_check(check_path);
    if (*run) return cmd_run(run_opts);
    if (*replay) return cmd_replay(replay_opts);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
