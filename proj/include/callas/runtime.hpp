#pragma once

// What a scenario run needs around the network engine: the scripted extern
// environment with its sink log, the JSONL trace format, and run summaries.
//
// Trace lines: {"step": 0, "sensor": "sink", "rule": "send", "clock": 3,
//               "detail": {"message": "setup(100, 10000)"}}

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "callas/network.hpp"
#include "callas/safety.hpp"
#include "callas/scenario.hpp"

namespace callas {

struct LogEntry {
  std::string sensor;
  Clock clock;  // when the log extern ran
  std::vector<Value> args;
};

using SinkLog = std::vector<LogEntry>;

/// time/getTime read the clock, data() cycles the sensor's script, mac()
/// returns the configured MAC (the id by default), log appends to the
/// sink log. Other declared externs answer a default of their return type.
class ScriptedEnv : public ExternEnv {
 public:
  explicit ScriptedEnv(const Scenario& sc) : fallback_(sc.ifaces), ifaces_(sc.ifaces) {
    for (auto& s : sc.sensors) {
      if (!s.data.empty()) data_[s.id] = s.data;
      if (s.mac) mac_.emplace(s.id, *s.mac);
    }
  }

  std::optional<Value> dispatch(const std::string& sensor, const Label& l, const std::vector<Value>& args,
                                Clock clock) override {
    if (is_operator_extern(l)) return operator_extern(l, args);
    if (!ifaces_.find_extern(l)) return std::nullopt;
    const auto& n = l.name;
    if (n == "time" || n == "getTime") return val::integer(clock);
    if (n == "data") {
      auto it = data_.find(sensor);
      if (it == data_.end()) return val::integer(0);
      auto& cursor = cursor_[sensor];
      return val::integer(it->second[cursor++ % it->second.size()]);
    }
    if (n == "mac") {
      if (auto it = mac_.find(sensor); it != mac_.end()) return it->second;
      return val::string(sensor);
    }
    if (n == "log") {
      log_.push_back(LogEntry{sensor, clock, args});
      return val::unit();
    }
    return fallback_.dispatch(sensor, l, args, clock);
  }

  const SinkLog& log() const { return log_; }

 private:
  TypedEnv fallback_;
  Interfaces ifaces_;
  std::map<std::string, std::vector<std::int64_t>> data_;
  std::map<std::string, std::size_t> cursor_;
  std::map<std::string, Value> mac_;
  SinkLog log_;
};

// ---------------------------------------------------------------------------
// Trace files

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string trace_line(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["step"] = e.step;
  j["sensor"] = e.sensor;
  j["rule"] = std::string(to_string(e.rule));
  j["clock"] = e.clock;
  j["detail"] = nlohmann::ordered_json::object();
  for (auto& [k, v] : e.detail) j["detail"][k] = v;
  return j.dump();
}

inline void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  for (auto& e : events) out << trace_line(e) << '\n';
}

inline TraceEvent parse_trace_line(const std::string& line, std::size_t lineno) {
  auto fail = [&](const std::string& why) -> TraceError {
    return TraceError("line " + std::to_string(lineno) + ": " + why);
  };
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::ordered_json::parse_error&) {
    throw fail("not valid JSON");
  }
  if (!j.is_object() || j.size() != 5) throw fail("expected exactly the keys step, sensor, rule, clock, detail");
  for (const char* k : {"step", "sensor", "rule", "clock", "detail"})
    if (!j.contains(k)) throw fail(std::string("missing key \"") + k + "\"");
  if (!j["step"].is_number_integer() || !j["clock"].is_number_integer()) throw fail("step and clock must be integers");
  if (!j["sensor"].is_string() || !j["rule"].is_string()) throw fail("sensor and rule must be strings");
  if (!j["detail"].is_object()) throw fail("detail must be an object");
  TraceEvent e;
  e.step = j["step"].get<std::int64_t>();
  e.sensor = j["sensor"].get<std::string>();
  auto rule = rule_from_string(j["rule"].get<std::string>());
  if (!rule) throw fail("unknown rule \"" + j["rule"].get<std::string>() + "\"");
  e.rule = *rule;
  e.clock = j["clock"].get<std::int64_t>();
  for (auto& [k, v] : j["detail"].items()) {
    if (!v.is_string()) throw fail("detail values must be strings");
    e.detail.emplace_back(k, v.get<std::string>());
  }
  return e;
}

/// Reads a whole trace; blank lines are skipped, steps must not decrease.
inline std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto e = parse_trace_line(line, lineno);
    if (!out.empty() && e.step < out.back().step)
      throw TraceError("line " + std::to_string(lineno) + ": step decreases");
    out.push_back(std::move(e));
  }
  return out;
}

inline std::string detail_value(const TraceEvent& e, const std::string& key) {
  for (auto& [k, v] : e.detail)
    if (k == key) return v;
  return {};
}

/// One readable line per event.
inline std::string describe(const TraceEvent& e) {
  std::string s = "[" + std::to_string(e.step) + "] " + e.sensor + " " + std::string(to_string(e.rule)) +
                  " @" + std::to_string(e.clock);
  for (auto& [k, v] : e.detail) s += "  " + k + "=" + v;
  return s;
}

// ---------------------------------------------------------------------------
// Summaries

struct RunSummary {
  std::int64_t steps = 0;
  bool fixpoint = false;
  std::int64_t sent = 0;       // send steps
  std::int64_t broadcasts = 0; // releases
  std::int64_t delivered = 0;  // copies placed in an inbox
  std::int64_t relayed = 0;    // copies placed in an outbox
  std::int64_t dropped = 0;    // copies refused by dedup or policy
  /// sensor -> timer call label -> calls (the immediate one plus triggers)
  std::map<std::string, std::map<std::string, std::int64_t>> timer_calls;
  std::map<std::string, Clock> final_clocks;
  std::vector<std::string> stuck;

  void add(const TraceEvent& e) {
    switch (e.rule) {
      case Rule::Send: ++sent; break;
      case Rule::Release: ++broadcasts; break;
      case Rule::Broadcast: {
        auto d = detail_value(e, "delivery");
        if (d == "inbox") ++delivered;
        else if (d == "outbox") ++relayed;
        else ++dropped;
        break;
      }
      case Rule::Timer:
      case Rule::Trigger: {
        auto call = detail_value(e, "call");
        ++timer_calls[e.sensor][call.substr(0, call.find('('))];
        break;
      }
      default: break;
    }
  }

  void finish(const Network& n, std::int64_t step_count, bool at_fixpoint) {
    steps = step_count;
    fixpoint = at_fixpoint;
    for (auto* s : n.all_sensors()) final_clocks[s->id] = s->clock;
    stuck.assign(n.stuck.begin(), n.stuck.end());
  }
};

/// Everything a scenario run produces.
struct RunResult {
  std::vector<TraceEvent> trace;
  SinkLog log;
  RunSummary summary;
  std::optional<ErrReport> error;  // first run-time error, if any
  std::vector<std::string> warnings;
  Network final_network;
};

/// Runs a scenario to a fixpoint or cfg.max_steps, stopping at the first
/// run-time error. `on_events` sees each round's events as they happen.
inline RunResult run_scenario(const Scenario& sc, const SchedulerConfig& cfg, const RoutingPolicy& routing,
                              const std::function<void(const std::vector<TraceEvent>&)>& on_events = {},
                              bool keep_trace = true) {
  ScriptedEnv env(sc);
  Simulation sim(sc.build_network(), cfg, routing, env, sc.mobility());
  RunResult r;
  r.error = check_err(sim.network());
  if (!r.error) {
    sim.run([&](const Simulation& s, const std::vector<TraceEvent>& events) {
      for (auto& e : events) r.summary.add(e);
      if (on_events) on_events(events);
      if (keep_trace) r.trace.insert(r.trace.end(), events.begin(), events.end());
      r.error = check_err(s.network());
      return !r.error;
    });
  }
  r.summary.finish(sim.network(), sim.steps(), sim.at_fixpoint());
  r.log = env.log();
  r.warnings = sim.warnings();
  r.final_network = sim.network();
  return r;
}

/// Writes a failing verdict's counterexample as a scenario the CLI can run,
/// under the scheduler settings the property used. Returns the path.
inline std::string dump_counterexample(Verdict& v, const Interfaces& I, const std::filesystem::path& dir) {
  if (!v.counterexample) return {};
  std::filesystem::create_directories(dir);
  auto path = dir / (v.property + "-" + std::to_string(v.seed) + ".scenario");
  auto cfg = property_config(v.seed);
  cfg.max_steps = v.steps;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_json(*v.counterexample, I, cfg, property_routing(v.seed)).dump(2) << '\n';
  v.counterexample_path = path.string();
  return v.counterexample_path;
}

inline RunResult run_scenario(const Scenario& sc) { return run_scenario(sc, sc.config(), sc.routing); }

}  // namespace callas
