#pragma once

// JSON scenario files: interfaces, scheduler settings and the sensors with
// their programs, scripts and optional initial state.
//
// {
//   "externs": { "time": "() -> int", "log": "(int, int) -> {}" },
//   "sensor_interface": { "gather": "(int, int) -> {}" },   // or a full mu-type string
//   "radio_range": 10, "routing": "deliver-or-relay", "dedup": true,
//   "seed": 0, "scheduler": "round-robin", "spontaneous_moves": false,
//   "max_steps": 20000,
//   "sensors": [ { "id": "sink", "pos": [0, 0], "program": "sink.cal",
//                  "data": [3, 9, 4], "mac": "AA:01",
//                  "waypoints": [ { "time": 50, "pos": [4, 0] } ] } ]
// }
//
// A sensor's program is either "program" (a .cal path relative to the
// scenario file) or "source" (inline text). Optional state keys: "clock",
// "installed" (module source), "run_queue" (sources), "inbox"/"outbox"
// (message sources) and "timers".

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "callas/machine.hpp"
#include "callas/network.hpp"
#include "callas/syntax.hpp"
#include "callas/typecheck.hpp"

namespace callas {

using ojson = nlohmann::ordered_json;

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SensorSpec {
  std::string id;
  Position pos;
  ProcPtr program = proc::unit();
  std::vector<std::int64_t> data;
  std::optional<Value> mac;
  std::vector<Waypoint> waypoints;

  // Initial state beyond the program.
  Clock clock = 0;
  ModuleValue installed;
  std::vector<ProcPtr> run_queue;
  std::vector<Message> inbox, outbox;
  std::vector<TimerEntry> timers;
};

struct Scenario {
  Interfaces ifaces;
  double radio_range = 10;
  RoutingPolicy routing;
  std::uint64_t seed = 0;
  SchedulerMode mode = SchedulerMode::RoundRobin;
  bool spontaneous_moves = false;  // only honoured by the seeded shuffle
  std::int64_t max_steps = 100000;
  std::vector<SensorSpec> sensors;

  const SensorSpec* sensor(const std::string& id) const {
    for (auto& s : sensors)
      if (s.id == id) return &s;
    return nullptr;
  }

  SchedulerConfig config() const {
    SchedulerConfig c;
    c.seed = seed;
    c.mode = mode;
    c.spontaneous_moves = spontaneous_moves;
    c.max_steps = max_steps;
    c.radio_range = radio_range;
    return c;
  }

  MobilityScript mobility() const {
    MobilityScript m;
    for (auto& s : sensors)
      if (!s.waypoints.empty()) m[s.id] = s.waypoints;
    return m;
  }

  Network build_network() const {
    Network n;
    for (auto& spec : sensors) {
      SensorState s;
      s.id = spec.id;
      s.position = spec.pos;
      s.running = spec.program;
      s.clock = spec.clock;
      s.installed = spec.installed;
      s.run_queue.assign(spec.run_queue.begin(), spec.run_queue.end());
      for (auto& m : spec.inbox) s.inbox.push_back(Packet{m, MessageId{"init:" + spec.id, s.inbox.size()}});
      for (auto& m : spec.outbox) s.outbox.push_back(Packet{m, MessageId{spec.id, s.next_seq++}});
      s.timers = spec.timers;
      n.nodes.push_back(NetworkNode{std::move(s), {}});
    }
    n.normalize();
    return n;
  }
};

namespace detail {

inline std::string where(const std::string& ctx, const SyntaxError& e) {
  return ctx + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + e.message;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline TypeRef type_field(const std::string& ctx, const ojson& j) {
  if (!j.is_string()) throw ScenarioError(ctx + ": expected a type string");
  try {
    return parse_type(j.get<std::string>());
  } catch (const SyntaxError& e) {
    throw ScenarioError(where(ctx, e));
  }
}

inline ProcPtr program_field(const std::string& ctx, const std::string& src) {
  try {
    return parse_program(src);
  } catch (const SyntaxError& e) {
    throw ScenarioError(where(ctx, e));
  }
}

inline Message message_field(const std::string& ctx, const ojson& j) {
  if (!j.is_string()) throw ScenarioError(ctx + ": expected a message like \"gather(1, 2)\"");
  try {
    return parse_message(j.get<std::string>());
  } catch (const SyntaxError& e) {
    throw ScenarioError(where(ctx, e));
  }
}

inline Position pos_field(const std::string& ctx, const ojson& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ScenarioError(ctx + ": expected [x, y]");
  return Position{j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T number_field(const std::string& ctx, const ojson& j) {
  if constexpr (std::is_floating_point_v<T>) {
    if (!j.is_number()) throw ScenarioError(ctx + ": expected a number");
  } else {
    if (!j.is_number_integer()) throw ScenarioError(ctx + ": expected an integer");
  }
  return j.get<T>();
}

/// Extern labels called anywhere in p, including module bodies.
inline void extern_labels(const Process& p, std::set<Label>& out);
inline void extern_labels(const Value& v, std::set<Label>& out) {
  if (auto m = v.module())
    for (auto& e : m->entries) extern_labels(*e.fn.body, out);
}
inline void extern_labels(const std::vector<Value>& vs, std::set<Label>& out) {
  for (auto& v : vs) extern_labels(v, out);
}
inline void extern_labels(const Process& p, std::set<Label>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Process::Val>) extern_labels(n.value, out);
        else if constexpr (std::is_same_v<N, Process::Call>) {
          extern_labels(n.target, out);
          extern_labels(n.args, out);
        } else if constexpr (std::is_same_v<N, Process::Extern>) {
          out.insert(n.label);
          extern_labels(n.args, out);
        } else if constexpr (std::is_same_v<N, Process::Send> || std::is_same_v<N, Process::Timer>)
          extern_labels(n.args, out);
        else if constexpr (std::is_same_v<N, Process::Install>) {
          extern_labels(n.target, out);
          extern_labels(n.source, out);
        } else if constexpr (std::is_same_v<N, Process::Let>) {
          extern_labels(*n.bound, out);
          extern_labels(*n.body, out);
        } else if constexpr (std::is_same_v<N, Process::If>) {
          extern_labels(*n.then_branch, out);
          extern_labels(*n.else_branch, out);
        }
      },
      p.node);
}

inline void require_keys(const std::string& ctx, const ojson& j, const std::set<std::string>& allowed) {
  for (auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ScenarioError(ctx + ": unknown key \"" + k + "\"");
}

}  // namespace detail

/// Parses scenario JSON; relative program paths resolve against base_dir.
inline Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".") {
  using detail::number_field;
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  detail::require_keys("scenario", j,
                       {"externs", "sensor_interface", "radio_range", "routing", "dedup", "seed", "scheduler",
                        "spontaneous_moves", "max_steps", "sensors", "description"});
  Scenario sc;

  if (j.contains("externs")) {
    if (!j["externs"].is_object()) throw ScenarioError("externs: expected an object of signatures");
    for (auto& [k, v] : j["externs"].items()) {
      auto t = detail::type_field("externs." + k, v);
      if (!t->as<Type::Fun>()) throw ScenarioError("externs." + k + ": not a function type");
      sc.ifaces.externs.emplace_back(Label{k}, t);
    }
  }
  for (auto& op : Interfaces::operator_signatures())
    if (!sc.ifaces.find_extern(op.first)) sc.ifaces.externs.push_back(op);

  if (!j.contains("sensor_interface")) throw ScenarioError("sensor_interface is required");
  const auto& si = j["sensor_interface"];
  if (si.is_string()) {
    sc.ifaces.sensor = detail::type_field("sensor_interface", si);
    auto rec = sc.ifaces.sensor->as<Type::Rec>();
    auto head = unfold_head(sc.ifaces.sensor);
    auto code = head->as<Type::Code>();
    if (!rec || !code || code->kind != CodeKind::Sensor)
      throw ScenarioError("sensor_interface: expected mu a. {| ... |}");
  } else if (si.is_object()) {
    std::vector<std::pair<Label, TypeRef>> sigs;
    for (auto& [k, v] : si.items()) sigs.emplace_back(Label{k}, detail::type_field("sensor_interface." + k, v));
    try {
      sc.ifaces.sensor = Interfaces::make_sensor_interface(sigs);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("sensor_interface: ") + e.what());
    }
  } else {
    throw ScenarioError("sensor_interface: expected an object or a type string");
  }
  if (!is_closed(sc.ifaces.sensor) || !is_contractive(sc.ifaces.sensor))
    throw ScenarioError("sensor_interface: type must be closed and contractive");

  if (j.contains("radio_range")) sc.radio_range = number_field<double>("radio_range", j["radio_range"]);
  if (!(sc.radio_range > 0)) throw ScenarioError("radio_range must be positive");
  if (j.contains("routing")) {
    if (!j["routing"].is_string()) throw ScenarioError("routing: expected a string");
    auto k = routing_from_string(j["routing"].get<std::string>());
    if (!k || *k == RoutingKind::Custom)
      throw ScenarioError("routing: expected \"flood\" or \"deliver-or-relay\"");
    sc.routing.kind = *k;
  }
  if (j.contains("dedup")) {
    if (!j["dedup"].is_boolean()) throw ScenarioError("dedup: expected true or false");
    sc.routing.dedup = j["dedup"].get<bool>();
  }
  if (j.contains("seed")) sc.seed = number_field<std::uint64_t>("seed", j["seed"]);
  if (j.contains("scheduler")) {
    auto m = j["scheduler"].is_string() ? j["scheduler"].get<std::string>() : "";
    if (m == "round-robin") sc.mode = SchedulerMode::RoundRobin;
    else if (m == "seeded-shuffle") sc.mode = SchedulerMode::SeededShuffle;
    else throw ScenarioError("scheduler: expected \"round-robin\" or \"seeded-shuffle\"");
  }
  if (j.contains("spontaneous_moves")) {
    if (!j["spontaneous_moves"].is_boolean()) throw ScenarioError("spontaneous_moves: expected true or false");
    sc.spontaneous_moves = j["spontaneous_moves"].get<bool>();
  }
  if (j.contains("max_steps")) sc.max_steps = number_field<std::int64_t>("max_steps", j["max_steps"]);
  if (sc.max_steps < 0) throw ScenarioError("max_steps must be non-negative");

  if (!j.contains("sensors") || !j["sensors"].is_array()) throw ScenarioError("sensors: expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["sensors"].size(); ++i) {
    const auto& js = j["sensors"][i];
    std::string ctx = "sensors[" + std::to_string(i) + "]";
    if (!js.is_object()) throw ScenarioError(ctx + ": expected an object");
    detail::require_keys(ctx, js,
                         {"id", "pos", "program", "source", "data", "mac", "waypoints", "clock", "installed",
                          "run_queue", "inbox", "outbox", "timers"});
    SensorSpec s;
    if (!js.contains("id") || !js["id"].is_string() || js["id"].get<std::string>().empty())
      throw ScenarioError(ctx + ": id must be a non-empty string");
    s.id = js["id"].get<std::string>();
    ctx = "sensor " + s.id;
    if (!ids.insert(s.id).second) throw ScenarioError("duplicate sensor id \"" + s.id + "\"");
    if (js.contains("pos")) s.pos = detail::pos_field(ctx + ": pos", js["pos"]);

    if (js.contains("program") && js.contains("source"))
      throw ScenarioError(ctx + ": give either program or source, not both");
    if (js.contains("program")) {
      if (!js["program"].is_string()) throw ScenarioError(ctx + ": program must be a path");
      auto path = base_dir / js["program"].get<std::string>();
      s.program = detail::program_field(path.string(), detail::read_file(path));
    } else if (js.contains("source")) {
      if (!js["source"].is_string()) throw ScenarioError(ctx + ": source must be a string");
      s.program = detail::program_field(ctx + ": source", js["source"].get<std::string>());
    }

    if (js.contains("data")) {
      if (!js["data"].is_array()) throw ScenarioError(ctx + ": data must be an array of integers");
      for (auto& d : js["data"]) s.data.push_back(number_field<std::int64_t>(ctx + ": data", d));
    }
    if (js.contains("mac")) {
      const auto& m = js["mac"];
      if (m.is_string()) s.mac = val::string(m.get<std::string>());
      else if (m.is_number_integer()) s.mac = val::integer(m.get<std::int64_t>());
      else throw ScenarioError(ctx + ": mac must be a string or an integer");
    }
    if (js.contains("waypoints")) {
      if (!js["waypoints"].is_array()) throw ScenarioError(ctx + ": waypoints must be an array");
      for (auto& w : js["waypoints"]) {
        if (!w.is_object() || !w.contains("time") || !w.contains("pos"))
          throw ScenarioError(ctx + ": waypoint needs time and pos");
        Waypoint wp{number_field<Clock>(ctx + ": waypoint time", w["time"]), detail::pos_field(ctx + ": waypoint", w["pos"])};
        if (!s.waypoints.empty() && wp.time <= s.waypoints.back().time)
          throw ScenarioError(ctx + ": waypoint times must be strictly increasing");
        s.waypoints.push_back(wp);
      }
    }

    if (js.contains("clock")) s.clock = number_field<Clock>(ctx + ": clock", js["clock"]);
    if (js.contains("installed")) {
      if (!js["installed"].is_string()) throw ScenarioError(ctx + ": installed must be module source");
      auto p = detail::program_field(ctx + ": installed", js["installed"].get<std::string>());
      auto v = p->as<Process::Val>();
      if (!v || !v->value.module()) throw ScenarioError(ctx + ": installed must be a module literal");
      s.installed = *v->value.module();
    }
    if (js.contains("run_queue")) {
      if (!js["run_queue"].is_array()) throw ScenarioError(ctx + ": run_queue must be an array of sources");
      for (auto& q : js["run_queue"]) {
        if (!q.is_string()) throw ScenarioError(ctx + ": run_queue entries must be strings");
        s.run_queue.push_back(detail::program_field(ctx + ": run_queue", q.get<std::string>()));
      }
    }
    for (const char* key : {"inbox", "outbox"}) {
      if (!js.contains(key)) continue;
      if (!js[key].is_array()) throw ScenarioError(ctx + ": " + key + " must be an array of messages");
      auto& q = std::string(key) == "inbox" ? s.inbox : s.outbox;
      for (auto& m : js[key]) q.push_back(detail::message_field(ctx + ": " + key, m));
    }
    if (js.contains("timers")) {
      if (!js["timers"].is_array()) throw ScenarioError(ctx + ": timers must be an array");
      for (auto& t : js["timers"]) {
        if (!t.is_object() || !t.contains("call") || !t.contains("period") || !t.contains("expire_at") ||
            !t.contains("next_at"))
          throw ScenarioError(ctx + ": timer needs call, period, expire_at and next_at");
        auto m = detail::message_field(ctx + ": timer call", t["call"]);
        TimerEntry e{m.label, m.args, number_field<Clock>(ctx + ": period", t["period"]),
                     number_field<Clock>(ctx + ": expire_at", t["expire_at"]),
                     number_field<Clock>(ctx + ": next_at", t["next_at"])};
        if (e.period < 1) throw ScenarioError(ctx + ": timer period must be at least 1");
        if (e.next_at < s.clock) throw ScenarioError(ctx + ": timer next_at lies before the clock");
        s.timers.push_back(std::move(e));
      }
    }

    // Every extern the sensor may call must be declared.
    std::set<Label> used;
    detail::extern_labels(*s.program, used);
    detail::extern_labels(val::module(s.installed), used);
    for (auto& q : s.run_queue) detail::extern_labels(*q, used);
    for (auto& l : used)
      if (!sc.ifaces.find_extern(l)) throw ScenarioError(ctx + ": extern '" + l.name + "' is not declared");
    sc.sensors.push_back(std::move(s));
  }
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(detail::read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

/// Serialises a network as a self-contained scenario (inline sources and
/// full initial state), e.g. to replay a counterexample.
inline ojson scenario_json(const Network& n, const Interfaces& ifaces, const SchedulerConfig& cfg,
                           const RoutingPolicy& routing) {
  ojson j;
  j["externs"] = ojson::object();
  for (auto& [l, t] : ifaces.externs)
    if (!is_operator_extern(l)) j["externs"][l.name] = to_string(*t);
  j["sensor_interface"] = to_string(*ifaces.sensor);
  j["radio_range"] = cfg.radio_range;
  j["routing"] = std::string(to_string(routing.kind == RoutingKind::Custom ? RoutingKind::DeliverOrRelay : routing.kind));
  j["dedup"] = routing.dedup;
  j["seed"] = cfg.seed;
  j["scheduler"] = cfg.mode == SchedulerMode::RoundRobin ? "round-robin" : "seeded-shuffle";
  if (cfg.spontaneous_moves) j["spontaneous_moves"] = true;
  j["max_steps"] = cfg.max_steps;
  j["sensors"] = ojson::array();
  for (auto* s : n.all_sensors()) {
    ojson js;
    js["id"] = s->id;
    js["pos"] = {s->position.x, s->position.y};
    js["source"] = pretty_print(s->running);
    js["clock"] = s->clock;
    js["installed"] = pretty_print(val::module(s->installed));
    js["run_queue"] = ojson::array();
    for (auto& q : s->run_queue) js["run_queue"].push_back(pretty_print(q));
    js["inbox"] = ojson::array();
    for (auto& p : s->inbox) js["inbox"].push_back(pretty_print(p.message));
    js["outbox"] = ojson::array();
    for (auto& p : s->outbox) js["outbox"].push_back(pretty_print(p.message));
    js["timers"] = ojson::array();
    for (auto& t : s->timers)
      js["timers"].push_back({{"call", pretty_print(Message{t.label, t.args})},
                              {"period", t.period},
                              {"expire_at", t.expire_at},
                              {"next_at", t.next_at}});
    j["sensors"].push_back(std::move(js));
  }
  return j;
}

}  // namespace callas
