#pragma once

// Network-level reduction: broadcast membranes, routing, mobility and the
// two-phase scheduler that resolves the nondeterminism of the calculus.
//
// One global round:
//   A. every non-stuck sensor, in id order (or a seeded shuffle), takes one
//      step and then follows its mobility script;
//   B. every sensor with a non-empty outbox, in id order, broadcasts the
//      head of its outbox to the free sensors in range.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "callas/gen.hpp"
#include "callas/machine.hpp"
#include "callas/state.hpp"

namespace callas {

// ---------------------------------------------------------------------------
// Routing

enum class RoutingKind { Flood, DeliverOrRelay, Custom };

inline std::string_view to_string(RoutingKind k) {
  switch (k) {
    case RoutingKind::Flood: return "flood";
    case RoutingKind::DeliverOrRelay: return "deliver-or-relay";
    case RoutingKind::Custom: return "custom";
  }
  return "?";
}

inline std::optional<RoutingKind> routing_from_string(std::string_view s) {
  if (s == "flood") return RoutingKind::Flood;
  if (s == "deliver-or-relay") return RoutingKind::DeliverOrRelay;
  if (s == "custom") return RoutingKind::Custom;
  return std::nullopt;
}

enum class Delivery { Inbox, Outbox, Drop };

inline std::string_view to_string(Delivery d) {
  switch (d) {
    case Delivery::Inbox: return "inbox";
    case Delivery::Outbox: return "outbox";
    case Delivery::Drop: return "drop";
  }
  return "?";
}

struct RoutingPolicy {
  RoutingKind kind = RoutingKind::DeliverOrRelay;
  bool dedup = true;
  /// Used when kind == Custom.
  std::function<Delivery(const Packet&, const SensorState& receiver)> custom;
};

/// Decides where `p` lands at `receiver` and puts it there.
inline Delivery network_route(const RoutingPolicy& policy, const Packet& p, SensorState& receiver) {
  if (policy.dedup && !receiver.seen.insert(p.id).second) return Delivery::Drop;
  Delivery d = Delivery::Inbox;
  switch (policy.kind) {
    case RoutingKind::Flood: break;
    case RoutingKind::DeliverOrRelay:
      d = receiver.installed.contains(p.message.label) ? Delivery::Inbox : Delivery::Outbox;
      break;
    case RoutingKind::Custom:
      d = policy.custom ? policy.custom(p, receiver) : Delivery::Inbox;
      break;
  }
  if (d == Delivery::Inbox) receiver.inbox.push_back(p);
  else if (d == Delivery::Outbox) receiver.outbox.push_back(p);
  return d;
}

inline bool in_range(Position a, Position b, double range) {
  return std::hypot(a.x - b.x, a.y - b.y) <= range;
}

// ---------------------------------------------------------------------------
// Broadcast: init-Send, then one absorption per in-range free sensor, then
// release. Each step is exposed so that membranes can be observed.

/// Wraps the sender in an empty membrane. The sender must be free, hold no
/// membrane and have a non-empty outbox.
inline void open_membrane(Network& n, const std::string& sender) {
  auto node = n.find(sender);
  if (!node || !node->membrane.empty() || node->sensor.outbox.empty())
    throw InterpreterError("broadcast precondition violated for " + sender);
  node->sensor.seen.insert(node->sensor.outbox.front().id);
}

struct Absorption {
  std::string receiver;
  Delivery delivery;
};

/// Engulfs the free in-range sensor with the smallest id, routing the
/// sender's outbox head to it. Returns nullopt when nobody is left.
inline std::optional<Absorption> absorb_next(Network& n, const std::string& sender, double range,
                                             const RoutingPolicy& policy) {
  auto idx_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < n.nodes.size(); ++i)
      if (n.nodes[i].sensor.id == id) return i;
    throw InterpreterError("unknown sender " + id);
  };
  std::size_t si = idx_of(sender);
  const Position at = n.nodes[si].sensor.position;
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    if (i == si || !n.nodes[i].membrane.empty()) continue;  // only free, non-broadcasting sensors
    if (!in_range(at, n.nodes[i].sensor.position, range)) continue;
    if (!pick || n.nodes[i].sensor.id < n.nodes[*pick].sensor.id) pick = i;
  }
  if (!pick) return std::nullopt;
  SensorState captive = std::move(n.nodes[*pick].sensor);
  n.nodes.erase(n.nodes.begin() + static_cast<long>(*pick));
  si = idx_of(sender);
  Delivery d = network_route(policy, n.nodes[si].sensor.outbox.front(), captive);
  std::string id = captive.id;
  n.nodes[si].membrane.push_back(std::move(captive));
  return Absorption{std::move(id), d};
}

/// Pops the outbox head and frees the captives.
inline Packet release(Network& n, const std::string& sender) {
  auto node = n.find(sender);
  Packet p = std::move(node->sensor.outbox.front());
  node->sensor.outbox.pop_front();
  auto captives = std::move(node->membrane);
  node->membrane.clear();
  for (auto& c : captives) n.nodes.push_back(NetworkNode{std::move(c), {}});
  n.normalize();
  return p;
}

struct BroadcastReport {
  std::string sender;
  Packet packet;
  std::vector<Absorption> absorbed;
};

inline BroadcastReport broadcast_round(Network& n, const std::string& sender, double range,
                                       const RoutingPolicy& policy) {
  open_membrane(n, sender);
  BroadcastReport r;
  r.sender = sender;
  while (auto a = absorb_next(n, sender, range, policy)) r.absorbed.push_back(*a);
  r.packet = release(n, sender);
  return r;
}

// ---------------------------------------------------------------------------
// Scheduler

enum class SchedulerMode { RoundRobin, SeededShuffle };

struct SchedulerConfig {
  std::uint64_t seed = 0;
  SchedulerMode mode = SchedulerMode::RoundRobin;
  std::int64_t max_steps = 100000;
  double radio_range = 10.0;
  bool spontaneous_moves = false;  // random R-move, shuffle mode only
  std::int64_t deferral_warning = 1000;
};

struct Waypoint {
  Clock time;
  Position pos;
};

/// Per-sensor waypoints, times strictly increasing.
using MobilityScript = std::map<std::string, std::vector<Waypoint>>;

struct TraceEvent {
  std::int64_t step = 0;
  std::string sensor;
  Rule rule = Rule::Idle;
  Clock clock = 0;
  Detail detail;
};

/// Rng for round `step`: the seed mixed with the step index.
inline Rng step_rng(std::uint64_t seed, std::int64_t step) {
  return Rng(seed ^ (static_cast<std::uint64_t>(step) * 0x9E3779B97F4A7C15ULL));
}

/// Sensors with nothing left to do. Stuck sensors count as done; a
/// non-empty inbox is inert without a pending receive.
inline bool quiescent(const SensorState& s) {
  return s.running->is_value() && s.run_queue.empty() && s.timers.empty() && s.outbox.empty();
}

class Simulation {
 public:
  Simulation(Network n, SchedulerConfig cfg, RoutingPolicy policy, ExternEnv& env, MobilityScript mobility = {})
      : net_(std::move(n)), cfg_(cfg), policy_(std::move(policy)), env_(env), mobility_(std::move(mobility)) {
    net_.normalize();
  }

  const Network& network() const { return net_; }
  Network& network() { return net_; }
  std::int64_t steps() const { return step_; }
  /// Sets the index of the next round (it seeds the shuffle).
  void set_step(std::int64_t k) { step_ = k; }
  const SchedulerConfig& config() const { return cfg_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool at_fixpoint() const {
    if (!net_.flat()) return false;
    for (auto& node : net_.nodes) {
      if (!node.sensor.outbox.empty()) return false;
      if (!net_.stuck.count(node.sensor.id) && !quiescent(node.sensor)) return false;
    }
    return true;
  }

  /// One global round; returns its events in order.
  std::vector<TraceEvent> step() {
    std::vector<TraceEvent> events;
    const std::int64_t k = step_++;
    auto emit = [&](const std::string& id, const StepOutcome& o) {
      events.push_back(TraceEvent{k, id, o.rule, o.clock, o.detail});
    };

    std::vector<std::string> order;
    for (auto& node : net_.nodes) order.push_back(node.sensor.id);
    Rng rng = step_rng(cfg_.seed, k);
    if (cfg_.mode == SchedulerMode::SeededShuffle)
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    // Phase A.
    for (auto& id : order) {
      SensorState& s = *net_.sensor(id);
      if (!net_.stuck.count(id)) {
        auto o = sensor_step(s, env_);
        if (o.rule == Rule::Stuck) net_.stuck.insert(id);
        track_deferral(id, o.rule);
        emit(id, o);
      }
      if (auto it = mobility_.find(id); it != mobility_.end()) {
        auto& next = waypoint_cursor_[id];
        while (next < it->second.size() && it->second[next].time < s.clock) ++next;
        if (next < it->second.size() && it->second[next].time == s.clock) {
          emit(id, sensor_move(s, it->second[next].pos));
          ++next;
        }
      }
      if (cfg_.spontaneous_moves && cfg_.mode == SchedulerMode::SeededShuffle && rng.chance(10)) {
        const auto span = static_cast<std::int64_t>(std::ceil(cfg_.radio_range * 2));
        Position to{static_cast<double>(rng.range(0, span)), static_cast<double>(rng.range(0, span))};
        emit(id, sensor_move(s, to));
      }
    }

    // Phase B.
    for (auto& id : sorted_ids()) {
      SensorState* s = net_.sensor(id);
      if (s->outbox.empty()) continue;
      auto r = broadcast_round(net_, id, cfg_.radio_range, policy_);
      const Clock c = net_.sensor(id)->clock;
      const std::string msg = pretty_print(r.packet.message);
      const std::string mid = r.packet.id.origin + "#" + std::to_string(r.packet.id.seq);
      for (auto& a : r.absorbed)
        events.push_back(TraceEvent{
            k, id, Rule::Broadcast, c,
            {{"message", msg}, {"id", mid}, {"to", a.receiver}, {"delivery", std::string(to_string(a.delivery))}}});
      events.push_back(TraceEvent{k, id, Rule::Release, c,
                                  {{"message", msg}, {"id", mid}, {"receivers", std::to_string(r.absorbed.size())}}});
    }
    return events;
  }

  struct Result {
    std::int64_t steps = 0;
    bool fixpoint = false;
    bool stopped = false;  // the observer asked to stop
  };

  /// Runs until a fixpoint, max_steps, or the observer returns false.
  Result run(const std::function<bool(const Simulation&, const std::vector<TraceEvent>&)>& observe = {}) {
    Result r;
    while (!at_fixpoint() && step_ < cfg_.max_steps) {
      auto events = step();
      if (observe && !observe(*this, events)) {
        r.stopped = true;
        break;
      }
    }
    r.steps = step_;
    r.fixpoint = at_fixpoint();
    return r;
  }

 private:
  Network net_;
  SchedulerConfig cfg_;
  RoutingPolicy policy_;
  ExternEnv& env_;
  MobilityScript mobility_;
  std::int64_t step_ = 0;
  std::map<std::string, std::size_t> waypoint_cursor_;
  std::map<std::string, std::int64_t> deferrals_;
  std::vector<std::string> warnings_;

  std::vector<std::string> sorted_ids() const {
    std::vector<std::string> ids;
    for (auto& node : net_.nodes) ids.push_back(node.sensor.id);
    return ids;
  }

  void track_deferral(const std::string& id, Rule r) {
    if (r == Rule::Next || r == Rule::Trigger || r == Rule::Expire) return;  // deferral loops pass through these
    auto& n = deferrals_[id];
    if (r != Rule::NoFunction) {
      n = 0;
      return;
    }
    if (++n == cfg_.deferral_warning)
      warnings_.push_back("sensor " + id + ": " + std::to_string(n) +
                          " consecutive no-function deferrals; the missing function may never arrive");
  }
};

/// One round over `n`, as a free function.
inline std::vector<TraceEvent> network_step(Network& n, const SchedulerConfig& cfg, const RoutingPolicy& policy,
                                            ExternEnv& env, std::int64_t step_index,
                                            const MobilityScript& mobility = {}) {
  Simulation sim(std::move(n), cfg, policy, env, mobility);
  sim.set_step(step_index);
  auto events = sim.step();
  n = std::move(sim.network());
  return events;
}

}  // namespace callas
