#pragma once

// Run-time configurations: messages, timer tables, sensors and networks.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "callas/ast.hpp"

namespace callas {

using Clock = std::int64_t;

/// <l(v1 ... vn)>, a packaged function call. Arguments are closed.
struct Message {
  Label label;
  std::vector<Value> args;
  bool operator==(const Message&) const = default;
};

/// Routing-layer identity of a message copy, assigned at send time and kept
/// across relays. Invisible to the calculus.
struct MessageId {
  std::string origin;
  std::uint64_t seq = 0;
  auto operator<=>(const MessageId&) const = default;
};

struct Packet {
  Message message;
  MessageId id;
  bool operator==(const Packet&) const = default;
};

/// (l(v), period, expireAt, nextAt), all instants absolute in ms.
struct TimerEntry {
  Label label;
  std::vector<Value> args;
  Clock period = 1;
  Clock expire_at = 0;
  Clock next_at = 0;
  bool operator==(const TimerEntry&) const = default;
};

struct Position {
  double x = 0;
  double y = 0;
  bool operator==(const Position&) const = default;
};

struct SensorState {
  std::string id;
  ProcPtr running = proc::unit();
  std::deque<ProcPtr> run_queue;
  ModuleValue installed;
  std::vector<TimerEntry> timers;
  std::deque<Packet> inbox;
  std::deque<Packet> outbox;
  Position position;
  Clock clock = 0;

  // Routing-layer bookkeeping.
  std::uint64_t next_seq = 0;
  std::set<MessageId> seen;
};

inline bool same_state(const SensorState& a, const SensorState& b) {
  if (a.id != b.id || !same_proc(a.running, b.running) || a.run_queue.size() != b.run_queue.size()) return false;
  for (std::size_t i = 0; i < a.run_queue.size(); ++i)
    if (!same_proc(a.run_queue[i], b.run_queue[i])) return false;
  return a.installed == b.installed && a.timers == b.timers && a.inbox == b.inbox && a.outbox == b.outbox &&
         a.position == b.position && a.clock == b.clock;
}

/// A free sensor, optionally wrapped in a broadcast membrane holding the
/// sensors it has already served in the current broadcast.
struct NetworkNode {
  SensorState sensor;
  std::vector<SensorState> membrane;
};

/// Multiset of sensors, kept sorted by id.
struct Network {
  std::vector<NetworkNode> nodes;
  std::set<std::string> stuck;  // ids the scheduler found without an applicable rule

  bool flat() const {
    return std::all_of(nodes.begin(), nodes.end(), [](auto& n) { return n.membrane.empty(); });
  }

  void normalize() {
    std::sort(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return a.sensor.id < b.sensor.id; });
  }

  NetworkNode* find(const std::string& id) {
    for (auto& n : nodes)
      if (n.sensor.id == id) return &n;
    return nullptr;
  }
  const NetworkNode* find(const std::string& id) const {
    for (auto& n : nodes)
      if (n.sensor.id == id) return &n;
    return nullptr;
  }

  /// Every sensor, free and captive, in id order.
  std::vector<const SensorState*> all_sensors() const {
    std::vector<const SensorState*> out;
    for (auto& n : nodes) {
      out.push_back(&n.sensor);
      for (auto& c : n.membrane) out.push_back(&c);
    }
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->id < b->id; });
    return out;
  }

  SensorState* sensor(const std::string& id) {
    for (auto& n : nodes) {
      if (n.sensor.id == id) return &n.sensor;
      for (auto& c : n.membrane)
        if (c.id == id) return &c;
    }
    return nullptr;
  }
  const SensorState* sensor(const std::string& id) const { return const_cast<Network*>(this)->sensor(id); }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (auto* s : all_sensors()) out.push_back(s->id);
    return out;
  }
};

}  // namespace callas
