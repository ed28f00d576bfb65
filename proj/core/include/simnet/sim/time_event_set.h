#ifndef SIMNET_SIM_TIME_EVENT_SET_H_
#define SIMNET_SIM_TIME_EVENT_SET_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <string>

#include "simnet/sim/time.h"

namespace simnet::sim {

struct NodeId {
  std::uint32_t value = 0xFFFFFFFF;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Position of an event in a TimeEventSet. Unique because `seq` is drawn from
// one counter per kernel.
struct EventKey {
  SimTime expiry{0};
  std::uint64_t seq = 0;
  friend auto operator<=>(const EventKey&, const EventKey&) = default;
};

struct EventHandle {
  NodeId owner;
  EventKey key;
  bool valid() const { return key.seq != 0; }
};

struct TimeEvent {
  EventKey key;
  NodeId owner;
  std::string kind;
  std::string detail;
  std::function<void()> callback;
};

// Expiry-ordered set of callbacks. The head is always the next event due;
// events at equal expiry leave in insertion (seq) order. Unlike a priority
// queue, any element can be erased.
class TimeEventSet {
 public:
  void Insert(TimeEvent event);
  bool Erase(const EventKey& key);
  bool Contains(const EventKey& key) const;

  // nullptr when empty.
  const TimeEvent* Head() const;
  TimeEvent PopHead();

  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

 private:
  struct ByKey {
    using is_transparent = void;
    bool operator()(const TimeEvent& a, const TimeEvent& b) const {
      return a.key < b.key;
    }
    bool operator()(const TimeEvent& a, const EventKey& b) const {
      return a.key < b;
    }
    bool operator()(const EventKey& a, const TimeEvent& b) const {
      return a < b.key;
    }
  };

  std::set<TimeEvent, ByKey> events_;
};

}  // namespace simnet::sim

#endif  // SIMNET_SIM_TIME_EVENT_SET_H_
