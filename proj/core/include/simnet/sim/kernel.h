#ifndef SIMNET_SIM_KERNEL_H_
#define SIMNET_SIM_KERNEL_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simnet/dns/message.h"
#include "simnet/sim/random.h"
#include "simnet/sim/stats.h"
#include "simnet/sim/time.h"
#include "simnet/sim/time_event_set.h"

namespace simnet::sim {

class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A run-time invariant (single wakeup, probe latency, ...) failed.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An event callback threw; the message names the event.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroupId {
  std::uint32_t value = 0;
  friend auto operator<=>(const GroupId&, const GroupId&) = default;
};

enum class Transport { kUnicast, kMulticast };

struct SimPacket {
  NodeId src;
  NodeId dst;                    // unicast destination
  std::optional<GroupId> group;  // set for multicast
  Transport transport = Transport::kUnicast;
  std::shared_ptr<const dns::DnsMessage> message;
  // Raw bytes instead of a structured message; parsed by the receiver.
  std::shared_ptr<const std::vector<std::uint8_t>> raw;
  std::size_t wire_bytes = 0;
  SimTime sent_at{0};
};

struct CapturedPacket {
  std::uint64_t index = 0;
  SimPacket packet;
};

class Kernel;

// A simulated host. Owned by the kernel; all methods run inside kernel
// callbacks.
class Node {
 public:
  virtual ~Node() = default;

  NodeId id() const { return id_; }
  const std::string& name() const { return name_; }
  const dns::Ipv4Address& address() const { return address_; }
  const std::string& role() const { return role_; }
  Kernel& kernel() const { return *kernel_; }

  // Invoked once, at the time the node is added.
  virtual void Start() {}
  virtual void OnPacket(const SimPacket& packet,
                        const dns::DnsMessage& message) = 0;

 protected:
  SimTime now() const;
  EventHandle ScheduleAt(SimTime at, std::string kind,
                         std::function<void()> callback,
                         std::string detail = {});
  EventHandle ScheduleAfter(SimTime delay, std::string kind,
                            std::function<void()> callback,
                            std::string detail = {});
  // Cancels and invalidates `handle`. Returns whether the event was pending.
  bool Cancel(EventHandle& handle);

  void SendTo(NodeId dst, dns::DnsMessage message);
  void SendToGroup(GroupId group, dns::DnsMessage message);
  NodeStats& stats();
  RandomStream MakeRandomStream(std::string_view purpose) const;

 private:
  friend class Kernel;
  Kernel* kernel_ = nullptr;
  NodeId id_;
  std::string name_;
  dns::Ipv4Address address_;
  std::string role_;
};

// Deterministic discrete-event engine.
//
// Every node owns a TimeEventSet. The kernel keeps exactly one wakeup per
// non-empty set, keyed by that set's head, and always runs the globally
// earliest wakeup (ties by sequence number).
class Kernel {
 public:
  explicit Kernel(std::uint64_t master_seed = 1);
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;
  ~Kernel();

  NodeId AddNode(std::unique_ptr<Node> node, std::string name,
                 dns::Ipv4Address address, std::string role = {});

  template <typename T, typename... Args>
  T& Emplace(std::string name, dns::Ipv4Address address, std::string role,
             Args&&... args) {
    auto node = std::make_unique<T>(std::forward<Args>(args)...);
    T& ref = *node;
    AddNode(std::move(node), std::move(name), address, std::move(role));
    return ref;
  }

  std::size_t node_count() const { return nodes_.size(); }
  Node& node(NodeId id) { return *nodes_.at(id.value).node; }
  const Node& node(NodeId id) const { return *nodes_.at(id.value).node; }
  std::optional<NodeId> FindNode(std::string_view name) const;
  std::optional<NodeId> NodeByAddress(const dns::Ipv4Address& address) const;

  // Topology. Links are directed; `AddLink` installs both directions unless
  // told otherwise. Pairs without a link use the default delay, if any.
  void SetDefaultDelay(std::optional<SimTime> delay) { default_delay_ = delay; }
  void AddLink(NodeId a, NodeId b, SimTime delay, bool both_directions = true);
  std::optional<SimTime> LinkDelay(NodeId from, NodeId to) const;
  GroupId AddGroup(std::string name);
  void JoinGroup(GroupId group, NodeId node);
  const std::vector<NodeId>& GroupMembers(GroupId group) const;
  std::optional<GroupId> FindGroup(std::string_view name) const;

  SimTime now() const { return now_; }
  std::uint64_t master_seed() const { return master_seed_; }

  // Throws SchedulingError when `expiry` lies in the past.
  EventHandle Schedule(NodeId owner, SimTime expiry, std::string kind,
                       std::function<void()> callback, std::string detail = {});
  bool Cancel(const EventHandle& handle);

  // Processes events with expiry <= `end` in global (expiry, seq) order and
  // leaves the clock at max(now, end). Returns the number processed.
  std::size_t RunUntil(SimTime end);

  // Schedules delivery events; returns how many copies were scheduled.
  std::size_t Send(SimPacket packet);

  // Same (name, seed) gives the same sequence; seed defaults to the master.
  RandomStream RngStream(std::string_view name) const;
  RandomStream RngStream(std::string_view name, std::uint64_t seed) const;

  NodeStats& stats(NodeId id) { return nodes_.at(id.value).stats; }
  const NodeStats& stats(NodeId id) const { return nodes_.at(id.value).stats; }

  std::uint64_t delivered_bytes() const { return delivered_bytes_; }
  std::uint64_t scheduled_copy_bytes() const { return scheduled_copy_bytes_; }
  std::uint64_t events_processed() const { return events_processed_; }

  // One line per processed event: time<TAB>node<TAB>kind<TAB>detail.
  void EnableTrace(bool on) { trace_enabled_ = on; }
  const std::vector<std::string>& trace() const { return trace_; }

  void EnableCapture(bool on) { capture_enabled_ = on; }
  const std::vector<CapturedPacket>& capture() const { return capture_; }

  // Verifies the single-wakeup invariant after every event.
  void set_check_invariants(bool on) { check_invariants_ = on; }
  void VerifyWakeups() const;

  std::size_t PendingWakeups(NodeId id) const;
  std::optional<SimTime> WakeupTime(NodeId id) const;
  std::size_t PendingEvents(NodeId id) const {
    return nodes_.at(id.value).events.size();
  }

 private:
  struct Wakeup {
    EventKey key;
    NodeId node;
    friend auto operator<=>(const Wakeup&, const Wakeup&) = default;
  };

  struct NodeSlot {
    std::unique_ptr<Node> node;
    TimeEventSet events;
    std::optional<Wakeup> wakeup;
    NodeStats stats;
  };

  struct Group {
    std::string name;
    std::vector<NodeId> members;
  };

  void RefreshWakeup(NodeId id);
  void ScheduleDelivery(const SimPacket& packet, NodeId to, SimTime delay);
  void Deliver(const SimPacket& packet, NodeId to);

  std::uint64_t master_seed_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 1;
  std::vector<NodeSlot> nodes_;
  std::set<Wakeup> wakeups_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, SimTime> links_;
  std::optional<SimTime> default_delay_;
  std::vector<Group> groups_;

  std::uint64_t delivered_bytes_ = 0;
  std::uint64_t scheduled_copy_bytes_ = 0;
  std::uint64_t events_processed_ = 0;

  bool trace_enabled_ = false;
  std::vector<std::string> trace_;
  bool capture_enabled_ = false;
  std::vector<CapturedPacket> capture_;
  bool check_invariants_ = false;
};

}  // namespace simnet::sim

#endif  // SIMNET_SIM_KERNEL_H_
