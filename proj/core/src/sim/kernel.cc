#include "simnet/sim/kernel.h"

#include "simnet/dns/wire.h"

namespace simnet::sim {

SimTime Node::now() const { return kernel_->now(); }

EventHandle Node::ScheduleAt(SimTime at, std::string kind,
                             std::function<void()> callback,
                             std::string detail) {
  return kernel_->Schedule(id_, at, std::move(kind), std::move(callback),
                           std::move(detail));
}

EventHandle Node::ScheduleAfter(SimTime delay, std::string kind,
                                std::function<void()> callback,
                                std::string detail) {
  return ScheduleAt(now() + delay, std::move(kind), std::move(callback),
                    std::move(detail));
}

bool Node::Cancel(EventHandle& handle) {
  if (!handle.valid()) return false;
  const bool removed = kernel_->Cancel(handle);
  handle = EventHandle{};
  return removed;
}

void Node::SendTo(NodeId dst, dns::DnsMessage message) {
  SimPacket packet;
  packet.src = id_;
  packet.dst = dst;
  packet.transport = Transport::kUnicast;
  packet.message = std::make_shared<const dns::DnsMessage>(std::move(message));
  kernel_->Send(std::move(packet));
}

void Node::SendToGroup(GroupId group, dns::DnsMessage message) {
  SimPacket packet;
  packet.src = id_;
  packet.group = group;
  packet.transport = Transport::kMulticast;
  packet.message = std::make_shared<const dns::DnsMessage>(std::move(message));
  kernel_->Send(std::move(packet));
}

NodeStats& Node::stats() { return kernel_->stats(id_); }

RandomStream Node::MakeRandomStream(std::string_view purpose) const {
  return kernel_->RngStream(name_ + "/" + std::string(purpose));
}

Kernel::Kernel(std::uint64_t master_seed) : master_seed_(master_seed) {}

Kernel::~Kernel() = default;

NodeId Kernel::AddNode(std::unique_ptr<Node> node, std::string name,
                       dns::Ipv4Address address, std::string role) {
  if (FindNode(name)) {
    throw std::invalid_argument("duplicate node name " + name);
  }
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  node->kernel_ = this;
  node->id_ = id;
  node->name_ = std::move(name);
  node->address_ = address;
  node->role_ = std::move(role);
  Node* raw = node.get();
  nodes_.push_back(NodeSlot{std::move(node), {}, std::nullopt, {}});
  Schedule(id, now_, "start", [raw] { raw->Start(); });
  return id;
}

std::optional<NodeId> Kernel::FindNode(std::string_view name) const {
  for (const auto& slot : nodes_) {
    if (slot.node->name() == name) return slot.node->id();
  }
  return std::nullopt;
}

std::optional<NodeId> Kernel::NodeByAddress(
    const dns::Ipv4Address& address) const {
  for (const auto& slot : nodes_) {
    if (slot.node->address() == address) return slot.node->id();
  }
  return std::nullopt;
}

void Kernel::AddLink(NodeId a, NodeId b, SimTime delay, bool both_directions) {
  if (delay < SimTime::zero()) throw std::invalid_argument("negative link delay");
  links_[{a.value, b.value}] = delay;
  if (both_directions) links_[{b.value, a.value}] = delay;
}

std::optional<SimTime> Kernel::LinkDelay(NodeId from, NodeId to) const {
  if (auto it = links_.find({from.value, to.value}); it != links_.end()) {
    return it->second;
  }
  return default_delay_;
}

GroupId Kernel::AddGroup(std::string name) {
  groups_.push_back(Group{std::move(name), {}});
  return GroupId{static_cast<std::uint32_t>(groups_.size() - 1)};
}

void Kernel::JoinGroup(GroupId group, NodeId node) {
  if (node.value >= nodes_.size()) {
    throw std::invalid_argument("group member is not a node");
  }
  groups_.at(group.value).members.push_back(node);
}

const std::vector<NodeId>& Kernel::GroupMembers(GroupId group) const {
  return groups_.at(group.value).members;
}

std::optional<GroupId> Kernel::FindGroup(std::string_view name) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].name == name) return GroupId{static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

EventHandle Kernel::Schedule(NodeId owner, SimTime expiry, std::string kind,
                             std::function<void()> callback,
                             std::string detail) {
  if (expiry < now_) {
    throw SchedulingError("event '" + kind + "' scheduled at " +
                          FormatTime(expiry) + " before now " +
                          FormatTime(now_));
  }
  auto& slot = nodes_.at(owner.value);
  const EventKey key{expiry, next_seq_++};
  slot.events.Insert(TimeEvent{key, owner, std::move(kind), std::move(detail),
                               std::move(callback)});
  if (slot.events.Head()->key == key) RefreshWakeup(owner);
  return EventHandle{owner, key};
}

bool Kernel::Cancel(const EventHandle& handle) {
  if (!handle.valid() || handle.owner.value >= nodes_.size()) return false;
  auto& slot = nodes_[handle.owner.value];
  const bool was_head =
      slot.events.Head() != nullptr && slot.events.Head()->key == handle.key;
  if (!slot.events.Erase(handle.key)) return false;
  if (was_head) RefreshWakeup(handle.owner);
  return true;
}

void Kernel::RefreshWakeup(NodeId id) {
  auto& slot = nodes_[id.value];
  if (slot.wakeup) {
    wakeups_.erase(*slot.wakeup);
    slot.wakeup.reset();
  }
  if (const TimeEvent* head = slot.events.Head()) {
    slot.wakeup = Wakeup{head->key, id};
    wakeups_.insert(*slot.wakeup);
  }
}

std::size_t Kernel::RunUntil(SimTime end) {
  std::size_t processed = 0;
  while (!wakeups_.empty()) {
    const Wakeup next = *wakeups_.begin();
    if (next.key.expiry > end) break;
    auto& slot = nodes_[next.node.value];
    TimeEvent event = slot.events.PopHead();
    RefreshWakeup(next.node);
    if (event.key.expiry < now_) {
      throw InvariantViolation("clock would move backward");
    }
    now_ = event.key.expiry;
    if (trace_enabled_) {
      trace_.push_back(FormatTime(now_) + "\t" + slot.node->name() + "\t" +
                       event.kind + "\t" + event.detail);
    }
    try {
      event.callback();
    } catch (const InvariantViolation&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError("event '" + event.kind + "' on node " +
                            nodes_[next.node.value].node->name() + " at " +
                            FormatTime(now_) + " failed: " + e.what());
    }
    ++processed;
    ++events_processed_;
    if (check_invariants_) VerifyWakeups();
  }
  if (end > now_) now_ = end;
  return processed;
}

void Kernel::VerifyWakeups() const {
  std::size_t expected = 0;
  for (const auto& slot : nodes_) {
    const TimeEvent* head = slot.events.Head();
    if (head == nullptr) {
      if (slot.wakeup) {
        throw InvariantViolation("node " + slot.node->name() +
                                 " has a wakeup but no events");
      }
      continue;
    }
    ++expected;
    if (!slot.wakeup || slot.wakeup->key != head->key ||
        !wakeups_.contains(*slot.wakeup)) {
      throw InvariantViolation("node " + slot.node->name() +
                               " wakeup does not match its head event");
    }
  }
  if (wakeups_.size() != expected) {
    throw InvariantViolation("more than one wakeup pending for some node");
  }
}

std::size_t Kernel::PendingWakeups(NodeId id) const {
  std::size_t count = 0;
  for (const auto& w : wakeups_) {
    if (w.node == id) ++count;
  }
  return count;
}

std::optional<SimTime> Kernel::WakeupTime(NodeId id) const {
  const auto& slot = nodes_.at(id.value);
  if (!slot.wakeup) return std::nullopt;
  return slot.wakeup->key.expiry;
}

std::size_t Kernel::Send(SimPacket packet) {
  if (packet.src.value >= nodes_.size()) {
    throw std::invalid_argument("packet source is not a node");
  }
  packet.sent_at = now_;
  if (packet.message) {
    packet.wire_bytes = dns::MessageWireSize(*packet.message, /*compress=*/true);
  } else if (packet.raw) {
    packet.wire_bytes = packet.raw->size();
  } else {
    throw std::invalid_argument("packet without payload");
  }

  auto& sender = nodes_[packet.src.value].stats;
  if (packet.message) {
    if (packet.message->IsResponse()) {
      ++sender.responses_sent;
    } else {
      ++sender.queries_sent;
    }
  }
  if (capture_enabled_) {
    capture_.push_back(CapturedPacket{capture_.size(), packet});
  }

  std::size_t copies = 0;
  if (packet.transport == Transport::kMulticast) {
    if (!packet.group) throw std::invalid_argument("multicast without group");
    sender.mcast_bytes_tx += packet.wire_bytes;
    ++sender.mcast_packets_tx;
    for (NodeId member : groups_.at(packet.group->value).members) {
      if (member == packet.src) continue;
      const auto delay = LinkDelay(packet.src, member);
      if (!delay) {
        ++sender.dropped_no_route;
        continue;
      }
      ScheduleDelivery(packet, member, *delay);
      ++copies;
    }
  } else {
    if (packet.dst.value >= nodes_.size()) {
      throw std::invalid_argument("packet destination is not a node");
    }
    sender.ucast_bytes_tx += packet.wire_bytes;
    ++sender.ucast_packets_tx;
    const auto delay = LinkDelay(packet.src, packet.dst);
    if (!delay) {
      ++sender.dropped_no_route;
      return 0;
    }
    ScheduleDelivery(packet, packet.dst, *delay);
    copies = 1;
  }
  return copies;
}

void Kernel::ScheduleDelivery(const SimPacket& packet, NodeId to,
                              SimTime delay) {
  scheduled_copy_bytes_ += packet.wire_bytes;
  std::string detail;
  if (trace_enabled_) {
    detail = "from=" + nodes_[packet.src.value].node->name() +
             " bytes=" + std::to_string(packet.wire_bytes) +
             (packet.transport == Transport::kMulticast ? " mcast" : " ucast");
  }
  Schedule(to, now_ + delay, "deliver",
           [this, packet, to] { Deliver(packet, to); }, std::move(detail));
}

void Kernel::Deliver(const SimPacket& packet, NodeId to) {
  auto& slot = nodes_[to.value];
  if (packet.transport == Transport::kMulticast) {
    slot.stats.mcast_bytes_rx += packet.wire_bytes;
    ++slot.stats.mcast_packets_rx;
  } else {
    slot.stats.ucast_bytes_rx += packet.wire_bytes;
    ++slot.stats.ucast_packets_rx;
  }
  delivered_bytes_ += packet.wire_bytes;

  if (packet.message) {
    slot.node->OnPacket(packet, *packet.message);
    return;
  }
  dns::DnsMessage parsed;
  try {
    parsed = dns::ParseMessage(*packet.raw);
  } catch (const dns::WireParseError&) {
    ++slot.stats.malformed_packets;
    return;
  }
  slot.node->OnPacket(packet, parsed);
}

RandomStream Kernel::RngStream(std::string_view name) const {
  return RandomStream(name, master_seed_);
}

RandomStream Kernel::RngStream(std::string_view name,
                               std::uint64_t seed) const {
  return RandomStream(name, seed);
}

}  // namespace simnet::sim
