#ifndef SIMNET_MDNS_SCHEDULERS_H_
#define SIMNET_MDNS_SCHEDULERS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simnet/dns/message.h"
#include "simnet/sim/kernel.h"

namespace simnet::mdns {

using sim::SimTime;

// What a scheduler needs from its node. All events land in the node's own
// TimeEventSet, so the kernel's single-wakeup rule covers the schedulers.
class SchedulerHost {
 public:
  virtual ~SchedulerHost() = default;
  virtual SimTime Now() const = 0;
  virtual sim::EventHandle At(SimTime at, std::string kind,
                              std::function<void()> callback) = 0;
  virtual void CancelEvent(sim::EventHandle& handle) = 0;
  virtual void Multicast(dns::DnsMessage message) = 0;
  virtual void Unicast(sim::NodeId to, dns::DnsMessage message) = 0;
  virtual sim::NodeStats& Stats() = 0;
  virtual sim::RandomStream& Rng() = 0;
};

struct ProbeJob {
  dns::DomainName name;
  std::vector<dns::ResourceRecord> records;  // proposed, sent as authority
  SimTime enqueued{0};
  SimTime latest_send{0};
};

// Collects probes and sends everything pending in one packet when the
// earliest deadline comes due.
class ProbeScheduler {
 public:
  using SentCallback = std::function<void(const std::vector<dns::DomainName>&)>;

  ProbeScheduler(SchedulerHost& host, SimTime max_defer, SentCallback on_sent);

  // `defer` is clamped to the maximum. Immediate probes go out alone, now.
  void Post(dns::DomainName name, std::vector<dns::ResourceRecord> records,
            SimTime defer, bool immediate = false);
  // Takes a pending probe out of the schedule. Returns whether one was found.
  bool Remove(const dns::DomainName& name);

  std::size_t pending() const { return pending_.size(); }
  SimTime max_latency() const { return max_latency_; }
  std::uint64_t packets_sent() const { return packets_sent_; }

 private:
  void Reschedule();
  void Flush();
  void Send(const std::vector<ProbeJob>& jobs);

  SchedulerHost& host_;
  SimTime max_defer_;
  SentCallback on_sent_;
  std::vector<ProbeJob> pending_;
  sim::EventHandle event_;
  SimTime max_latency_{0};
  std::uint64_t packets_sent_ = 0;
};

// Outgoing queries with duplicate-question and known-answer suppression.
class QueryScheduler {
 public:
  using KnownAnswerSource =
      std::function<std::vector<dns::ResourceRecord>(const dns::DnsQuestion&)>;

  QueryScheduler(SchedulerHost& host, KnownAnswerSource known_answers,
                 SimTime duplicate_window, SimTime min_delay,
                 SimTime max_delay);

  // Returns false if the question was suppressed on the spot.
  bool Post(const dns::DnsQuestion& question);
  // Bookkeeping for a query another host multicast.
  void Observe(const dns::DnsMessage& query);

  std::size_t pending() const { return pending_.size(); }
  std::uint64_t packets_sent() const { return packets_sent_; }
  std::uint64_t suppressed() const { return suppressed_; }

 private:
  struct Observed {
    SimTime at{0};
    std::vector<dns::ResourceRecord> known;
  };
  struct Job {
    dns::DnsQuestion question;
    SimTime enqueued{0};
    SimTime latest_send{0};
  };
  using Key = std::pair<std::string, dns::RRType>;

  bool IsDuplicate(const dns::DnsQuestion& q) const;
  void Reschedule();
  void Flush();

  SchedulerHost& host_;
  KnownAnswerSource known_answers_;
  SimTime window_;
  SimTime min_delay_;
  SimTime max_delay_;
  std::map<Key, Observed> observed_;
  std::vector<Job> pending_;
  sim::EventHandle event_;
  std::uint64_t packets_sent_ = 0;
  std::uint64_t suppressed_ = 0;
};

// Aggregates responses per destination. Multicast batches honour duplicate
// answer suppression for records posted as suppressible.
class ResponseScheduler {
 public:
  ResponseScheduler(SchedulerHost& host, SimTime min_delay, SimTime max_delay);

  // Immediate jobs are flushed at the current instant, after the running
  // callback, so simultaneous posts share a packet.
  void Post(std::vector<dns::ResourceRecord> answers,
            std::vector<dns::ResourceRecord> additionals,
            std::optional<sim::NodeId> unicast_to, bool immediate,
            bool suppressible);

  // Records another host multicast; drops matching pending answers.
  void Observe(const std::vector<dns::ResourceRecord>& records);

  std::size_t pending_batches() const { return batches_.size(); }
  std::uint64_t packets_sent() const { return packets_sent_; }
  std::uint64_t suppressed() const { return suppressed_; }

 private:
  struct Pending {
    dns::ResourceRecord rr;
    bool suppressible = false;
  };
  struct Batch {
    std::vector<Pending> answers;
    std::vector<dns::ResourceRecord> additionals;
    SimTime deadline{0};
    sim::EventHandle event;
  };
  static constexpr std::uint32_t kMulticastKey = 0xFFFFFFFF;

  void Flush(std::uint32_t key);

  SchedulerHost& host_;
  SimTime min_delay_;
  SimTime max_delay_;
  std::map<std::uint32_t, Batch> batches_;
  std::uint64_t packets_sent_ = 0;
  std::uint64_t suppressed_ = 0;
};

// `b` contains a record with the same data as `a` and at least half its TTL.
bool CoveredBy(const dns::ResourceRecord& a,
               const std::vector<dns::ResourceRecord>& b);

}  // namespace simnet::mdns

#endif  // SIMNET_MDNS_SCHEDULERS_H_
