#include "simnet/mdns/schedulers.h"

#include <algorithm>

namespace simnet::mdns {
namespace {

bool ContainsData(const std::vector<dns::ResourceRecord>& set,
                  const dns::ResourceRecord& rr) {
  return std::any_of(set.begin(), set.end(), [&](const auto& x) {
    return dns::SameRecordData(x, rr);
  });
}

bool Answers(const dns::ResourceRecord& rr, const dns::DnsQuestion& q) {
  return rr.owner == q.qname &&
         (q.qtype == dns::RRType::kANY || rr.type == q.qtype);
}

}  // namespace

bool CoveredBy(const dns::ResourceRecord& a,
               const std::vector<dns::ResourceRecord>& b) {
  return std::any_of(b.begin(), b.end(), [&](const auto& r) {
    return dns::SameRecordData(a, r) &&
           2 * static_cast<std::uint64_t>(r.ttl) >= a.ttl;
  });
}

// ---------------------------------------------------------------------------

ProbeScheduler::ProbeScheduler(SchedulerHost& host, SimTime max_defer,
                               SentCallback on_sent)
    : host_(host), max_defer_(max_defer), on_sent_(std::move(on_sent)) {}

void ProbeScheduler::Post(dns::DomainName name,
                          std::vector<dns::ResourceRecord> records,
                          SimTime defer, bool immediate) {
  const SimTime now = host_.Now();
  if (immediate) {
    Send({ProbeJob{std::move(name), std::move(records), now, now}});
    return;
  }
  defer = std::clamp(defer, SimTime::zero(), max_defer_);
  pending_.push_back(
      ProbeJob{std::move(name), std::move(records), now, now + defer});
  Reschedule();
}

bool ProbeScheduler::Remove(const dns::DomainName& name) {
  const auto removed = std::erase_if(
      pending_, [&](const ProbeJob& j) { return j.name == name; });
  if (removed == 0) return false;
  Reschedule();
  return true;
}

void ProbeScheduler::Reschedule() {
  if (pending_.empty()) {
    host_.CancelEvent(event_);
    return;
  }
  const SimTime due =
      std::min_element(pending_.begin(), pending_.end(),
                       [](const auto& a, const auto& b) {
                         return a.latest_send < b.latest_send;
                       })
          ->latest_send;
  if (event_.valid() && event_.key.expiry == due) return;
  host_.CancelEvent(event_);
  event_ = host_.At(due, "probe-send", [this] { Flush(); });
}

void ProbeScheduler::Flush() {
  event_ = sim::EventHandle{};
  std::vector<ProbeJob> jobs = std::move(pending_);
  pending_.clear();
  if (!jobs.empty()) Send(jobs);
}

void ProbeScheduler::Send(const std::vector<ProbeJob>& jobs) {
  const SimTime now = host_.Now();
  dns::DnsMessage msg;
  std::vector<dns::DomainName> names;
  for (const auto& job : jobs) {
    const SimTime latency = now - job.enqueued;
    if (latency > max_defer_) {
      throw sim::InvariantViolation(
          "probe for " + job.name.ToString() + " left after " +
          sim::FormatTime(latency) + "s");
    }
    max_latency_ = std::max(max_latency_, latency);
    msg.questions.push_back(
        dns::DnsQuestion{job.name, dns::RRType::kANY, dns::RRClass::kIN});
    msg.authorities.insert(msg.authorities.end(), job.records.begin(),
                           job.records.end());
    names.push_back(job.name);
  }
  ++packets_sent_;
  host_.Multicast(std::move(msg));
  on_sent_(names);
}

// ---------------------------------------------------------------------------

QueryScheduler::QueryScheduler(SchedulerHost& host,
                               KnownAnswerSource known_answers,
                               SimTime duplicate_window, SimTime min_delay,
                               SimTime max_delay)
    : host_(host),
      known_answers_(std::move(known_answers)),
      window_(duplicate_window),
      min_delay_(min_delay),
      max_delay_(max_delay) {}

bool QueryScheduler::Post(const dns::DnsQuestion& question) {
  if (IsDuplicate(question)) {
    ++suppressed_;
    ++host_.Stats().suppressed_queries;
    return false;
  }
  const bool already = std::any_of(pending_.begin(), pending_.end(),
                                   [&](const Job& j) { return j.question == question; });
  if (already) return true;
  const SimTime now = host_.Now();
  const SimTime delay = host_.Rng().UniformTime(min_delay_, max_delay_);
  pending_.push_back(Job{question, now, now + delay});
  Reschedule();
  return true;
}

bool QueryScheduler::IsDuplicate(const dns::DnsQuestion& q) const {
  auto it = observed_.find({q.qname.CanonicalKey(), q.qtype});
  if (it == observed_.end()) return false;
  if (host_.Now() - it->second.at > window_) return false;
  // Their known answers must be a subset of ours, or our query would
  // carry information theirs did not.
  const auto ours = known_answers_(q);
  return std::all_of(it->second.known.begin(), it->second.known.end(),
                     [&](const auto& rr) { return ContainsData(ours, rr); });
}

void QueryScheduler::Observe(const dns::DnsMessage& query) {
  if (!query.authorities.empty()) return;  // probe
  for (const auto& q : query.questions) {
    Observed obs{host_.Now(), {}};
    for (const auto& rr : query.answers) {
      if (Answers(rr, q)) obs.known.push_back(rr);
    }
    observed_[{q.qname.CanonicalKey(), q.qtype}] = std::move(obs);
  }
}

void QueryScheduler::Reschedule() {
  if (pending_.empty()) {
    host_.CancelEvent(event_);
    return;
  }
  const SimTime due =
      std::min_element(pending_.begin(), pending_.end(),
                       [](const auto& a, const auto& b) {
                         return a.latest_send < b.latest_send;
                       })
          ->latest_send;
  if (event_.valid() && event_.key.expiry == due) return;
  host_.CancelEvent(event_);
  event_ = host_.At(due, "query-send", [this] { Flush(); });
}

void QueryScheduler::Flush() {
  event_ = sim::EventHandle{};
  std::vector<Job> jobs = std::move(pending_);
  pending_.clear();
  dns::DnsMessage msg;
  for (const auto& job : jobs) {
    if (IsDuplicate(job.question)) {
      ++suppressed_;
      ++host_.Stats().suppressed_queries;
      continue;
    }
    msg.questions.push_back(job.question);
    for (auto& rr : known_answers_(job.question)) {
      if (!ContainsData(msg.answers, rr)) msg.answers.push_back(std::move(rr));
    }
  }
  if (msg.questions.empty()) return;
  ++packets_sent_;
  host_.Multicast(std::move(msg));
}

// ---------------------------------------------------------------------------

ResponseScheduler::ResponseScheduler(SchedulerHost& host, SimTime min_delay,
                                     SimTime max_delay)
    : host_(host), min_delay_(min_delay), max_delay_(max_delay) {}

void ResponseScheduler::Post(std::vector<dns::ResourceRecord> answers,
                             std::vector<dns::ResourceRecord> additionals,
                             std::optional<sim::NodeId> unicast_to,
                             bool immediate, bool suppressible) {
  if (answers.empty()) return;
  const std::uint32_t key = unicast_to ? unicast_to->value : kMulticastKey;
  const SimTime now = host_.Now();
  const SimTime deadline =
      immediate ? now : now + host_.Rng().UniformTime(min_delay_, max_delay_);

  auto [it, inserted] = batches_.try_emplace(key);
  Batch& batch = it->second;
  for (auto& rr : answers) batch.answers.push_back(Pending{std::move(rr), suppressible});
  for (auto& rr : additionals) batch.additionals.push_back(std::move(rr));
  if (inserted || deadline < batch.deadline) {
    batch.deadline = deadline;
    host_.CancelEvent(batch.event);
    batch.event = host_.At(deadline, "response-send", [this, key] { Flush(key); });
  }
}

void ResponseScheduler::Observe(
    const std::vector<dns::ResourceRecord>& records) {
  auto it = batches_.find(kMulticastKey);
  if (it == batches_.end()) return;
  std::erase_if(it->second.answers, [&](const Pending& p) {
    return p.suppressible && CoveredBy(p.rr, records);
  });
}

void ResponseScheduler::Flush(std::uint32_t key) {
  auto node = batches_.extract(key);
  Batch& batch = node.mapped();
  dns::DnsMessage msg;
  msg.flags.response = true;
  msg.flags.authoritative = true;
  for (auto& p : batch.answers) {
    if (!ContainsData(msg.answers, p.rr)) msg.answers.push_back(std::move(p.rr));
  }
  if (msg.answers.empty()) {
    ++suppressed_;
    ++host_.Stats().suppressed_responses;
    return;
  }
  for (auto& rr : batch.additionals) {
    if (!ContainsData(msg.answers, rr) && !ContainsData(msg.additionals, rr)) {
      msg.additionals.push_back(std::move(rr));
    }
  }
  ++packets_sent_;
  if (key == kMulticastKey) {
    host_.Multicast(std::move(msg));
  } else {
    host_.Unicast(sim::NodeId{key}, std::move(msg));
  }
}

}  // namespace simnet::mdns
