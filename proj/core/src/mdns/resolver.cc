#include "simnet/mdns/resolver.h"

#include <algorithm>
#include <tuple>

namespace simnet::mdns {
namespace {

bool SameData(const std::vector<ResourceRecord>& a,
              const std::vector<ResourceRecord>& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const auto& x) {
    return std::any_of(b.begin(), b.end(), [&](const auto& y) {
      return dns::SameRecordData(x, y);
    });
  });
}

// Sorted (type, rdata) view of a record set, compared lexicographically
// for simultaneous-probe tiebreaking.
std::vector<std::pair<std::uint16_t, std::string>> Canonical(
    const std::vector<ResourceRecord>& records) {
  std::vector<std::pair<std::uint16_t, std::string>> out;
  for (const auto& rr : records) {
    out.emplace_back(static_cast<std::uint16_t>(rr.type),
                     dns::RDataToString(rr.rdata));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool TypeMatches(dns::RRType want, dns::RRType have) {
  return want == dns::RRType::kANY || want == have;
}

}  // namespace

std::string_view ToString(ServicePhase phase) {
  switch (phase) {
    case ServicePhase::kProbing: return "probing";
    case ServicePhase::kAnnouncing: return "announcing";
    case ServicePhase::kEstablished: return "established";
    case ServicePhase::kWithdrawn: return "withdrawn";
    case ServicePhase::kPrivate: return "private";
  }
  return "?";
}

MdnsResolver::MdnsResolver(sim::GroupId group, MdnsTiming timing)
    : group_(group),
      timing_(timing),
      probe_(*this, timing.probe_max_defer,
             [this](const auto& names) { OnProbesSent(names); }),
      query_(
          *this,
          [this](const dns::DnsQuestion& q) {
            return cache_.KnownAnswers(q, now());
          },
          timing.duplicate_question_window, timing.query_delay_min,
          timing.query_delay_max),
      response_(*this, timing.response_delay_min, timing.response_delay_max) {}

MdnsResolver::~MdnsResolver() = default;

// --- SchedulerHost ----------------------------------------------------------

SimTime MdnsResolver::Now() const { return now(); }

sim::EventHandle MdnsResolver::At(SimTime at, std::string kind,
                                  std::function<void()> callback) {
  return ScheduleAt(at, std::move(kind), std::move(callback));
}

void MdnsResolver::CancelEvent(sim::EventHandle& handle) { Cancel(handle); }

void MdnsResolver::Multicast(dns::DnsMessage message) {
  SendToGroup(group_, std::move(message));
}

void MdnsResolver::Unicast(sim::NodeId to, dns::DnsMessage message) {
  SendTo(to, std::move(message));
}

sim::NodeStats& MdnsResolver::Stats() { return stats(); }

sim::RandomStream& MdnsResolver::Rng() {
  if (!rng_) rng_.emplace(MakeRandomStream("mdns"));
  return *rng_;
}

// --- configuration ----------------------------------------------------------

void MdnsResolver::AddService(ServiceInstance service) {
  if (started_) throw std::logic_error("AddService after start");
  ServiceState s;
  s.base_label = service.instance;
  s.service = std::move(service);
  services_.push_back(std::move(s));
}

void MdnsResolver::AddSharedRecord(dns::ResourceRecord record) {
  record.cache_flush = false;
  shared_.push_back(std::move(record));
}

void MdnsResolver::AttachPrivacy(privacy::PrivacyConfig config) {
  if (started_) throw std::logic_error("AttachPrivacy after start");
  privacy_ = std::move(config);
}

void MdnsResolver::Browse(std::string type, SimTime at) {
  if (!started_) {
    browses_.emplace_back(std::move(type), at);
    return;
  }
  const DomainName name = DomainName::Parse(type).Concat(LocalDomain());
  ScheduleAt(at, "browse", [this, name] {
    PostQuery(dns::DnsQuestion{name, dns::RRType::kPTR, dns::RRClass::kIN});
  });
}

bool MdnsResolver::PostQuery(const dns::DnsQuestion& question) {
  return query_.Post(question);
}

void MdnsResolver::QueryMeta(const std::string& pairing_id) {
  dns::DnsMessage msg;
  msg.questions.push_back(dns::DnsQuestion{privacy::MetaServiceTypeName(),
                                           dns::RRType::kPTR,
                                           dns::RRClass::kIN});
  msg.additionals.push_back(privacy::PairingPayload(pairing_id));
  Multicast(std::move(msg));
}

void MdnsResolver::LeakServiceRecord(std::size_t index) {
  dns::DnsMessage msg;
  msg.flags.response = true;
  msg.flags.authoritative = true;
  msg.answers.push_back(RecordsOf(index).srv);
  Multicast(std::move(msg));
}

dns::DomainName MdnsResolver::host_name() const { return HostName(name()); }

ServiceRecords MdnsResolver::RecordsOf(std::size_t index) const {
  return DeriveRecords(services_.at(index).service, host_name());
}

std::optional<std::size_t> MdnsResolver::FindByName(
    const dns::DomainName& name) const {
  for (std::size_t i = 0; i < services_.size(); ++i) {
    const auto& s = services_[i];
    if (s.phase == ServicePhase::kWithdrawn || s.phase == ServicePhase::kPrivate) {
      continue;
    }
    if (s.service.FullName() == name) return i;
  }
  return std::nullopt;
}

bool MdnsResolver::Visible(const ServiceState& s) const {
  return !s.is_meta && (s.phase == ServicePhase::kAnnouncing ||
                        s.phase == ServicePhase::kEstablished);
}

// --- announcer --------------------------------------------------------------

void MdnsResolver::Start() {
  started_ = true;
  const bool any_private =
      std::any_of(services_.begin(), services_.end(),
                  [](const auto& s) { return s.service.is_private; });
  if (privacy_ && any_private) {
    ServiceState meta;
    meta.service = privacy::MetaService(name(), address(), *privacy_);
    meta.base_label = meta.service.instance;
    meta.is_meta = true;
    meta_index_ = services_.size();
    services_.push_back(std::move(meta));
  }
  for (std::size_t i = 0; i < services_.size(); ++i) {
    if (services_[i].service.is_private) {
      services_[i].phase = ServicePhase::kPrivate;
    } else {
      BeginProbing(i);
    }
  }
  auto browses = std::move(browses_);
  browses_.clear();
  for (auto& [type, at] : browses) Browse(std::move(type), std::max(at, now()));
}

void MdnsResolver::BeginProbing(std::size_t index) {
  ServiceState& s = services_[index];
  s.phase = ServicePhase::kProbing;
  s.probes_sent = 0;
  s.announcements_sent = 0;
  const SimTime defer = Rng().UniformTime(SimTime::zero(), timing_.probe_initial_max);
  probe_.Post(s.service.FullName(), RecordsOf(index).Unique(), defer);
}

void MdnsResolver::OnProbesSent(const std::vector<dns::DomainName>& names) {
  for (const auto& name : names) {
    auto index = FindByName(name);
    if (!index) continue;
    ServiceState& s = services_[*index];
    if (s.phase != ServicePhase::kProbing) continue;
    if (++s.probes_sent < timing_.probe_count) {
      probe_.Post(name, RecordsOf(*index).Unique(), timing_.probe_interval);
    } else {
      const std::size_t i = *index;
      s.timer = ScheduleAfter(timing_.probe_wait, "probe-complete",
                              [this, i] { BeginAnnouncing(i); });
    }
  }
}

void MdnsResolver::BeginAnnouncing(std::size_t index) {
  ServiceState& s = services_[index];
  s.timer = sim::EventHandle{};
  s.phase = ServicePhase::kAnnouncing;
  Announce(index);
  if (s.is_meta) SendPrivateBundles();
  ContinueAnnouncing(index);
}

void MdnsResolver::ContinueAnnouncing(std::size_t index) {
  ServiceState& s = services_[index];
  if (s.announcements_sent < timing_.announce_count) {
    s.timer = ScheduleAfter(timing_.announce_interval, "announce", [this, index] {
      services_[index].timer = sim::EventHandle{};
      Announce(index);
      ContinueAnnouncing(index);
    });
    return;
  }
  s.phase = ServicePhase::kEstablished;
  s.established_at = now();
  if (timing_.reannounce_interval > SimTime::zero()) {
    s.timer = ScheduleAfter(timing_.reannounce_interval, "reannounce",
                            [this, index] { Reannounce(index); });
  }
}

void MdnsResolver::Reannounce(std::size_t index) {
  ServiceState& s = services_[index];
  Announce(index);
  if (s.is_meta) SendPrivateBundles();
  s.timer = ScheduleAfter(timing_.reannounce_interval, "reannounce",
                          [this, index] { Reannounce(index); });
}

void MdnsResolver::Announce(std::size_t index) {
  ++services_[index].announcements_sent;
  auto records = RecordsOf(index).All();
  records.push_back(HostAddressRecord(host_name(), address()));
  response_.Post(std::move(records), {}, std::nullopt, /*immediate=*/true,
                 /*suppressible=*/false);
}

void MdnsResolver::LoseConflict(std::size_t index) {
  ServiceState& s = services_[index];
  probe_.Remove(s.service.FullName());
  Cancel(s.timer);
  ++s.conflicts;
  if (s.conflicts > timing_.max_renames) {
    s.phase = ServicePhase::kWithdrawn;
    errors_.push_back(sim::FormatTime(now()) + " withdrew '" + s.base_label +
                      "' after " + std::to_string(s.conflicts) + " conflicts");
    return;
  }
  s.service.instance = RenamedLabel(s.base_label, s.conflicts);
  BeginProbing(index);
}

void MdnsResolver::SendPrivateBundles() {
  if (!privacy_) return;
  std::vector<ResourceRecord> bundle;
  for (std::size_t i = 0; i < services_.size(); ++i) {
    if (services_[i].phase != ServicePhase::kPrivate) continue;
    for (auto& rr : RecordsOf(i).All()) bundle.push_back(std::move(rr));
  }
  if (bundle.empty()) return;
  bundle.push_back(HostAddressRecord(host_name(), address()));
  for (const auto& p : privacy_->pairings) {
    if (!p.established) continue;
    ++bundles_sent_;
    response_.Post(bundle, {}, p.peer, /*immediate=*/true, /*suppressible=*/false);
  }
}

// --- packet dispatch --------------------------------------------------------

void MdnsResolver::OnPacket(const sim::SimPacket& packet,
                            const dns::DnsMessage& message) {
  if (message.IsQuery()) {
    HandleQuery(packet, message);
  } else {
    HandleResponse(packet, message);
  }
}

void MdnsResolver::HandleQuery(const sim::SimPacket& packet,
                               const dns::DnsMessage& query) {
  const bool multicast = packet.transport == sim::Transport::kMulticast;
  if (!query.authorities.empty()) {
    HandleProbe(query);
    return;
  }
  if (multicast) query_.Observe(query);

  const bool meta = std::any_of(
      query.questions.begin(), query.questions.end(),
      [](const auto& q) { return privacy::IsMetaName(q.qname); });
  if (meta) HandleMetaQuery(packet, query);

  const DomainName host = host_name();
  std::vector<ResourceRecord> shared_answers;
  std::vector<ResourceRecord> unique_answers;
  std::vector<ResourceRecord> additionals;
  bool any_visible = false;
  for (std::size_t i = 0; i < services_.size(); ++i) {
    any_visible = any_visible || Visible(services_[i]);
  }
  const auto host_a = HostAddressRecord(host, address());

  for (const auto& q : query.questions) {
    if (privacy::IsMetaName(q.qname)) continue;
    for (std::size_t i = 0; i < services_.size(); ++i) {
      if (!Visible(services_[i])) continue;
      const ServiceRecords recs = RecordsOf(i);
      if (q.qname == recs.ptr.owner && TypeMatches(q.qtype, dns::RRType::kPTR)) {
        shared_answers.push_back(recs.ptr);
        additionals.push_back(recs.srv);
        additionals.push_back(recs.txt);
        additionals.push_back(host_a);
      }
      if (q.qname == recs.srv.owner) {
        if (TypeMatches(q.qtype, dns::RRType::kSRV)) {
          unique_answers.push_back(recs.srv);
          additionals.push_back(host_a);
        }
        if (TypeMatches(q.qtype, dns::RRType::kTXT)) unique_answers.push_back(recs.txt);
      }
    }
    if (any_visible && q.qname == host && TypeMatches(q.qtype, dns::RRType::kA)) {
      unique_answers.push_back(host_a);
    }
    for (const auto& rr : shared_) {
      if (rr.owner == q.qname && TypeMatches(q.qtype, rr.type)) {
        shared_answers.push_back(rr);
      }
    }
  }

  // Known-answer suppression: the querier already holds these.
  auto known = [&](const ResourceRecord& rr) { return CoveredBy(rr, query.answers); };
  std::erase_if(shared_answers, known);
  std::erase_if(unique_answers, known);

  const std::optional<sim::NodeId> to =
      multicast ? std::nullopt : std::optional<sim::NodeId>(packet.src);
  if (!shared_answers.empty()) {
    response_.Post(std::move(shared_answers), std::move(additionals), to,
                   /*immediate=*/false, /*suppressible=*/true);
    additionals.clear();
  }
  if (!unique_answers.empty()) {
    response_.Post(std::move(unique_answers), std::move(additionals), to,
                   /*immediate=*/false, /*suppressible=*/false);
  }
}

void MdnsResolver::HandleProbe(const dns::DnsMessage& probe) {
  for (const auto& q : probe.questions) {
    auto index = FindByName(q.qname);
    if (!index) continue;
    ServiceState& s = services_[*index];
    std::vector<ResourceRecord> theirs;
    for (const auto& rr : probe.authorities) {
      if (rr.owner == q.qname) theirs.push_back(rr);
    }
    const auto ours = RecordsOf(*index).Unique();
    if (SameData(ours, theirs)) continue;

    if (s.phase == ServicePhase::kProbing) {
      // They probed before our first probe left: theirs is first. Otherwise
      // the lexicographically later record set wins.
      const bool lose = s.probes_sent == 0 || Canonical(ours) < Canonical(theirs);
      if (lose) LoseConflict(*index);
    } else {
      response_.Post(ours, {HostAddressRecord(host_name(), address())},
                     std::nullopt, /*immediate=*/true, /*suppressible=*/false);
    }
  }
}

void MdnsResolver::HandleMetaQuery(const sim::SimPacket& packet,
                                   const dns::DnsMessage& query) {
  if (!meta_index_ || !privacy_) return;
  const auto payload = privacy::ExtractPairingPayload(query);
  if (!payload || payload->empty()) {
    ++stats().privacy_rejected;
    return;
  }
  const auto& pairings = privacy_->pairings;
  const bool paired = std::any_of(pairings.begin(), pairings.end(), [&](const auto& p) {
    return p.established && p.id == *payload && p.peer == packet.src;
  });
  if (!paired) {
    ++stats().privacy_rejected;
    return;
  }
  ++meta_replies_;
  const ServiceRecords recs = RecordsOf(*meta_index_);
  response_.Post({recs.ptr, recs.srv, recs.txt},
                 {HostAddressRecord(host_name(), address())}, packet.src,
                 /*immediate=*/false, /*suppressible=*/false);
}

void MdnsResolver::HandleResponse(const sim::SimPacket& packet,
                                  const dns::DnsMessage& response) {
  for (std::size_t i = 0; i < services_.size(); ++i) {
    if (services_[i].phase != ServicePhase::kProbing) continue;
    const DomainName full = services_[i].service.FullName();
    const auto ours = RecordsOf(i).Unique();
    const bool conflict =
        std::any_of(response.answers.begin(), response.answers.end(), [&](const auto& rr) {
          return rr.owner == full && !IsSharedType(rr.type) &&
                 std::none_of(ours.begin(), ours.end(), [&](const auto& o) {
                   return dns::SameRecordData(o, rr);
                 });
        });
    if (conflict) LoseConflict(i);
  }
  if (packet.transport == sim::Transport::kMulticast) {
    response_.Observe(response.answers);
  }
  const bool unicast = packet.transport == sim::Transport::kUnicast;
  cache_.AddAll(response.answers, now(), unicast);
  cache_.AddAll(response.additionals, now(), unicast);
}

}  // namespace simnet::mdns
