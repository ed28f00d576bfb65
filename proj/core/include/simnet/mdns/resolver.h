#ifndef SIMNET_MDNS_RESOLVER_H_
#define SIMNET_MDNS_RESOLVER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simnet/mdns/record_cache.h"
#include "simnet/mdns/schedulers.h"
#include "simnet/mdns/service.h"
#include "simnet/privacy/privacy.h"
#include "simnet/sim/kernel.h"

namespace simnet::mdns {

// Protocol constants; defaults follow RFC 6762 / Avahi.
struct MdnsTiming {
  int probe_count = 3;
  SimTime probe_interval = std::chrono::milliseconds(250);
  SimTime probe_initial_max = std::chrono::milliseconds(250);
  SimTime probe_max_defer = std::chrono::milliseconds(250);
  SimTime probe_wait = std::chrono::milliseconds(250);  // after the last probe, before announcing
  int announce_count = 2;
  SimTime announce_interval = std::chrono::seconds(1);
  SimTime response_delay_min = std::chrono::milliseconds(20);
  SimTime response_delay_max = std::chrono::milliseconds(120);
  SimTime query_delay_min = std::chrono::milliseconds(20);
  SimTime query_delay_max = std::chrono::milliseconds(120);
  SimTime duplicate_question_window = std::chrono::seconds(1);
  SimTime reannounce_interval = std::chrono::seconds(60);  // zero disables
  int max_renames = 16;
};

enum class ServicePhase {
  kProbing,
  kAnnouncing,
  kEstablished,
  kWithdrawn,
  kPrivate,  // never multicast; delivered to paired peers
};
std::string_view ToString(ServicePhase phase);

struct ServiceState {
  ServiceInstance service;  // current name, after any renames
  std::string base_label;
  ServicePhase phase = ServicePhase::kProbing;
  int probes_sent = 0;
  int announcements_sent = 0;
  int conflicts = 0;
  bool is_meta = false;
  std::optional<SimTime> established_at;
  sim::EventHandle timer;
};

// mDNS/DNS-SD host: announces its services and answers queries through the
// probe, query and response schedulers.
class MdnsResolver : public sim::Node, private SchedulerHost {
 public:
  explicit MdnsResolver(sim::GroupId group, MdnsTiming timing = {});
  ~MdnsResolver() override;

  // Configuration; call before the node starts.
  void AddService(ServiceInstance service);
  void AddSharedRecord(dns::ResourceRecord record);
  void AttachPrivacy(privacy::PrivacyConfig config);

  // One-shot query hook: asks "<type>.local." PTR at time `at`.
  void Browse(std::string type, SimTime at);
  // Hands a question to the query scheduler. False when suppressed.
  bool PostQuery(const dns::DnsQuestion& question);
  // Multicasts a meta-service query carrying `pairing_id`.
  void QueryMeta(const std::string& pairing_id);
  // Fault injection: multicasts the SRV record of service `index`.
  void LeakServiceRecord(std::size_t index);

  void Start() override;
  void OnPacket(const sim::SimPacket& packet,
                const dns::DnsMessage& message) override;

  dns::DomainName host_name() const;
  const std::vector<ServiceState>& services() const { return services_; }
  const std::vector<dns::ResourceRecord>& shared_records() const {
    return shared_;
  }
  const MdnsRecordCache& cache() const { return cache_; }
  const ProbeScheduler& probe_scheduler() const { return probe_; }
  const QueryScheduler& query_scheduler() const { return query_; }
  const ResponseScheduler& response_scheduler() const { return response_; }
  const MdnsTiming& timing() const { return timing_; }
  const std::vector<std::string>& errors() const { return errors_; }
  const std::optional<privacy::PrivacyConfig>& privacy() const {
    return privacy_;
  }
  std::uint64_t private_bundles_sent() const { return bundles_sent_; }
  std::uint64_t meta_replies_sent() const { return meta_replies_; }

 private:
  // SchedulerHost
  SimTime Now() const override;
  sim::EventHandle At(SimTime at, std::string kind,
                      std::function<void()> callback) override;
  void CancelEvent(sim::EventHandle& handle) override;
  void Multicast(dns::DnsMessage message) override;
  void Unicast(sim::NodeId to, dns::DnsMessage message) override;
  sim::NodeStats& Stats() override;
  sim::RandomStream& Rng() override;

  ServiceRecords RecordsOf(std::size_t index) const;
  std::optional<std::size_t> FindByName(const dns::DomainName& name) const;
  bool Visible(const ServiceState& s) const;

  void BeginProbing(std::size_t index);
  void OnProbesSent(const std::vector<dns::DomainName>& names);
  void BeginAnnouncing(std::size_t index);
  void ContinueAnnouncing(std::size_t index);
  void Reannounce(std::size_t index);
  void Announce(std::size_t index);
  void LoseConflict(std::size_t index);
  void SendPrivateBundles();

  void HandleQuery(const sim::SimPacket& packet, const dns::DnsMessage& query);
  void HandleProbe(const dns::DnsMessage& probe);
  void HandleMetaQuery(const sim::SimPacket& packet,
                       const dns::DnsMessage& query);
  void HandleResponse(const sim::SimPacket& packet,
                      const dns::DnsMessage& response);

  sim::GroupId group_;
  MdnsTiming timing_;
  std::optional<sim::RandomStream> rng_;
  bool started_ = false;

  std::vector<ServiceState> services_;
  std::vector<dns::ResourceRecord> shared_;
  std::vector<std::pair<std::string, SimTime>> browses_;
  std::optional<privacy::PrivacyConfig> privacy_;
  std::optional<std::size_t> meta_index_;

  MdnsRecordCache cache_;
  ProbeScheduler probe_;
  QueryScheduler query_;
  ResponseScheduler response_;

  std::vector<std::string> errors_;
  std::uint64_t bundles_sent_ = 0;
  std::uint64_t meta_replies_ = 0;
};

}  // namespace simnet::mdns

#endif  // SIMNET_MDNS_RESOLVER_H_
