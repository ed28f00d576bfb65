#ifndef SIMNET_DNS_SERVER_H_
#define SIMNET_DNS_SERVER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "simnet/dns/cache.h"
#include "simnet/dns/message.h"
#include "simnet/dns/zone.h"
#include "simnet/sim/kernel.h"

namespace simnet::dns {

struct RootHint {
  DomainName name;
  Ipv4Address address;
};
using RootHints = std::vector<RootHint>;

struct ResolverConfig {
  SimTime timeout = std::chrono::seconds(1);
  int max_retries = 2;
  int max_cname_restarts = 8;
  // Nesting limit for resolving NS names that came without glue.
  int max_subresolution_depth = 4;
};

struct ResolutionResult {
  Rcode rcode = Rcode::kNoError;
  // CNAME chain (if any) followed by the records answering the question.
  std::vector<ResourceRecord> answers;
};
using ResolveCallback = std::function<void(const ResolutionResult&)>;

// Answer `query` from `zone` alone. Pure; the authoritative server's logic.
DnsMessage AnswerFromZone(const ZoneConfig& zone, const DnsMessage& query);

// Types the authoritative answerer handles; others get NOTIMP.
bool IsSupportedQueryType(RRType type);

// Iterative resolution shared by the server roles.
//
// Each resolution keeps at most one upstream query in flight. Referrals are
// followed using glue (or cached addresses); an NS name without an address
// is resolved first through a nested resolution. When a cache is present,
// every RRset of every upstream response is stored in it.
class DnsServerBase : public sim::Node {
 public:
  DnsServerBase(RootHints hints, std::unique_ptr<DnsCache> cache,
                ResolverConfig config = {});
  ~DnsServerBase() override;

  // Resolves `question`; `done` runs exactly once, possibly synchronously
  // when the cache answers. Must be called from a kernel callback.
  void Resolve(const DnsQuestion& question, ResolveCallback done);

  void OnPacket(const sim::SimPacket& packet, const DnsMessage& message) final;

  DnsCache* cache() { return cache_.get(); }
  const RootHints& root_hints() const { return hints_; }
  std::uint64_t upstream_queries() const { return upstream_queries_; }
  std::size_t pending_resolutions() const { return pending_.size(); }

 protected:
  virtual void HandleQuery(const sim::SimPacket& packet,
                           const DnsMessage& query) = 0;
  void Reply(const sim::SimPacket& to, DnsMessage response);
  sim::RandomStream& rng();

 private:
  struct Candidate {
    DomainName name;
    std::optional<Ipv4Address> address;
    bool lookup_started = false;
  };
  struct Pending;

  std::uint64_t StartResolution(const DnsQuestion& question,
                                ResolveCallback done, int depth);
  void Restart(std::uint64_t rid);
  void SelectStartingServers(Pending& p);
  std::vector<Candidate> CandidatesFor(
      const std::vector<ResourceRecord>& ns_records,
      const std::vector<ResourceRecord>& glue);
  void SendNext(std::uint64_t rid);
  void SendUpstream(std::uint64_t rid);
  void OnTimeout(std::uint64_t rid);
  void HandleUpstreamResponse(const sim::SimPacket& packet,
                              const DnsMessage& response);
  void ProcessResponse(std::uint64_t rid, const DnsMessage& response);
  void CacheResponse(const DnsMessage& response);
  void Finish(std::uint64_t rid, Rcode rcode);

  RootHints hints_;
  std::unique_ptr<DnsCache> cache_;
  ResolverConfig config_;
  std::optional<sim::RandomStream> rng_;

  std::uint64_t next_rid_ = 1;
  std::map<std::uint64_t, Pending> pending_;
  std::map<std::uint16_t, std::uint64_t> upstream_;  // query id -> rid
  std::uint64_t upstream_queries_ = 0;
};

// Serves one zone authoritatively; never recurses.
class AuthServer : public DnsServerBase {
 public:
  explicit AuthServer(ZoneConfig zone);
  const ZoneConfig& zone() const { return zone_; }

 protected:
  void HandleQuery(const sim::SimPacket& packet,
                   const DnsMessage& query) override;

 private:
  ZoneConfig zone_;
};

// Recursive resolver for clients: cache first, iterative resolution on a
// miss. Queries without RD get an empty answer with RA set.
class CachingServer : public DnsServerBase {
 public:
  CachingServer(RootHints hints, std::unique_ptr<DnsCache> cache,
                ResolverConfig config = {});

 protected:
  void HandleQuery(const sim::SimPacket& packet,
                   const DnsMessage& query) override;
};

// Stateless echo service.
//
// "<8 hex digits>.00.<domain>" answers A with the encoded IPv4 address.
// "<anything>.cca.<domain>" answers TXT with the querier's address.
struct EchoConfig {
  DomainName domain;  // root = accept any suffix
  std::uint32_t echo_ttl = 604800;
  std::uint32_t cca_ttl = 60;
};

DnsMessage EchoAnswer(const EchoConfig& config, const DnsMessage& query,
                      const Ipv4Address& querier);

class EchoServer : public DnsServerBase {
 public:
  explicit EchoServer(EchoConfig config);
  const EchoConfig& config() const { return config_; }

 protected:
  void HandleQuery(const sim::SimPacket& packet,
                   const DnsMessage& query) override;

 private:
  EchoConfig config_;
};

}  // namespace simnet::dns

#endif  // SIMNET_DNS_SERVER_H_
