#ifndef SIMNET_MDNS_RECORD_CACHE_H_
#define SIMNET_MDNS_RECORD_CACHE_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "simnet/dns/message.h"
#include "simnet/sim/time.h"

namespace simnet::mdns {

using sim::SimTime;

// Per-record mDNS cache. A record with the cache-flush bit replaces other
// rdata under the same (name, type); TTL 0 is a goodbye and removes it.
// Confidential entries (learned over unicast) are never offered as known
// answers, so they cannot reappear on the multicast link.
class MdnsRecordCache {
 public:
  void Add(const dns::ResourceRecord& rr, SimTime now, bool confidential = false);
  void AddAll(const std::vector<dns::ResourceRecord>& records, SimTime now,
              bool confidential = false);

  // Live records at (name, type), TTL decayed to whole seconds remaining.
  // ANY matches every type.
  std::vector<dns::ResourceRecord> Get(const dns::DomainName& name,
                                       dns::RRType type, SimTime now) const;

  // Records answering `q` whose remaining TTL is at least half the original.
  std::vector<dns::ResourceRecord> KnownAnswers(const dns::DnsQuestion& q,
                                                SimTime now) const;

  bool HasName(const dns::DomainName& name, SimTime now) const;
  std::size_t size() const;
  void Expire(SimTime now);

 private:
  struct Entry {
    dns::ResourceRecord rr;  // as received
    SimTime received_at{0};
    bool confidential = false;
    SimTime expiry() const {
      return received_at + std::chrono::seconds(rr.ttl);
    }
  };
  using Key = std::pair<std::string, dns::RRType>;

  std::map<Key, std::vector<Entry>> entries_;
};

}  // namespace simnet::mdns

#endif  // SIMNET_MDNS_RECORD_CACHE_H_
