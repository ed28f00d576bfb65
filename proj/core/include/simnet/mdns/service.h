#ifndef SIMNET_MDNS_SERVICE_H_
#define SIMNET_MDNS_SERVICE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "simnet/dns/record.h"

namespace simnet::mdns {

using dns::DomainName;
using dns::ResourceRecord;

inline constexpr std::uint32_t kHostRecordTtl = 120;
inline constexpr std::uint32_t kSrvTtl = 120;
inline constexpr std::uint32_t kPtrTtl = 4500;
inline constexpr std::uint32_t kTxtTtl = 4500;

const DomainName& LocalDomain();

// "<host>.local."
DomainName HostName(std::string_view host);

// A DNS-SD service instance. Full name is "<instance>.<type>.local.".
struct ServiceInstance {
  std::string instance;  // single label; may contain spaces
  std::string type;      // e.g. "_http._tcp"
  std::uint16_t port = 0;
  std::vector<std::string> txt;
  bool is_private = false;

  DomainName TypeName() const;
  DomainName FullName() const;

  friend bool operator==(const ServiceInstance&,
                         const ServiceInstance&) = default;
};

struct ServiceRecords {
  ResourceRecord ptr;  // shared: type -> instance
  ResourceRecord srv;  // unique
  ResourceRecord txt;  // unique

  std::vector<ResourceRecord> All() const { return {ptr, srv, txt}; }
  // The records a probe claims (the unique ones).
  std::vector<ResourceRecord> Unique() const { return {srv, txt}; }
};

ServiceRecords DeriveRecords(const ServiceInstance& service,
                             const DomainName& host);
ResourceRecord HostAddressRecord(const DomainName& host,
                                 const dns::Ipv4Address& address);

// Label after `conflicts` lost conflicts: "base", "base #2", "base #3", ...
std::string RenamedLabel(std::string_view base, int conflicts);

// Shared records (PTR) may legitimately be held by several hosts.
bool IsSharedType(dns::RRType type);

}  // namespace simnet::mdns

#endif  // SIMNET_MDNS_SERVICE_H_
