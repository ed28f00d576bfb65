#ifndef SIMNET_PRIVACY_PRIVACY_H_
#define SIMNET_PRIVACY_PRIVACY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simnet/dns/message.h"
#include "simnet/mdns/service.h"
#include "simnet/sim/kernel.h"

namespace simnet::privacy {

inline constexpr std::string_view kMetaServiceType = "_privacy._udp";
inline constexpr std::uint16_t kDefaultChannelPort = 5354;

// A pre-established trust relation with one peer.
struct PairingData {
  sim::NodeId peer;
  std::string id;  // opaque identifier shared by both ends (hex)
  bool established = true;
  friend bool operator==(const PairingData&, const PairingData&) = default;
};

struct PrivacyConfig {
  std::vector<PairingData> pairings;
  std::uint16_t channel_port = kDefaultChannelPort;
};

// Deterministic pairing identifier for an unordered pair of node names.
std::string PairingId(std::string_view a, std::string_view b);

// The public meta-service for `host`: TXT carries a hash over the pairing
// ids ("h=") and the private channel ("ch=<address>:<port>").
mdns::ServiceInstance MetaService(std::string_view host,
                                  const dns::Ipv4Address& address,
                                  const PrivacyConfig& config);

dns::DomainName MetaServiceTypeName();
bool IsMetaName(const dns::DomainName& name);

// The pairing payload a querier attaches to a meta query: an additional
// TXT record "pair=<hex id>".
dns::ResourceRecord PairingPayload(const std::string& id);
// nullopt when there is no payload; "" when it is malformed.
std::optional<std::string> ExtractPairingPayload(const dns::DnsMessage& query);

struct Violation {
  std::uint64_t packet_index = 0;
  std::string node;
  std::string item;  // offending record or question, text form
  dns::DomainName name;
};

// Scans every captured multicast packet for names at or below a private
// service instance name (owners, rdata names, questions).
std::vector<Violation> AuditPrivacy(
    const sim::Kernel& kernel, const std::vector<sim::CapturedPacket>& capture,
    const std::vector<dns::DomainName>& private_names);

std::string ToString(const Violation& v);

}  // namespace simnet::privacy

#endif  // SIMNET_PRIVACY_PRIVACY_H_
