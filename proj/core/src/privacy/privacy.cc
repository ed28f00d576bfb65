#include "simnet/privacy/privacy.h"

#include <algorithm>
#include <cstdio>

#include "simnet/sim/random.h"

namespace simnet::privacy {
namespace {

std::string Hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

constexpr std::string_view kPairPrefix = "pair=";

bool IsHex(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

bool Matches(const dns::DomainName& name,
             const std::vector<dns::DomainName>& private_names) {
  return std::any_of(private_names.begin(), private_names.end(),
                     [&](const auto& p) { return name.IsSubdomainOf(p); });
}

}  // namespace

std::string PairingId(std::string_view a, std::string_view b) {
  const auto [lo, hi] = std::minmax(a, b);
  std::string joined(lo);
  joined += '\0';
  joined += hi;
  return Hex64(sim::Fnv1a64(joined));
}

dns::DomainName MetaServiceTypeName() {
  return dns::DomainName::Parse(kMetaServiceType).Concat(mdns::LocalDomain());
}

bool IsMetaName(const dns::DomainName& name) {
  return name.IsSubdomainOf(MetaServiceTypeName());
}

mdns::ServiceInstance MetaService(std::string_view host,
                                  const dns::Ipv4Address& address,
                                  const PrivacyConfig& config) {
  std::vector<std::string> ids;
  for (const auto& p : config.pairings) {
    if (p.established) ids.push_back(p.id);
  }
  std::sort(ids.begin(), ids.end());
  std::string joined;
  for (const auto& id : ids) joined += id;
  mdns::ServiceInstance meta;
  meta.instance = std::string(host);
  meta.type = std::string(kMetaServiceType);
  meta.port = config.channel_port;
  meta.txt = {"h=" + Hex64(sim::Fnv1a64(joined)).substr(0, 8),
              "ch=" + address.ToString() + ":" +
                  std::to_string(config.channel_port)};
  return meta;
}

dns::ResourceRecord PairingPayload(const std::string& id) {
  return dns::ResourceRecord{MetaServiceTypeName(), dns::RRType::kTXT,
                             dns::RRClass::kIN, 0,
                             dns::TxtData{{std::string(kPairPrefix) + id}},
                             false};
}

std::optional<std::string> ExtractPairingPayload(const dns::DnsMessage& query) {
  for (const auto& rr : query.additionals) {
    if (rr.type != dns::RRType::kTXT || !IsMetaName(rr.owner)) continue;
    const auto& strings = std::get<dns::TxtData>(rr.rdata).strings;
    if (strings.size() != 1) return std::string();
    std::string_view s = strings.front();
    if (!s.starts_with(kPairPrefix)) return std::string();
    s.remove_prefix(kPairPrefix.size());
    if (!IsHex(s)) return std::string();
    return std::string(s);
  }
  return std::nullopt;
}

std::vector<Violation> AuditPrivacy(
    const sim::Kernel& kernel, const std::vector<sim::CapturedPacket>& capture,
    const std::vector<dns::DomainName>& private_names) {
  std::vector<Violation> out;
  for (const auto& cap : capture) {
    const auto& pkt = cap.packet;
    if (pkt.transport != sim::Transport::kMulticast || !pkt.message) continue;
    const std::string& node = kernel.node(pkt.src).name();
    for (const auto& q : pkt.message->questions) {
      if (Matches(q.qname, private_names)) {
        out.push_back(Violation{cap.index, node, dns::ToString(q), q.qname});
      }
    }
    for (const auto* section :
         {&pkt.message->answers, &pkt.message->authorities,
          &pkt.message->additionals}) {
      for (const auto& rr : *section) {
        std::optional<dns::DomainName> hit;
        if (Matches(rr.owner, private_names)) {
          hit = rr.owner;
        } else {
          for (const auto& n : dns::EmbeddedNames(rr.rdata)) {
            if (Matches(n, private_names)) {
              hit = n;
              break;
            }
          }
        }
        if (hit) out.push_back(Violation{cap.index, node, dns::ToString(rr), *hit});
      }
    }
  }
  return out;
}

std::string ToString(const Violation& v) {
  return "packet " + std::to_string(v.packet_index) + " from " + v.node +
         ": " + v.item;
}

}  // namespace simnet::privacy
