#include <cctype>
#include <optional>

#include "simnet/dns/server.h"

namespace simnet::dns {
namespace {

std::optional<Ipv4Address> DecodeHexAddress(std::string_view label) {
  if (label.size() != 8) return std::nullopt;
  std::uint32_t value = 0;
  for (char c : label) {
    const auto u = static_cast<unsigned char>(c);
    if (!std::isxdigit(u)) return std::nullopt;
    const int digit = std::isdigit(u) ? u - '0' : std::tolower(u) - 'a' + 10;
    value = (value << 4) | static_cast<std::uint32_t>(digit);
  }
  return Ipv4Address::FromUint(value);
}

}  // namespace

DnsMessage EchoAnswer(const EchoConfig& config, const DnsMessage& query,
                      const Ipv4Address& querier) {
  DnsMessage resp = MakeResponseTo(query);
  if (query.flags.opcode != 0) {
    resp.flags.rcode = Rcode::kNotImp;
    return resp;
  }
  if (query.questions.size() != 1) {
    resp.flags.rcode = Rcode::kFormErr;
    return resp;
  }
  const DnsQuestion& q = query.questions.front();
  if (!q.qname.IsSubdomainOf(config.domain)) {
    resp.flags.rcode = Rcode::kServFail;
    return resp;
  }
  resp.flags.authoritative = true;

  // Leftmost marker label wins; markers inside the configured domain don't
  // count.
  const auto& labels = q.qname.labels();
  const std::size_t searchable = labels.size() - config.domain.label_count();
  for (std::size_t i = 0; i < searchable; ++i) {
    if (LabelEquals(labels[i], "00")) {
      const auto address =
          i == 0 ? std::nullopt : DecodeHexAddress(labels[i - 1]);
      if (!address) break;
      if (q.qtype == RRType::kA || q.qtype == RRType::kANY) {
        resp.answers.push_back(
            ResourceRecord{q.qname, RRType::kA, RRClass::kIN, config.echo_ttl,
                           *address, false});
      }
      return resp;
    }
    if (LabelEquals(labels[i], "cca")) {
      if (q.qtype == RRType::kTXT || q.qtype == RRType::kANY) {
        resp.answers.push_back(ResourceRecord{
            q.qname, RRType::kTXT, RRClass::kIN, config.cca_ttl,
            TxtData{{querier.ToString()}}, false});
      }
      return resp;
    }
  }
  resp.flags.rcode = Rcode::kNxDomain;
  return resp;
}

EchoServer::EchoServer(EchoConfig config)
    : DnsServerBase({}, nullptr), config_(std::move(config)) {}

void EchoServer::HandleQuery(const sim::SimPacket& packet,
                             const DnsMessage& query) {
  Reply(packet, EchoAnswer(config_, query, kernel().node(packet.src).address()));
}

}  // namespace simnet::dns
