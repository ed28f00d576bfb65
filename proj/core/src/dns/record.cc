#include "simnet/dns/record.h"

#include <arpa/inet.h>

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace simnet::dns {

namespace {

struct TypeName {
  RRType type;
  std::string_view name;
};

constexpr TypeName kTypeNames[] = {
    {RRType::kA, "A"},       {RRType::kNS, "NS"},   {RRType::kCNAME, "CNAME"},
    {RRType::kSOA, "SOA"},   {RRType::kPTR, "PTR"}, {RRType::kMX, "MX"},
    {RRType::kTXT, "TXT"},   {RRType::kAAAA, "AAAA"}, {RRType::kSRV, "SRV"},
    {RRType::kANY, "ANY"},
};

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return LabelEquals(a, b);
}

}  // namespace

std::string_view ToString(RRType type) {
  for (const auto& entry : kTypeNames) {
    if (entry.type == type) return entry.name;
  }
  return "?";
}

std::optional<RRType> ParseRRType(std::string_view token) {
  for (const auto& entry : kTypeNames) {
    if (EqualsIgnoreCase(entry.name, token)) return entry.type;
  }
  return std::nullopt;
}

std::optional<RRType> RRTypeFromCode(std::uint16_t code) {
  for (const auto& entry : kTypeNames) {
    if (static_cast<std::uint16_t>(entry.type) == code) return entry.type;
  }
  return std::nullopt;
}

std::optional<Ipv4Address> Ipv4Address::Parse(std::string_view text) {
  Ipv4Address out;
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      if (pos >= text.size() || text[pos] != '.') return std::nullopt;
      ++pos;
    }
    unsigned value = 0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first || ptr - first > 3 || value > 255) {
      return std::nullopt;
    }
    out.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
    pos = static_cast<std::size_t>(ptr - text.data());
  }
  if (pos != text.size()) return std::nullopt;
  return out;
}

std::string Ipv4Address::ToString() const {
  return std::to_string(octets[0]) + "." + std::to_string(octets[1]) + "." +
         std::to_string(octets[2]) + "." + std::to_string(octets[3]);
}

std::uint32_t Ipv4Address::ToUint() const {
  return (std::uint32_t{octets[0]} << 24) | (std::uint32_t{octets[1]} << 16) |
         (std::uint32_t{octets[2]} << 8) | std::uint32_t{octets[3]};
}

Ipv4Address Ipv4Address::FromUint(std::uint32_t value) {
  return Ipv4Address{{static_cast<std::uint8_t>(value >> 24),
                      static_cast<std::uint8_t>(value >> 16),
                      static_cast<std::uint8_t>(value >> 8),
                      static_cast<std::uint8_t>(value)}};
}

std::optional<Ipv6Address> Ipv6Address::Parse(std::string_view text) {
  const std::string buffer(text);
  Ipv6Address out;
  if (inet_pton(AF_INET6, buffer.c_str(), out.octets.data()) != 1) {
    return std::nullopt;
  }
  return out;
}

std::string Ipv6Address::ToString() const {
  char buffer[INET6_ADDRSTRLEN] = {};
  inet_ntop(AF_INET6, octets.data(), buffer, sizeof(buffer));
  return buffer;
}

bool RDataMatchesType(RRType type, const RData& rdata) {
  switch (type) {
    case RRType::kA:
      return std::holds_alternative<Ipv4Address>(rdata);
    case RRType::kAAAA:
      return std::holds_alternative<Ipv6Address>(rdata);
    case RRType::kNS:
    case RRType::kCNAME:
    case RRType::kPTR:
      return std::holds_alternative<DomainName>(rdata);
    case RRType::kMX:
      return std::holds_alternative<MxData>(rdata);
    case RRType::kSOA:
      return std::holds_alternative<SoaData>(rdata);
    case RRType::kTXT:
      return std::holds_alternative<TxtData>(rdata);
    case RRType::kSRV:
      return std::holds_alternative<SrvData>(rdata);
    case RRType::kANY:
      return false;
  }
  return false;
}

bool SameRecordData(const ResourceRecord& a, const ResourceRecord& b) {
  return a.type == b.type && a.owner == b.owner && a.rdata == b.rdata;
}

std::string RDataToString(const RData& rdata) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& value) {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, Ipv4Address> ||
                      std::is_same_v<T, Ipv6Address> ||
                      std::is_same_v<T, DomainName>) {
          os << value.ToString();
        } else if constexpr (std::is_same_v<T, MxData>) {
          os << value.preference << ' ' << value.exchange;
        } else if constexpr (std::is_same_v<T, SoaData>) {
          os << value.mname << ' ' << value.rname << " ( " << value.serial
             << ' ' << value.refresh << ' ' << value.retry << ' '
             << value.expire << ' ' << value.minimum << " )";
        } else if constexpr (std::is_same_v<T, TxtData>) {
          bool first = true;
          for (const auto& s : value.strings) {
            if (!first) os << ' ';
            first = false;
            os << '"';
            for (char c : s) {
              if (c == '"' || c == '\\') os << '\\';
              os << c;
            }
            os << '"';
          }
        } else if constexpr (std::is_same_v<T, SrvData>) {
          os << value.priority << ' ' << value.weight << ' ' << value.port
             << ' ' << value.target;
        }
      },
      rdata);
  return os.str();
}

std::string ToString(const ResourceRecord& rr) {
  std::ostringstream os;
  os << rr.owner << ' ' << rr.ttl << " IN " << rr.type << ' '
     << RDataToString(rr.rdata);
  return os.str();
}

std::vector<DomainName> EmbeddedNames(const RData& rdata) {
  if (const auto* name = std::get_if<DomainName>(&rdata)) return {*name};
  if (const auto* mx = std::get_if<MxData>(&rdata)) return {mx->exchange};
  if (const auto* soa = std::get_if<SoaData>(&rdata)) {
    return {soa->mname, soa->rname};
  }
  if (const auto* srv = std::get_if<SrvData>(&rdata)) return {srv->target};
  return {};
}

ResourceRecord MakeA(const DomainName& owner, std::uint32_t ttl,
                     std::string_view address) {
  const auto parsed = Ipv4Address::Parse(address);
  if (!parsed) {
    throw std::invalid_argument("bad IPv4 address: " + std::string(address));
  }
  return ResourceRecord{owner, RRType::kA, RRClass::kIN, ttl, *parsed, false};
}

ResourceRecord MakeNameRecord(const DomainName& owner, RRType type,
                              std::uint32_t ttl, const DomainName& target) {
  return ResourceRecord{owner, type, RRClass::kIN, ttl, target, false};
}

}  // namespace simnet::dns
