#ifndef SIMNET_DNS_RECORD_H_
#define SIMNET_DNS_RECORD_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "simnet/dns/name.h"

namespace simnet::dns {

enum class RRType : std::uint16_t {
  kA = 1,
  kNS = 2,
  kCNAME = 5,
  kSOA = 6,
  kPTR = 12,
  kMX = 15,
  kTXT = 16,
  kAAAA = 28,
  kSRV = 33,
  kANY = 255,  // question-only
};

enum class RRClass : std::uint16_t { kIN = 1 };

std::string_view ToString(RRType type);
std::optional<RRType> ParseRRType(std::string_view token);
std::optional<RRType> RRTypeFromCode(std::uint16_t code);

struct Ipv4Address {
  std::array<std::uint8_t, 4> octets{};

  static std::optional<Ipv4Address> Parse(std::string_view text);
  std::string ToString() const;
  std::uint32_t ToUint() const;
  static Ipv4Address FromUint(std::uint32_t value);

  friend auto operator<=>(const Ipv4Address&, const Ipv4Address&) = default;
};

struct Ipv6Address {
  std::array<std::uint8_t, 16> octets{};

  static std::optional<Ipv6Address> Parse(std::string_view text);
  std::string ToString() const;

  friend auto operator<=>(const Ipv6Address&, const Ipv6Address&) = default;
};

struct MxData {
  std::uint16_t preference = 0;
  DomainName exchange;
  friend bool operator==(const MxData&, const MxData&) = default;
};

// `serial` is kept at 64 bits; the wire carries it modulo 2^32.
struct SoaData {
  DomainName mname;
  DomainName rname;
  std::uint64_t serial = 0;
  std::uint32_t refresh = 0;
  std::uint32_t retry = 0;
  std::uint32_t expire = 0;
  std::uint32_t minimum = 0;
  friend bool operator==(const SoaData&, const SoaData&) = default;
};

struct TxtData {
  std::vector<std::string> strings;
  friend bool operator==(const TxtData&, const TxtData&) = default;
};

struct SrvData {
  std::uint16_t priority = 0;
  std::uint16_t weight = 0;
  std::uint16_t port = 0;
  DomainName target;
  friend bool operator==(const SrvData&, const SrvData&) = default;
};

// DomainName alternative covers NS, CNAME and PTR.
using RData = std::variant<Ipv4Address, Ipv6Address, DomainName, MxData,
                           SoaData, TxtData, SrvData>;

struct ResourceRecord {
  DomainName owner;
  RRType type = RRType::kA;
  RRClass rclass = RRClass::kIN;
  std::uint32_t ttl = 0;
  RData rdata;
  // mDNS cache-flush bit (top bit of the class field); marks unique records.
  bool cache_flush = false;

  friend bool operator==(const ResourceRecord&,
                         const ResourceRecord&) = default;
};

// True when `rdata` holds the alternative `type` requires.
bool RDataMatchesType(RRType type, const RData& rdata);

// Same owner, type and rdata; TTL and flags ignored.
bool SameRecordData(const ResourceRecord& a, const ResourceRecord& b);

std::string RDataToString(const RData& rdata);
std::string ToString(const ResourceRecord& rr);

// Names embedded in rdata (NS/CNAME/PTR target, MX exchange, SOA names,
// SRV target).
std::vector<DomainName> EmbeddedNames(const RData& rdata);

ResourceRecord MakeA(const DomainName& owner, std::uint32_t ttl,
                     std::string_view address);
ResourceRecord MakeNameRecord(const DomainName& owner, RRType type,
                              std::uint32_t ttl, const DomainName& target);

inline std::ostream& operator<<(std::ostream& os, RRType type) {
  return os << ToString(type);
}
inline std::ostream& operator<<(std::ostream& os, const ResourceRecord& rr) {
  return os << ToString(rr);
}

}  // namespace simnet::dns

#endif  // SIMNET_DNS_RECORD_H_
