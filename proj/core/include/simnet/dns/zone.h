#ifndef SIMNET_DNS_ZONE_H_
#define SIMNET_DNS_ZONE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simnet/dns/record.h"

namespace simnet::dns {

class ZoneParseError : public std::runtime_error {
 public:
  ZoneParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct LookupResult {
  enum class Status {
    kFound,       // records of the requested type exist at the name
    kNoData,      // name exists, type absent (see `cname`)
    kNameAbsent,  // no records at or below the name
  };
  Status status = Status::kNameAbsent;
  std::vector<ResourceRecord> records;
  // CNAME at the owner when the requested type itself is absent.
  std::optional<ResourceRecord> cname;
};

// An authoritative zone: one SOA at the origin, every owner inside the zone.
// Immutable after construction.
class ZoneConfig {
 public:
  // Throws std::invalid_argument when the invariants do not hold.
  ZoneConfig(DomainName origin, std::uint32_t default_ttl,
             std::vector<ResourceRecord> records);

  const DomainName& origin() const { return origin_; }
  std::uint32_t default_ttl() const { return default_ttl_; }
  const ResourceRecord& soa() const { return records_[soa_index_]; }
  // All records in file order, SOA included.
  const std::vector<ResourceRecord>& records() const { return records_; }

  bool Contains(const DomainName& name) const {
    return name.IsSubdomainOf(origin_);
  }

  // True if any owner equals `name` or lies below it.
  bool NameExists(const DomainName& name) const;

  LookupResult Lookup(const DomainName& qname, RRType qtype) const;

  // NS records of the closest zone cut strictly below the apex on the path
  // to `qname` (the cut may be `qname` itself). Empty when not delegated.
  std::vector<ResourceRecord> FindDelegation(const DomainName& qname) const;

  // In-zone A and AAAA records at `name`.
  std::vector<ResourceRecord> AddressRecords(const DomainName& name) const;

  friend bool operator==(const ZoneConfig& a, const ZoneConfig& b) {
    return a.origin_ == b.origin_ && a.default_ttl_ == b.default_ttl_ &&
           a.records_ == b.records_;
  }

 private:
  std::vector<std::size_t> IndicesAt(const DomainName& name) const;

  DomainName origin_;
  std::uint32_t default_ttl_;
  std::vector<ResourceRecord> records_;
  std::size_t soa_index_ = 0;
  // (canonical owner, type) -> positions in records_.
  std::map<std::pair<std::string, RRType>, std::vector<std::size_t>> index_;
};

// Parses the BIND master-file subset: `;` comments, $TTL, $ORIGIN, `@`,
// blank owner = previous owner, parenthesized continuation, relative names,
// optional TTL/class columns, and types SOA NS MX A AAAA CNAME PTR SRV TXT.
ZoneConfig ParseZone(std::string_view text);
ZoneConfig LoadZoneFile(const std::filesystem::path& path);

// Canonical text form; ParseZone(RenderZone(z)) == z.
std::string RenderZone(const ZoneConfig& zone);

}  // namespace simnet::dns

#endif  // SIMNET_DNS_ZONE_H_
