#include <algorithm>

#include "simnet/dns/server.h"

namespace simnet::dns {
namespace {

constexpr int kMaxCnameChase = 8;

void AppendUnique(std::vector<ResourceRecord>& out,
                  const std::vector<ResourceRecord>& records) {
  for (const auto& rr : records) {
    if (std::find(out.begin(), out.end(), rr) == out.end()) out.push_back(rr);
  }
}

// Address records for NS targets and MX exchanges found in `records`.
std::vector<ResourceRecord> GlueFor(const ZoneConfig& zone,
                                    const std::vector<ResourceRecord>& records) {
  std::vector<ResourceRecord> glue;
  for (const auto& rr : records) {
    const DomainName* target = nullptr;
    if (rr.type == RRType::kNS) {
      target = &std::get<DomainName>(rr.rdata);
    } else if (rr.type == RRType::kMX) {
      target = &std::get<MxData>(rr.rdata).exchange;
    }
    if (target != nullptr && zone.Contains(*target)) {
      AppendUnique(glue, zone.AddressRecords(*target));
    }
  }
  return glue;
}

std::vector<ResourceRecord> ApexNs(const ZoneConfig& zone) {
  return zone.Lookup(zone.origin(), RRType::kNS).records;
}

}  // namespace

bool IsSupportedQueryType(RRType type) {
  switch (type) {
    case RRType::kA:
    case RRType::kAAAA:
    case RRType::kNS:
    case RRType::kMX:
    case RRType::kCNAME:
    case RRType::kANY:
      return true;
    default:
      return false;
  }
}

DnsMessage AnswerFromZone(const ZoneConfig& zone, const DnsMessage& query) {
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
  if (!IsSupportedQueryType(q.qtype)) {
    resp.flags.rcode = Rcode::kNotImp;
    return resp;
  }
  if (!zone.Contains(q.qname)) {
    resp.flags.rcode = Rcode::kServFail;
    return resp;
  }

  if (auto ns = zone.FindDelegation(q.qname); !ns.empty()) {
    resp.additionals = GlueFor(zone, ns);
    resp.authorities = std::move(ns);
    return resp;
  }

  resp.flags.authoritative = true;
  DomainName name = q.qname;
  for (int hop = 0;; ++hop) {
    LookupResult found = zone.Lookup(name, q.qtype);
    if (found.status == LookupResult::Status::kFound) {
      AppendUnique(resp.answers, found.records);
      break;
    }
    if (found.status == LookupResult::Status::kNameAbsent) {
      resp.flags.rcode = Rcode::kNxDomain;
      resp.authorities.push_back(zone.soa());
      return resp;
    }
    if (!found.cname || q.qtype == RRType::kCNAME) {
      if (resp.answers.empty()) {
        resp.authorities.push_back(zone.soa());
        return resp;
      }
      break;
    }
    resp.answers.push_back(*found.cname);
    name = std::get<DomainName>(found.cname->rdata);
    if (!zone.Contains(name) || hop + 1 >= kMaxCnameChase) break;
    if (!zone.FindDelegation(name).empty()) break;
  }

  const auto apex_ns = ApexNs(zone);
  const bool answer_has_ns =
      std::any_of(resp.answers.begin(), resp.answers.end(), [&](const auto& rr) {
        return rr.type == RRType::kNS && rr.owner == zone.origin();
      });
  if (!answer_has_ns) resp.authorities = apex_ns;
  std::vector<ResourceRecord> referenced = resp.answers;
  referenced.insert(referenced.end(), resp.authorities.begin(),
                    resp.authorities.end());
  resp.additionals = GlueFor(zone, referenced);
  return resp;
}

AuthServer::AuthServer(ZoneConfig zone)
    : DnsServerBase({}, nullptr), zone_(std::move(zone)) {}

void AuthServer::HandleQuery(const sim::SimPacket& packet,
                             const DnsMessage& query) {
  Reply(packet, AnswerFromZone(zone_, query));
}

}  // namespace simnet::dns
