#ifndef SIMNET_DNS_MESSAGE_H_
#define SIMNET_DNS_MESSAGE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "simnet/dns/name.h"
#include "simnet/dns/record.h"

namespace simnet::dns {

enum class Rcode : std::uint8_t {
  kNoError = 0,
  kFormErr = 1,
  kServFail = 2,
  kNxDomain = 3,
  kNotImp = 4,
};

std::string_view ToString(Rcode rcode);

struct MessageFlags {
  bool response = false;
  std::uint8_t opcode = 0;  // 4 bits
  bool authoritative = false;
  bool truncated = false;
  bool recursion_desired = false;
  bool recursion_available = false;
  Rcode rcode = Rcode::kNoError;

  friend bool operator==(const MessageFlags&, const MessageFlags&) = default;
};

struct DnsQuestion {
  DomainName qname;
  RRType qtype = RRType::kA;
  RRClass qclass = RRClass::kIN;

  friend bool operator==(const DnsQuestion&, const DnsQuestion&) = default;
};

struct DnsMessage {
  std::uint16_t id = 0;
  MessageFlags flags;
  std::vector<DnsQuestion> questions;
  std::vector<ResourceRecord> answers;
  std::vector<ResourceRecord> authorities;
  std::vector<ResourceRecord> additionals;

  bool IsQuery() const { return !flags.response; }
  bool IsResponse() const { return flags.response; }

  friend bool operator==(const DnsMessage&, const DnsMessage&) = default;
};

DnsMessage MakeQuery(std::uint16_t id, const DnsQuestion& question,
                     bool recursion_desired);

// Response skeleton: copies id, opcode, RD and the question section.
DnsMessage MakeResponseTo(const DnsMessage& query);

std::string ToString(const DnsQuestion& question);
std::string DebugString(const DnsMessage& message);

}  // namespace simnet::dns

#endif  // SIMNET_DNS_MESSAGE_H_
