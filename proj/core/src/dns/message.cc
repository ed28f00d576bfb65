#include "simnet/dns/message.h"

#include <sstream>

namespace simnet::dns {

std::string_view ToString(Rcode rcode) {
  switch (rcode) {
    case Rcode::kNoError:
      return "NOERROR";
    case Rcode::kFormErr:
      return "FORMERR";
    case Rcode::kServFail:
      return "SERVFAIL";
    case Rcode::kNxDomain:
      return "NXDOMAIN";
    case Rcode::kNotImp:
      return "NOTIMP";
  }
  return "?";
}

DnsMessage MakeQuery(std::uint16_t id, const DnsQuestion& question,
                     bool recursion_desired) {
  DnsMessage msg;
  msg.id = id;
  msg.flags.recursion_desired = recursion_desired;
  msg.questions.push_back(question);
  return msg;
}

DnsMessage MakeResponseTo(const DnsMessage& query) {
  DnsMessage msg;
  msg.id = query.id;
  msg.flags.response = true;
  msg.flags.opcode = query.flags.opcode;
  msg.flags.recursion_desired = query.flags.recursion_desired;
  msg.questions = query.questions;
  return msg;
}

std::string ToString(const DnsQuestion& question) {
  std::ostringstream os;
  os << question.qname << " IN " << question.qtype;
  return os.str();
}

std::string DebugString(const DnsMessage& message) {
  std::ostringstream os;
  os << "id=" << message.id << (message.flags.response ? " response" : " query")
     << " rcode=" << ToString(message.flags.rcode)
     << (message.flags.authoritative ? " aa" : "")
     << (message.flags.recursion_desired ? " rd" : "")
     << (message.flags.recursion_available ? " ra" : "") << '\n';
  for (const auto& q : message.questions) os << "  Q " << ToString(q) << '\n';
  for (const auto& rr : message.answers) os << "  AN " << rr << '\n';
  for (const auto& rr : message.authorities) os << "  NS " << rr << '\n';
  for (const auto& rr : message.additionals) os << "  AR " << rr << '\n';
  return os.str();
}

}  // namespace simnet::dns
