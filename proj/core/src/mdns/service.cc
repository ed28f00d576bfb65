#include "simnet/mdns/service.h"

namespace simnet::mdns {

const DomainName& LocalDomain() {
  static const DomainName kLocal = DomainName::Parse("local.");
  return kLocal;
}

DomainName HostName(std::string_view host) {
  return LocalDomain().Prepend(std::string(host));
}

DomainName ServiceInstance::TypeName() const {
  return DomainName::Parse(type).Concat(LocalDomain());
}

DomainName ServiceInstance::FullName() const {
  return TypeName().Prepend(instance);
}

ServiceRecords DeriveRecords(const ServiceInstance& service,
                             const DomainName& host) {
  const DomainName full = service.FullName();
  ServiceRecords out;
  out.ptr = ResourceRecord{service.TypeName(), dns::RRType::kPTR,
                           dns::RRClass::kIN, kPtrTtl, full, false};
  out.srv = ResourceRecord{full, dns::RRType::kSRV, dns::RRClass::kIN, kSrvTtl,
                           dns::SrvData{0, 0, service.port, host}, true};
  dns::TxtData txt{service.txt};
  if (txt.strings.empty()) txt.strings.emplace_back();  // RFC 6763 6.1
  out.txt = ResourceRecord{full, dns::RRType::kTXT, dns::RRClass::kIN, kTxtTtl,
                           std::move(txt), true};
  return out;
}

ResourceRecord HostAddressRecord(const DomainName& host,
                                 const dns::Ipv4Address& address) {
  return ResourceRecord{host, dns::RRType::kA, dns::RRClass::kIN,
                        kHostRecordTtl, address, true};
}

std::string RenamedLabel(std::string_view base, int conflicts) {
  if (conflicts <= 0) return std::string(base);
  return std::string(base) + " #" + std::to_string(conflicts + 1);
}

bool IsSharedType(dns::RRType type) { return type == dns::RRType::kPTR; }

}  // namespace simnet::mdns
