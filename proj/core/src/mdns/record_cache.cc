#include "simnet/mdns/record_cache.h"

#include <algorithm>

namespace simnet::mdns {
namespace {

std::uint32_t Remaining(SimTime expiry, SimTime now) {
  return static_cast<std::uint32_t>(
      std::chrono::duration_cast<std::chrono::seconds>(expiry - now).count());
}

}  // namespace

void MdnsRecordCache::Add(const dns::ResourceRecord& rr, SimTime now,
                          bool confidential) {
  auto& bucket = entries_[{rr.owner.CanonicalKey(), rr.type}];
  if (rr.ttl == 0) {
    std::erase_if(bucket, [&](const Entry& e) {
      return dns::SameRecordData(e.rr, rr);
    });
  } else {
    if (rr.cache_flush) {
      std::erase_if(bucket, [&](const Entry& e) {
        return !dns::SameRecordData(e.rr, rr);
      });
    }
    auto it = std::find_if(bucket.begin(), bucket.end(), [&](const Entry& e) {
      return dns::SameRecordData(e.rr, rr);
    });
    if (it == bucket.end()) {
      bucket.push_back(Entry{rr, now, confidential});
    } else {
      *it = Entry{rr, now, confidential};
    }
  }
  if (bucket.empty()) entries_.erase({rr.owner.CanonicalKey(), rr.type});
}

void MdnsRecordCache::AddAll(const std::vector<dns::ResourceRecord>& records,
                             SimTime now, bool confidential) {
  for (const auto& rr : records) Add(rr, now, confidential);
}

std::vector<dns::ResourceRecord> MdnsRecordCache::Get(
    const dns::DomainName& name, dns::RRType type, SimTime now) const {
  std::vector<dns::ResourceRecord> out;
  const std::string key = name.CanonicalKey();
  for (auto it = entries_.lower_bound({key, dns::RRType{0}});
       it != entries_.end() && it->first.first == key; ++it) {
    if (type != dns::RRType::kANY && it->first.second != type) continue;
    for (const auto& e : it->second) {
      if (now >= e.expiry()) continue;
      dns::ResourceRecord rr = e.rr;
      rr.ttl = std::max<std::uint32_t>(1, Remaining(e.expiry(), now));
      out.push_back(std::move(rr));
    }
  }
  return out;
}

std::vector<dns::ResourceRecord> MdnsRecordCache::KnownAnswers(
    const dns::DnsQuestion& q, SimTime now) const {
  std::vector<dns::ResourceRecord> out;
  const std::string key = q.qname.CanonicalKey();
  for (auto it = entries_.lower_bound({key, dns::RRType{0}});
       it != entries_.end() && it->first.first == key; ++it) {
    if (q.qtype != dns::RRType::kANY && it->first.second != q.qtype) continue;
    for (const auto& e : it->second) {
      if (now >= e.expiry() || e.confidential) continue;
      // remaining >= original / 2, compared in nanoseconds
      const auto remaining = e.expiry() - now;
      if (remaining * 2 < std::chrono::seconds(e.rr.ttl)) continue;
      dns::ResourceRecord rr = e.rr;
      rr.ttl = std::max<std::uint32_t>(1, Remaining(e.expiry(), now));
      out.push_back(std::move(rr));
    }
  }
  return out;
}

bool MdnsRecordCache::HasName(const dns::DomainName& name, SimTime now) const {
  return !Get(name, dns::RRType::kANY, now).empty();
}

std::size_t MdnsRecordCache::size() const {
  std::size_t n = 0;
  for (const auto& [key, bucket] : entries_) n += bucket.size();
  return n;
}

void MdnsRecordCache::Expire(SimTime now) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    std::erase_if(it->second, [&](const Entry& e) { return now >= e.expiry(); });
    it = it->second.empty() ? entries_.erase(it) : std::next(it);
  }
}

}  // namespace simnet::mdns
