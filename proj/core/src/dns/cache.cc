#include "simnet/dns/cache.h"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace simnet::dns {

DnsCache::DnsCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw std::invalid_argument("cache capacity must be >= 1");
}

std::vector<CacheKey> DnsCache::Put(const CacheKey& key,
                                    std::vector<ResourceRecord> records,
                                    SimTime now) {
  if (records.empty()) throw std::invalid_argument("cache put without records");
  if (key.type == RRType::kANY) throw std::invalid_argument("ANY is not cacheable");
  std::uint32_t min_ttl = records.front().ttl;
  for (const auto& rr : records) {
    if (rr.type != key.type || rr.owner != key.name) {
      throw std::invalid_argument("record " + ToString(rr) +
                                  " does not match cache key");
    }
    min_ttl = std::min(min_ttl, rr.ttl);
  }

  std::vector<CacheKey> evicted;
  if (!entries_.contains(key)) {
    while (entries_.size() >= capacity_) {
      CacheKey victim = SelectVictim();
      entries_.erase(victim);
      evicted.push_back(std::move(victim));
    }
  }
  entries_[key] = CacheEntry{std::move(records), now, min_ttl, ++insertions_};
  return evicted;
}

std::optional<std::vector<ResourceRecord>> DnsCache::Get(const CacheKey& key,
                                                         SimTime now) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  const SimTime expiry = it->second.expiry();
  if (now >= expiry) {
    entries_.erase(it);
    return std::nullopt;
  }
  const auto remaining = std::max<std::int64_t>(
      1, std::chrono::duration_cast<std::chrono::seconds>(expiry - now).count());
  std::vector<ResourceRecord> out = it->second.records;
  for (auto& rr : out) rr.ttl = static_cast<std::uint32_t>(remaining);
  return out;
}

std::size_t DnsCache::Sweep(SimTime now) {
  return std::erase_if(entries_, [now](const auto& item) {
    return item.second.expiry() <= now;
  });
}

SimpleCache::SimpleCache(std::size_t capacity, sim::RandomStream rng)
    : DnsCache(capacity), rng_(std::move(rng)) {}

CacheKey SimpleCache::SelectVictim() {
  const auto index = rng_.UniformInt(0, entries_.size() - 1);
  auto it = entries_.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(index));
  return it->first;
}

TtlCache::TtlCache(std::size_t capacity) : DnsCache(capacity) {}

CacheKey TtlCache::SelectVictim() {
  auto best = std::min_element(
      entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
        const auto ea = a.second.expiry();
        const auto eb = b.second.expiry();
        if (ea != eb) return ea < eb;
        return a.second.insertion < b.second.insertion;
      });
  return best->first;
}

std::unique_ptr<DnsCache> MakeCache(const CachePolicy& policy,
                                    sim::RandomStream rng) {
  if (const auto* simple = std::get_if<SimpleCachePolicy>(&policy)) {
    return std::make_unique<SimpleCache>(simple->capacity, std::move(rng));
  }
  return std::make_unique<TtlCache>(std::get<TtlCachePolicy>(policy).capacity);
}

}  // namespace simnet::dns
