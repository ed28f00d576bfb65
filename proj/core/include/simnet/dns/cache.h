#ifndef SIMNET_DNS_CACHE_H_
#define SIMNET_DNS_CACHE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "simnet/dns/record.h"
#include "simnet/sim/random.h"
#include "simnet/sim/time.h"

namespace simnet::dns {

using sim::SimTime;

// One RRset: (name, type). Ordering is canonical-name then type, so the
// name's case does not matter.
struct CacheKey {
  DomainName name;
  RRType type = RRType::kA;

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
  friend std::strong_ordering operator<=>(const CacheKey& a, const CacheKey& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return static_cast<std::uint16_t>(a.type) <=> static_cast<std::uint16_t>(b.type);
  }
};

struct CacheEntry {
  std::vector<ResourceRecord> records;
  SimTime inserted_at{0};
  std::uint32_t original_ttl = 0;  // minimum over records
  std::uint64_t insertion = 0;     // tiebreak for equal expiries

  // Valid while now < expiry().
  SimTime expiry() const {
    return inserted_at + std::chrono::seconds(original_ttl);
  }
};

struct SimpleCachePolicy {
  std::size_t capacity = 1024;
};
struct TtlCachePolicy {
  std::size_t capacity = 1024;
};
using CachePolicy = std::variant<SimpleCachePolicy, TtlCachePolicy>;

// Record cache behind an eviction-policy interface. One entry per RRset;
// no negative caching.
class DnsCache {
 public:
  explicit DnsCache(std::size_t capacity);
  virtual ~DnsCache() = default;

  // Stores `records` (non-empty, all matching `key`), replacing any entry for
  // the key. Returns the keys evicted to stay within capacity.
  std::vector<CacheKey> Put(const CacheKey& key,
                            std::vector<ResourceRecord> records, SimTime now);

  // Hit iff an entry exists and now < expiry. Returned TTLs are decayed to
  // the whole seconds remaining (at least 1). Expired entries are dropped.
  std::optional<std::vector<ResourceRecord>> Get(const CacheKey& key,
                                                 SimTime now);

  // Removes every entry with expiry <= now.
  std::size_t Sweep(SimTime now);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool Contains(const CacheKey& key) const { return entries_.contains(key); }
  const std::map<CacheKey, CacheEntry>& entries() const { return entries_; }

 protected:
  // Picks the entry to evict; called only when the store is non-empty.
  virtual CacheKey SelectVictim() = 0;

  std::map<CacheKey, CacheEntry> entries_;

 private:
  std::size_t capacity_;
  std::uint64_t insertions_ = 0;
};

// Evicts a uniformly random entry, drawn from a seeded stream.
class SimpleCache : public DnsCache {
 public:
  SimpleCache(std::size_t capacity, sim::RandomStream rng);

 protected:
  CacheKey SelectVictim() override;

 private:
  sim::RandomStream rng_;
};

// Evicts the entry that expires first (ties: earliest insertion).
class TtlCache : public DnsCache {
 public:
  explicit TtlCache(std::size_t capacity);

 protected:
  CacheKey SelectVictim() override;
};

std::unique_ptr<DnsCache> MakeCache(const CachePolicy& policy,
                                    sim::RandomStream rng);

}  // namespace simnet::dns

#endif  // SIMNET_DNS_CACHE_H_
