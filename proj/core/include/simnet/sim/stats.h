#ifndef SIMNET_SIM_STATS_H_
#define SIMNET_SIM_STATS_H_

#include <cstdint>

namespace simnet::sim {

// Per-node traffic counters. Received bytes are charged when a delivery
// event is processed, under the packet's transport tag.
struct NodeStats {
  std::uint64_t mcast_bytes_rx = 0;
  std::uint64_t mcast_packets_rx = 0;
  std::uint64_t ucast_bytes_rx = 0;
  std::uint64_t ucast_packets_rx = 0;

  std::uint64_t mcast_bytes_tx = 0;
  std::uint64_t mcast_packets_tx = 0;
  std::uint64_t ucast_bytes_tx = 0;
  std::uint64_t ucast_packets_tx = 0;

  std::uint64_t queries_sent = 0;
  std::uint64_t responses_sent = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t suppressed_queries = 0;
  std::uint64_t suppressed_responses = 0;

  std::uint64_t dropped_no_route = 0;
  std::uint64_t malformed_packets = 0;
  std::uint64_t stale_responses = 0;
  std::uint64_t privacy_rejected = 0;

  std::uint64_t total_bytes_rx() const { return mcast_bytes_rx + ucast_bytes_rx; }

  friend bool operator==(const NodeStats&, const NodeStats&) = default;
};

}  // namespace simnet::sim

#endif  // SIMNET_SIM_STATS_H_
