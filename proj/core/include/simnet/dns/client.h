#ifndef SIMNET_DNS_CLIENT_H_
#define SIMNET_DNS_CLIENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simnet/dns/message.h"
#include "simnet/sim/kernel.h"

namespace simnet::dns {

using sim::SimTime;

struct ResolveOutcome {
  enum class Status { kAnswered, kTimeout };
  Status status = Status::kAnswered;
  Rcode rcode = Rcode::kNoError;
  std::vector<ResourceRecord> answers;
  SimTime rtt{0};  // issue to response (or to giving up)
};
using ResolveHandler = std::function<void(const ResolveOutcome&)>;

struct ClientConfig {
  SimTime timeout = std::chrono::seconds(1);
  int max_retries = 2;
};

// Stub resolver node. Every request gets exactly one callback.
class DnsClient : public sim::Node {
 public:
  explicit DnsClient(ClientConfig config = {});

  // Sends an RD query to `server`. Returns the request id, or nullopt when
  // all 65536 ids are in flight. Must be called from a kernel callback.
  std::optional<std::uint16_t> Resolve(const DomainName& qname, RRType qtype,
                                       sim::NodeId server,
                                       ResolveHandler handler);

  void OnPacket(const sim::SimPacket& packet, const DnsMessage& message) override;

  std::size_t in_flight() const { return requests_.size(); }
  std::uint64_t issued() const { return issued_; }
  std::uint64_t completed() const { return completed_; }
  std::uint64_t timeouts() const { return timeouts_; }

 private:
  struct Request {
    DnsQuestion question;
    sim::NodeId server;
    SimTime issued_at{0};
    int attempts = 0;
    sim::EventHandle timeout;
    ResolveHandler handler;
  };

  void Transmit(std::uint16_t id);
  void OnTimeout(std::uint16_t id);
  void Complete(std::uint16_t id, ResolveOutcome outcome);

  ClientConfig config_;
  std::optional<sim::RandomStream> rng_;
  std::map<std::uint16_t, Request> requests_;
  std::uint64_t issued_ = 0;
  std::uint64_t completed_ = 0;
  std::uint64_t timeouts_ = 0;
};

class QueryFileError : public std::runtime_error {
 public:
  QueryFileError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct QueryLine {
  DomainName qname;
  RRType qtype = RRType::kA;
  friend bool operator==(const QueryLine&, const QueryLine&) = default;
};

// One "name type" pair per line; '#' starts a comment. An empty list is an
// error.
std::vector<QueryLine> ParseQueryFile(std::string_view text);
std::vector<QueryLine> LoadQueryFile(const std::filesystem::path& path);

struct TrafficConfig {
  std::vector<QueryLine> queries;
  SimTime period = std::chrono::seconds(10);
  double jitter = 0.1;  // in [0, 1)
  sim::NodeId server;
  std::string stream = "traffgen";
};

// Periodically resolves a uniformly drawn query line. Tick k+1 follows tick
// k after period * (1 + u), u uniform on [-jitter, jitter]; the first tick
// is drawn the same way from t = start.
class TrafficGenerator : public DnsClient {
 public:
  explicit TrafficGenerator(TrafficConfig config, ClientConfig client = {});

  void Start() override;

  const TrafficConfig& config() const { return config_; }
  // Per query line, how many times it was drawn.
  const std::vector<std::uint64_t>& draws() const { return draws_; }
  const std::vector<SimTime>& send_times() const { return send_times_; }
  std::uint64_t answered() const { return answered_; }

 private:
  void Tick();
  SimTime NextGap();

  TrafficConfig config_;
  std::optional<sim::RandomStream> rng_;
  std::vector<std::uint64_t> draws_;
  std::vector<SimTime> send_times_;
  std::uint64_t answered_ = 0;
};

}  // namespace simnet::dns

#endif  // SIMNET_DNS_CLIENT_H_
