#ifndef SIMNET_EXPERIMENT_NETWORK_H_
#define SIMNET_EXPERIMENT_NETWORK_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simnet/dns/client.h"
#include "simnet/dns/server.h"
#include "simnet/experiment/scenario.h"
#include "simnet/mdns/resolver.h"
#include "simnet/privacy/privacy.h"
#include "simnet/sim/kernel.h"

namespace simnet::experiment {

// What the configurator decided for one mDNS host.
struct HostPlan {
  std::string name;
  dns::Ipv4Address address;
  std::vector<mdns::ServiceInstance> services;  // private ones flagged
  std::vector<std::string> friends;
  bool private_host = false;
  std::vector<std::string> browse;

  friend bool operator==(const HostPlan&, const HostPlan&) = default;
};

// A built, not yet run, simulation.
struct Network {
  std::unique_ptr<sim::Kernel> kernel;
  std::optional<sim::GroupId> mdns_group;
  std::vector<HostPlan> plan;
  std::vector<mdns::MdnsResolver*> resolvers;  // parallel to `plan`
  std::vector<dns::DnsServerBase*> servers;
  std::vector<dns::TrafficGenerator*> clients;
  std::vector<std::string> warnings;

  // Instance names of every private service (for the audit).
  std::vector<dns::DomainName> PrivateNames() const;
};

struct BuildOptions {
  bool trace = false;
  bool capture = false;
  bool check_invariants = false;
  std::optional<std::string> query_file_override;
};

Network BuildNetwork(const ScenarioConfig& cfg, const BuildOptions& options = {});

// The generator's service catalog (type, port, TXT).
const std::vector<mdns::ServiceInstance>& ServiceCatalog();

// Degree sequence -> simple undirected graph, greedy highest-degree-first.
// Degrees that cannot be met are lowered; a warning is appended for each.
std::vector<std::pair<int, int>> BuildFriendGraph(
    std::vector<int> degrees, std::vector<std::string>* warnings);

struct NodeRow {
  std::uint32_t node_id = 0;
  std::string node;
  std::string role;
  sim::NodeStats stats;
};

struct RunResult {
  std::vector<NodeRow> rows;
  sim::NodeStats total;
  std::uint64_t delivered_bytes = 0;  // kernel ledger
  std::uint64_t events = 0;
  std::vector<std::string> trace;
  std::vector<privacy::Violation> violations;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;  // e.g. withdrawn services
  Network network;                  // kept for inspection
};

RunResult RunScenario(const ScenarioConfig& cfg, const BuildOptions& options = {});

enum class SeedMode {
  kDerived,  // point k runs with seed ^ k
  kCommon,   // every point runs with the scenario seed
};

struct SweepPoint {
  std::string value;
  std::uint64_t seed = 0;
  RunResult result;
};

std::vector<SweepPoint> Sweep(const ScenarioConfig& cfg, const std::string& key,
                              const std::vector<std::string>& values,
                              SeedMode mode = SeedMode::kDerived,
                              const BuildOptions& options = {}, int jobs = 1);

// CSV: one row per node plus an "ALL" aggregate row per parameter value.
std::string CsvHeader();
std::string CsvRows(const std::string& param_value, const RunResult& result);
std::string SweepCsv(const std::vector<SweepPoint>& points);

sim::NodeStats Sum(const std::vector<NodeRow>& rows);

}  // namespace simnet::experiment

#endif  // SIMNET_EXPERIMENT_NETWORK_H_
