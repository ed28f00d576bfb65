#ifndef SIMNET_EXPERIMENT_SCENARIO_H_
#define SIMNET_EXPERIMENT_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simnet/dns/record.h"
#include "simnet/mdns/service.h"

namespace simnet::experiment {

// Invalid scenario text or values. `line` is 0 when not tied to a line.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

struct LinkSpec {
  std::string a;
  std::string b;
  double delay = 0.0;  // seconds
};

struct TopologySection {
  std::optional<double> default_delay = 0.001;  // nullopt: no default route
  std::vector<LinkSpec> links;
};

struct MdnsSection {
  int num_resolvers = 0;
  int num_private_resolvers = 0;
  int min_friends = 0;
  int max_friends = 0;
  int min_services = 1;
  int max_services = 1;
  double private_service_ratio = 0.0;
  bool privacy = true;
  double reannounce = 60.0;           // seconds; 0 disables
  std::vector<std::string> browse;    // service types every host asks for
  double browse_at = 5.0;             // seconds
};

struct HostSpec {
  std::string name;
  std::optional<dns::Ipv4Address> address;
  std::vector<mdns::ServiceInstance> services;
  int private_services = 0;
  std::vector<std::string> friends;
  std::vector<std::string> browse;
  int line = 0;
};

struct DnsServerSpec {
  enum class Kind { kAuth, kCaching, kEcho };
  Kind kind = Kind::kAuth;
  std::string name;
  dns::Ipv4Address address;
  std::string zone_file;        // auth
  std::string cache_policy = "ttl";  // caching: simple | ttl
  std::size_t cache_capacity = 1024;
  std::string echo_domain;      // echo
  int line = 0;
};

struct RootHintSpec {
  std::string ns_name;
  std::string node;
  int line = 0;
};

struct DnsClientSpec {
  std::string name;
  dns::Ipv4Address address;
  std::string server;
  std::string query_file;
  double period = 10.0;
  double jitter = 0.1;
  int line = 0;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  double duration = 300.0;  // seconds
  std::string name;
  std::filesystem::path base_dir;  // relative file paths resolve here

  TopologySection topology;
  MdnsSection mdns;
  std::vector<HostSpec> hosts;
  std::vector<DnsServerSpec> servers;
  std::vector<RootHintSpec> roots;
  std::vector<DnsClientSpec> clients;

  // Throws ScenarioError when a cross-field invariant fails.
  void Validate() const;

  // Assigns a scalar key, e.g. "private_service_ratio" or
  // "mdns.private_service_ratio". Throws ScenarioError for unknown keys.
  void Set(std::string_view key, std::string_view value);

  std::filesystem::path Resolve(const std::string& path) const;
};

// INI-style scenario text: [section] headers, key = value lines, '#'
// comments. Repeatable keys (link, service, auth, ...) accumulate.
ScenarioConfig ParseScenario(std::string_view text,
                             std::filesystem::path base_dir = {});
ScenarioConfig LoadScenario(const std::filesystem::path& path);

// `service = <instance> <type> <port> [txt k=v ...]`; the instance may be
// double-quoted.
mdns::ServiceInstance ParseServiceSpec(std::string_view value);

// Scalar keys accepted by Set() and `sweep --vary`.
const std::vector<std::string>& SweepableKeys();

}  // namespace simnet::experiment

#endif  // SIMNET_EXPERIMENT_SCENARIO_H_
