#include "simnet/experiment/network.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "simnet/dns/zone.h"

namespace simnet::experiment {
namespace {

using mdns::ServiceInstance;

std::string PaddedName(std::string_view prefix, int index, int count) {
  const int width = std::max<int>(2, static_cast<int>(std::to_string(count).size()));
  std::string digits = std::to_string(index + 1);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return std::string(prefix) + digits;
}

// 10.0.x.y for generated hosts, skipping .0 and .255.
dns::Ipv4Address GeneratedAddress(int index) {
  const std::uint32_t host = static_cast<std::uint32_t>(index);
  return dns::Ipv4Address::FromUint((10u << 24) | ((host / 254) << 8) |
                                    (host % 254 + 1));
}

std::size_t PrivateCount(double ratio, std::size_t services) {
  const double raw = ratio * static_cast<double>(services);
  return std::min(services, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

std::string RoleOf(const DnsServerSpec& s) {
  switch (s.kind) {
    case DnsServerSpec::Kind::kAuth: return "auth";
    case DnsServerSpec::Kind::kCaching: return "caching";
    case DnsServerSpec::Kind::kEcho: return "echo";
  }
  return "dns";
}

std::vector<HostPlan> PlanHosts(const ScenarioConfig& cfg, sim::RandomStream& rng,
                                std::vector<std::string>& warnings) {
  const auto& m = cfg.mdns;
  std::vector<HostPlan> plan;
  std::set<std::string> taken;
  for (const auto& s : cfg.servers) taken.insert(s.name);
  for (const auto& c : cfg.clients) taken.insert(c.name);

  // Hosts declared explicitly.
  std::map<std::string, std::set<std::string>> declared_friends;
  for (const auto& h : cfg.hosts) {
    HostPlan p;
    p.name = h.name;
    p.services = h.services;
    for (int i = 0; i < h.private_services; ++i) p.services[i].is_private = true;
    p.private_host = h.private_services > 0;
    p.browse = h.browse;
    for (const auto& f : h.friends) {
      declared_friends[h.name].insert(f);
      declared_friends[f].insert(h.name);
    }
    taken.insert(h.name);
    plan.push_back(std::move(p));
  }
  for (auto& p : plan) {
    const auto& f = declared_friends[p.name];
    p.friends.assign(f.begin(), f.end());
  }

  // Generated hosts.
  const int n = m.num_resolvers;
  const std::size_t first = plan.size();
  const auto& catalog = ServiceCatalog();
  for (int i = 0; i < n; ++i) {
    HostPlan p;
    p.name = PaddedName("host", i, n);
    if (taken.contains(p.name)) {
      throw ScenarioError("generated host name '" + p.name +
                          "' collides with a declared node");
    }
    const auto count = rng.UniformInt(static_cast<std::uint64_t>(m.min_services),
                                      static_cast<std::uint64_t>(m.max_services));
    std::map<std::string, int> used;
    for (std::uint64_t k = 0; k < count; ++k) {
      ServiceInstance s = catalog[rng.UniformInt(0, catalog.size() - 1)];
      const int dup = ++used[s.type];
      s.instance = p.name + " " + s.instance;
      if (dup > 1) s.instance += " (" + std::to_string(dup) + ")";
      p.services.push_back(std::move(s));
    }
    plan.push_back(std::move(p));
  }

  std::vector<int> degrees;
  for (int i = 0; i < n; ++i) {
    int d = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(m.min_friends),
                                            static_cast<std::uint64_t>(m.max_friends)));
    if (d > n - 1) {
      warnings.push_back("host " + plan[first + i].name + ": " + std::to_string(d) +
                         " friends requested, only " + std::to_string(n - 1) +
                         " peers exist");
      d = n - 1;
    }
    degrees.push_back(d);
  }
  for (auto [a, b] : BuildFriendGraph(degrees, &warnings)) {
    plan[first + a].friends.push_back(plan[first + b].name);
    plan[first + b].friends.push_back(plan[first + a].name);
  }

  // Private hosts: a seeded partial shuffle, independent of the ratio.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int k = 0; k < m.num_private_resolvers; ++k) {
    const auto j = rng.UniformInt(static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(n - 1));
    std::swap(order[k], order[j]);
  }
  if (!m.privacy && m.num_private_resolvers > 0 && m.private_service_ratio > 0) {
    warnings.push_back("privacy is off; all services stay public");
  }
  for (int k = 0; k < m.num_private_resolvers; ++k) {
    HostPlan& p = plan[first + order[k]];
    p.private_host = true;
    if (!m.privacy) continue;
    const auto count = PrivateCount(m.private_service_ratio, p.services.size());
    for (std::size_t s = 0; s < count; ++s) p.services[s].is_private = true;
  }
  if (!m.privacy) {
    for (auto& p : plan) {
      for (auto& s : p.services) s.is_private = false;
    }
  }

  for (auto& p : plan) {
    for (const auto& t : m.browse) {
      if (std::find(p.browse.begin(), p.browse.end(), t) == p.browse.end()) {
        p.browse.push_back(t);
      }
    }
  }

  int generated = 0;
  std::set<std::uint32_t> used_addresses;
  for (const auto& s : cfg.servers) used_addresses.insert(s.address.ToUint());
  for (const auto& c : cfg.clients) used_addresses.insert(c.address.ToUint());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (i < cfg.hosts.size() && cfg.hosts[i].address) {
      plan[i].address = *cfg.hosts[i].address;
    } else {
      do {
        plan[i].address = GeneratedAddress(generated++);
      } while (used_addresses.contains(plan[i].address.ToUint()));
    }
    if (!used_addresses.insert(plan[i].address.ToUint()).second &&
        i < cfg.hosts.size() && cfg.hosts[i].address) {
      throw ScenarioError("address " + plan[i].address.ToString() +
                          " is used twice", cfg.hosts[i].line);
    }
  }
  return plan;
}

}  // namespace

const std::vector<ServiceInstance>& ServiceCatalog() {
  static const std::vector<ServiceInstance> kCatalog = {
      {"Printer", "_ipp._tcp", 631,
       {"txtvers=1", "qtotal=1", "rp=printers/office", "ty=Laser Printer 400",
        "pdl=application/pdf,image/urf", "Color=T", "Duplex=T"}, false},
      {"Web", "_http._tcp", 80, {"path=/"}, false},
      {"Screen", "_airplay._tcp", 7000,
       {"deviceid=58:55:CA:1A:E2:88", "features=0x5A7FFFF7", "model=AppleTV3,2",
        "srcvers=220.68"}, false},
      {"Speaker", "_raop._tcp", 7000,
       {"txtvers=1", "ch=2", "cn=0,1", "et=0,3", "sr=44100", "ss=16"}, false},
      {"Files", "_smb._tcp", 445, {}, false},
      {"Shell", "_ssh._tcp", 22, {}, false},
      {"Music", "_daap._tcp", 3689,
       {"txtvers=1", "iTSh Version=131073", "Database ID=5E0A4E1F"}, false},
      {"Cast", "_googlecast._tcp", 8009,
       {"id=3f1b2c9a8d7e6f50", "md=Chromecast", "fn=Living Room", "ca=4101",
        "st=0"}, false},
      {"Workstation", "_workstation._tcp", 9, {}, false},
      {"Scanner", "_uscan._tcp", 8080,
       {"txtvers=1", "rs=eSCL", "vers=2.6", "pdl=application/pdf,image/jpeg"},
       false},
  };
  return kCatalog;
}

std::vector<std::pair<int, int>> BuildFriendGraph(
    std::vector<int> degrees, std::vector<std::string>* warnings) {
  const int n = static_cast<int>(degrees.size());
  std::vector<std::pair<int, int>> edges;
  const long sum = std::accumulate(degrees.begin(), degrees.end(), 0L);
  if (sum % 2 != 0) {
    // Lower the highest degree (last such index) by one.
    int victim = 0;
    for (int i = 0; i < n; ++i) {
      if (degrees[i] >= degrees[victim]) victim = i;
    }
    --degrees[victim];
    if (warnings) {
      warnings->push_back("odd friend-degree sum; host index " +
                          std::to_string(victim) + " gets one friend less");
    }
  }
  std::vector<int> remaining = degrees;
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (int round = 0; round < n; ++round) {
    int v = -1;
    for (int i = 0; i < n; ++i) {
      if (!done[i] && (v < 0 || remaining[i] > remaining[v])) v = i;
    }
    if (v < 0 || remaining[v] == 0) break;
    done[v] = true;
    std::vector<int> others;
    for (int i = 0; i < n; ++i) {
      if (!done[i] && remaining[i] > 0) others.push_back(i);
    }
    std::stable_sort(others.begin(), others.end(),
                     [&](int a, int b) { return remaining[a] > remaining[b]; });
    const int want = remaining[v];
    const int got = std::min<int>(want, static_cast<int>(others.size()));
    for (int k = 0; k < got; ++k) {
      edges.emplace_back(std::min(v, others[k]), std::max(v, others[k]));
      --remaining[others[k]];
    }
    remaining[v] = 0;
    if (got < want && warnings) {
      warnings->push_back("host index " + std::to_string(v) + " gets " +
                          std::to_string(got) + " of " + std::to_string(want) +
                          " requested friends");
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<dns::DomainName> Network::PrivateNames() const {
  std::vector<dns::DomainName> out;
  for (const auto& p : plan) {
    for (const auto& s : p.services) {
      if (s.is_private) out.push_back(s.FullName());
    }
  }
  return out;
}

Network BuildNetwork(const ScenarioConfig& cfg, const BuildOptions& options) {
  cfg.Validate();
  Network net;
  net.kernel = std::make_unique<sim::Kernel>(cfg.seed);
  sim::Kernel& k = *net.kernel;
  k.EnableTrace(options.trace);
  k.EnableCapture(options.capture);
  k.set_check_invariants(options.check_invariants);
  if (cfg.topology.default_delay) {
    k.SetDefaultDelay(sim::FromSeconds(*cfg.topology.default_delay));
  } else {
    k.SetDefaultDelay(std::nullopt);
  }

  std::map<std::string, dns::Ipv4Address> addresses;
  for (const auto& s : cfg.servers) addresses[s.name] = s.address;

  for (const auto& s : cfg.servers) {
    switch (s.kind) {
      case DnsServerSpec::Kind::kAuth: {
        std::optional<dns::ZoneConfig> zone;
        try {
          zone.emplace(dns::LoadZoneFile(cfg.Resolve(s.zone_file)));
        } catch (const std::exception& e) {
          throw ScenarioError("zone for " + s.name + ": " + e.what(), s.line);
        }
        net.servers.push_back(
            &k.Emplace<dns::AuthServer>(s.name, s.address, RoleOf(s), std::move(*zone)));
        break;
      }
      case DnsServerSpec::Kind::kCaching: {
        dns::RootHints hints;
        for (const auto& r : cfg.roots) {
          auto it = addresses.find(r.node);
          if (it == addresses.end()) {
            throw ScenarioError("root hint node '" + r.node + "' is not a DNS server",
                                r.line);
          }
          hints.push_back(dns::RootHint{dns::DomainName::Parse(r.ns_name), it->second});
        }
        dns::CachePolicy policy = dns::TtlCachePolicy{s.cache_capacity};
        if (s.cache_policy == "simple") policy = dns::SimpleCachePolicy{s.cache_capacity};
        auto cache = dns::MakeCache(policy, k.RngStream(s.name + "/cache"));
        net.servers.push_back(&k.Emplace<dns::CachingServer>(
            s.name, s.address, RoleOf(s), std::move(hints), std::move(cache)));
        break;
      }
      case DnsServerSpec::Kind::kEcho: {
        dns::EchoConfig echo;
        echo.domain = dns::DomainName::Parse(s.echo_domain);
        net.servers.push_back(&k.Emplace<dns::EchoServer>(s.name, s.address, RoleOf(s), echo));
        break;
      }
    }
  }

  for (const auto& c : cfg.clients) {
    dns::TrafficConfig t;
    const std::string file = options.query_file_override.value_or(c.query_file);
    try {
      t.queries = dns::LoadQueryFile(options.query_file_override
                                         ? std::filesystem::path(file)
                                         : cfg.Resolve(file));
    } catch (const std::exception& e) {
      throw ScenarioError("client " + c.name + ": " + e.what(), c.line);
    }
    t.period = sim::FromSeconds(c.period);
    t.jitter = c.jitter;
    t.server = *k.FindNode(c.server);
    net.clients.push_back(
        &k.Emplace<dns::TrafficGenerator>(c.name, c.address, "client", std::move(t)));
  }

  sim::RandomStream rng = k.RngStream("configurator");
  net.plan = PlanHosts(cfg, rng, net.warnings);
  if (!net.plan.empty()) {
    net.mdns_group = k.AddGroup("mdns");
    mdns::MdnsTiming timing;
    timing.reannounce_interval = sim::FromSeconds(cfg.mdns.reannounce);
    for (const auto& p : net.plan) {
      auto& r = k.Emplace<mdns::MdnsResolver>(p.name, p.address, "mdns",
                                              *net.mdns_group, timing);
      for (const auto& s : p.services) r.AddService(s);
      for (const auto& t : p.browse) r.Browse(t, sim::FromSeconds(cfg.mdns.browse_at));
      k.JoinGroup(*net.mdns_group, r.id());
      net.resolvers.push_back(&r);
    }
    if (cfg.mdns.privacy) {
      for (std::size_t i = 0; i < net.plan.size(); ++i) {
        privacy::PrivacyConfig pc;
        for (const auto& f : net.plan[i].friends) {
          pc.pairings.push_back(privacy::PairingData{
              *k.FindNode(f), privacy::PairingId(net.plan[i].name, f), true});
        }
        net.resolvers[i]->AttachPrivacy(std::move(pc));
      }
    }
  }

  for (const auto& l : cfg.topology.links) {
    auto a = k.FindNode(l.a);
    auto b = k.FindNode(l.b);
    if (!a || !b) {
      throw ScenarioError("link between unknown nodes " + l.a + " and " + l.b);
    }
    k.AddLink(*a, *b, sim::FromSeconds(l.delay));
  }
  return net;
}

sim::NodeStats Sum(const std::vector<NodeRow>& rows) {
  sim::NodeStats t;
  for (const auto& r : rows) {
    const auto& s = r.stats;
    t.mcast_bytes_rx += s.mcast_bytes_rx;
    t.mcast_packets_rx += s.mcast_packets_rx;
    t.ucast_bytes_rx += s.ucast_bytes_rx;
    t.ucast_packets_rx += s.ucast_packets_rx;
    t.mcast_bytes_tx += s.mcast_bytes_tx;
    t.mcast_packets_tx += s.mcast_packets_tx;
    t.ucast_bytes_tx += s.ucast_bytes_tx;
    t.ucast_packets_tx += s.ucast_packets_tx;
    t.queries_sent += s.queries_sent;
    t.responses_sent += s.responses_sent;
    t.cache_hits += s.cache_hits;
    t.cache_misses += s.cache_misses;
    t.suppressed_queries += s.suppressed_queries;
    t.suppressed_responses += s.suppressed_responses;
    t.dropped_no_route += s.dropped_no_route;
    t.malformed_packets += s.malformed_packets;
    t.stale_responses += s.stale_responses;
    t.privacy_rejected += s.privacy_rejected;
  }
  return t;
}

RunResult RunScenario(const ScenarioConfig& cfg, const BuildOptions& options) {
  RunResult result;
  result.network = BuildNetwork(cfg, options);
  sim::Kernel& k = *result.network.kernel;
  if (cfg.duration > 0) k.RunUntil(sim::FromSeconds(cfg.duration));

  for (std::uint32_t i = 0; i < k.node_count(); ++i) {
    const sim::NodeId id{i};
    result.rows.push_back(NodeRow{i, k.node(id).name(), k.node(id).role(), k.stats(id)});
  }
  result.total = Sum(result.rows);
  result.delivered_bytes = k.delivered_bytes();
  result.events = k.events_processed();
  result.trace = k.trace();
  result.warnings = result.network.warnings;
  for (const auto* r : result.network.resolvers) {
    for (const auto& e : r->errors()) result.errors.push_back(r->name() + ": " + e);
  }
  if (options.capture) {
    result.violations =
        privacy::AuditPrivacy(k, k.capture(), result.network.PrivateNames());
  }
  return result;
}

std::vector<SweepPoint> Sweep(const ScenarioConfig& cfg, const std::string& key,
                              const std::vector<std::string>& values,
                              SeedMode mode, const BuildOptions& options,
                              int jobs) {
  std::vector<ScenarioConfig> configs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig c = cfg;
    c.Set(key, values[i]);
    if (mode == SeedMode::kDerived) c.seed ^= static_cast<std::uint64_t>(i);
    c.Validate();
    configs.push_back(std::move(c));
  }
  std::vector<SweepPoint> points(values.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < configs.size(); start += width) {
    const std::size_t end = std::min(configs.size(), start + width);
    if (width == 1) {
      points[start] = SweepPoint{values[start], configs[start].seed,
                                 RunScenario(configs[start], options)};
      continue;
    }
    std::vector<std::future<RunResult>> running;
    for (std::size_t i = start; i < end; ++i) {
      running.push_back(std::async(std::launch::async, [&, i] {
        return RunScenario(configs[i], options);
      }));
    }
    for (std::size_t i = start; i < end; ++i) {
      points[i] = SweepPoint{values[i], configs[i].seed, running[i - start].get()};
    }
  }
  return points;
}

std::string CsvHeader() {
  return "param_value,node_id,mcast_bytes,ucast_bytes,total_bytes,"
         "mcast_packets,ucast_packets,queries_sent,responses_sent,cache_hits,"
         "cache_misses,suppressed_queries,suppressed_responses,node,role\n";
}

namespace {

void AppendRow(std::ostringstream& os, const std::string& param,
               const std::string& id, const sim::NodeStats& s,
               const std::string& node, const std::string& role) {
  os << param << ',' << id << ',' << s.mcast_bytes_rx << ',' << s.ucast_bytes_rx
     << ',' << s.total_bytes_rx() << ',' << s.mcast_packets_rx << ','
     << s.ucast_packets_rx << ',' << s.queries_sent << ',' << s.responses_sent
     << ',' << s.cache_hits << ',' << s.cache_misses << ','
     << s.suppressed_queries << ',' << s.suppressed_responses << ',' << node
     << ',' << role << '\n';
}

}  // namespace

std::string CsvRows(const std::string& param_value, const RunResult& result) {
  std::ostringstream os;
  for (const auto& r : result.rows) {
    AppendRow(os, param_value, std::to_string(r.node_id), r.stats, r.node, r.role);
  }
  AppendRow(os, param_value, "ALL", result.total, "ALL", "-");
  return os.str();
}

std::string SweepCsv(const std::vector<SweepPoint>& points) {
  std::string out = CsvHeader();
  for (const auto& p : points) out += CsvRows(p.value, p.result);
  return out;
}

}  // namespace simnet::experiment
