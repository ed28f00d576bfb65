// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dns_world.h"
#include "mdns_world.h"
#include "random_message.h"
#include "simnet/dns/cache.h"
#include "simnet/dns/wire.h"
#include "simnet/dns/zone.h"
#include "simnet/experiment/network.h"
#include "simnet/experiment/scenario.h"
#include "simnet/mdns/schedulers.h"
#include "simnet/privacy/privacy.h"
#include "test_nodes.h"
#include "wire_oracle.h"

namespace {

using namespace simnet;
using std::chrono::milliseconds;
using std::chrono::seconds;
using testing_support::Fixture;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void Require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

template <typename A, typename B>
void RequireEq(const A& got, const B& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want;
    throw Failure(os.str());
  }
}

double Elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

dns::DomainName N(std::string_view s) { return dns::DomainName::Parse(s); }

experiment::BuildOptions Options(bool trace, bool capture, bool invariants) {
  experiment::BuildOptions o;
  o.trace = trace;
  o.capture = capture;
  o.check_invariants = invariants;
  return o;
}

// --- 1 ----------------------------------------------------------------------

void ZoneFidelity() {
  const auto start = std::chrono::steady_clock::now();
  const auto zone = dns::LoadZoneFile(Fixture("zones/uni-konstanz.de.zone"));
  struct Row {
    const char* owner;
    dns::RRType type;
    const char* data;  // address or target name; "" for SOA
  };
  using dns::RRType;
  const std::vector<Row> golden = {
      {"uni-konstanz.de", RRType::kSOA, ""},
      {"uni-konstanz.de", RRType::kNS, "pan.rz.uni-konstanz.de"},
      {"uni-konstanz.de", RRType::kNS, "uranos.rz.uni-konstanz.de"},
      {"uni-konstanz.de", RRType::kMX, "imap.uni-konstanz.de"},
      {"uni-konstanz.de", RRType::kA, "134.34.240.80"},
      {"pan.rz.uni-konstanz.de", RRType::kA, "134.34.3.3"},
      {"uranos.rz.uni-konstanz.de", RRType::kA, "134.34.3.2"},
      {"imap.uni-konstanz.de", RRType::kA, "134.34.240.42"},
      {"www.uni-konstanz.de", RRType::kCNAME, "proxy-neu.rz.uni-konstanz.de"},
      {"proxy-neu.rz.uni-konstanz.de", RRType::kA, "134.34.240.7"},
  };
  const auto& records = zone.records();
  RequireEq(records.size(), golden.size(), "record count");
  for (std::size_t i = 0; i < golden.size(); ++i) {
    const auto& rr = records[i];
    const auto& want = golden[i];
    const std::string at = "record " + std::to_string(i + 1);
    RequireEq(rr.owner, N(want.owner), at + " owner");
    RequireEq(rr.type, want.type, at + " type");
    RequireEq(rr.ttl, 86400u, at + " ttl");
    std::string data;
    if (auto* a = std::get_if<dns::Ipv4Address>(&rr.rdata)) data = a->ToString();
    if (auto* n = std::get_if<dns::DomainName>(&rr.rdata)) data = n->ToString();
    if (auto* mx = std::get_if<dns::MxData>(&rr.rdata)) data = mx->exchange.ToString();
    if (!data.empty() && data.back() == '.') data.pop_back();
    RequireEq(data, std::string(want.data), at + " data");
  }
  Require(Elapsed(start) < 1.0, "took longer than 1 s");
}

// --- 2 ----------------------------------------------------------------------

void WireRoundTrip() {
  const auto start = std::chrono::steady_clock::now();
  sim::RandomStream rng("acceptance-wire", 2024);
  for (int i = 0; i < 10000; ++i) {
    const auto m = testing_support::RandomMessage(rng);
    const auto plain = dns::SerializeMessage(m, false);
    const auto packed = dns::SerializeMessage(m, true);
    Require(dns::ParseMessage(plain) == m, "uncompressed round trip, message " + std::to_string(i));
    Require(dns::ParseMessage(packed) == m, "compressed round trip, message " + std::to_string(i));
    Require(packed.size() <= plain.size(), "compressed larger, message " + std::to_string(i));
    auto a = oracle::WalkMessage(plain).names;
    auto b = oracle::WalkMessage(packed).names;
    Require(std::set<std::string>(a.begin(), a.end()) == std::set<std::string>(b.begin(), b.end()),
            "decompressed name sets differ, message " + std::to_string(i));
  }
  Require(Elapsed(start) < 30.0, "took longer than 30 s");
}

// --- 3 ----------------------------------------------------------------------

void CompressionArithmetic() {
  dns::DnsMessage m;
  m.flags.response = true;
  const auto owner = N("uni-konstanz.de");
  m.answers.push_back(dns::MakeA(owner, 86400, "134.34.240.80"));
  m.answers.push_back(dns::MakeA(owner, 86400, "134.34.240.81"));
  const auto plain = dns::SerializeMessage(m, false).size();
  const auto packed = dns::SerializeMessage(m, true).size();
  RequireEq(plain - packed, 15u, "bytes saved");
  RequireEq(plain, 12u + 2 * (17 + 10 + 4), "uncompressed size");
}

// --- 4 ----------------------------------------------------------------------

std::size_t AuthDeliveries(const std::vector<std::string>& trace, std::size_t from) {
  std::size_t n = 0;
  for (std::size_t i = from; i < trace.size(); ++i) {
    for (const char* server : {"\troot\tdeliver\t", "\tdenic\tdeliver\t", "\trz\tdeliver\t"}) {
      if (trace[i].find(server) != std::string::npos) ++n;
    }
  }
  return n;
}

void ResolutionTrace() {
  const auto start = std::chrono::steady_clock::now();
  testing_support::DnsWorld w(1, /*trace=*/true);
  std::vector<dns::ResolveOutcome> outcomes;
  auto lookup = [&] {
    w.client->Resolve(N("somehost.uni-konstanz.de"), dns::RRType::kA, w.resolver->id(),
                      [&](const dns::ResolveOutcome& o) { outcomes.push_back(o); });
  };
  w.At(seconds(1), lookup);
  w.kernel->RunUntil(seconds(5));
  RequireEq(outcomes.size(), 1u, "cold lookup callbacks");
  RequireEq(outcomes[0].answers.size(), 1u, "cold lookup answers");
  RequireEq(w.resolver->upstream_queries(), 3u, "cold upstream queries");
  RequireEq(AuthDeliveries(w.kernel->trace(), 0), 3u, "cold queries seen by servers");
  const auto mark = w.kernel->trace().size();
  w.At(seconds(60), lookup);
  w.kernel->RunUntil(seconds(65));
  RequireEq(outcomes.size(), 2u, "warm lookup callbacks");
  RequireEq(outcomes[1].answers.size(), 1u, "warm lookup answers");
  RequireEq(w.resolver->upstream_queries(), 3u, "warm upstream queries");
  RequireEq(AuthDeliveries(w.kernel->trace(), mark), 0u, "warm queries seen by servers");
  Require(Elapsed(start) < 1.0, "took longer than 1 s");
}

// --- 5 ----------------------------------------------------------------------

dns::ResourceRecord ARecord(const std::string& name, std::uint32_t ttl) {
  return dns::MakeA(N(name), ttl, "10.0.0.1");
}

void CachePolicies() {
  // TTL policy against a brute-force scan.
  sim::RandomStream rng("acceptance-cache", 5);
  dns::TtlCache ttl(16);
  std::int64_t now = 0;
  for (int op = 0; op < 10000; ++op) {
    now += static_cast<std::int64_t>(rng.UniformInt(0, 2));
    const std::string name = "h" + std::to_string(rng.UniformInt(0, 60));
    const dns::CacheKey key{N(name), dns::RRType::kA};
    std::optional<dns::CacheKey> expected;
    if (!ttl.Contains(key) && ttl.size() >= ttl.capacity()) {
      const dns::CacheEntry* best = nullptr;
      for (const auto& [k, e] : ttl.entries()) {
        if (!best || e.expiry() < best->expiry() ||
            (e.expiry() == best->expiry() && e.insertion < best->insertion)) {
          best = &e;
          expected = k;
        }
      }
    }
    const auto evicted = ttl.Put(key, {ARecord(name, rng.UniformInt(1, 40))}, seconds(now));
    if (expected) {
      Require(evicted.size() == 1 && evicted[0] == *expected,
              "TTL policy evicted a non-minimal entry at op " + std::to_string(op));
    } else {
      Require(evicted.empty(), "unexpected eviction at op " + std::to_string(op));
    }
  }
  // Simple policy: same seed, same victims.
  auto victims = [](std::uint64_t seed) {
    dns::SimpleCache cache(4, sim::RandomStream("acceptance-simple", seed));
    std::vector<dns::CacheKey> out;
    for (int i = 0; i < 200; ++i) {
      const std::string name = "n" + std::to_string(i);
      for (auto& k : cache.Put({N(name), dns::RRType::kA}, {ARecord(name, 60)}, seconds(0))) {
        out.push_back(k);
      }
    }
    return out;
  };
  Require(victims(9) == victims(9), "Simple policy not seed-deterministic");
  Require(victims(9) != victims(10), "Simple policy ignores its seed");
  // Expiry boundary.
  dns::TtlCache cache(2);
  const dns::CacheKey key{N("a"), dns::RRType::kA};
  cache.Put(key, {ARecord("a", 30)}, seconds(10));
  Require(cache.Get(key, seconds(40) - std::chrono::nanoseconds(1)).has_value(),
          "entry gone before inserted+ttl");
  Require(!cache.Get(key, seconds(40)).has_value(), "entry alive at inserted+ttl");
}

// --- 6 ----------------------------------------------------------------------

std::vector<experiment::ScenarioConfig> MdnsScenarios() {
  std::vector<experiment::ScenarioConfig> out;
  out.push_back(experiment::LoadScenario(Fixture("scenarios/office.ini")));
  for (const char* ratio : {"0", "0.25", "0.5", "0.75", "1"}) {
    auto cfg = experiment::LoadScenario(Fixture("scenarios/private_link.ini"));
    cfg.Set("private_service_ratio", ratio);
    out.push_back(cfg);
  }
  for (std::uint64_t seed = 2; seed <= 6; ++seed) {
    auto cfg = experiment::LoadScenario(Fixture("scenarios/private_link.ini"));
    cfg.seed = seed;
    cfg.duration = 120;
    cfg.mdns.num_resolvers = static_cast<int>(4 * seed);
    cfg.mdns.num_private_resolvers = static_cast<int>(2 * seed);
    cfg.mdns.private_service_ratio = 0.5;
    out.push_back(cfg);
  }
  return out;
}

void ProbeAggregation() {
  for (const auto& cfg : MdnsScenarios()) {
    const auto r = experiment::RunScenario(cfg, Options(false, false, true));
    for (const auto* h : r.network.resolvers) {
      Require(h->probe_scheduler().max_latency() <= milliseconds(250),
              cfg.name + " seed " + std::to_string(cfg.seed) + ": " + h->name() +
                  " probe latency " + sim::FormatTime(h->probe_scheduler().max_latency()));
    }
  }
  // Two probes 100 ms apart share a packet.
  sim::Kernel k(1);
  k.set_check_invariants(true);
  k.SetDefaultDelay(milliseconds(1));
  const auto group = k.AddGroup("mdns");
  auto& node = k.Emplace<testing_support::SchedulerNode>(
      "n", *dns::Ipv4Address::Parse("10.0.0.1"), "t", group);
  k.RunUntil(sim::SimTime::zero());
  mdns::ProbeScheduler probes(node, milliseconds(250), [](const auto&) {});
  node.At(seconds(1), [&] { probes.Post(N("a.local"), {}, milliseconds(250)); });
  node.At(seconds(1) + milliseconds(100),
          [&] { probes.Post(N("b.local"), {}, milliseconds(250)); });
  k.RunUntil(seconds(3));
  RequireEq(node.sent.size(), 1u, "probe packets");
  RequireEq(node.sent[0].second.questions.size(), 2u, "probes in the packet");
  Require(probes.max_latency() <= milliseconds(250), "aggregated probe latency");
}

// --- 7 ----------------------------------------------------------------------

void SuppressionEconomy() {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing_support::MdnsWorld w(seed);
    for (int i = 1; i <= 5; ++i) w.Host("h" + std::to_string(i), i).Browse("_ipp._tcp", seconds(5));
    w.kernel->RunUntil(seconds(10));
    const auto queries = w.CountMulticast([](const sim::SimPacket& p) {
      return p.message->IsQuery() && p.message->authorities.empty();
    });
    Require(queries < 5, "seed " + std::to_string(seed) + ": " + std::to_string(queries) +
                             " query packets from 5 hosts");
  }
  // Duplicate answers: two holders of one shared record on a LAN segment.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing_support::MdnsWorld w(seed, std::chrono::microseconds(100));
    const dns::ResourceRecord shared{N("_services._dns-sd._udp.local"), dns::RRType::kPTR,
                                     dns::RRClass::kIN, 4500, N("_ipp._tcp.local"), false};
    for (int i = 1; i <= 2; ++i) w.Host("h" + std::to_string(i), i).AddSharedRecord(shared);
    auto& asker = w.kernel->Emplace<testing_support::RecorderNode>(
        "asker", *dns::Ipv4Address::Parse("10.0.0.99"), "t");
    w.kernel->JoinGroup(w.group, asker.id());
    w.kernel->RunUntil(seconds(1));
    asker.At(seconds(2), [&] {
      dns::DnsMessage q;
      q.questions.push_back({shared.owner, dns::RRType::kPTR});
      asker.Multicast(w.group, q);
    });
    w.kernel->RunUntil(seconds(5));
    const auto responses = w.CountMulticast([&](const sim::SimPacket& p) {
      return p.message->IsResponse() &&
             std::any_of(p.message->answers.begin(), p.message->answers.end(),
                         [&](const auto& rr) { return dns::SameRecordData(rr, shared); });
    });
    RequireEq(responses, 1u, "seed " + std::to_string(seed) + " shared-record responses");
  }
}

// --- 8 ----------------------------------------------------------------------

void PrivacyReplication() {
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = experiment::LoadScenario(Fixture("scenarios/private_link.ini"));
  const std::vector<std::string> ratios = {"0", "0.25", "0.5", "0.75", "1"};
  const auto points = experiment::Sweep(cfg, "private_service_ratio", ratios,
                                        experiment::SeedMode::kCommon);
  std::vector<std::uint64_t> totals;
  for (const auto& p : points) totals.push_back(p.result.total.total_bytes_rx());
  std::string curve;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    curve += (i ? " " : "") + ratios[i] + ":" + std::to_string(totals[i]);
  }
  for (std::size_t i = 1; i < totals.size(); ++i) {
    Require(totals[i] <= totals[i - 1], "not monotone: " + curve);
  }
  Require(2 * totals.back() < totals.front(), "reduction under 50%: " + curve);
  Require(Elapsed(start) < 60.0, "took longer than 1 min");
  std::printf("      bytes by ratio %s\n", curve.c_str());
}

// --- 9 ----------------------------------------------------------------------

void ZeroLeakAudit() {
  for (const auto& cfg : MdnsScenarios()) {
    const auto r = experiment::RunScenario(cfg, Options(false, true, false));
    if (!r.violations.empty()) {
      throw Failure(cfg.name + " seed " + std::to_string(cfg.seed) + ": " +
                    privacy::ToString(r.violations.front()));
    }
  }
  // Fault injection: alice multicasts the SRV of her private printer once.
  auto cfg = experiment::LoadScenario(Fixture("scenarios/office.ini"));
  auto net = experiment::BuildNetwork(cfg, Options(false, true, false));
  auto* alice = net.resolvers.at(0);
  std::optional<std::size_t> index;
  for (std::size_t i = 0; i < alice->services().size(); ++i) {
    if (alice->services()[i].service.is_private) index = i;
  }
  Require(index.has_value(), "office alice has no private service");
  net.kernel->Schedule(alice->id(), seconds(30), "fault", [&] { alice->LeakServiceRecord(*index); });
  net.kernel->RunUntil(sim::FromSeconds(cfg.duration));
  const auto v = privacy::AuditPrivacy(*net.kernel, net.kernel->capture(), net.PrivateNames());
  RequireEq(v.size(), 1u, "violations after fault injection");
}

// --- 10 ---------------------------------------------------------------------

void Determinism() {
  std::vector<experiment::ScenarioConfig> all;
  for (const char* file : {"scenarios/private_link.ini", "scenarios/office.ini",
                           "scenarios/dns_hierarchy.ini"}) {
    all.push_back(experiment::LoadScenario(Fixture(file)));
  }
  for (const auto& cfg : all) {
    const auto opts = Options(true, false, true);
    const auto a = experiment::RunScenario(cfg, opts);
    const auto b = experiment::RunScenario(cfg, opts);
    Require(!a.trace.empty(), cfg.name + ": empty trace");
    Require(a.trace == b.trace, cfg.name + ": traces differ");
    Require(experiment::CsvRows("base", a) == experiment::CsvRows("base", b),
            cfg.name + ": CSV differs");
  }
}

// --- 11 ---------------------------------------------------------------------

void BackwardCompatibility() {
  auto on = experiment::LoadScenario(Fixture("scenarios/private_link.ini"));
  on.mdns.private_service_ratio = 0.0;
  on.mdns.privacy = true;
  auto off = on;
  off.mdns.privacy = false;
  const auto a = experiment::RunScenario(on);
  const auto b = experiment::RunScenario(off);
  RequireEq(a.rows.size(), b.rows.size(), "row count");
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    RequireEq(a.rows[i].node, b.rows[i].node, "node order");
    RequireEq(a.rows[i].stats.mcast_bytes_rx, b.rows[i].stats.mcast_bytes_rx,
              a.rows[i].node + " multicast bytes");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> criteria = {
      {"zone fidelity", ZoneFidelity},
      {"wire round-trip", WireRoundTrip},
      {"compression arithmetic", CompressionArithmetic},
      {"resolution trace", ResolutionTrace},
      {"cache policies", CachePolicies},
      {"probe aggregation", ProbeAggregation},
      {"suppression economy", SuppressionEconomy},
      {"privacy replication", PrivacyReplication},
      {"zero-leak audit", ZeroLeakAudit},
      {"determinism", Determinism},
      {"backward compatibility", BackwardCompatibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criteria[i].second();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = Elapsed(start);
    if (error.empty()) {
      std::printf("PASS %2zu %s (%.2f s)\n", i + 1, criteria[i].first, secs);
    } else {
      ++failed;
      std::printf("FAIL %2zu %s (%.2f s): %s\n", i + 1, criteria[i].first, secs, error.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
