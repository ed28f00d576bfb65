#include <gtest/gtest.h>

#include <set>

#include "mdns_world.h"
#include "simnet/mdns/record_cache.h"
#include "simnet/mdns/schedulers.h"
#include "simnet/mdns/service.h"
#include "test_nodes.h"

namespace simnet::mdns {
namespace {

using dns::DnsMessage;
using dns::DnsQuestion;
using dns::RRType;
using std::chrono::milliseconds;
using std::chrono::seconds;
using testing_support::MdnsWorld;
using testing_support::RecorderNode;
using testing_support::SchedulerNode;
using testing_support::Service;

DomainName N(std::string_view s) { return DomainName::Parse(s); }

bool IsQueryFor(const sim::SimPacket& p, const DomainName& name) {
  const auto& m = *p.message;
  if (!m.IsQuery() || !m.authorities.empty()) return false;
  for (const auto& q : m.questions) {
    if (q.qname == name) return true;
  }
  return false;
}

TEST(ServiceRecords, DerivedFromInstance) {
  const auto r = DeriveRecords(Service("Web", "_http._tcp", 80), HostName("alice"));
  EXPECT_EQ(r.ptr.owner, N("_http._tcp.local"));
  EXPECT_EQ(std::get<DomainName>(r.ptr.rdata), N("Web._http._tcp.local"));
  EXPECT_FALSE(r.ptr.cache_flush);
  EXPECT_EQ(r.ptr.ttl, 4500u);
  const auto& srv = std::get<dns::SrvData>(r.srv.rdata);
  EXPECT_EQ(srv.port, 80);
  EXPECT_EQ(srv.target, N("alice.local"));
  EXPECT_TRUE(r.srv.cache_flush);
  EXPECT_EQ(r.srv.ttl, 120u);
  EXPECT_EQ(r.Unique().size(), 2u);
}

TEST(ServiceRecords, RenamedLabels) {
  EXPECT_EQ(RenamedLabel("Web", 0), "Web");
  EXPECT_EQ(RenamedLabel("Web", 1), "Web #2");
  EXPECT_EQ(RenamedLabel("Web", 4), "Web #5");
}

TEST(RecordCache, KnownAnswerHalfTtlThreshold) {
  MdnsRecordCache cache;
  const auto r = DeriveRecords(Service("Web", "_http._tcp", 80), HostName("h"));
  auto ptr = r.ptr;
  ptr.ttl = 100;
  cache.Add(ptr, seconds(0));
  const DnsQuestion q{N("_http._tcp.local"), RRType::kPTR};
  EXPECT_EQ(cache.KnownAnswers(q, seconds(40)).size(), 1u);
  EXPECT_EQ(cache.KnownAnswers(q, seconds(50)).size(), 1u);
  EXPECT_TRUE(cache.KnownAnswers(q, seconds(50) + milliseconds(1)).empty());
  EXPECT_EQ(cache.Get(q.qname, RRType::kPTR, seconds(60)).size(), 1u);
  EXPECT_EQ(cache.Get(q.qname, RRType::kPTR, seconds(60))[0].ttl, 40u);
  EXPECT_TRUE(cache.Get(q.qname, RRType::kPTR, seconds(100)).empty());
}

TEST(RecordCache, ConfidentialEntriesAreNotOffered) {
  MdnsRecordCache cache;
  const auto r = DeriveRecords(Service("Web", "_http._tcp", 80), HostName("h"));
  cache.Add(r.ptr, seconds(0), /*confidential=*/true);
  const DnsQuestion q{N("_http._tcp.local"), RRType::kPTR};
  EXPECT_TRUE(cache.KnownAnswers(q, seconds(1)).empty());
  EXPECT_EQ(cache.Get(q.qname, RRType::kPTR, seconds(1)).size(), 1u);
}

TEST(RecordCache, FlushGoodbyeAndExpiry) {
  MdnsRecordCache cache;
  const auto a1 = HostAddressRecord(HostName("h"), *dns::Ipv4Address::Parse("10.0.0.1"));
  auto a2 = HostAddressRecord(HostName("h"), *dns::Ipv4Address::Parse("10.0.0.2"));
  cache.Add(a1, seconds(0));
  cache.Add(a2, seconds(0));
  EXPECT_EQ(cache.size(), 1u);  // cache-flush replaced a1
  auto shared = a1;
  shared.cache_flush = false;
  cache.Add(shared, seconds(0));
  EXPECT_EQ(cache.size(), 2u);
  a2.ttl = 0;
  cache.Add(a2, seconds(1));
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_TRUE(cache.HasName(HostName("h"), seconds(1)));
  cache.Expire(seconds(200));
  EXPECT_EQ(cache.size(), 0u);
}

TEST(Suppression, CoveredByNeedsHalfTtl) {
  const auto r = DeriveRecords(Service("Web", "_http._tcp", 80), HostName("h"));
  auto known = r.ptr;
  known.ttl = 2250;
  EXPECT_TRUE(CoveredBy(r.ptr, {known}));
  known.ttl = 2249;
  EXPECT_FALSE(CoveredBy(r.ptr, {known}));
  EXPECT_FALSE(CoveredBy(r.ptr, {r.srv}));
}

struct SchedWorld {
  sim::Kernel kernel{1};
  sim::GroupId group;
  SchedulerNode* node;
  SchedWorld() {
    kernel.set_check_invariants(true);
    kernel.SetDefaultDelay(milliseconds(1));
    group = kernel.AddGroup("mdns");
    node = &kernel.Emplace<SchedulerNode>("n", *dns::Ipv4Address::Parse("10.0.0.1"), "t",
                                          group);
    kernel.RunUntil(sim::SimTime::zero());
  }
  void At(sim::SimTime t, std::function<void()> fn) { node->At(t, std::move(fn)); }
};

TEST(ProbeScheduler, AggregatesProbesIntoOnePacket) {
  SchedWorld w;
  std::vector<std::vector<DomainName>> sent;
  ProbeScheduler probes(*w.node, milliseconds(250),
                        [&](const auto& names) { sent.push_back(names); });
  const auto rec = DeriveRecords(Service("A", "_http._tcp", 80), HostName("n"));
  w.At(seconds(0), [&] { probes.Post(N("a.local"), rec.Unique(), milliseconds(250)); });
  w.At(milliseconds(100), [&] { probes.Post(N("b.local"), rec.Unique(), seconds(5)); });
  w.kernel.RunUntil(seconds(1));
  ASSERT_EQ(w.node->sent.size(), 1u);
  EXPECT_EQ(w.node->sent[0].first, milliseconds(250));
  EXPECT_EQ(w.node->sent[0].second.questions.size(), 2u);
  EXPECT_EQ(w.node->sent[0].second.authorities.size(), 4u);
  ASSERT_EQ(sent.size(), 1u);
  EXPECT_LE(probes.max_latency(), milliseconds(250));
  EXPECT_EQ(probes.packets_sent(), 1u);
}

TEST(ProbeScheduler, ImmediateProbeGoesAloneAndRemoveCancels) {
  SchedWorld w;
  ProbeScheduler probes(*w.node, milliseconds(250), [](const auto&) {});
  w.At(seconds(1), [&] {
    probes.Post(N("a.local"), {}, milliseconds(200));
    probes.Post(N("b.local"), {}, milliseconds(0), /*immediate=*/true);
    EXPECT_TRUE(probes.Remove(N("a.local")));
    EXPECT_FALSE(probes.Remove(N("a.local")));
  });
  w.kernel.RunUntil(seconds(3));
  ASSERT_EQ(w.node->sent.size(), 1u);
  EXPECT_EQ(w.node->sent[0].first, seconds(1));
  EXPECT_EQ(w.node->sent[0].second.questions[0].qname, N("b.local"));
  EXPECT_EQ(w.kernel.PendingEvents(w.node->id()), 0u);
}

// Property: whatever the post times and requested deferrals, no probe waits
// longer than the maximum deferral.
TEST(ProbeScheduler, LatencyBoundHolds) {
  SchedWorld w;
  std::size_t probed = 0;
  ProbeScheduler probes(*w.node, milliseconds(250),
                        [&](const auto& names) { probed += names.size(); });
  sim::RandomStream rng("probe-property", 3);
  for (int i = 0; i < 500; ++i) {
    const auto at = rng.UniformTime(seconds(0), seconds(20));
    const auto defer = rng.UniformTime(seconds(0), seconds(1));
    w.At(at, [&, i, defer] {
      probes.Post(N("p" + std::to_string(i) + ".local"), {}, defer);
    });
  }
  w.kernel.RunUntil(seconds(30));
  EXPECT_EQ(probed, 500u);
  EXPECT_LE(probes.max_latency(), milliseconds(250));
  EXPECT_LT(probes.packets_sent(), 500u);
}

TEST(QueryScheduler, ObservedQuestionSuppressesOurs) {
  SchedWorld w;
  std::vector<dns::ResourceRecord> ours;
  QueryScheduler queries(
      *w.node, [&](const DnsQuestion&) { return ours; }, seconds(1), milliseconds(20),
      milliseconds(120));
  const DnsQuestion q{N("_http._tcp.local"), RRType::kPTR};
  const auto ptr = DeriveRecords(Service("Web", "_http._tcp", 80), HostName("h")).ptr;
  w.At(seconds(1), [&] {
    DnsMessage theirs;
    theirs.questions.push_back(q);
    queries.Observe(theirs);
    EXPECT_FALSE(queries.Post(q));
  });
  // Their query listed an answer we lack: ours still goes out.
  w.At(seconds(5), [&] {
    DnsMessage theirs;
    theirs.questions.push_back(q);
    theirs.answers.push_back(ptr);
    queries.Observe(theirs);
    EXPECT_TRUE(queries.Post(q));
  });
  // Outside the window.
  w.At(seconds(10), [&] {
    DnsMessage theirs;
    theirs.questions.push_back(q);
    queries.Observe(theirs);
  });
  w.At(seconds(12), [&] { EXPECT_TRUE(queries.Post(q)); });
  w.kernel.RunUntil(seconds(15));
  EXPECT_EQ(queries.suppressed(), 1u);
  EXPECT_EQ(queries.packets_sent(), 2u);
  EXPECT_EQ(w.kernel.stats(w.node->id()).suppressed_queries, 1u);
}

TEST(QueryScheduler, CarriesKnownAnswersAndMergesQuestions) {
  SchedWorld w;
  const auto ptr = DeriveRecords(Service("Web", "_http._tcp", 80), HostName("h")).ptr;
  QueryScheduler queries(
      *w.node,
      [&](const DnsQuestion& q) {
        return q.qtype == RRType::kPTR ? std::vector<dns::ResourceRecord>{ptr}
                                       : std::vector<dns::ResourceRecord>{};
      },
      seconds(1), milliseconds(20), milliseconds(120));
  w.At(seconds(1), [&] {
    queries.Post({N("_http._tcp.local"), RRType::kPTR});
    queries.Post({N("_http._tcp.local"), RRType::kPTR});
    queries.Post({N("h.local"), RRType::kA});
  });
  w.kernel.RunUntil(seconds(3));
  ASSERT_EQ(w.node->sent.size(), 1u);
  const auto& m = w.node->sent[0].second;
  EXPECT_EQ(m.questions.size(), 2u);
  ASSERT_EQ(m.answers.size(), 1u);
  EXPECT_EQ(m.answers[0], ptr);
  EXPECT_GE(w.node->sent[0].first, seconds(1) + milliseconds(20));
  EXPECT_LE(w.node->sent[0].first, seconds(1) + milliseconds(120));
}

TEST(ResponseScheduler, ObservedAnswerDropsPendingSharedRecord) {
  SchedWorld w;
  ResponseScheduler responses(*w.node, milliseconds(20), milliseconds(120));
  const auto recs = DeriveRecords(Service("Web", "_http._tcp", 80), HostName("h"));
  w.At(seconds(1), [&] {
    responses.Post({recs.ptr}, {recs.srv}, std::nullopt, false, /*suppressible=*/true);
    responses.Observe({recs.ptr});
  });
  w.At(seconds(2), [&] {
    responses.Post({recs.srv}, {}, std::nullopt, false, /*suppressible=*/false);
    responses.Observe({recs.srv});
  });
  w.kernel.RunUntil(seconds(3));
  ASSERT_EQ(w.node->sent.size(), 1u);
  EXPECT_EQ(w.node->sent[0].second.answers.at(0), recs.srv);
  EXPECT_EQ(responses.suppressed(), 1u);
  EXPECT_EQ(w.kernel.stats(w.node->id()).suppressed_responses, 1u);
}

TEST(ResponseScheduler, ImmediatePostsShareAPacket) {
  SchedWorld w;
  ResponseScheduler responses(*w.node, milliseconds(20), milliseconds(120));
  const auto a = DeriveRecords(Service("A", "_http._tcp", 80), HostName("h"));
  const auto b = DeriveRecords(Service("B", "_ipp._tcp", 631), HostName("h"));
  w.At(seconds(1), [&] {
    responses.Post(a.All(), {}, std::nullopt, true, false);
    responses.Post(b.All(), {a.srv}, std::nullopt, true, false);
  });
  w.kernel.RunUntil(seconds(2));
  ASSERT_EQ(w.node->sent.size(), 1u);
  EXPECT_EQ(w.node->sent[0].first, seconds(1));
  EXPECT_EQ(w.node->sent[0].second.answers.size(), 6u);
  EXPECT_TRUE(w.node->sent[0].second.additionals.empty());
}

TEST(Announcer, LoneHostEstablishesWithinTwoSeconds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    MdnsWorld w(seed);
    auto& h = w.Host("alice", 1, {Service("Web", "_http._tcp", 80)});
    w.kernel->RunUntil(seconds(5));
    const auto& s = h.services().at(0);
    EXPECT_EQ(s.phase, ServicePhase::kEstablished);
    ASSERT_TRUE(s.established_at);
    EXPECT_GE(*s.established_at, milliseconds(1750));
    EXPECT_LE(*s.established_at, seconds(2));
    EXPECT_EQ(s.probes_sent, 3);
    EXPECT_EQ(s.announcements_sent, 2);
    EXPECT_EQ(h.probe_scheduler().packets_sent(), 3u);
  }
}

TEST(Announcer, IdenticalNamesRenameExactlyOnce) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    MdnsWorld w(seed);
    auto& a = w.Host("alice", 1, {Service("Web", "_http._tcp", 80)});
    auto& b = w.Host("bob", 2, {Service("Web", "_http._tcp", 80)});
    w.kernel->RunUntil(seconds(10));
    const auto& sa = a.services().at(0);
    const auto& sb = b.services().at(0);
    EXPECT_EQ(sa.conflicts + sb.conflicts, 1) << "seed " << seed;
    EXPECT_EQ(sa.phase, ServicePhase::kEstablished);
    EXPECT_EQ(sb.phase, ServicePhase::kEstablished);
    std::set<std::string> names{sa.service.instance, sb.service.instance};
    EXPECT_EQ(names, (std::set<std::string>{"Web", "Web #2"})) << "seed " << seed;
  }
}

TEST(Announcer, LateJoinerYieldsToEstablishedService) {
  MdnsWorld w(4);
  auto& a = w.Host("alice", 1, {Service("Web", "_http._tcp", 80)});
  w.kernel->RunUntil(seconds(5));
  auto& b = w.Host("bob", 2, {Service("Web", "_http._tcp", 80)});
  w.kernel->RunUntil(seconds(15));
  EXPECT_EQ(a.services()[0].conflicts, 0);
  EXPECT_EQ(b.services()[0].conflicts, 1);
  EXPECT_EQ(b.services()[0].service.instance, "Web #2");
}

TEST(Announcer, RenameLimitWithdraws) {
  MdnsTiming timing;
  timing.max_renames = 0;
  MdnsWorld w(4);
  w.Host("alice", 1, {Service("Web", "_http._tcp", 80)});
  w.kernel->RunUntil(seconds(5));
  auto& b = w.Host("bob", 2, {Service("Web", "_http._tcp", 80)}, timing);
  w.kernel->RunUntil(seconds(15));
  EXPECT_EQ(b.services()[0].phase, ServicePhase::kWithdrawn);
  EXPECT_EQ(b.errors().size(), 1u);
}

TEST(Announcer, ZeroServicesSchedulesNothing) {
  MdnsWorld w;
  auto& h = w.Host("idle", 1);
  w.kernel->RunUntil(seconds(100));
  EXPECT_EQ(w.kernel->PendingEvents(h.id()), 0u);
  EXPECT_TRUE(w.kernel->capture().empty());
  EXPECT_EQ(w.kernel->events_processed(), 1u);  // the start event
}

TEST(Announcer, ReannouncesPeriodically) {
  MdnsTiming timing;
  timing.reannounce_interval = seconds(60);
  MdnsWorld w;
  auto& h = w.Host("alice", 1, {Service("Web", "_http._tcp", 80)}, timing);
  w.kernel->RunUntil(seconds(200));
  EXPECT_EQ(h.services()[0].announcements_sent, 2 + 3);
  timing.reannounce_interval = sim::SimTime::zero();
  MdnsWorld quiet;
  auto& q = quiet.Host("alice", 1, {Service("Web", "_http._tcp", 80)}, timing);
  quiet.kernel->RunUntil(seconds(200));
  EXPECT_EQ(q.services()[0].announcements_sent, 2);
  EXPECT_EQ(quiet.kernel->PendingEvents(q.id()), 0u);
}

TEST(Responder, PtrAnswerBundlesSrvTxtAndAddress) {
  MdnsTiming timing;
  timing.reannounce_interval = sim::SimTime::zero();
  MdnsWorld w;
  w.Host("alice", 1, {Service("Web", "_http._tcp", 80)}, timing);
  auto& probe = w.kernel->Emplace<RecorderNode>("probe", *dns::Ipv4Address::Parse("10.0.0.99"),
                                                "t");
  w.kernel->JoinGroup(w.group, probe.id());
  w.kernel->RunUntil(seconds(5));
  probe.received.clear();
  probe.At(seconds(10), [&] {
    DnsMessage q;
    q.questions.push_back({N("_http._tcp.local"), RRType::kPTR});
    probe.Multicast(w.group, q);
  });
  w.kernel->RunUntil(seconds(11));
  ASSERT_EQ(probe.received.size(), 1u);
  const auto& r = probe.received[0].message;
  EXPECT_GE(probe.received[0].at, seconds(10) + milliseconds(20));
  EXPECT_LE(probe.received[0].at, seconds(10) + milliseconds(122));
  ASSERT_EQ(r.answers.size(), 1u);
  EXPECT_EQ(r.answers[0].type, RRType::kPTR);
  std::multiset<RRType> extra;
  for (const auto& rr : r.additionals) extra.insert(rr.type);
  EXPECT_EQ(extra, (std::multiset<RRType>{RRType::kSRV, RRType::kTXT, RRType::kA}));
}

TEST(Responder, KnownAnswerSilencesResponse) {
  MdnsTiming timing;
  timing.reannounce_interval = sim::SimTime::zero();
  MdnsWorld w;
  auto& h = w.Host("alice", 1, {Service("Web", "_http._tcp", 80)}, timing);
  auto& probe = w.kernel->Emplace<RecorderNode>("probe", *dns::Ipv4Address::Parse("10.0.0.99"),
                                                "t");
  w.kernel->JoinGroup(w.group, probe.id());
  w.kernel->RunUntil(seconds(5));
  probe.received.clear();
  const auto ptr = DeriveRecords(h.services()[0].service, h.host_name()).ptr;
  auto ask = [&](std::uint32_t known_ttl) {
    DnsMessage q;
    q.questions.push_back({N("_http._tcp.local"), RRType::kPTR});
    auto known = ptr;
    known.ttl = known_ttl;
    q.answers.push_back(known);
    probe.Multicast(w.group, q);
  };
  probe.At(seconds(10), [&] { ask(kPtrTtl); });
  w.kernel->RunUntil(seconds(11));
  EXPECT_TRUE(probe.received.empty());
  probe.At(seconds(12), [&] { ask(kPtrTtl / 2 - 1); });
  w.kernel->RunUntil(seconds(13));
  EXPECT_EQ(probe.received.size(), 1u);
}

TEST(Responder, SharedRecordAnsweredOnce) {
  // Two hosts hold the same shared PTR; the later one sees the first answer
  // and drops its own. Both answer only when the two packets cross in flight.
  int single = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    MdnsWorld w(seed);
    const dns::ResourceRecord shared{N("_services._dns-sd._udp.local"), RRType::kPTR,
                                     dns::RRClass::kIN, 4500, N("_http._tcp.local"), false};
    for (int i = 1; i <= 2; ++i) {
      w.Host("h" + std::to_string(i), i).AddSharedRecord(shared);
    }
    auto& probe = w.kernel->Emplace<RecorderNode>(
        "probe", *dns::Ipv4Address::Parse("10.0.0.99"), "t");
    w.kernel->JoinGroup(w.group, probe.id());
    w.kernel->RunUntil(seconds(1));
    probe.At(seconds(2), [&] {
      DnsMessage q;
      q.questions.push_back({shared.owner, RRType::kPTR});
      probe.Multicast(w.group, q);
    });
    w.kernel->RunUntil(seconds(5));
    std::uint64_t suppressed = 0;
    for (int i = 1; i <= 2; ++i) {
      suppressed += w.kernel->stats(*w.kernel->FindNode("h" + std::to_string(i)))
                        .suppressed_responses;
    }
    ASSERT_GE(probe.received.size(), 1u);
    ASSERT_LE(probe.received.size(), 2u);
    EXPECT_EQ(probe.received.size() + suppressed, 2u) << "seed " << seed;
    if (probe.received.size() == 1) {
      ++single;
    } else {
      const auto gap = probe.received[1].at - probe.received[0].at;
      EXPECT_LT(gap, milliseconds(1)) << "seed " << seed;
    }
  }
  EXPECT_GE(single, 17);
}

TEST(Browsing, DuplicateQueriesSuppressedAcrossHosts) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MdnsWorld w(seed);
    for (int i = 1; i <= 5; ++i) w.Host("h" + std::to_string(i), i).Browse("_ipp._tcp", seconds(5));
    w.kernel->RunUntil(seconds(10));
    const auto queries =
        w.CountMulticast([](const auto& p) { return IsQueryFor(p, N("_ipp._tcp.local")); });
    EXPECT_GE(queries, 1u);
    EXPECT_LT(queries, 5u) << "seed " << seed;
  }
}

TEST(Browsing, BrowserCachesServiceRecords) {
  MdnsWorld w;
  w.Host("printer", 1, {Service("Printer", "_ipp._tcp", 631)});
  auto& browser = w.Host("laptop", 2);
  browser.Browse("_ipp._tcp", seconds(5));
  w.kernel->RunUntil(seconds(10));
  const auto ptrs = browser.cache().Get(N("_ipp._tcp.local"), RRType::kPTR, seconds(10));
  ASSERT_EQ(ptrs.size(), 1u);
  EXPECT_EQ(std::get<DomainName>(ptrs[0].rdata), N("Printer._ipp._tcp.local"));
  EXPECT_TRUE(browser.cache().HasName(N("printer.local"), seconds(10)));
}

TEST(Browsing, HostAddressOnlyWhileAServiceIsVisible) {
  MdnsWorld w;
  auto& probe = w.kernel->Emplace<RecorderNode>("probe", *dns::Ipv4Address::Parse("10.0.0.99"),
                                                "t");
  w.kernel->JoinGroup(w.group, probe.id());
  w.Host("idle", 1);
  w.Host("busy", 2, {Service("Web", "_http._tcp", 80)});
  w.kernel->RunUntil(seconds(5));
  probe.received.clear();
  probe.At(seconds(6), [&] {
    DnsMessage q;
    q.questions.push_back({N("idle.local"), RRType::kA});
    q.questions.push_back({N("busy.local"), RRType::kA});
    probe.Multicast(w.group, q);
  });
  w.kernel->RunUntil(seconds(7));
  ASSERT_EQ(probe.received.size(), 1u);
  ASSERT_EQ(probe.received[0].message.answers.size(), 1u);
  EXPECT_EQ(probe.received[0].message.answers[0].owner, N("busy.local"));
}

TEST(MdnsProperty, WakeupsConsistentUnderChurn) {
  // Random hosts, services and browses; the kernel verifies the single
  // wakeup rule after every event.
  sim::RandomStream rng("mdns-churn", 8);
  MdnsWorld w(8);
  const std::vector<std::string> types = {"_http._tcp", "_ipp._tcp", "_ssh._tcp"};
  for (int i = 1; i <= 12; ++i) {
    std::vector<ServiceInstance> services;
    std::set<std::pair<std::string, std::string>> mine;
    const auto count = rng.UniformInt(0, 3);
    for (std::uint64_t k = 0; k < count; ++k) {
      auto s = Service("S" + std::to_string(rng.UniformInt(0, 5)), types[rng.UniformInt(0, 2)], 80);
      if (mine.insert({s.instance, s.type}).second) services.push_back(s);
    }
    auto& h = w.Host("h" + std::to_string(i), i, services);
    h.Browse(types[rng.UniformInt(0, 2)], rng.UniformTime(seconds(0), seconds(20)));
  }
  w.kernel->RunUntil(seconds(120));
  w.kernel->VerifyWakeups();
  for (int i = 1; i <= 12; ++i) {
    auto& h = static_cast<MdnsResolver&>(w.kernel->node(*w.kernel->FindNode("h" + std::to_string(i))));
    for (const auto& s : h.services()) EXPECT_EQ(s.phase, ServicePhase::kEstablished);
    EXPECT_LE(h.probe_scheduler().max_latency(), milliseconds(250));
  }
  // Established full names are unique across the link.
  std::set<DomainName> names;
  std::size_t total = 0;
  for (int i = 1; i <= 12; ++i) {
    auto& h = static_cast<MdnsResolver&>(w.kernel->node(*w.kernel->FindNode("h" + std::to_string(i))));
    for (const auto& s : h.services()) {
      names.insert(s.service.FullName());
      ++total;
    }
  }
  EXPECT_EQ(names.size(), total);
}

}  // namespace
}  // namespace simnet::mdns
