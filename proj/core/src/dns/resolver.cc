#include <algorithm>
#include <utility>

#include "simnet/dns/server.h"

namespace simnet::dns {

struct DnsServerBase::Pending {
  DnsQuestion question;
  DomainName qname;  // current target; moves along CNAME chains
  std::vector<ResourceRecord> chain;
  int restarts = 0;
  int depth = 0;
  bool cache_counted = false;

  DomainName cut;
  std::vector<Candidate> servers;
  std::size_t server_index = 0;
  std::set<std::string> visited;

  int attempts = 0;
  std::optional<std::uint16_t> upstream_id;
  sim::NodeId upstream_node;
  sim::EventHandle timeout;
  ResolveCallback done;
};

DnsServerBase::DnsServerBase(RootHints hints, std::unique_ptr<DnsCache> cache,
                             ResolverConfig config)
    : hints_(std::move(hints)), cache_(std::move(cache)), config_(config) {}

DnsServerBase::~DnsServerBase() = default;

sim::RandomStream& DnsServerBase::rng() {
  if (!rng_) rng_.emplace(MakeRandomStream("resolver"));
  return *rng_;
}

void DnsServerBase::Reply(const sim::SimPacket& to, DnsMessage response) {
  SendTo(to.src, std::move(response));
}

void DnsServerBase::OnPacket(const sim::SimPacket& packet,
                             const DnsMessage& message) {
  if (message.IsResponse()) {
    HandleUpstreamResponse(packet, message);
  } else {
    HandleQuery(packet, message);
  }
}

void DnsServerBase::Resolve(const DnsQuestion& question, ResolveCallback done) {
  StartResolution(question, std::move(done), 0);
}

std::uint64_t DnsServerBase::StartResolution(const DnsQuestion& question,
                                             ResolveCallback done, int depth) {
  const std::uint64_t rid = next_rid_++;
  Pending p;
  p.question = question;
  p.qname = question.qname;
  p.depth = depth;
  p.done = std::move(done);
  pending_.emplace(rid, std::move(p));
  Restart(rid);
  return rid;
}

void DnsServerBase::Restart(std::uint64_t rid) {
  Pending& p = pending_.at(rid);
  const RRType qtype = p.question.qtype;
  if (cache_) {
    for (;;) {
      if (qtype != RRType::kANY) {
        if (auto hit = cache_->Get({p.qname, qtype}, now())) {
          if (!p.cache_counted) ++stats().cache_hits;
          p.cache_counted = true;
          p.chain.insert(p.chain.end(), hit->begin(), hit->end());
          Finish(rid, Rcode::kNoError);
          return;
        }
      }
      if (qtype == RRType::kCNAME) break;
      auto cname = cache_->Get({p.qname, RRType::kCNAME}, now());
      if (!cname) break;
      p.chain.push_back(cname->front());
      if (++p.restarts > config_.max_cname_restarts) {
        Finish(rid, Rcode::kServFail);
        return;
      }
      p.qname = std::get<DomainName>(cname->front().rdata);
    }
    if (!p.cache_counted) ++stats().cache_misses;
    p.cache_counted = true;
  }

  p.visited.clear();
  SelectStartingServers(p);
  if (p.servers.empty()) {
    Finish(rid, Rcode::kServFail);
    return;
  }
  p.visited.insert(p.cut.CanonicalKey());
  SendNext(rid);
}

void DnsServerBase::SelectStartingServers(Pending& p) {
  if (cache_) {
    for (DomainName name = p.qname;; name = name.Parent()) {
      if (auto ns = cache_->Get({name, RRType::kNS}, now())) {
        auto candidates = CandidatesFor(*ns, {});
        const bool usable = std::any_of(
            candidates.begin(), candidates.end(),
            [](const Candidate& c) { return c.address.has_value(); });
        if (usable) {
          p.cut = name;
          p.servers = std::move(candidates);
          p.server_index = 0;
          return;
        }
      }
      if (name.IsRoot()) break;
    }
  }
  p.cut = DomainName();
  p.servers.clear();
  for (const auto& hint : hints_) {
    p.servers.push_back(Candidate{hint.name, hint.address, false});
  }
  p.server_index = 0;
}

std::vector<DnsServerBase::Candidate> DnsServerBase::CandidatesFor(
    const std::vector<ResourceRecord>& ns_records,
    const std::vector<ResourceRecord>& glue) {
  std::vector<Candidate> out;
  for (const auto& ns : ns_records) {
    if (ns.type != RRType::kNS) continue;
    Candidate c{std::get<DomainName>(ns.rdata), std::nullopt, false};
    for (const auto& rr : glue) {
      if (rr.type == RRType::kA && rr.owner == c.name) {
        c.address = std::get<Ipv4Address>(rr.rdata);
        break;
      }
    }
    if (!c.address && cache_) {
      if (auto a = cache_->Get({c.name, RRType::kA}, now())) {
        c.address = std::get<Ipv4Address>(a->front().rdata);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

void DnsServerBase::SendNext(std::uint64_t rid) {
  Pending& p = pending_.at(rid);
  for (std::size_t i = p.server_index; i < p.servers.size(); ++i) {
    const auto& c = p.servers[i];
    if (c.address && kernel().NodeByAddress(*c.address)) {
      p.server_index = i;
      p.attempts = 0;
      SendUpstream(rid);
      return;
    }
  }
  // No reachable address yet: resolve the next NS name without one.
  for (std::size_t i = 0; i < p.servers.size(); ++i) {
    Candidate& c = p.servers[i];
    if (c.address || c.lookup_started) continue;
    if (p.depth >= config_.max_subresolution_depth) break;
    c.lookup_started = true;
    const DnsQuestion sub{c.name, RRType::kA, RRClass::kIN};
    StartResolution(
        sub,
        [this, rid, i](const ResolutionResult& r) {
          auto it = pending_.find(rid);
          if (it == pending_.end()) return;
          if (r.rcode == Rcode::kNoError) {
            for (const auto& rr : r.answers) {
              if (rr.type == RRType::kA) {
                it->second.servers[i].address = std::get<Ipv4Address>(rr.rdata);
                it->second.server_index = i;
                break;
              }
            }
          }
          SendNext(rid);
        },
        p.depth + 1);
    return;
  }
  Finish(rid, Rcode::kServFail);
}

void DnsServerBase::SendUpstream(std::uint64_t rid) {
  Pending& p = pending_.at(rid);
  if (p.upstream_id) {
    throw sim::InvariantViolation("second upstream query for one resolution");
  }
  std::uint16_t id = 0;
  do {
    id = static_cast<std::uint16_t>(rng().UniformInt(0, 0xFFFF));
  } while (upstream_.contains(id));
  const sim::NodeId server =
      *kernel().NodeByAddress(*p.servers[p.server_index].address);
  p.upstream_id = id;
  p.upstream_node = server;
  upstream_[id] = rid;
  ++upstream_queries_;

  const DnsQuestion q{p.qname, p.question.qtype, RRClass::kIN};
  p.timeout = ScheduleAfter(config_.timeout, "resolver-timeout",
                            [this, rid] { OnTimeout(rid); }, ToString(q));
  SendTo(server, MakeQuery(id, q, /*recursion_desired=*/false));
}

void DnsServerBase::OnTimeout(std::uint64_t rid) {
  Pending& p = pending_.at(rid);
  p.timeout = sim::EventHandle{};
  upstream_.erase(*p.upstream_id);
  p.upstream_id.reset();
  if (++p.attempts > config_.max_retries) {
    Finish(rid, Rcode::kServFail);
    return;
  }
  SendUpstream(rid);
}

void DnsServerBase::HandleUpstreamResponse(const sim::SimPacket& packet,
                                           const DnsMessage& response) {
  auto it = upstream_.find(response.id);
  if (it == upstream_.end()) {
    ++stats().stale_responses;
    return;
  }
  const std::uint64_t rid = it->second;
  Pending& p = pending_.at(rid);
  if (packet.src != p.upstream_node || response.questions.size() != 1 ||
      response.questions[0].qname != p.qname ||
      response.questions[0].qtype != p.question.qtype) {
    ++stats().stale_responses;
    return;
  }
  upstream_.erase(it);
  p.upstream_id.reset();
  Cancel(p.timeout);
  CacheResponse(response);
  ProcessResponse(rid, response);
}

void DnsServerBase::ProcessResponse(std::uint64_t rid,
                                    const DnsMessage& response) {
  Pending& p = pending_.at(rid);
  const RRType qtype = p.question.qtype;
  if (response.flags.rcode == Rcode::kNxDomain) {
    Finish(rid, Rcode::kNxDomain);
    return;
  }
  if (response.flags.rcode != Rcode::kNoError) {
    Finish(rid, Rcode::kServFail);
    return;
  }

  // Walk the answer section along any CNAME chain.
  DomainName name = p.qname;
  std::vector<ResourceRecord> chain;
  for (int hop = 0; hop <= config_.max_cname_restarts; ++hop) {
    std::vector<ResourceRecord> matching;
    for (const auto& rr : response.answers) {
      if (rr.owner == name && (qtype == RRType::kANY || rr.type == qtype)) {
        matching.push_back(rr);
      }
    }
    if (!matching.empty()) {
      p.chain.insert(p.chain.end(), chain.begin(), chain.end());
      p.chain.insert(p.chain.end(), matching.begin(), matching.end());
      Finish(rid, Rcode::kNoError);
      return;
    }
    auto cname = std::find_if(
        response.answers.begin(), response.answers.end(), [&](const auto& rr) {
          return rr.owner == name && rr.type == RRType::kCNAME;
        });
    if (cname == response.answers.end()) break;
    chain.push_back(*cname);
    name = std::get<DomainName>(cname->rdata);
  }
  if (!chain.empty()) {
    p.chain.insert(p.chain.end(), chain.begin(), chain.end());
    p.restarts += static_cast<int>(chain.size());
    if (p.restarts > config_.max_cname_restarts) {
      Finish(rid, Rcode::kServFail);
      return;
    }
    p.qname = name;
    Restart(rid);
    return;
  }

  std::vector<ResourceRecord> ns;
  for (const auto& rr : response.authorities) {
    if (rr.type == RRType::kNS) ns.push_back(rr);
  }
  if (response.answers.empty() && !ns.empty() &&
      p.qname.IsSubdomainOf(ns.front().owner)) {
    const DomainName cut = ns.front().owner;
    if (!p.visited.insert(cut.CanonicalKey()).second) {
      Finish(rid, Rcode::kServFail);  // delegation loop
      return;
    }
    std::erase_if(ns, [&](const auto& rr) { return rr.owner != cut; });
    p.cut = cut;
    p.servers = CandidatesFor(ns, response.additionals);
    p.server_index = 0;
    SendNext(rid);
    return;
  }
  Finish(rid, Rcode::kNoError);  // no data
}

void DnsServerBase::CacheResponse(const DnsMessage& response) {
  if (!cache_) return;
  for (const auto* section :
       {&response.answers, &response.authorities, &response.additionals}) {
    std::vector<std::pair<CacheKey, std::vector<ResourceRecord>>> rrsets;
    for (const auto& rr : *section) {
      CacheKey key{rr.owner, rr.type};
      auto it = std::find_if(rrsets.begin(), rrsets.end(),
                             [&](const auto& s) { return s.first == key; });
      if (it == rrsets.end()) {
        rrsets.emplace_back(std::move(key), std::vector<ResourceRecord>{rr});
      } else {
        it->second.push_back(rr);
      }
    }
    for (auto& [key, records] : rrsets) {
      cache_->Put(key, std::move(records), now());
    }
  }
}

void DnsServerBase::Finish(std::uint64_t rid, Rcode rcode) {
  auto node = pending_.extract(rid);
  Pending& p = node.mapped();
  if (p.upstream_id) upstream_.erase(*p.upstream_id);
  Cancel(p.timeout);
  ResolutionResult result;
  result.rcode = rcode;
  if (rcode != Rcode::kServFail) result.answers = std::move(p.chain);
  p.done(result);
}

CachingServer::CachingServer(RootHints hints, std::unique_ptr<DnsCache> cache,
                             ResolverConfig config)
    : DnsServerBase(std::move(hints), std::move(cache), config) {}

void CachingServer::HandleQuery(const sim::SimPacket& packet,
                                const DnsMessage& query) {
  DnsMessage resp = MakeResponseTo(query);
  resp.flags.recursion_available = true;
  if (query.questions.size() != 1) {
    resp.flags.rcode = Rcode::kFormErr;
    Reply(packet, std::move(resp));
    return;
  }
  if (!query.flags.recursion_desired) {
    Reply(packet, std::move(resp));
    return;
  }
  Resolve(query.questions.front(),
          [this, packet, resp](const ResolutionResult& r) mutable {
            resp.flags.rcode = r.rcode;
            resp.answers = r.answers;
            Reply(packet, std::move(resp));
          });
}

}  // namespace simnet::dns
