#include "simnet/dns/client.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace simnet::dns {

DnsClient::DnsClient(ClientConfig config) : config_(config) {}

std::optional<std::uint16_t> DnsClient::Resolve(const DomainName& qname,
                                                RRType qtype,
                                                sim::NodeId server,
                                                ResolveHandler handler) {
  if (requests_.size() > 0xFFFF) return std::nullopt;
  if (!rng_) rng_.emplace(MakeRandomStream("client-ids"));
  std::uint16_t id = 0;
  do {
    id = static_cast<std::uint16_t>(rng_->UniformInt(0, 0xFFFF));
  } while (requests_.contains(id));

  Request req;
  req.question = DnsQuestion{qname, qtype, RRClass::kIN};
  req.server = server;
  req.issued_at = now();
  req.handler = std::move(handler);
  requests_.emplace(id, std::move(req));
  ++issued_;
  Transmit(id);
  return id;
}

void DnsClient::Transmit(std::uint16_t id) {
  Request& req = requests_.at(id);
  req.timeout = ScheduleAfter(config_.timeout, "client-timeout",
                              [this, id] { OnTimeout(id); });
  SendTo(req.server, MakeQuery(id, req.question, /*recursion_desired=*/true));
}

void DnsClient::OnTimeout(std::uint16_t id) {
  Request& req = requests_.at(id);
  req.timeout = sim::EventHandle{};
  if (++req.attempts > config_.max_retries) {
    ++timeouts_;
    ResolveOutcome outcome;
    outcome.status = ResolveOutcome::Status::kTimeout;
    outcome.rcode = Rcode::kServFail;
    outcome.rtt = now() - req.issued_at;
    Complete(id, std::move(outcome));
    return;
  }
  Transmit(id);
}

void DnsClient::OnPacket(const sim::SimPacket& packet,
                         const DnsMessage& message) {
  auto it = requests_.find(message.id);
  if (!message.IsResponse() || it == requests_.end() ||
      packet.src != it->second.server || message.questions.size() != 1 ||
      message.questions.front().qname != it->second.question.qname ||
      message.questions.front().qtype != it->second.question.qtype) {
    ++stats().stale_responses;
    return;
  }
  ResolveOutcome outcome;
  outcome.rcode = message.flags.rcode;
  outcome.answers = message.answers;
  outcome.rtt = now() - it->second.issued_at;
  Complete(message.id, std::move(outcome));
}

void DnsClient::Complete(std::uint16_t id, ResolveOutcome outcome) {
  auto node = requests_.extract(id);
  Cancel(node.mapped().timeout);
  ++completed_;
  node.mapped().handler(outcome);
}

QueryFileError::QueryFileError(int line, const std::string& what)
    : std::runtime_error("query file line " + std::to_string(line) + ": " +
                         what),
      line_(line) {}

std::vector<QueryLine> ParseQueryFile(std::string_view text) {
  std::vector<QueryLine> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream fields(line);
    std::string name;
    std::string type;
    std::string extra;
    if (!(fields >> name)) continue;
    if (!(fields >> type)) throw QueryFileError(number, "missing type after '" + name + "'");
    if (fields >> extra) throw QueryFileError(number, "unexpected token '" + extra + "'");
    auto rrtype = ParseRRType(type);
    if (!rrtype) throw QueryFileError(number, "unknown type '" + type + "'");
    try {
      out.push_back(QueryLine{DomainName::Parse(name), *rrtype});
    } catch (const NameError& e) {
      throw QueryFileError(number, e.what());
    }
  }
  if (out.empty()) throw QueryFileError(number, "no queries");
  return out;
}

std::vector<QueryLine> LoadQueryFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open query file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseQueryFile(text.str());
}

TrafficGenerator::TrafficGenerator(TrafficConfig config, ClientConfig client)
    : DnsClient(client), config_(std::move(config)) {
  if (config_.queries.empty()) {
    throw std::invalid_argument("traffic generator needs at least one query");
  }
  if (config_.period <= SimTime::zero()) {
    throw std::invalid_argument("traffic generator period must be positive");
  }
  if (!(config_.jitter >= 0.0 && config_.jitter < 1.0)) {
    throw std::invalid_argument("traffic generator jitter must be in [0, 1)");
  }
  draws_.assign(config_.queries.size(), 0);
}

void TrafficGenerator::Start() {
  rng_.emplace(kernel().RngStream(name() + "/" + config_.stream));
  ScheduleAfter(NextGap(), "traffgen-tick", [this] { Tick(); });
}

SimTime TrafficGenerator::NextGap() {
  if (config_.jitter == 0.0) return config_.period;
  const double u = rng_->UniformReal() * 2.0 - 1.0;
  const double gap = static_cast<double>(config_.period.count()) *
                     (1.0 + u * config_.jitter);
  return SimTime(std::llround(gap));
}

void TrafficGenerator::Tick() {
  const auto index = rng_->UniformInt(0, config_.queries.size() - 1);
  ++draws_[index];
  send_times_.push_back(now());
  const QueryLine& q = config_.queries[index];
  Resolve(q.qname, q.qtype, config_.server, [this](const ResolveOutcome& o) {
    if (o.status == ResolveOutcome::Status::kAnswered) ++answered_;
  });
  ScheduleAfter(NextGap(), "traffgen-tick", [this] { Tick(); });
}

}  // namespace simnet::dns
