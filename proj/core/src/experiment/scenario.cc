#include "simnet/experiment/scenario.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace simnet::experiment {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Whitespace-separated words; "double quoted" words may contain spaces.
std::vector<std::string> Words(std::string_view s, int line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    std::string word;
    if (s[i] == '"') {
      const auto close = s.find('"', i + 1);
      if (close == std::string_view::npos) {
        throw ScenarioError("unterminated quote", line);
      }
      word = std::string(s.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      while (i < s.size() && s[i] != ' ' && s[i] != '\t') word += s[i++];
    }
    out.push_back(std::move(word));
  }
  return out;
}

template <typename T>
T ParseInteger(std::string_view text, std::string_view key, int line) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ScenarioError("'" + std::string(key) + "' expects an integer, got '" +
                            std::string(text) + "'",
                        line);
  }
  return value;
}

double ParseDouble(std::string_view text, std::string_view key, int line) {
  double value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ScenarioError("'" + std::string(key) + "' expects a number, got '" +
                            std::string(text) + "'",
                        line);
  }
  return value;
}

bool ParseBool(std::string_view text, std::string_view key, int line) {
  if (text == "on" || text == "true" || text == "yes" || text == "1") return true;
  if (text == "off" || text == "false" || text == "no" || text == "0") return false;
  throw ScenarioError("'" + std::string(key) + "' expects on/off, got '" +
                          std::string(text) + "'",
                      line);
}

dns::Ipv4Address ParseAddress(std::string_view text, int line) {
  auto a = dns::Ipv4Address::Parse(text);
  if (!a) throw ScenarioError("bad IPv4 address '" + std::string(text) + "'", line);
  return *a;
}

std::vector<std::string> ListValue(std::string_view value, int line) {
  std::string spaced(value);
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  return Words(spaced, line);
}

void RequireArity(const std::vector<std::string>& w, std::size_t lo,
                  std::size_t hi, std::string_view key, int line) {
  if (w.size() < lo || w.size() > hi) {
    throw ScenarioError("'" + std::string(key) + "' takes " +
                            std::to_string(lo) +
                            (lo == hi ? "" : "-" + std::to_string(hi)) +
                            " fields, got " + std::to_string(w.size()),
                        line);
  }
}

// Sets a scalar key in `section`. Returns false if the key is unknown.
bool SetScalar(ScenarioConfig& cfg, std::string_view section,
               std::string_view key, std::string_view value, int line) {
  if (section == "experiment") {
    if (key == "seed") {
      cfg.seed = ParseInteger<std::uint64_t>(value, key, line);
    } else if (key == "duration") {
      cfg.duration = ParseDouble(value, key, line);
    } else if (key == "name") {
      cfg.name = std::string(value);
    } else {
      return false;
    }
    return true;
  }
  if (section == "topology") {
    if (key != "default_delay") return false;
    if (value == "none") {
      cfg.topology.default_delay.reset();
    } else {
      cfg.topology.default_delay = ParseDouble(value, key, line);
    }
    return true;
  }
  if (section == "mdns") {
    auto& m = cfg.mdns;
    if (key == "num_resolvers") {
      m.num_resolvers = ParseInteger<int>(value, key, line);
    } else if (key == "num_private_resolvers") {
      m.num_private_resolvers = ParseInteger<int>(value, key, line);
    } else if (key == "min_friends") {
      m.min_friends = ParseInteger<int>(value, key, line);
    } else if (key == "max_friends") {
      m.max_friends = ParseInteger<int>(value, key, line);
    } else if (key == "min_services") {
      m.min_services = ParseInteger<int>(value, key, line);
    } else if (key == "max_services") {
      m.max_services = ParseInteger<int>(value, key, line);
    } else if (key == "private_service_ratio") {
      m.private_service_ratio = ParseDouble(value, key, line);
    } else if (key == "privacy") {
      m.privacy = ParseBool(value, key, line);
    } else if (key == "reannounce") {
      m.reannounce = ParseDouble(value, key, line);
    } else if (key == "browse_at") {
      m.browse_at = ParseDouble(value, key, line);
    } else if (key == "browse") {
      m.browse = ListValue(value, line);
    } else {
      return false;
    }
    return true;
  }
  return false;
}

void ParseDnsKey(ScenarioConfig& cfg, std::string_view key,
                 std::string_view value, int line) {
  const auto w = Words(value, line);
  if (key == "auth") {
    RequireArity(w, 3, 3, key, line);
    DnsServerSpec s;
    s.kind = DnsServerSpec::Kind::kAuth;
    s.name = w[0];
    s.address = ParseAddress(w[1], line);
    s.zone_file = w[2];
    s.line = line;
    cfg.servers.push_back(std::move(s));
  } else if (key == "caching") {
    RequireArity(w, 2, 4, key, line);
    DnsServerSpec s;
    s.kind = DnsServerSpec::Kind::kCaching;
    s.name = w[0];
    s.address = ParseAddress(w[1], line);
    if (w.size() > 2) {
      if (w[2] != "simple" && w[2] != "ttl") {
        throw ScenarioError("cache policy must be simple or ttl", line);
      }
      s.cache_policy = w[2];
    }
    if (w.size() > 3) s.cache_capacity = ParseInteger<std::size_t>(w[3], key, line);
    s.line = line;
    cfg.servers.push_back(std::move(s));
  } else if (key == "echo") {
    RequireArity(w, 3, 3, key, line);
    DnsServerSpec s;
    s.kind = DnsServerSpec::Kind::kEcho;
    s.name = w[0];
    s.address = ParseAddress(w[1], line);
    s.echo_domain = w[2];
    s.line = line;
    cfg.servers.push_back(std::move(s));
  } else if (key == "root") {
    RequireArity(w, 2, 2, key, line);
    cfg.roots.push_back(RootHintSpec{w[0], w[1], line});
  } else if (key == "client") {
    RequireArity(w, 4, 6, key, line);
    DnsClientSpec c;
    c.name = w[0];
    c.address = ParseAddress(w[1], line);
    c.server = w[2];
    c.query_file = w[3];
    if (w.size() > 4) c.period = ParseDouble(w[4], "period", line);
    if (w.size() > 5) c.jitter = ParseDouble(w[5], "jitter", line);
    c.line = line;
    cfg.clients.push_back(std::move(c));
  } else {
    throw ScenarioError("unknown key '" + std::string(key) + "' in [dns]", line);
  }
}

void ParseHostKey(HostSpec& host, std::string_view key, std::string_view value,
                  int line) {
  if (key == "address") {
    host.address = ParseAddress(value, line);
  } else if (key == "service") {
    try {
      host.services.push_back(ParseServiceSpec(value));
    } catch (const ScenarioError& e) {
      throw ScenarioError(e.what(), line);
    }
  } else if (key == "private_services") {
    host.private_services = ParseInteger<int>(value, key, line);
  } else if (key == "friends") {
    host.friends = ListValue(value, line);
  } else if (key == "browse") {
    host.browse = ListValue(value, line);
  } else {
    throw ScenarioError("unknown key '" + std::string(key) + "' in [host]", line);
  }
}

}  // namespace

ScenarioError::ScenarioError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                  : what),
      line_(line) {}

mdns::ServiceInstance ParseServiceSpec(std::string_view value) {
  const auto w = Words(value, 0);
  if (w.size() < 3) {
    throw ScenarioError("service needs <instance> <type> <port> [txt k=v ...]");
  }
  mdns::ServiceInstance s;
  s.instance = w[0];
  s.type = w[1];
  s.port = ParseInteger<std::uint16_t>(w[2], "service port", 0);
  std::size_t i = 3;
  if (i < w.size()) {
    if (w[i] != "txt") throw ScenarioError("expected 'txt' before TXT data");
    for (++i; i < w.size(); ++i) s.txt.push_back(w[i]);
  }
  try {
    (void)s.FullName();
  } catch (const std::exception& e) {
    throw ScenarioError("bad service name: " + std::string(e.what()));
  }
  if (!s.type.starts_with('_')) {
    throw ScenarioError("service type must look like _name._proto");
  }
  return s;
}

const std::vector<std::string>& SweepableKeys() {
  static const std::vector<std::string> kKeys = {
      "seed",          "duration",        "default_delay",
      "num_resolvers", "num_private_resolvers", "min_friends",
      "max_friends",   "min_services",    "max_services",
      "private_service_ratio", "privacy", "reannounce",
      "browse_at"};
  return kKeys;
}

void ScenarioConfig::Set(std::string_view key, std::string_view value) {
  std::string_view section;
  if (auto dot = key.find('.'); dot != std::string_view::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
  }
  value = Trim(value);
  if (!section.empty()) {
    if (SetScalar(*this, section, key, value, 0)) return;
  } else {
    for (std::string_view s : {"experiment", "topology", "mdns"}) {
      if (key == "name") break;
      if (SetScalar(*this, s, key, value, 0)) return;
    }
  }
  throw ScenarioError("unknown parameter '" + std::string(key) + "'");
}

std::filesystem::path ScenarioConfig::Resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

void ScenarioConfig::Validate() const {
  const auto& m = mdns;
  if (duration < 0) throw ScenarioError("duration must be >= 0");
  if (topology.default_delay && *topology.default_delay < 0) {
    throw ScenarioError("default_delay must be >= 0");
  }
  if (m.num_resolvers < 0) throw ScenarioError("num_resolvers must be >= 0");
  if (m.num_private_resolvers < 0 || m.num_private_resolvers > m.num_resolvers) {
    throw ScenarioError("num_private_resolvers must be in [0, num_resolvers]");
  }
  if (m.min_friends < 0 || m.min_friends > m.max_friends) {
    throw ScenarioError("need 0 <= min_friends <= max_friends");
  }
  if (m.min_services < 0 || m.min_services > m.max_services) {
    throw ScenarioError("need 0 <= min_services <= max_services");
  }
  if (!(m.private_service_ratio >= 0.0 && m.private_service_ratio <= 1.0)) {
    throw ScenarioError("private_service_ratio must be in [0, 1]");
  }
  if (m.reannounce < 0) throw ScenarioError("reannounce must be >= 0");
  if (m.browse_at < 0) throw ScenarioError("browse_at must be >= 0");

  std::set<std::string> names;
  auto claim = [&](const std::string& name, int line) {
    if (!names.insert(name).second) {
      throw ScenarioError("duplicate node name '" + name + "'", line);
    }
  };
  for (const auto& s : servers) claim(s.name, s.line);
  for (const auto& c : clients) claim(c.name, c.line);
  for (const auto& h : hosts) claim(h.name, h.line);

  for (const auto& h : hosts) {
    if (h.private_services < 0 ||
        h.private_services > static_cast<int>(h.services.size())) {
      throw ScenarioError("host " + h.name +
                              ": private_services exceeds its service count",
                          h.line);
    }
    for (const auto& f : h.friends) {
      const bool known = std::any_of(hosts.begin(), hosts.end(),
                                     [&](const auto& o) { return o.name == f; });
      if (!known || f == h.name) {
        throw ScenarioError("host " + h.name + ": bad friend '" + f + "'", h.line);
      }
    }
  }
  for (const auto& r : roots) {
    if (!names.contains(r.node)) {
      throw ScenarioError("root hint names unknown node '" + r.node + "'", r.line);
    }
  }
  for (const auto& c : clients) {
    if (!names.contains(c.server)) {
      throw ScenarioError("client " + c.name + " uses unknown server '" +
                              c.server + "'",
                          c.line);
    }
    if (c.period <= 0) throw ScenarioError("client period must be > 0", c.line);
    if (!(c.jitter >= 0 && c.jitter < 1)) {
      throw ScenarioError("client jitter must be in [0, 1)", c.line);
    }
  }
  const bool any_caching =
      std::any_of(servers.begin(), servers.end(), [](const auto& s) {
        return s.kind == DnsServerSpec::Kind::kCaching;
      });
  if (any_caching && roots.empty()) {
    throw ScenarioError("caching servers need at least one root hint");
  }
}

ScenarioConfig ParseScenario(std::string_view text,
                             std::filesystem::path base_dir) {
  ScenarioConfig cfg;
  cfg.base_dir = std::move(base_dir);
  std::string section;
  HostSpec* host = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = Trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') throw ScenarioError("unterminated section header", line);
      const auto words = Words(s.substr(1, s.size() - 2), line);
      if (words.empty()) throw ScenarioError("empty section header", line);
      section = words[0];
      host = nullptr;
      if (section == "host") {
        if (words.size() != 2) throw ScenarioError("use [host NAME]", line);
        cfg.hosts.push_back(HostSpec{});
        host = &cfg.hosts.back();
        host->name = words[1];
        host->line = line;
      } else if (words.size() != 1 ||
                 (section != "experiment" && section != "topology" &&
                  section != "mdns" && section != "dns")) {
        throw ScenarioError("unknown section [" + std::string(s.substr(1, s.size() - 2)) + "]", line);
      }
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ScenarioError("expected key = value", line);
    const std::string_view key = Trim(s.substr(0, eq));
    const std::string_view value = Trim(s.substr(eq + 1));
    if (key.empty()) throw ScenarioError("missing key", line);
    if (section.empty()) throw ScenarioError("key outside any section", line);

    if (section == "host") {
      ParseHostKey(*host, key, value, line);
    } else if (section == "dns") {
      ParseDnsKey(cfg, key, value, line);
    } else if (section == "topology" && key == "link") {
      const auto w = Words(value, line);
      RequireArity(w, 3, 3, key, line);
      cfg.topology.links.push_back(LinkSpec{w[0], w[1], ParseDouble(w[2], key, line)});
    } else if (!SetScalar(cfg, section, key, value, line)) {
      throw ScenarioError("unknown key '" + std::string(key) + "' in [" + section + "]", line);
    }
  }
  cfg.Validate();
  return cfg;
}

ScenarioConfig LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseScenario(text.str(), path.parent_path());
}

}  // namespace simnet::experiment
