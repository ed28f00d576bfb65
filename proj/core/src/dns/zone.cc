#include "simnet/dns/zone.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace simnet::dns {

ZoneParseError::ZoneParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

ZoneConfig::ZoneConfig(DomainName origin, std::uint32_t default_ttl,
                       std::vector<ResourceRecord> records)
    : origin_(std::move(origin)),
      default_ttl_(default_ttl),
      records_(std::move(records)) {
  std::size_t soa_count = 0;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& rr = records_[i];
    if (!rr.owner.IsSubdomainOf(origin_)) {
      throw std::invalid_argument("owner " + rr.owner.ToString() +
                                  " is outside zone " + origin_.ToString());
    }
    if (!RDataMatchesType(rr.type, rr.rdata)) {
      throw std::invalid_argument("rdata does not match type for " +
                                  rr.owner.ToString());
    }
    if (rr.type == RRType::kSOA) {
      if (rr.owner != origin_) {
        throw std::invalid_argument("SOA must be owned by the origin");
      }
      soa_index_ = i;
      ++soa_count;
    }
    index_[{rr.owner.CanonicalKey(), rr.type}].push_back(i);
  }
  if (soa_count != 1) {
    throw std::invalid_argument("zone " + origin_.ToString() +
                                " must hold exactly one SOA, found " +
                                std::to_string(soa_count));
  }
}

std::vector<std::size_t> ZoneConfig::IndicesAt(const DomainName& name) const {
  const std::string key = name.CanonicalKey();
  std::vector<std::size_t> out;
  for (auto it = index_.lower_bound({key, RRType{0}});
       it != index_.end() && it->first.first == key; ++it) {
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool ZoneConfig::NameExists(const DomainName& name) const {
  return std::any_of(records_.begin(), records_.end(),
                     [&](const ResourceRecord& rr) {
                       return rr.owner.IsSubdomainOf(name);
                     });
}

LookupResult ZoneConfig::Lookup(const DomainName& qname, RRType qtype) const {
  LookupResult result;
  const auto at_name = IndicesAt(qname);
  if (qtype == RRType::kANY) {
    for (std::size_t i : at_name) result.records.push_back(records_[i]);
  } else if (auto it = index_.find({qname.CanonicalKey(), qtype});
             it != index_.end()) {
    for (std::size_t i : it->second) result.records.push_back(records_[i]);
  }
  if (!result.records.empty()) {
    result.status = LookupResult::Status::kFound;
    return result;
  }
  if (!at_name.empty() || NameExists(qname)) {
    result.status = LookupResult::Status::kNoData;
    if (auto it = index_.find({qname.CanonicalKey(), RRType::kCNAME});
        it != index_.end()) {
      result.cname = records_[it->second.front()];
    }
    return result;
  }
  result.status = LookupResult::Status::kNameAbsent;
  return result;
}

std::vector<ResourceRecord> ZoneConfig::FindDelegation(
    const DomainName& qname) const {
  std::vector<ResourceRecord> out;
  if (!Contains(qname)) return out;
  const std::size_t apex = origin_.label_count();
  for (std::size_t depth = apex + 1; depth <= qname.label_count(); ++depth) {
    const DomainName cut = qname.Suffix(qname.label_count() - depth);
    if (auto it = index_.find({cut.CanonicalKey(), RRType::kNS});
        it != index_.end()) {
      for (std::size_t i : it->second) out.push_back(records_[i]);
      return out;
    }
  }
  return out;
}

std::vector<ResourceRecord> ZoneConfig::AddressRecords(
    const DomainName& name) const {
  std::vector<ResourceRecord> out;
  for (RRType type : {RRType::kA, RRType::kAAAA}) {
    if (auto it = index_.find({name.CanonicalKey(), type}); it != index_.end()) {
      for (std::size_t i : it->second) out.push_back(records_[i]);
    }
  }
  return out;
}

namespace {

struct Token {
  std::string text;
  bool quoted = false;
};

struct Entry {
  int line = 0;
  bool leading_blank = false;
  std::vector<Token> tokens;
};

// Splits the text into logical entries, joining parenthesized continuations.
std::vector<Entry> Tokenize(std::string_view text) {
  std::vector<Entry> entries;
  Entry current;
  int depth = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = eol + 1;

    if (depth == 0) {
      current = Entry{};
      current.line = line_no;
      current.leading_blank =
          !line.empty() && (line.front() == ' ' || line.front() == '\t');
    }

    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (c == ';') break;
      if (c == ' ' || c == '\t') {
        ++i;
      } else if (c == '(') {
        ++depth;
        ++i;
      } else if (c == ')') {
        if (depth == 0) throw ZoneParseError(line_no, "unbalanced ')'");
        --depth;
        ++i;
      } else if (c == '"') {
        Token token{"", true};
        ++i;
        bool closed = false;
        while (i < line.size()) {
          if (line[i] == '\\' && i + 1 < line.size()) {
            token.text.push_back(line[i + 1]);
            i += 2;
          } else if (line[i] == '"') {
            closed = true;
            ++i;
            break;
          } else {
            token.text.push_back(line[i++]);
          }
        }
        if (!closed) throw ZoneParseError(line_no, "unterminated quoted string");
        current.tokens.push_back(std::move(token));
      } else {
        Token token;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
               line[i] != ';' && line[i] != '(' && line[i] != ')' &&
               line[i] != '"') {
          token.text.push_back(line[i++]);
        }
        current.tokens.push_back(std::move(token));
      }
    }
    if (depth == 0 && !current.tokens.empty()) {
      entries.push_back(std::move(current));
      current = Entry{};
    }
    if (eol == text.size()) break;
  }
  if (depth != 0) {
    throw ZoneParseError(current.line, "unbalanced '(' (missing ')')");
  }
  return entries;
}

bool IsNumeric(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

// Plain seconds or BIND unit notation such as 1d, 2w, 1h30m.
std::optional<std::uint64_t> ParseDuration(std::string_view s) {
  if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front()))) {
    return std::nullopt;
  }
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), value);
    if (ec != std::errc()) return std::nullopt;
    i = static_cast<std::size_t>(ptr - s.data());
    std::uint64_t unit = 1;
    if (i < s.size()) {
      switch (std::tolower(static_cast<unsigned char>(s[i]))) {
        case 's': unit = 1; break;
        case 'm': unit = 60; break;
        case 'h': unit = 3600; break;
        case 'd': unit = 86400; break;
        case 'w': unit = 604800; break;
        default: return std::nullopt;
      }
      ++i;
    } else if (total != 0) {
      return std::nullopt;  // trailing bare number after a unit group
    }
    total += value * unit;
  }
  return total;
}

class ZoneParser {
 public:
  ZoneConfig Parse(std::string_view text) {
    const auto entries = Tokenize(text);
    int last_line = 1;
    for (const auto& entry : entries) {
      last_line = entry.line;
      line_ = entry.line;
      const auto& t = entry.tokens;
      if (!t.front().quoted && t.front().text.front() == '$') {
        Directive(t);
      } else {
        Record(entry);
      }
    }
    if (soa_line_ == 0) throw ZoneParseError(last_line, "missing SOA record");
    const ResourceRecord& soa = records_[soa_pos_];
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (!records_[i].owner.IsSubdomainOf(soa.owner)) {
        throw ZoneParseError(record_lines_[i],
                             "owner " + records_[i].owner.ToString() +
                                 " is outside zone " + soa.owner.ToString());
      }
    }
    const std::uint32_t default_ttl =
        ttl_directive_ ? *ttl_directive_
                       : std::get<SoaData>(soa.rdata).minimum;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (!explicit_ttl_[i]) records_[i].ttl = default_ttl;
    }
    try {
      return ZoneConfig(soa.owner, default_ttl, std::move(records_));
    } catch (const std::invalid_argument& e) {
      throw ZoneParseError(soa_line_, e.what());
    }
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw ZoneParseError(line_, what);
  }

  DomainName Qualify(const std::string& token) const {
    try {
      if (token == "@") {
        if (!origin_) Fail("'@' used before $ORIGIN");
        return *origin_;
      }
      if (!token.empty() && token.back() == '.') return DomainName::Parse(token);
      if (!origin_) Fail("relative name '" + token + "' without $ORIGIN");
      return DomainName::Parse(token).Concat(*origin_);
    } catch (const NameError& e) {
      Fail(std::string("bad name '") + token + "': " + e.what());
    }
  }

  std::uint32_t Seconds(const Token& token, const char* what) const {
    const auto value = ParseDuration(token.text);
    if (!value || *value > 0xFFFFFFFFull) {
      Fail(std::string("bad ") + what + " '" + token.text + "'");
    }
    return static_cast<std::uint32_t>(*value);
  }

  std::uint16_t U16(const Token& token, const char* what) const {
    std::uint32_t value = 0;
    if (!IsNumeric(token.text) ||
        std::from_chars(token.text.data(), token.text.data() + token.text.size(),
                        value)
                .ec != std::errc() ||
        value > 0xFFFF) {
      Fail(std::string("bad ") + what + " '" + token.text + "'");
    }
    return static_cast<std::uint16_t>(value);
  }

  void Directive(const std::vector<Token>& t) {
    const std::string& name = t.front().text;
    if (name == "$TTL") {
      if (t.size() != 2) Fail("$TTL takes one value");
      ttl_directive_ = Seconds(t[1], "$TTL value");
    } else if (name == "$ORIGIN") {
      if (t.size() != 2) Fail("$ORIGIN takes one name");
      const std::string& value = t[1].text;
      if (!value.empty() && value.back() != '.' && origin_) {
        origin_ = Qualify(value);
      } else {
        try {
          origin_ = DomainName::Parse(value);
        } catch (const NameError& e) {
          Fail(std::string("bad $ORIGIN: ") + e.what());
        }
      }
    } else {
      Fail("unsupported directive " + name);
    }
  }

  void Record(const Entry& entry) {
    const auto& t = entry.tokens;
    std::size_t i = 0;
    DomainName owner;
    if (entry.leading_blank) {
      if (!previous_owner_) Fail("record without owner and no previous owner");
      owner = *previous_owner_;
    } else {
      owner = Qualify(t[i++].text);
    }
    previous_owner_ = owner;

    std::optional<std::uint32_t> ttl;
    bool class_seen = false;
    for (int k = 0; k < 2 && i < t.size(); ++k) {
      const std::string& tok = t[i].text;
      if (!ttl && ParseDuration(tok)) {
        ttl = Seconds(t[i], "TTL");
        ++i;
      } else if (!class_seen && LabelEquals(tok, "IN")) {
        class_seen = true;
        ++i;
      } else if (LabelEquals(tok, "CH") || LabelEquals(tok, "HS") ||
                 LabelEquals(tok, "CS")) {
        Fail("unsupported class " + tok);
      }
    }
    if (i >= t.size()) Fail("missing record type");
    const auto type = ParseRRType(t[i].text);
    if (!type || *type == RRType::kANY) Fail("unknown type '" + t[i].text + "'");
    ++i;
    const std::vector<Token> rdata(t.begin() + static_cast<std::ptrdiff_t>(i),
                                   t.end());

    ResourceRecord rr;
    rr.owner = owner;
    rr.type = *type;
    rr.ttl = ttl.value_or(ttl_directive_.value_or(0));
    rr.rdata = ParseRData(*type, rdata);
    if (*type == RRType::kSOA) {
      if (soa_line_ != 0) Fail("second SOA record");
      soa_line_ = line_;
      soa_pos_ = records_.size();
    }
    records_.push_back(std::move(rr));
    record_lines_.push_back(line_);
    explicit_ttl_.push_back(ttl.has_value());
  }

  void Arity(const std::vector<Token>& t, std::size_t n, RRType type) const {
    if (t.size() != n) {
      Fail(std::string(ToString(type)) + " expects " + std::to_string(n) +
           " rdata fields, got " + std::to_string(t.size()));
    }
  }

  RData ParseRData(RRType type, const std::vector<Token>& t) const {
    switch (type) {
      case RRType::kA: {
        Arity(t, 1, type);
        const auto a = Ipv4Address::Parse(t[0].text);
        if (!a) Fail("malformed IPv4 address '" + t[0].text + "'");
        return *a;
      }
      case RRType::kAAAA: {
        Arity(t, 1, type);
        const auto a = Ipv6Address::Parse(t[0].text);
        if (!a) Fail("malformed IPv6 address '" + t[0].text + "'");
        return *a;
      }
      case RRType::kNS:
      case RRType::kCNAME:
      case RRType::kPTR:
        Arity(t, 1, type);
        return Qualify(t[0].text);
      case RRType::kMX: {
        // Preference is optional and defaults to 0.
        if (t.size() == 1) return MxData{0, Qualify(t[0].text)};
        Arity(t, 2, type);
        return MxData{U16(t[0], "MX preference"), Qualify(t[1].text)};
      }
      case RRType::kSOA: {
        Arity(t, 7, type);
        SoaData soa;
        soa.mname = Qualify(t[0].text);
        soa.rname = Qualify(t[1].text);
        if (!IsNumeric(t[2].text) ||
            std::from_chars(t[2].text.data(), t[2].text.data() + t[2].text.size(),
                            soa.serial)
                    .ec != std::errc()) {
          Fail("bad SOA serial '" + t[2].text + "'");
        }
        soa.refresh = Seconds(t[3], "SOA refresh");
        soa.retry = Seconds(t[4], "SOA retry");
        soa.expire = Seconds(t[5], "SOA expire");
        soa.minimum = Seconds(t[6], "SOA minimum");
        return soa;
      }
      case RRType::kTXT: {
        TxtData txt;
        for (const auto& token : t) {
          if (token.text.size() > 255) Fail("TXT string longer than 255 bytes");
          txt.strings.push_back(token.text);
        }
        return txt;
      }
      case RRType::kSRV: {
        Arity(t, 4, type);
        return SrvData{U16(t[0], "SRV priority"), U16(t[1], "SRV weight"),
                       U16(t[2], "SRV port"), Qualify(t[3].text)};
      }
      case RRType::kANY:
        break;
    }
    Fail("unsupported type");
  }

  int line_ = 0;
  std::optional<DomainName> origin_;
  std::optional<DomainName> previous_owner_;
  std::optional<std::uint32_t> ttl_directive_;
  std::vector<ResourceRecord> records_;
  std::vector<int> record_lines_;
  std::vector<bool> explicit_ttl_;
  int soa_line_ = 0;
  std::size_t soa_pos_ = 0;
};

}  // namespace

ZoneConfig ParseZone(std::string_view text) {
  if (text.empty()) throw ZoneParseError(0, "empty zone text");
  return ZoneParser().Parse(text);
}

ZoneConfig LoadZoneFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ZoneParseError(0, "cannot open zone file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseZone(buffer.str());
}

std::string RenderZone(const ZoneConfig& zone) {
  std::ostringstream os;
  os << "$ORIGIN " << zone.origin() << '\n';
  os << "$TTL " << zone.default_ttl() << '\n';
  for (const auto& rr : zone.records()) os << ToString(rr) << '\n';
  return os.str();
}

}  // namespace simnet::dns
