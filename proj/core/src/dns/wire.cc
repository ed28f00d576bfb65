#include "simnet/dns/wire.h"

#include <cctype>
#include <cstdio>

namespace simnet::dns {

WireParseError::WireParseError(std::size_t offset, const std::string& what)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

void WireWriter::U8(std::uint8_t value) {
  if (out_) out_->push_back(value);
  ++position_;
}

void WireWriter::U16(std::uint16_t value) {
  U8(static_cast<std::uint8_t>(value >> 8));
  U8(static_cast<std::uint8_t>(value));
}

void WireWriter::U32(std::uint32_t value) {
  U16(static_cast<std::uint16_t>(value >> 16));
  U16(static_cast<std::uint16_t>(value));
}

void WireWriter::Bytes(std::span<const std::uint8_t> bytes) {
  if (out_) out_->insert(out_->end(), bytes.begin(), bytes.end());
  position_ += bytes.size();
}

void WireWriter::Bytes(std::string_view bytes) {
  if (out_) out_->insert(out_->end(), bytes.begin(), bytes.end());
  position_ += bytes.size();
}

void WireWriter::PatchU16(std::size_t at, std::uint16_t value) {
  if (!out_) return;
  (*out_)[at] = static_cast<std::uint8_t>(value >> 8);
  (*out_)[at + 1] = static_cast<std::uint8_t>(value);
}

namespace {

// Exact wire bytes of labels[first..], without the terminal zero.
std::string SuffixKey(const std::vector<std::string>& labels,
                      std::size_t first) {
  std::string key;
  for (std::size_t i = first; i < labels.size(); ++i) {
    key.push_back(static_cast<char>(labels[i].size()));
    key += labels[i];
  }
  return key;
}

bool RDataNameCompressible(RRType type) {
  switch (type) {
    case RRType::kNS:
    case RRType::kCNAME:
    case RRType::kPTR:
    case RRType::kMX:
    case RRType::kSOA:
      return true;
    default:
      return false;
  }
}

void WriteRData(const ResourceRecord& rr, WireWriter& writer,
                NameOffsets& offsets, bool compress) {
  const bool names = compress && RDataNameCompressible(rr.type);
  std::visit(
      [&](const auto& value) {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, Ipv4Address> ||
                      std::is_same_v<T, Ipv6Address>) {
          writer.Bytes(value.octets);
        } else if constexpr (std::is_same_v<T, DomainName>) {
          EncodeName(value, writer, offsets, names);
        } else if constexpr (std::is_same_v<T, MxData>) {
          writer.U16(value.preference);
          EncodeName(value.exchange, writer, offsets, names);
        } else if constexpr (std::is_same_v<T, SoaData>) {
          EncodeName(value.mname, writer, offsets, names);
          EncodeName(value.rname, writer, offsets, names);
          writer.U32(static_cast<std::uint32_t>(value.serial));
          writer.U32(value.refresh);
          writer.U32(value.retry);
          writer.U32(value.expire);
          writer.U32(value.minimum);
        } else if constexpr (std::is_same_v<T, TxtData>) {
          for (const auto& s : value.strings) {
            if (s.size() > 255) {
              throw WireError("TXT character-string longer than 255 bytes");
            }
            writer.U8(static_cast<std::uint8_t>(s.size()));
            writer.Bytes(std::string_view(s));
          }
        } else if constexpr (std::is_same_v<T, SrvData>) {
          writer.U16(value.priority);
          writer.U16(value.weight);
          writer.U16(value.port);
          EncodeName(value.target, writer, offsets, /*allow_compression=*/false);
        }
      },
      rr.rdata);
}

void WriteRecord(const ResourceRecord& rr, WireWriter& writer,
                 NameOffsets& offsets, bool compress) {
  if (!RDataMatchesType(rr.type, rr.rdata)) {
    throw WireError("rdata does not match type " +
                    std::string(ToString(rr.type)) + " for " +
                    rr.owner.ToString());
  }
  if (rr.ttl > kMaxWireTtl) {
    throw WireError("ttl " + std::to_string(rr.ttl) + " exceeds 2^31-1");
  }
  EncodeName(rr.owner, writer, offsets, compress);
  writer.U16(static_cast<std::uint16_t>(rr.type));
  writer.U16(static_cast<std::uint16_t>(
      static_cast<std::uint16_t>(rr.rclass) | (rr.cache_flush ? 0x8000 : 0)));
  writer.U32(rr.ttl);
  const std::size_t length_at = writer.position();
  writer.U16(0);
  const std::size_t start = writer.position();
  WriteRData(rr, writer, offsets, compress);
  const std::size_t length = writer.position() - start;
  if (length > 0xFFFF) throw WireError("rdata longer than 65535 bytes");
  writer.PatchU16(length_at, static_cast<std::uint16_t>(length));
}

std::uint16_t SectionCount(std::size_t n) {
  if (n > 0xFFFF) throw WireError("section holds more than 65535 entries");
  return static_cast<std::uint16_t>(n);
}

void WriteMessage(const DnsMessage& msg, WireWriter& writer, bool compress) {
  if (static_cast<std::uint8_t>(msg.flags.rcode) > 4) {
    throw WireError("unsupported rcode");
  }
  std::uint16_t flags = 0;
  if (msg.flags.response) flags |= 0x8000;
  flags |= static_cast<std::uint16_t>((msg.flags.opcode & 0x0F) << 11);
  if (msg.flags.authoritative) flags |= 0x0400;
  if (msg.flags.truncated) flags |= 0x0200;
  if (msg.flags.recursion_desired) flags |= 0x0100;
  if (msg.flags.recursion_available) flags |= 0x0080;
  flags |= static_cast<std::uint16_t>(msg.flags.rcode);

  writer.U16(msg.id);
  writer.U16(flags);
  writer.U16(SectionCount(msg.questions.size()));
  writer.U16(SectionCount(msg.answers.size()));
  writer.U16(SectionCount(msg.authorities.size()));
  writer.U16(SectionCount(msg.additionals.size()));

  NameOffsets offsets;
  for (const auto& q : msg.questions) {
    EncodeName(q.qname, writer, offsets, compress);
    writer.U16(static_cast<std::uint16_t>(q.qtype));
    writer.U16(static_cast<std::uint16_t>(q.qclass));
  }
  for (const auto* section : {&msg.answers, &msg.authorities, &msg.additionals}) {
    for (const auto& rr : *section) WriteRecord(rr, writer, offsets, compress);
  }
  if (writer.position() > kMaxMessageSize) {
    throw WireError("message size " + std::to_string(writer.position()) +
                    " exceeds 65535");
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void Need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw WireParseError(pos_, std::string("truncated ") + what);
    }
  }

  std::uint8_t U8(const char* what) {
    Need(1, what);
    return data_[pos_++];
  }
  std::uint16_t U16(const char* what) {
    Need(2, what);
    const std::uint16_t v =
        static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t U32(const char* what) {
    const std::uint32_t hi = U16(what);
    const std::uint32_t lo = U16(what);
    return (hi << 16) | lo;
  }
  std::span<const std::uint8_t> Bytes(std::size_t n, const char* what) {
    Need(n, what);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  DomainName Name() {
    std::vector<std::string> labels;
    std::size_t wire_length = 1;
    std::size_t cursor = pos_;
    bool jumped = false;
    while (true) {
      if (cursor >= data_.size()) {
        throw WireParseError(cursor, "truncated name");
      }
      const std::uint8_t len = data_[cursor];
      if ((len & 0xC0) == 0xC0) {
        if (cursor + 1 >= data_.size()) {
          throw WireParseError(cursor, "truncated compression pointer");
        }
        const std::size_t target =
            static_cast<std::size_t>(((len & 0x3F) << 8) | data_[cursor + 1]);
        if (target >= cursor) {
          throw WireParseError(cursor, "compression pointer loop or forward "
                                       "reference to " +
                                           std::to_string(target));
        }
        if (target < kHeaderSize) {
          throw WireParseError(cursor, "compression pointer into header");
        }
        if (!jumped) pos_ = cursor + 2;
        jumped = true;
        cursor = target;
        continue;
      }
      if ((len & 0xC0) != 0) {
        throw WireParseError(cursor, "label length > 63 or unsupported label type");
      }
      if (len == 0) {
        if (!jumped) pos_ = cursor + 1;
        break;
      }
      if (cursor + 1 + len > data_.size()) {
        throw WireParseError(cursor, "truncated label");
      }
      wire_length += len + 1u;
      if (wire_length > kMaxNameWireLength) {
        throw WireParseError(cursor, "name longer than 255 bytes");
      }
      labels.emplace_back(reinterpret_cast<const char*>(&data_[cursor + 1]),
                          len);
      cursor += 1u + len;
    }
    return DomainName(std::move(labels));
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

RRType ReadType(Reader& reader, bool allow_any) {
  const std::size_t at = reader.position();
  const std::uint16_t code = reader.U16("type");
  const auto type = RRTypeFromCode(code);
  if (!type || (!allow_any && *type == RRType::kANY)) {
    throw WireParseError(at, "unknown RR type " + std::to_string(code));
  }
  return *type;
}

RData ReadRData(Reader& reader, RRType type, std::size_t rdlength) {
  const std::size_t start = reader.position();
  reader.Need(rdlength, "rdata");
  RData rdata;
  switch (type) {
    case RRType::kA: {
      Ipv4Address a;
      auto bytes = reader.Bytes(4, "A rdata");
      std::copy(bytes.begin(), bytes.end(), a.octets.begin());
      rdata = a;
      break;
    }
    case RRType::kAAAA: {
      Ipv6Address a;
      auto bytes = reader.Bytes(16, "AAAA rdata");
      std::copy(bytes.begin(), bytes.end(), a.octets.begin());
      rdata = a;
      break;
    }
    case RRType::kNS:
    case RRType::kCNAME:
    case RRType::kPTR:
      rdata = reader.Name();
      break;
    case RRType::kMX: {
      MxData mx;
      mx.preference = reader.U16("MX preference");
      mx.exchange = reader.Name();
      rdata = std::move(mx);
      break;
    }
    case RRType::kSOA: {
      SoaData soa;
      soa.mname = reader.Name();
      soa.rname = reader.Name();
      soa.serial = reader.U32("SOA serial");
      soa.refresh = reader.U32("SOA refresh");
      soa.retry = reader.U32("SOA retry");
      soa.expire = reader.U32("SOA expire");
      soa.minimum = reader.U32("SOA minimum");
      rdata = std::move(soa);
      break;
    }
    case RRType::kTXT: {
      TxtData txt;
      while (reader.position() < start + rdlength) {
        const std::uint8_t len = reader.U8("TXT length");
        auto bytes = reader.Bytes(len, "TXT string");
        txt.strings.emplace_back(reinterpret_cast<const char*>(bytes.data()),
                                 bytes.size());
      }
      rdata = std::move(txt);
      break;
    }
    case RRType::kSRV: {
      SrvData srv;
      srv.priority = reader.U16("SRV priority");
      srv.weight = reader.U16("SRV weight");
      srv.port = reader.U16("SRV port");
      srv.target = reader.Name();
      rdata = std::move(srv);
      break;
    }
    case RRType::kANY:
      throw WireParseError(start, "ANY is not a record type");
  }
  if (reader.position() != start + rdlength) {
    throw WireParseError(start, "rdata length mismatch for " +
                                    std::string(ToString(type)));
  }
  return rdata;
}

ResourceRecord ReadRecord(Reader& reader) {
  ResourceRecord rr;
  rr.owner = reader.Name();
  rr.type = ReadType(reader, /*allow_any=*/false);
  const std::size_t class_at = reader.position();
  const std::uint16_t rclass = reader.U16("class");
  if ((rclass & 0x7FFF) != static_cast<std::uint16_t>(RRClass::kIN)) {
    throw WireParseError(class_at, "unsupported class " + std::to_string(rclass));
  }
  rr.cache_flush = (rclass & 0x8000) != 0;
  const std::uint32_t ttl = reader.U32("ttl");
  // Values with the top bit set are treated as zero.
  rr.ttl = ttl > kMaxWireTtl ? 0 : ttl;
  const std::uint16_t rdlength = reader.U16("rdlength");
  rr.rdata = ReadRData(reader, rr.type, rdlength);
  return rr;
}

}  // namespace

std::size_t EncodeName(const DomainName& name, WireWriter& writer,
                       NameOffsets& offsets, bool allow_compression) {
  const std::size_t start = writer.position();
  const auto& labels = name.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::string key = SuffixKey(labels, i);
    if (allow_compression) {
      if (auto it = offsets.find(key); it != offsets.end()) {
        writer.U16(static_cast<std::uint16_t>(0xC000 | it->second));
        return writer.position() - start;
      }
    }
    if (writer.position() <= kMaxPointerOffset) {
      offsets.try_emplace(std::move(key),
                          static_cast<std::uint16_t>(writer.position()));
    }
    writer.U8(static_cast<std::uint8_t>(labels[i].size()));
    writer.Bytes(std::string_view(labels[i]));
  }
  writer.U8(0);
  return writer.position() - start;
}

std::vector<std::uint8_t> SerializeMessage(const DnsMessage& msg,
                                           bool compress) {
  std::vector<std::uint8_t> out;
  WireWriter writer(&out);
  WriteMessage(msg, writer, compress);
  return out;
}

std::size_t MessageWireSize(const DnsMessage& msg, bool compress) {
  WireWriter writer(nullptr);
  WriteMessage(msg, writer, compress);
  return writer.position();
}

DnsMessage ParseMessage(std::span<const std::uint8_t> wire) {
  if (wire.size() < kHeaderSize) {
    throw WireParseError(wire.size(), "message shorter than 12-byte header");
  }
  Reader reader(wire);
  DnsMessage msg;
  msg.id = reader.U16("id");
  const std::uint16_t flags = reader.U16("flags");
  msg.flags.response = (flags & 0x8000) != 0;
  msg.flags.opcode = static_cast<std::uint8_t>((flags >> 11) & 0x0F);
  msg.flags.authoritative = (flags & 0x0400) != 0;
  msg.flags.truncated = (flags & 0x0200) != 0;
  msg.flags.recursion_desired = (flags & 0x0100) != 0;
  msg.flags.recursion_available = (flags & 0x0080) != 0;
  const unsigned rcode = flags & 0x000F;
  if (rcode > 4) throw WireParseError(2, "unsupported rcode " + std::to_string(rcode));
  msg.flags.rcode = static_cast<Rcode>(rcode);

  const std::uint16_t qdcount = reader.U16("qdcount");
  const std::uint16_t ancount = reader.U16("ancount");
  const std::uint16_t nscount = reader.U16("nscount");
  const std::uint16_t arcount = reader.U16("arcount");

  for (unsigned i = 0; i < qdcount; ++i) {
    DnsQuestion q;
    q.qname = reader.Name();
    q.qtype = ReadType(reader, /*allow_any=*/true);
    const std::size_t class_at = reader.position();
    // Top bit is the mDNS unicast-response request; not modeled.
    if ((reader.U16("qclass") & 0x7FFF) != static_cast<std::uint16_t>(RRClass::kIN)) {
      throw WireParseError(class_at, "unsupported question class");
    }
    msg.questions.push_back(std::move(q));
  }
  for (unsigned i = 0; i < ancount; ++i) msg.answers.push_back(ReadRecord(reader));
  for (unsigned i = 0; i < nscount; ++i) msg.authorities.push_back(ReadRecord(reader));
  for (unsigned i = 0; i < arcount; ++i) msg.additionals.push_back(ReadRecord(reader));
  if (reader.remaining() != 0) {
    throw WireParseError(reader.position(), "trailing bytes after message");
  }
  return msg;
}

std::vector<std::uint8_t> ParseHexDump(std::string_view text) {
  std::vector<std::uint8_t> out;
  int pending = -1;
  bool comment = false;
  for (char c : text) {
    if (comment) {
      if (c == '\n') comment = false;
      continue;
    }
    if (c == '#') {
      comment = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int nibble;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      nibble = c - 'A' + 10;
    } else {
      throw std::invalid_argument(std::string("invalid hex character '") + c + "'");
    }
    if (pending < 0) {
      pending = nibble;
    } else {
      out.push_back(static_cast<std::uint8_t>((pending << 4) | nibble));
      pending = -1;
    }
  }
  if (pending >= 0) throw std::invalid_argument("odd number of hex digits");
  return out;
}

std::string ToHexDump(std::span<const std::uint8_t> bytes) {
  std::string out;
  char buffer[4];
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%02x", bytes[i]);
    out += buffer;
    out += ((i + 1) % 16 == 0 || i + 1 == bytes.size()) ? '\n' : ' ';
  }
  return out;
}

}  // namespace simnet::dns
