#ifndef SIMNET_DNS_WIRE_H_
#define SIMNET_DNS_WIRE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "simnet/dns/message.h"

namespace simnet::dns {

inline constexpr std::size_t kHeaderSize = 12;
inline constexpr std::size_t kMaxMessageSize = 65535;
inline constexpr std::uint16_t kMaxPointerOffset = 0x3FFF;
inline constexpr std::uint32_t kMaxWireTtl = 0x7FFFFFFF;

// Encoding failure: oversized message, TTL out of range, rdata/type mismatch.
class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decoding failure at a specific byte offset of the input.
class WireParseError : public std::runtime_error {
 public:
  WireParseError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Byte sink that either materializes bytes or only counts them, so size
// computation shares the exact code path of serialization.
class WireWriter {
 public:
  // `out == nullptr` selects counting mode.
  explicit WireWriter(std::vector<std::uint8_t>* out) : out_(out) {}

  std::size_t position() const { return position_; }
  bool counting() const { return out_ == nullptr; }

  void U8(std::uint8_t value);
  void U16(std::uint16_t value);
  void U32(std::uint32_t value);
  void Bytes(std::span<const std::uint8_t> bytes);
  void Bytes(std::string_view bytes);
  // Overwrites a previously written big-endian u16 (no-op when counting).
  void PatchU16(std::size_t at, std::uint16_t value);

 private:
  std::vector<std::uint8_t>* out_;
  std::size_t position_ = 0;
};

// Previously emitted name suffixes, keyed by their exact label bytes, mapped
// to the stream offset where they start.
using NameOffsets = std::unordered_map<std::string, std::uint16_t>;

// Emits `name`, replacing the longest already-emitted suffix with a pointer
// when `allow_compression` is set. Registers every newly emitted suffix whose
// offset fits in 14 bits. Returns the number of bytes written.
std::size_t EncodeName(const DomainName& name, WireWriter& writer,
                       NameOffsets& offsets, bool allow_compression);

std::vector<std::uint8_t> SerializeMessage(const DnsMessage& msg,
                                           bool compress);

// Length of SerializeMessage(msg, compress) without materializing the bytes.
std::size_t MessageWireSize(const DnsMessage& msg, bool compress);

DnsMessage ParseMessage(std::span<const std::uint8_t> wire);

// Hex helpers for golden fixtures: whitespace and '#' comments are ignored.
std::vector<std::uint8_t> ParseHexDump(std::string_view text);
std::string ToHexDump(std::span<const std::uint8_t> bytes);

}  // namespace simnet::dns

#endif  // SIMNET_DNS_WIRE_H_
