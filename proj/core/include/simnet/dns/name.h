#ifndef SIMNET_DNS_NAME_H_
#define SIMNET_DNS_NAME_H_

#include <compare>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace simnet::dns {

inline constexpr std::size_t kMaxLabelLength = 63;
inline constexpr std::size_t kMaxNameWireLength = 255;

// Thrown when a name violates the label or total-length limits.
class NameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An absolute domain name stored as its label sequence (root = no labels).
//
// Label bytes are preserved exactly; equality and ordering ignore ASCII case.
// Ordering is the canonical DNS order: labels compared right to left.
class DomainName {
 public:
  DomainName() = default;
  explicit DomainName(std::vector<std::string> labels);

  // Accepts "a.b.c", "a.b.c." and "." (root). No escape sequences.
  static DomainName Parse(std::string_view text);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t label_count() const { return labels_.size(); }
  bool IsRoot() const { return labels_.empty(); }

  // Uncompressed wire length including the terminal zero octet.
  std::size_t WireLength() const;

  // Dotted form with trailing dot; root renders as ".".
  std::string ToString() const;

  // Lower-cased dotted form, usable as a map key.
  std::string CanonicalKey() const;

  // True when this name equals `ancestor` or lies below it.
  bool IsSubdomainOf(const DomainName& ancestor) const;

  // Name with the leftmost `count` labels removed.
  DomainName Suffix(std::size_t count) const;
  DomainName Parent() const { return Suffix(1); }

  // Appends `origin` to this (relative) name.
  DomainName Concat(const DomainName& origin) const;
  DomainName Prepend(std::string label) const;

  friend bool operator==(const DomainName& a, const DomainName& b);
  friend std::strong_ordering operator<=>(const DomainName& a,
                                          const DomainName& b);

 private:
  void Validate() const;

  std::vector<std::string> labels_;
};

bool LabelEquals(std::string_view a, std::string_view b);

inline std::ostream& operator<<(std::ostream& os, const DomainName& name) {
  return os << name.ToString();
}

}  // namespace simnet::dns

#endif  // SIMNET_DNS_NAME_H_
