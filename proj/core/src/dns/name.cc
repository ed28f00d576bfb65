#include "simnet/dns/name.h"

#include <algorithm>

namespace simnet::dns {

namespace {

char AsciiLower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::strong_ordering CompareLabel(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ca = static_cast<unsigned char>(AsciiLower(a[i]));
    const auto cb = static_cast<unsigned char>(AsciiLower(b[i]));
    if (ca != cb) return ca <=> cb;
  }
  return a.size() <=> b.size();
}

}  // namespace

bool LabelEquals(std::string_view a, std::string_view b) {
  return CompareLabel(a, b) == std::strong_ordering::equal;
}

DomainName::DomainName(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  Validate();
}

DomainName DomainName::Parse(std::string_view text) {
  if (text.empty() || text == ".") return DomainName();
  if (text.back() == '.') text.remove_suffix(1);
  std::vector<std::string> labels;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    const std::string_view label = text.substr(start, dot - start);
    if (label.empty()) {
      throw NameError("empty label in '" + std::string(text) + "'");
    }
    labels.emplace_back(label);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return DomainName(std::move(labels));
}

void DomainName::Validate() const {
  for (const auto& label : labels_) {
    if (label.empty() || label.size() > kMaxLabelLength) {
      throw NameError("label length " + std::to_string(label.size()) +
                      " outside [1,63]");
    }
  }
  if (WireLength() > kMaxNameWireLength) {
    throw NameError("name wire length " + std::to_string(WireLength()) +
                    " exceeds 255");
  }
}

std::size_t DomainName::WireLength() const {
  std::size_t length = 1;
  for (const auto& label : labels_) length += label.size() + 1;
  return length;
}

std::string DomainName::ToString() const {
  if (labels_.empty()) return ".";
  std::string out;
  for (const auto& label : labels_) {
    out += label;
    out += '.';
  }
  return out;
}

std::string DomainName::CanonicalKey() const {
  std::string out = ToString();
  std::transform(out.begin(), out.end(), out.begin(), AsciiLower);
  return out;
}

bool DomainName::IsSubdomainOf(const DomainName& ancestor) const {
  if (ancestor.labels_.size() > labels_.size()) return false;
  const std::size_t offset = labels_.size() - ancestor.labels_.size();
  for (std::size_t i = 0; i < ancestor.labels_.size(); ++i) {
    if (!LabelEquals(labels_[offset + i], ancestor.labels_[i])) return false;
  }
  return true;
}

DomainName DomainName::Suffix(std::size_t count) const {
  DomainName out;
  if (count >= labels_.size()) return out;
  out.labels_.assign(labels_.begin() + static_cast<std::ptrdiff_t>(count),
                     labels_.end());
  return out;
}

DomainName DomainName::Concat(const DomainName& origin) const {
  std::vector<std::string> labels = labels_;
  labels.insert(labels.end(), origin.labels_.begin(), origin.labels_.end());
  return DomainName(std::move(labels));
}

DomainName DomainName::Prepend(std::string label) const {
  std::vector<std::string> labels;
  labels.reserve(labels_.size() + 1);
  labels.push_back(std::move(label));
  labels.insert(labels.end(), labels_.begin(), labels_.end());
  return DomainName(std::move(labels));
}

bool operator==(const DomainName& a, const DomainName& b) {
  if (a.labels_.size() != b.labels_.size()) return false;
  for (std::size_t i = 0; i < a.labels_.size(); ++i) {
    if (!LabelEquals(a.labels_[i], b.labels_[i])) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const DomainName& a, const DomainName& b) {
  auto ia = a.labels_.rbegin();
  auto ib = b.labels_.rbegin();
  for (; ia != a.labels_.rend() && ib != b.labels_.rend(); ++ia, ++ib) {
    const auto cmp = CompareLabel(*ia, *ib);
    if (cmp != std::strong_ordering::equal) return cmp;
  }
  return a.labels_.size() <=> b.labels_.size();
}

}  // namespace simnet::dns
