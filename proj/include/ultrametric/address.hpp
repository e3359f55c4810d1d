#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace umw {

/// Digit sequence locating a vertex relative to the top vertex. The empty
/// sequence is the top vertex; a full-length sequence is a leaf ball.
class TreeAddress {
 public:
  using Digit = std::uint32_t;

  TreeAddress() = default;
  explicit TreeAddress(std::vector<Digit> digits) : digits_(std::move(digits)) {}
  TreeAddress(std::initializer_list<Digit> digits) : digits_(digits) {}

  std::span<const Digit> digits() const { return digits_; }
  std::size_t size() const { return digits_.size(); }
  bool empty() const { return digits_.empty(); }
  Digit operator[](std::size_t k) const { return digits_[k]; }

  /// True when this address is a prefix of (or equal to) `other`.
  bool is_prefix_of(const TreeAddress& other) const {
    return digits_.size() <= other.digits_.size() &&
           std::equal(digits_.begin(), digits_.end(), other.digits_.begin());
  }

  TreeAddress prefix(std::size_t n) const {
    return TreeAddress(std::vector<Digit>(digits_.begin(), digits_.begin() + std::min(n, size())));
  }

  TreeAddress child(Digit d) const {
    auto digits = digits_;
    digits.push_back(d);
    return TreeAddress(std::move(digits));
  }

  /// Lexicographic on digits, so that a prefix sorts before its extensions.
  friend auto operator<=>(const TreeAddress&, const TreeAddress&) = default;
  friend bool operator==(const TreeAddress&, const TreeAddress&) = default;

 private:
  std::vector<Digit> digits_;
};

/// Longest common prefix.
inline TreeAddress common_prefix(const TreeAddress& a, const TreeAddress& b) {
  std::size_t n = 0;
  const std::size_t limit = std::min(a.size(), b.size());
  while (n < limit && a[n] == b[n]) ++n;
  return a.prefix(n);
}

inline constexpr std::string_view kTopToken = "top";

/// Concatenated single characters when `separated` is false, otherwise
/// dot-separated decimal digits. The top vertex renders as "top".
inline std::string format_address(const TreeAddress& a, bool separated) {
  if (a.empty()) return std::string(kTopToken);
  std::string out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (separated && k > 0) out.push_back('.');
    if (separated)
      out += std::to_string(a[k]);
    else
      out.push_back(static_cast<char>('0' + a[k]));
  }
  return out;
}

/// Inverse of format_address. Any text containing a '.' is read as
/// dot-separated; otherwise `separated` decides between one digit per
/// character and a single multi-character digit.
inline TreeAddress parse_address(std::string_view text, bool separated) {
  if (text.empty() || text == kTopToken) return {};
  std::vector<TreeAddress::Digit> digits;
  auto parse_token = [&](std::string_view tok) {
    if (tok.empty()) throw std::invalid_argument("empty digit in address '" + std::string(text) + "'");
    TreeAddress::Digit v = 0;
    for (char c : tok) {
      if (c < '0' || c > '9')
        throw std::invalid_argument("bad character in address '" + std::string(text) + "'");
      v = v * 10 + static_cast<TreeAddress::Digit>(c - '0');
    }
    digits.push_back(v);
  };
  if (separated || text.find('.') != std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      auto dot = text.find('.', start);
      parse_token(text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
  } else {
    for (char c : text) parse_token(std::string_view(&c, 1));
  }
  return TreeAddress(std::move(digits));
}

}  // namespace umw
