#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace smoothed {

/// Fixed-length bit string. Ordering is lexicographic, which for strings
/// of equal length coincides with the order of the big-endian integers
/// they encode.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t length, bool fill = false) : bits_(length, fill) {}

  static BitString from_string(std::string_view text);
  static BitString from_uint(std::uint64_t value, unsigned width);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_[i] = value; }

  void push_back(bool bit) { bits_.push_back(bit); }
  void append(const BitString& other);
  /// Appends `value` as a big-endian field of `width` bits.
  void append_uint(std::uint64_t value, unsigned width);
  std::uint64_t read_uint(std::size_t offset, unsigned width) const;
  BitString slice(std::size_t offset, std::size_t length) const;

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (a.bits_ < b.bits_) return std::strong_ordering::less;
    if (b.bits_ < a.bits_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  std::vector<bool> bits_;
};

struct BitStringHash {
  std::size_t operator()(const BitString& s) const;
};

}  // namespace smoothed
