#include "smoothed/bits.hpp"

#include "smoothed/numeric.hpp"

namespace smoothed {

BitString BitString::from_string(std::string_view text) {
  BitString out;
  out.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw EncodingError("bit string contains '" + std::string(1, c) + "'");
    out.bits_.push_back(c == '1');
  }
  return out;
}

BitString BitString::from_uint(std::uint64_t value, unsigned width) {
  BitString out;
  out.append_uint(value, width);
  return out;
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void BitString::append_uint(std::uint64_t value, unsigned width) {
  if (width > 64) throw EncodingError("field wider than 64 bits");
  if (width < 64 && (value >> width) != 0) throw EncodingError("value does not fit field width");
  for (unsigned i = width; i-- > 0;) bits_.push_back(((value >> i) & 1u) != 0);
}

std::uint64_t BitString::read_uint(std::size_t offset, unsigned width) const {
  if (width > 64 || offset + width > bits_.size()) throw EncodingError("field out of range");
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | (bits_[offset + i] ? 1u : 0u);
  return v;
}

BitString BitString::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > bits_.size()) throw EncodingError("slice out of range");
  BitString out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                   bits_.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return out;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::size_t BitStringHash::operator()(const BitString& s) const {
  // FNV-1a over bits, length folded in.
  std::uint64_t h = 1469598103934665603ull ^ s.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    h ^= s[i] ? 0x9bu : 0x31u;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace smoothed
