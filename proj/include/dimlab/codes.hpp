#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dimlab/core.hpp"

namespace dimlab {

/// Finite binary sequence, one bit per byte.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}
  /// From a string of '0' and '1' characters.
  static BitString from_string(std::string_view text);
  /// The low `width` bits of `value`, most significant first.
  static BitString from_uint(std::uint64_t value, int width);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
  BitString& append(const BitString& other);
  BitString substr(std::size_t pos, std::size_t len) const;
  bool starts_with(const BitString& prefix) const;
  std::string to_string() const;

  friend BitString operator+(BitString a, const BitString& b) { return a.append(b); }
  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Sequential reader; running off the end raises codes.MalformedCode.
class BitReader {
 public:
  explicit BitReader(const BitString& bits, std::size_t pos = 0) : bits_(&bits), pos_(pos) {}
  bool read();
  std::uint64_t read_uint(int width);
  BitString read_bits(std::size_t n);
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_->size() - pos_; }
  bool at_end() const { return pos_ == bits_->size(); }
  const BitString& source() const { return *bits_; }

 private:
  const BitString* bits_;
  std::size_t pos_;
};

/// Elias delta code of n >= 1.
BitString elias_delta(std::uint64_t n);
std::size_t elias_delta_length(std::uint64_t n);

/// Prefix-free code of j >= 0: the Elias delta code of j + 1.
BitString encode_nat(std::uint64_t j);
void encode_nat_into(std::uint64_t j, BitString& out);
std::size_t nat_code_length(std::uint64_t j);
std::uint64_t decode_nat(BitReader& in);
/// Whole-string decode; trailing bits are malformed.
std::uint64_t decode_nat(const BitString& code);

/// The same code for arbitrarily large naturals.
BitString encode_nat_big(const Integer& j);
Integer decode_nat_big(BitReader& in);

/// |encode_nat(j)| - log2(1+j) - 2 log2 log2(2+j); its maximum is the
/// audited constant c0 of the log + 2 loglog bound.
double nat_code_slack(std::uint64_t j);

/// Position of a in the enumeration of Z^m ordered by squared Euclidean norm,
/// ties broken lexicographically (so -1 precedes +1).
Integer lattice_index(const std::vector<Integer>& a);
std::vector<Integer> lattice_point_at(const Integer& index, int m);
BitString encode_lattice(const std::vector<Integer>& a);
std::vector<Integer> decode_lattice(BitReader& in, int m);
/// |encode_lattice(a)| - m log2(1+|a|) - 2 log2 log2(2+|a|): audited constant c.
double lattice_code_slack(const std::vector<Integer>& a);

/// encode_nat(|u|) u v.
BitString encode_pair(const BitString& u, const BitString& v);
/// Inverse of encode_pair: v is whatever follows u.
std::pair<BitString, BitString> decode_pair(const BitString& code);

}  // namespace dimlab
