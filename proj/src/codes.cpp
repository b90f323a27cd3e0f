#include "dimlab/codes.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <algorithm>

#include "dimlab/error.hpp"

namespace dimlab {

BitString BitString::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw Error(errc::kMalformedCode, "bit strings use only 0 and 1");
    bits.push_back(c == '1');
  }
  return BitString(std::move(bits));
}

BitString BitString::from_uint(std::uint64_t value, int width) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) bits[static_cast<std::size_t>(i)] = (value >> (width - 1 - i)) & 1U;
  return BitString(std::move(bits));
}

BitString& BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  return *this;
}

BitString BitString::substr(std::size_t pos, std::size_t len) const {
  pos = std::min(pos, bits_.size());
  len = std::min(len, bits_.size() - pos);
  return BitString(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                                             bits_.begin() + static_cast<std::ptrdiff_t>(pos + len)));
}

bool BitString::starts_with(const BitString& prefix) const {
  return prefix.size() <= size() && std::equal(prefix.bits_.begin(), prefix.bits_.end(), bits_.begin());
}

std::string BitString::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] ? '1' : '0';
  return out;
}

bool BitReader::read() {
  if (pos_ >= bits_->size()) throw Error(errc::kMalformedCode, "unexpected end of code");
  return (*bits_)[pos_++] != 0;
}

std::uint64_t BitReader::read_uint(int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(read());
  return v;
}

BitString BitReader::read_bits(std::size_t n) {
  if (n > remaining()) throw Error(errc::kMalformedCode, "unexpected end of code");
  BitString out = bits_->substr(pos_, n);
  pos_ += n;
  return out;
}

namespace {

int bit_width(std::uint64_t n) { return static_cast<int>(std::bit_width(n)); }

void put_uint(BitString& out, std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back((value >> i) & 1U);
}

}  // namespace

std::size_t elias_delta_length(std::uint64_t n) {
  const int len = bit_width(n);
  const int lenlen = bit_width(static_cast<std::uint64_t>(len)) - 1;
  return static_cast<std::size_t>(2 * lenlen + 1 + len - 1);
}

BitString elias_delta(std::uint64_t n) {
  if (n == 0) throw Error(errc::kMalformedCode, "Elias delta is defined for n >= 1");
  BitString out;
  const int len = bit_width(n);
  const int lenlen = bit_width(static_cast<std::uint64_t>(len)) - 1;
  for (int i = 0; i < lenlen; ++i) out.push_back(false);
  put_uint(out, static_cast<std::uint64_t>(len), lenlen + 1);
  put_uint(out, n, len - 1);
  return out;
}

void encode_nat_into(std::uint64_t j, BitString& out) {
  if (j == UINT64_MAX) throw Error(errc::kMalformedCode, "natural too large for the code");
  const std::uint64_t n = j + 1;
  const int len = bit_width(n);
  const int lenlen = bit_width(static_cast<std::uint64_t>(len)) - 1;
  for (int i = 0; i < lenlen; ++i) out.push_back(false);
  put_uint(out, static_cast<std::uint64_t>(len), lenlen + 1);
  put_uint(out, n, len - 1);
}

BitString encode_nat(std::uint64_t j) {
  BitString out;
  encode_nat_into(j, out);
  return out;
}

std::size_t nat_code_length(std::uint64_t j) { return elias_delta_length(j + 1); }

std::uint64_t decode_nat(BitReader& in) {
  int lenlen = 0;
  while (!in.read()) {
    if (++lenlen > 6) throw Error(errc::kMalformedCode, "delta code length field too long");
  }
  std::uint64_t len = 1;
  for (int i = 0; i < lenlen; ++i) len = (len << 1) | static_cast<std::uint64_t>(in.read());
  if (len > 64) throw Error(errc::kMalformedCode, "delta code exceeds 64 bits");
  std::uint64_t n = 1;
  for (std::uint64_t i = 1; i < len; ++i) n = (n << 1) | static_cast<std::uint64_t>(in.read());
  if (n == 0) throw Error(errc::kMalformedCode, "delta code overflow");
  return n - 1;
}

std::uint64_t decode_nat(const BitString& code) {
  BitReader in(code);
  std::uint64_t j = decode_nat(in);
  if (!in.at_end()) throw Error(errc::kMalformedCode, "trailing bits after codeword");
  return j;
}

BitString encode_nat_big(const Integer& j) {
  if (j < 0) throw Error(errc::kMalformedCode, "negative natural");
  Integer n = j + 1;
  const std::size_t len = mpz_sizeinbase(n.get_mpz_t(), 2);
  BitString out;
  const int lenlen = bit_width(len) - 1;
  for (int i = 0; i < lenlen; ++i) out.push_back(false);
  put_uint(out, len, lenlen + 1);
  for (std::size_t i = len - 1; i-- > 0;) out.push_back(mpz_tstbit(n.get_mpz_t(), i) != 0);
  return out;
}

Integer decode_nat_big(BitReader& in) {
  int lenlen = 0;
  while (!in.read()) {
    if (++lenlen > 40) throw Error(errc::kMalformedCode, "delta code length field too long");
  }
  std::uint64_t len = 1;
  for (int i = 0; i < lenlen; ++i) len = (len << 1) | static_cast<std::uint64_t>(in.read());
  Integer n = 1;
  for (std::uint64_t i = 1; i < len; ++i) {
    n *= 2;
    if (in.read()) n += 1;
  }
  return n - 1;
}

double nat_code_slack(std::uint64_t j) {
  const double x = static_cast<double>(j);
  return static_cast<double>(nat_code_length(j)) - std::log2(1.0 + x) -
         2.0 * std::log2(std::log2(2.0 + x));
}

namespace {

// Counting lattice points by squared norm, memoized per (m, N).
class LatticeCounter {
 public:
  // #{b in Z^m : |b|^2 == n}
  Integer sphere(int m, std::uint64_t n) {
    if (m == 0) return n == 0 ? 1 : 0;
    auto key = std::make_pair(m, n);
    if (auto it = sphere_.find(key); it != sphere_.end()) return it->second;
    Integer total = 0;
    const std::uint64_t root = isqrt(n);
    for (std::uint64_t t = 0; t <= root; ++t) {
      Integer c = sphere(m - 1, n - t * t);
      total += t == 0 ? c : 2 * c;
    }
    sphere_.emplace(key, total);
    return total;
  }

  // #{b in Z^m : |b|^2 < n}
  Integer ball(int m, std::uint64_t n) {
    if (n == 0) return 0;
    if (m == 0) return 1;
    auto key = std::make_pair(m, n);
    if (auto it = ball_.find(key); it != ball_.end()) return it->second;
    Integer total = 0;
    const std::uint64_t root = isqrt(n - 1);
    for (std::uint64_t t = 0; t <= root; ++t) {
      Integer c = ball(m - 1, n - t * t);
      total += t == 0 ? c : 2 * c;
    }
    ball_.emplace(key, total);
    return total;
  }

  static std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
  }

 private:
  std::map<std::pair<int, std::uint64_t>, Integer> sphere_;
  std::map<std::pair<int, std::uint64_t>, Integer> ball_;
};

LatticeCounter& counter() {
  thread_local LatticeCounter c;
  return c;
}

std::uint64_t norm_sq(const std::vector<Integer>& a) {
  Integer n = 0;
  for (const Integer& v : a) n += v * v;
  if (!n.fits_ulong_p()) throw Error(errc::kInvalidPoint, "lattice point too far from origin");
  return n.get_ui();
}

}  // namespace

Integer lattice_index(const std::vector<Integer>& a) {
  const int m = static_cast<int>(a.size());
  if (m < 1) throw Error(errc::kInvalidPoint, "lattice dimension must be >= 1");
  LatticeCounter& c = counter();
  std::uint64_t rem = norm_sq(a);
  Integer index = c.ball(m, rem);
  for (int i = 0; i < m; ++i) {
    const long long ai = a[static_cast<std::size_t>(i)].get_si();
    const auto root = static_cast<long long>(LatticeCounter::isqrt(rem));
    for (long long t = -root; t < ai; ++t) {
      index += c.sphere(m - i - 1, rem - static_cast<std::uint64_t>(t * t));
    }
    rem -= static_cast<std::uint64_t>(ai * ai);
  }
  return index;
}

std::vector<Integer> lattice_point_at(const Integer& index, int m) {
  if (m < 1) throw Error(errc::kInvalidPoint, "lattice dimension must be >= 1");
  LatticeCounter& c = counter();
  std::uint64_t n = 0;
  while (c.ball(m, n + 1) <= index) ++n;
  Integer k = index - c.ball(m, n);
  std::vector<Integer> out;
  std::uint64_t rem = n;
  for (int i = 0; i < m; ++i) {
    const auto root = static_cast<long long>(LatticeCounter::isqrt(rem));
    for (long long t = -root; t <= root; ++t) {
      Integer cnt = c.sphere(m - i - 1, rem - static_cast<std::uint64_t>(t * t));
      if (k < cnt) {
        out.emplace_back(static_cast<long>(t));
        rem -= static_cast<std::uint64_t>(t * t);
        break;
      }
      k -= cnt;
    }
  }
  return out;
}

BitString encode_lattice(const std::vector<Integer>& a) { return encode_nat_big(lattice_index(a)); }

std::vector<Integer> decode_lattice(BitReader& in, int m) {
  return lattice_point_at(decode_nat_big(in), m);
}

double lattice_code_slack(const std::vector<Integer>& a) {
  const double norm = std::sqrt(static_cast<double>(norm_sq(a)));
  const double m = static_cast<double>(a.size());
  return static_cast<double>(encode_lattice(a).size()) - m * std::log2(1.0 + norm) -
         2.0 * std::log2(std::log2(2.0 + norm));
}

BitString encode_pair(const BitString& u, const BitString& v) {
  BitString out;
  encode_nat_into(u.size(), out);
  out.append(u);
  out.append(v);
  return out;
}

std::pair<BitString, BitString> decode_pair(const BitString& code) {
  BitReader in(code);
  const std::uint64_t len = decode_nat(in);
  if (len > in.remaining()) throw Error(errc::kMalformedCode, "pair code truncated");
  BitString u = in.read_bits(len);
  BitString v = in.read_bits(in.remaining());
  return {std::move(u), std::move(v)};
}

}  // namespace dimlab
