#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dimlab/complexity.hpp"
#include "dimlab/error.hpp"

namespace dimlab {

namespace {

// floor(num * b^D / 2^p) as exactly D base-b digits, most significant first.
std::vector<int> base_digits(const Integer& num, int p, int b, int D) {
  Integer scaled;
  mpz_ui_pow_ui(scaled.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(D));
  scaled *= num;
  mpz_fdiv_q_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
  const std::string s = scaled.get_str(b);
  std::vector<int> out(static_cast<std::size_t>(D), 0);
  const std::size_t pad = out.size() - std::min(out.size(), s.size());
  for (std::size_t i = 0; i + pad < out.size(); ++i) out[pad + i] = s[i] - '0';
  return out;
}

struct Kt {
  std::vector<double> counts;
  double total = 0.0;
  double bits = 0.0;

  explicit Kt(int b) : counts(static_cast<std::size_t>(b), 0.0) {}
  double cost(int c) const {
    return -std::log2((counts[static_cast<std::size_t>(c)] + 0.5) / (total + 0.5 * counts.size()));
  }
  void add(int c) {
    bits += cost(c);
    counts[static_cast<std::size_t>(c)] += 1.0;
    total += 1.0;
  }
};

// Cheapest base-b cylinder [0.d_1..d_k, +b^-k) inside [f, f+1) / 2^p, costed
// as |enc(k)| plus the adaptive (KT) code length of its digits.
double coordinate_cost(const Integer& f, int p, int b) {
  if (p == 0) return static_cast<double>(nat_code_length(0));
  const int D = static_cast<int>(std::ceil(p * std::log(2.0) / std::log(static_cast<double>(b)))) + 64;
  const std::vector<int> lo = base_digits(f, p, b, D);
  Integer upper = f + 1;
  const bool hi_is_one = mpz_sizeinbase(upper.get_mpz_t(), 2) == static_cast<std::size_t>(p) + 1;
  std::vector<int> hi = hi_is_one ? std::vector<int>(static_cast<std::size_t>(D), 0) : base_digits(upper, p, b, D);
  if (hi_is_one) hi[0] = b;

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Kt& kt, int depth, int c) {
    best = std::min(best, kt.bits + kt.cost(c) + static_cast<double>(nat_code_length(static_cast<std::uint64_t>(depth))));
  };
  Kt kt(b);
  int j = 0;
  while (j < D && lo[static_cast<std::size_t>(j)] == hi[static_cast<std::size_t>(j)]) kt.add(lo[static_cast<std::size_t>(j++)]);
  if (j == D) return best;
  for (int c = lo[static_cast<std::size_t>(j)] + 1; c < hi[static_cast<std::size_t>(j)]; ++c) consider(kt, j + 1, c);

  Kt lo_path = kt;
  lo_path.add(lo[static_cast<std::size_t>(j)]);
  for (int i = j + 1; i < D && lo_path.bits < best; ++i) {
    for (int c = lo[static_cast<std::size_t>(i)] + 1; c < b; ++c) consider(lo_path, i + 1, c);
    lo_path.add(lo[static_cast<std::size_t>(i)]);
  }
  if (!hi_is_one) {
    Kt hi_path = kt;
    hi_path.add(hi[static_cast<std::size_t>(j)]);
    for (int i = j + 1; i < D && hi_path.bits < best; ++i) {
      for (int c = 0; c < hi[static_cast<std::size_t>(i)]; ++c) consider(hi_path, i + 1, c);
      hi_path.add(hi[static_cast<std::size_t>(i)]);
    }
  }
  return best;
}

}  // namespace

double radix_expansion_cost(const BitString& w) {
  DyadicPoint q;
  try {
    q = decode_point(w);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
  const int p = q.precision();
  const std::size_t payload = static_cast<std::size_t>(q.dim()) * static_cast<std::size_t>(p);
  const double header = static_cast<double>(w.size() - payload);
  double best = std::numeric_limits<double>::infinity();
  for (int b : kRadixBases) {
    double total = kRadixSelectorBits + header;
    for (int i = 0; i < q.dim() && total < best; ++i) {
      Integer f = abs(q.num(i));
      mpz_fdiv_r_2exp(f.get_mpz_t(), f.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
      total += coordinate_cost(f, p, b);
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace dimlab
