#include "dimlab/core.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "dimlab/error.hpp"
#include "dimlab/random.hpp"

namespace dimlab {

namespace {

Integer pow2(unsigned long e) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, e);
  return out;
}

Integer shl(const Integer& v, long e) {
  Integer out;
  mpz_mul_2exp(out.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  return out;
}

// floor(v / 2^e)
Integer floor_shr(const Integer& v, long e) {
  Integer out;
  mpz_fdiv_q_2exp(out.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  return out;
}

Integer align(const Integer& v, int from, int to) {
  return to >= from ? shl(v, to - from) : floor_shr(v, from - to);
}

}  // namespace

DyadicPoint::DyadicPoint(std::vector<Integer> numerators, int precision)
    : nums_(std::move(numerators)), precision_(precision) {
  if (nums_.empty()) throw Error(errc::kInvalidPoint, "dimension must be >= 1");
  if (precision_ < 0) throw Error(errc::kInvalidPoint, "precision must be >= 0");
}

DyadicPoint DyadicPoint::zero(int dim, int precision) {
  return DyadicPoint(std::vector<Integer>(static_cast<std::size_t>(dim)), precision);
}

DyadicPoint DyadicPoint::floor_of(std::span<const Rational> coords, int precision) {
  std::vector<Integer> nums;
  nums.reserve(coords.size());
  for (const Rational& c : coords) {
    Integer scaled = shl(c.get_num(), precision);
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), c.get_den_mpz_t());
    nums.push_back(std::move(q));
  }
  return DyadicPoint(std::move(nums), precision);
}

DyadicPoint DyadicPoint::refined(int p) const {
  if (p < precision_) throw Error(errc::kInvalidPoint, "refined() cannot lower precision");
  std::vector<Integer> out;
  out.reserve(nums_.size());
  for (const Integer& n : nums_) out.push_back(shl(n, p - precision_));
  return DyadicPoint(std::move(out), p);
}

DyadicPoint DyadicPoint::reduced() const {
  int drop = precision_;
  for (const Integer& n : nums_) {
    if (n == 0) continue;
    int tz = static_cast<int>(mpz_scan1(n.get_mpz_t(), 0));
    drop = std::min(drop, tz);
  }
  if (drop == 0) return *this;
  std::vector<Integer> out;
  out.reserve(nums_.size());
  for (const Integer& n : nums_) out.push_back(floor_shr(n, drop));
  return DyadicPoint(std::move(out), precision_ - drop);
}

DyadicPoint DyadicPoint::floored(int p) const {
  if (p >= precision_) return *this;
  std::vector<Integer> out;
  out.reserve(nums_.size());
  for (const Integer& n : nums_) out.push_back(floor_shr(n, precision_ - p));
  return DyadicPoint(std::move(out), p);
}

Rational DyadicPoint::coord(int i) const {
  Rational q(num(i), pow2(static_cast<unsigned long>(precision_)));
  q.canonicalize();
  return q;
}

double DyadicPoint::approx(int i) const { return coord(i).get_d(); }

DyadicPoint DyadicPoint::joined(const DyadicPoint& other) const {
  int p = std::max(precision_, other.precision_);
  std::vector<Integer> out;
  out.reserve(nums_.size() + other.nums_.size());
  for (const Integer& n : nums_) out.push_back(shl(n, p - precision_));
  for (const Integer& n : other.nums_) out.push_back(shl(n, p - other.precision_));
  return DyadicPoint(std::move(out), p);
}

DyadicPoint DyadicPoint::translated(const DyadicPoint& offset) const {
  if (offset.dim() != dim()) throw Error(errc::kInvalidPoint, "translation dimension mismatch");
  int p = std::max(precision_, offset.precision_);
  std::vector<Integer> out;
  out.reserve(nums_.size());
  for (std::size_t i = 0; i < nums_.size(); ++i) {
    out.push_back(shl(nums_[i], p - precision_) + shl(offset.nums_[i], p - offset.precision_));
  }
  return DyadicPoint(std::move(out), p);
}

std::string DyadicPoint::to_text() const {
  std::string out = std::to_string(dim()) + " " + std::to_string(precision_);
  for (const Integer& n : nums_) {
    out += ' ';
    out += n.get_str();
  }
  return out;
}

DyadicPoint DyadicPoint::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  int n = 0;
  int p = 0;
  if (!(in >> n >> p) || n < 1 || p < 0) {
    throw Error(errc::kInvalidPoint, "bad point header in '" + std::string(text) + "'");
  }
  std::vector<Integer> nums;
  for (int i = 0; i < n; ++i) {
    std::string tok;
    if (!(in >> tok)) throw Error(errc::kInvalidPoint, "missing numerator");
    Integer v;
    if (v.set_str(tok, 10) != 0) throw Error(errc::kInvalidPoint, "bad numerator '" + tok + "'");
    nums.push_back(std::move(v));
  }
  std::string extra;
  if (in >> extra) throw Error(errc::kInvalidPoint, "trailing tokens in point text");
  return DyadicPoint(std::move(nums), p);
}

bool operator==(const DyadicPoint& a, const DyadicPoint& b) {
  if (a.dim() != b.dim()) return false;
  int p = std::max(a.precision_, b.precision_);
  for (std::size_t i = 0; i < a.nums_.size(); ++i) {
    if (shl(a.nums_[i], p - a.precision_) != shl(b.nums_[i], p - b.precision_)) return false;
  }
  return true;
}

bool lex_less(const DyadicPoint& a, const DyadicPoint& b) {
  int p = std::max(a.precision_, b.precision_);
  std::size_t n = std::min(a.nums_.size(), b.nums_.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(shl(a.nums_[i], p - a.precision_), shl(b.nums_[i], p - b.precision_));
    if (c != 0) return c < 0;
  }
  return a.nums_.size() < b.nums_.size();
}

namespace {

// sum_i (a_i - b_i)^2 at common precision P, together with P.
Integer scaled_squared_distance(const DyadicPoint& a, const DyadicPoint& b, int& precision) {
  if (a.dim() != b.dim()) throw Error(errc::kInvalidPoint, "distance between different dimensions");
  int p = std::max(a.precision(), b.precision());
  Integer sum = 0;
  Integer d;
  for (int i = 0; i < a.dim(); ++i) {
    d = shl(a.num(i), p - a.precision()) - shl(b.num(i), p - b.precision());
    sum += d * d;
  }
  precision = p;
  return sum;
}

}  // namespace

Rational squared_distance(const DyadicPoint& a, const DyadicPoint& b) {
  int p = 0;
  Integer s = scaled_squared_distance(a, b, p);
  Rational q(s, pow2(2UL * static_cast<unsigned long>(p)));
  q.canonicalize();
  return q;
}

bool strictly_within(const DyadicPoint& a, const DyadicPoint& b, int radius_exp) {
  int p = 0;
  Integer s = scaled_squared_distance(a, b, p);
  if (p >= radius_exp) return s < pow2(2UL * static_cast<unsigned long>(p - radius_exp));
  return shl(s, 2L * (radius_exp - p)) < 1;
}

Ball::Ball(DyadicPoint c, int r) : center(std::move(c)), radius_exp(r) {
  if (r < 0) throw Error(errc::kInvalidPoint, "ball radius exponent must be >= 0");
}

RationalSource::RationalSource(std::vector<Rational> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw Error(errc::kInvalidPoint, "dimension must be >= 1");
  for (Rational& c : coords_) c.canonicalize();
}

SourcePtr RationalSource::make(std::vector<Rational> coords) {
  return std::make_shared<RationalSource>(std::move(coords));
}

SourcePtr RationalSource::from_dyadic(const DyadicPoint& p) {
  std::vector<Rational> coords;
  for (int i = 0; i < p.dim(); ++i) coords.push_back(p.coord(i));
  return make(std::move(coords));
}

SourcePtr RationalSource::zero(int dim) {
  return make(std::vector<Rational>(static_cast<std::size_t>(dim), Rational(0)));
}

DyadicPoint RationalSource::truncate(int r) const { return DyadicPoint::floor_of(coords_, r); }

std::string RationalSource::describe() const {
  std::string out = "rational(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ',';
    out += coords_[i].get_str();
  }
  return out + ")";
}

JointSource::JointSource(SourcePtr first, SourcePtr second)
    : first_(std::move(first)), second_(std::move(second)) {}

SourcePtr JointSource::make(SourcePtr first, SourcePtr second) {
  return std::make_shared<JointSource>(std::move(first), std::move(second));
}

DyadicPoint JointSource::truncate(int r) const {
  return first_->truncate(r).joined(second_->truncate(r));
}

std::string JointSource::describe() const {
  return "joint(" + first_->describe() + "," + second_->describe() + ")";
}

TranslatedSource::TranslatedSource(SourcePtr base, DyadicPoint offset)
    : base_(std::move(base)), offset_(std::move(offset)) {
  if (base_->dim() != offset_.dim()) throw Error(errc::kInvalidPoint, "translation dimension mismatch");
}

DyadicPoint TranslatedSource::truncate(int r) const {
  // floor((x + q) 2^r) = floor((floor(x 2^R) + q 2^R) / 2^{R-r}) for R >= prec(q).
  int big = std::max(r, offset_.precision());
  return base_->truncate(big).translated(offset_).floored(r).refined(r);
}

std::string TranslatedSource::describe() const {
  return "translate(" + base_->describe() + "," + offset_.to_text() + ")";
}

DyadicPoint truncate(const PointSource& x, int r) {
  if (r < 0) throw Error(errc::kInvalidPoint, "precision must be >= 0");
  return x.truncate(r);
}

int half_log2_floor(int m) {
  // floor(log2(m) / 2) = floor(log2(floor(sqrt(m))))
  int k = 0;
  while ((1LL << (2 * (k + 1))) <= m) ++k;
  return k;
}

DyadicPoint lattice_point_in_ball(const Ball& b, int m) {
  if (m != b.center.dim()) throw Error(errc::kInvalidPoint, "ambient dimension mismatch");
  const int e = b.radius_exp + half_log2_floor(m) + 1;
  const int p = b.center.precision();
  std::vector<Integer> nums;
  nums.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const Integer& c = b.center.num(i);
    if (p <= e) {
      nums.push_back(shl(c, e - p));
      continue;
    }
    // nearest multiple, ties toward -inf: ceil((c - 2^{s-1}) / 2^s)
    const long s = p - e;
    Integer shifted = c - pow2(static_cast<unsigned long>(s - 1));
    Integer k;
    mpz_cdiv_q_2exp(k.get_mpz_t(), shifted.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
    nums.push_back(std::move(k));
  }
  return DyadicPoint(std::move(nums), e);
}

namespace {

struct GridFrame {
  int e = 0;                  // grid precision
  int precision = 0;          // working precision P = max(e, center precision)
  Integer step;               // 2^{P-e}
  Integer radius_sq;          // (2^{P-r})^2
  std::vector<Integer> center;  // center at P
  std::vector<Integer> lo;    // inclusive numerator range per coordinate
  std::vector<Integer> hi;
};

GridFrame make_frame(const Ball& b, int guard) {
  if (guard < 1) throw Error(errc::kInvalidPoint, "grid guard must be >= 1");
  GridFrame f;
  f.e = b.radius_exp + guard;
  f.precision = std::max(f.e, b.center.precision());
  f.step = pow2(static_cast<unsigned long>(f.precision - f.e));
  Integer radius = pow2(static_cast<unsigned long>(f.precision - b.radius_exp));
  f.radius_sq = radius * radius;
  for (int i = 0; i < b.center.dim(); ++i) {
    Integer c = shl(b.center.num(i), f.precision - b.center.precision());
    Integer lo;
    Integer hi;
    Integer t = c - radius;
    mpz_fdiv_q(lo.get_mpz_t(), t.get_mpz_t(), f.step.get_mpz_t());
    t = c + radius;
    mpz_cdiv_q(hi.get_mpz_t(), t.get_mpz_t(), f.step.get_mpz_t());
    f.center.push_back(std::move(c));
    f.lo.push_back(std::move(lo));
    f.hi.push_back(std::move(hi));
  }
  return f;
}

bool frame_contains(const GridFrame& f, const std::vector<Integer>& k) {
  Integer sum = 0;
  Integer d;
  for (std::size_t i = 0; i < k.size(); ++i) {
    d = k[i] * f.step - f.center[i];
    sum += d * d;
    if (sum >= f.radius_sq) return false;
  }
  return true;
}

}  // namespace

std::vector<DyadicPoint> ball_grid(const Ball& b, int guard, std::size_t cap) {
  GridFrame f = make_frame(b, guard);
  const std::size_t n = f.lo.size();
  std::vector<DyadicPoint> out;
  std::vector<Integer> k = f.lo;
  while (true) {
    if (frame_contains(f, k)) {
      if (out.size() == cap) {
        throw Error(errc::kCandidateExplosion,
                    "ball grid exceeds cap of " + std::to_string(cap) + " points");
      }
      out.emplace_back(k, f.e);
    }
    // odometer, last coordinate fastest => lexicographic order
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (k[i] < f.hi[i]) {
        ++k[i];
        break;
      }
      k[i] = f.lo[i];
      if (i == 0) return out;
    }
  }
}

std::vector<DyadicPoint> sample_ball_grid(const Ball& b, int guard, std::size_t count,
                                          std::uint64_t seed) {
  GridFrame f = make_frame(b, guard);
  const std::size_t n = f.lo.size();
  auto less = [](const std::vector<Integer>& a, const std::vector<Integer>& c) {
    return std::lexicographical_compare(a.begin(), a.end(), c.begin(), c.end(),
                                        [](const Integer& x, const Integer& y) { return x < y; });
  };
  std::set<std::vector<Integer>, decltype(less)> chosen(less);

  DyadicPoint anchor = lattice_point_in_ball(b, b.center.dim());
  if (guard >= half_log2_floor(b.center.dim()) + 1) {
    chosen.insert(anchor.refined(f.e).nums());
  }

  std::vector<unsigned long> widths;
  for (std::size_t i = 0; i < n; ++i) {
    Integer w = f.hi[i] - f.lo[i] + 1;
    widths.push_back(w.get_ui());
  }
  SplitMix64 rng(seed);
  const std::size_t attempts = 64 * count + 256;
  std::vector<Integer> k(n);
  for (std::size_t a = 0; a < attempts && chosen.size() < count; ++a) {
    for (std::size_t i = 0; i < n; ++i) k[i] = f.lo[i] + static_cast<unsigned long>(rng.below(widths[i]));
    if (frame_contains(f, k)) chosen.insert(k);
  }
  std::vector<DyadicPoint> out;
  out.reserve(chosen.size());
  for (const auto& nums : chosen) out.emplace_back(nums, f.e);
  return out;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw Error(errc::kInvalidPoint, "empty rational");
  auto bad = [&] { return Error(errc::kInvalidPoint, "cannot parse rational '" + std::string(text) + "'"); };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num;
    Integer den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0 ||
        den == 0) {
      throw bad();
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    pos = 1;
  }
  std::string digits;
  std::size_t frac_digits = 0;
  bool seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      if (seen_dot) ++frac_digits;
    } else {
      throw bad();
    }
  }
  if (digits.empty()) throw bad();
  Integer num(digits, 10);
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
  Rational q(negative ? Integer(-num) : num, den);
  q.canonicalize();
  return q;
}

}  // namespace dimlab
