#include "dimlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dimlab/error.hpp"
#include "dimlab/random.hpp"

namespace dimlab {

namespace {

Integer pack_bits(const std::vector<std::uint8_t>& bits) {
  const std::size_t r = bits.size();
  if (r == 0) return 0;
  std::vector<unsigned char> bytes((r + 7) / 8, 0);
  for (std::size_t i = 0; i < r; ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<unsigned char>(0x80U >> (i % 8));
  }
  Integer out;
  mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  const std::size_t pad = bytes.size() * 8 - r;
  if (pad) mpz_fdiv_q_2exp(out.get_mpz_t(), out.get_mpz_t(), pad);
  return out;
}

Integer pow_ui(unsigned long base, unsigned long e) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, e);
  return out;
}

// floor(num * 2^r / den)
Integer floor_scaled(const Integer& num, const Integer& den, int r) {
  Integer t;
  mpz_mul_2exp(t.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(r));
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), t.get_mpz_t(), den.get_mpz_t());
  return q;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

DyadicPoint DigitSource::truncate(int r) const {
  std::vector<Integer> nums;
  nums.reserve(static_cast<std::size_t>(dim_));
  for (int c = 0; c < dim_; ++c) nums.push_back(pack_bits(digits(c, r)));
  return DyadicPoint(std::move(nums), r);
}

BernoulliSource::BernoulliSource(double p, std::uint64_t seed, int dim, std::uint64_t stream_base)
    : DigitSource(dim), p_(p), seed_(seed), stream_base_(stream_base) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(errc::kInvalidSpec, "Bernoulli p must be in [0, 1]");
  if (dim < 1) throw Error(errc::kInvalidSpec, "dimension must be >= 1");
}

bool BernoulliSource::digit(int coord, std::uint64_t index) const {
  return unit_double(mix3(seed_, stream_base_ + static_cast<std::uint64_t>(coord), index)) < p_;
}

std::vector<std::uint8_t> BernoulliSource::digits(int coord, int r) const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(std::max(r, 0)));
  for (int i = 0; i < r; ++i) out[static_cast<std::size_t>(i)] = digit(coord, static_cast<std::uint64_t>(i + 1));
  return out;
}

std::string BernoulliSource::describe() const {
  return "bernoulli(p=" + fmt_double(p_) + ",seed=" + std::to_string(seed_) +
         ",stream=" + std::to_string(stream_base_) + ",n=" + std::to_string(dim()) + ")";
}

std::vector<std::uint8_t> block_dilution_mask(double alpha, double beta, int n) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(std::max(n, 0)));
  bool random = true;
  long long count = 0;
  for (int i = 1; i <= n; ++i) {
    mask[static_cast<std::size_t>(i - 1)] = random;
    if (random) ++count;
    const double root = std::sqrt(static_cast<double>(i));
    const double density = static_cast<double>(count) / i;
    if (random) {
      if (i >= kBlockDilutionWarmup && density >= std::min(beta, 1.0 - 1.0 / root)) random = false;
    } else if (density <= std::max(alpha, 1.0 / root)) {
      random = true;
    }
  }
  return mask;
}

BlockDilutionSource::BlockDilutionSource(double alpha, double beta, std::uint64_t seed, int dim,
                                         std::uint64_t stream_base)
    : DigitSource(dim), alpha_(alpha), beta_(beta), random_(0.5, seed, dim, stream_base) {
  if (!(alpha >= 0.0 && alpha <= beta && beta <= 1.0)) {
    throw Error(errc::kInvalidSpec, "block dilution needs 0 <= alpha <= beta <= 1");
  }
}

std::vector<std::uint8_t> BlockDilutionSource::digits(int coord, int r) const {
  std::vector<std::uint8_t> out = block_dilution_mask(alpha_, beta_, r);
  for (int i = 0; i < r; ++i) {
    auto& d = out[static_cast<std::size_t>(i)];
    d = d && random_.digit(coord, static_cast<std::uint64_t>(i + 1));
  }
  return out;
}

std::string BlockDilutionSource::describe() const {
  return "block_dilution(alpha=" + fmt_double(alpha_) + ",beta=" + fmt_double(beta_) + "," +
         random_.describe() + ")";
}

CantorPointSource::CantorPointSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

int CantorPointSource::ternary_digit(std::uint64_t k) const {
  return (mix3(seed_, 0xCA470000ULL + stream_, k) >> 63) ? 2 : 0;
}

DyadicPoint CantorPointSource::truncate(int r) const {
  // x lies in [N / 3^D, (N + 1) / 3^D] after D digits; deepen until the
  // floor at precision r is the same at both ends.
  auto digits_for = [](int bits) { return static_cast<unsigned long>(std::ceil(bits / std::log2(3.0))) + 1; };
  unsigned long depth = digits_for(r + 64);
  Integer n = 0;
  unsigned long have = 0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (; have < depth; ++have) n = 3 * n + ternary_digit(have + 1);
    const Integer den = pow_ui(3, depth);
    Integer lo = floor_scaled(n, den, r);
    Integer hi = floor_scaled(n + 1, den, r);
    if (lo == hi) return DyadicPoint({lo}, r);
    depth += digits_for(64);
  }
  return DyadicPoint({floor_scaled(n, pow_ui(3, depth), r)}, r);
}

std::string CantorPointSource::describe() const {
  return "cantor_point(seed=" + std::to_string(seed_) + ",stream=" + std::to_string(stream_) + ")";
}

AffineSource::AffineSource(SourcePtr t, std::vector<std::pair<SourcePtr, SourcePtr>> coefficients)
    : t_(std::move(t)), coeffs_(std::move(coefficients)) {
  if (t_->dim() != 1) throw Error(errc::kInvalidSpec, "affine parameter must be 1-D");
  if (coeffs_.empty()) throw Error(errc::kInvalidSpec, "affine source needs coordinates");
  for (const auto& [a, c] : coeffs_) {
    if (a->dim() != 1 || c->dim() != 1) throw Error(errc::kInvalidSpec, "affine coefficients must be 1-D");
  }
}

namespace {

const RationalSource* as_rational(const SourcePtr& s) {
  return dynamic_cast<const RationalSource*>(s.get());
}

}  // namespace

DyadicPoint AffineSource::truncate(int r) const {
  std::vector<Integer> out;
  out.reserve(coeffs_.size());
  const RationalSource* tr = as_rational(t_);
  for (const auto& [slope, icpt] : coeffs_) {
    const RationalSource* sr = as_rational(slope);
    const RationalSource* ir = as_rational(icpt);
    if (tr && sr && ir) {
      Rational v = sr->coords()[0] * tr->coords()[0] + ir->coords()[0];
      out.push_back(floor_scaled(v.get_num(), v.get_den(), r));
      continue;
    }
    // Interval bracket at working precision R: each input lies in [k, k+1] / 2^R.
    int R = r + 64;
    bool done = false;
    for (int attempt = 0; attempt < 32 && !done; ++attempt, R += 64) {
      const Integer T = t_->truncate(R).num(0);
      const Integer M = slope->truncate(R).num(0);
      const Integer B = icpt->truncate(R).num(0);
      Integer corners[4] = {M * T, (M + 1) * T, M * (T + 1), (M + 1) * (T + 1)};
      Integer lo = *std::min_element(corners, corners + 4);
      Integer hi = *std::max_element(corners, corners + 4);
      Integer scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(R));
      lo += B * scale;
      hi += (B + 1) * scale;
      const Integer den = scale * scale;
      Integer flo = floor_scaled(lo, den, r);
      if (flo == floor_scaled(hi, den, r) || attempt == 31) {
        out.push_back(std::move(flo));
        done = true;
      }
    }
  }
  return DyadicPoint(std::move(out), r);
}

std::string AffineSource::describe() const {
  std::string s = "affine(t=" + t_->describe();
  for (const auto& [a, c] : coeffs_) s += ";" + a->describe() + "," + c->describe();
  return s + ")";
}

SourcePtr make_line_point(SourcePtr m, SourcePtr b, SourcePtr x) {
  SourcePtr one = RationalSource::make({Rational(1)});
  SourcePtr zero = RationalSource::make({Rational(0)});
  return std::make_shared<AffineSource>(x, std::vector<std::pair<SourcePtr, SourcePtr>>{{one, zero}, {m, b}});
}

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::kAllZero: return "all_zero";
    case PointKind::kBernoulli: return "bernoulli";
    case PointKind::kBlockDilution: return "block_dilution";
    case PointKind::kLine: return "line";
    case PointKind::kJointCopy: return "joint_copy";
    case PointKind::kJointIndependent: return "joint_independent";
    case PointKind::kCantor: return "cantor";
  }
  return "?";
}

PointKind point_kind_from_string(const std::string& s) {
  static const std::map<std::string, PointKind> kinds = {
      {"all_zero", PointKind::kAllZero},
      {"bernoulli", PointKind::kBernoulli},
      {"block_dilution", PointKind::kBlockDilution},
      {"line", PointKind::kLine},
      {"joint_copy", PointKind::kJointCopy},
      {"joint_independent", PointKind::kJointIndependent},
      {"cantor", PointKind::kCantor},
  };
  auto it = kinds.find(s);
  if (it == kinds.end()) throw Error(errc::kInvalidSpec, "unknown point kind '" + s + "'");
  return it->second;
}

void PointSpec::validate() const {
  if (dim < 1) throw Error(errc::kInvalidSpec, "dimension must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(errc::kInvalidSpec, "p must be in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= beta && beta <= 1.0)) {
    throw Error(errc::kInvalidSpec, "need 0 <= alpha <= beta <= 1");
  }
  if (kind == PointKind::kLine) {
    if (m != "random") {
      Rational mv = parse_rational(m);
      if (mv < 0 || mv > 1) throw Error(errc::kInvalidSpec, "line slope must be in [0, 1]");
    }
    if (b != "random") (void)parse_rational(b);
    if (x != "random") (void)parse_rational(x);
  }
  if (kind == PointKind::kCantor && dim != 1) throw Error(errc::kInvalidSpec, "Cantor points are 1-D");
}

SourcePtr coefficient_source(const std::string& text, std::uint64_t seed, std::uint64_t stream) {
  if (text == "random") return std::make_shared<BernoulliSource>(0.5, seed, 1, stream);
  try {
    return RationalSource::make({parse_rational(text)});
  } catch (const Error& e) {
    throw Error(errc::kInvalidSpec, e.what());
  }
}

SourcePtr generate_point(const PointSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PointKind::kAllZero:
      return RationalSource::zero(spec.dim);
    case PointKind::kBernoulli:
      return std::make_shared<BernoulliSource>(spec.p, spec.seed, spec.dim);
    case PointKind::kBlockDilution:
      return std::make_shared<BlockDilutionSource>(spec.alpha, spec.beta, spec.seed, spec.dim);
    case PointKind::kLine:
      return make_line_point(coefficient_source(spec.m, spec.seed, kLineSlopeStream),
                             coefficient_source(spec.b, spec.seed, kLineInterceptStream),
                             coefficient_source(spec.x, spec.seed, kLineAbscissaStream));
    case PointKind::kCantor:
      return std::make_shared<CantorPointSource>(spec.seed);
    case PointKind::kJointCopy:
    case PointKind::kJointIndependent: {
      auto [x, y] = generate_pair(spec);
      return JointSource::make(x, y);
    }
  }
  throw Error(errc::kInvalidSpec, "unhandled point kind");
}

std::pair<SourcePtr, SourcePtr> generate_pair(const PointSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PointKind::kJointCopy: {
      SourcePtr x = std::make_shared<BernoulliSource>(spec.p, spec.seed, spec.dim);
      return {x, x};
    }
    case PointKind::kJointIndependent: {
      SourcePtr x = std::make_shared<BernoulliSource>(spec.p, spec.seed, spec.dim);
      SourcePtr y = std::make_shared<BernoulliSource>(spec.p, spec.seed, spec.dim, 1000);
      return {x, y};
    }
    default:
      return {generate_point(spec), RationalSource::zero(spec.dim)};
  }
}

std::string to_string(SetKind k) {
  switch (k) {
    case SetKind::kCantor: return "cantor";
    case SetKind::kIfs: return "ifs";
    case SetKind::kSegmentFamily: return "segment_family";
    case SetKind::kUnitCube: return "unit_cube";
    case SetKind::kUnitSegment: return "unit_segment";
    case SetKind::kSingleton: return "singleton";
  }
  return "?";
}

SetKind set_kind_from_string(const std::string& s) {
  static const std::map<std::string, SetKind> kinds = {
      {"cantor", SetKind::kCantor},
      {"ifs", SetKind::kIfs},
      {"segment_family", SetKind::kSegmentFamily},
      {"unit_cube", SetKind::kUnitCube},
      {"unit_segment", SetKind::kUnitSegment},
      {"singleton", SetKind::kSingleton},
  };
  auto it = kinds.find(s);
  if (it == kinds.end()) throw Error(errc::kInvalidSpec, "unknown set kind '" + s + "'");
  return it->second;
}

void SetSpec::validate() const {
  if (depth < 1) throw Error(errc::kInvalidSpec, "depth must be >= 1");
  if (dim < 1) throw Error(errc::kInvalidSpec, "dimension must be >= 1");
  if (kind == SetKind::kSegmentFamily && directions < 1) {
    throw Error(errc::kInvalidSpec, "segment family needs at least one direction");
  }
  if (kind == SetKind::kIfs) {
    if (maps.empty()) throw Error(errc::kInvalidSpec, "IFS needs at least one map");
    for (const Contraction& c : maps) {
      if (c.ratio <= 0 || c.ratio >= 1) throw Error(errc::kInvalidSpec, "contraction ratios must be in (0, 1)");
      if (c.offset.size() != maps.front().offset.size() || c.offset.empty()) {
        throw Error(errc::kInvalidSpec, "IFS offsets must share one dimension");
      }
    }
  }
}

namespace {

const Rational& pi_rational() {
  static const Rational pi = parse_rational("3.14159265358979323846264338327950288419716939937510");
  return pi;
}

// cos and sin of a rational angle by Taylor series, accurate far beyond 2^-80.
std::pair<Rational, Rational> cos_sin(const Rational& theta) {
  Rational c = 0;
  Rational s = 0;
  Rational term = 1;  // theta^k / k!
  const Rational eps(1, Integer(1) << 100);
  for (int k = 0; k < 200; ++k) {
    switch (k % 4) {
      case 0: c += term; break;
      case 1: s += term; break;
      case 2: c -= term; break;
      case 3: s -= term; break;
    }
    term *= theta;
    term /= k + 1;
    if (abs(term) < eps && k > 4) break;
  }
  return {c, s};
}

DyadicPoint floor_point(const std::vector<Rational>& coords, int p) {
  return DyadicPoint::floor_of(coords, p);
}

std::vector<Rational> ifs_point(const SetSpec& spec, std::uint64_t stream) {
  const std::size_t n = spec.maps.front().offset.size();
  std::vector<Rational> x(n, Rational(0));
  // Apply maps innermost first so the first choice is the coarsest.
  for (int k = spec.depth; k >= 1; --k) {
    const auto& f = spec.maps[mix3(spec.seed, 0x1F500000ULL + stream, static_cast<std::uint64_t>(k)) % spec.maps.size()];
    for (std::size_t j = 0; j < n; ++j) x[j] = f.ratio * x[j] + f.offset[j];
  }
  return x;
}

}  // namespace

std::pair<Rational, Rational> segment_direction(int directions, int i) {
  const Rational theta = pi_rational() * Rational(Integer(i), Integer(directions));
  auto [c, s] = cos_sin(theta);
  DyadicPoint d = DyadicPoint::floor_of(std::vector<Rational>{c, s}, 60);
  return {d.coord(0), d.coord(1)};
}

SourcePtr set_point_source(const SetSpec& spec, std::size_t i) {
  spec.validate();
  const std::uint64_t stream = static_cast<std::uint64_t>(i);
  switch (spec.kind) {
    case SetKind::kCantor:
      return std::make_shared<CantorPointSource>(spec.seed, stream);
    case SetKind::kUnitCube:
      return std::make_shared<BernoulliSource>(0.5, spec.seed, spec.dim, (stream + 1) << 8);
    case SetKind::kUnitSegment:
      return JointSource::make(std::make_shared<BernoulliSource>(0.5, spec.seed, 1, (stream + 1) << 8),
                               RationalSource::zero(1));
    case SetKind::kSegmentFamily: {
      const int label = static_cast<int>(mix3(spec.seed, 0x5E600000ULL, stream) % static_cast<std::uint64_t>(spec.directions));
      auto [c, s] = segment_direction(spec.directions, label);
      SourcePtr t = std::make_shared<BernoulliSource>(0.5, spec.seed, 1, (stream + 1) << 8);
      SourcePtr zero = RationalSource::make({Rational(0)});
      return std::make_shared<AffineSource>(
          t, std::vector<std::pair<SourcePtr, SourcePtr>>{{RationalSource::make({c}), zero},
                                                          {RationalSource::make({s}), zero}});
    }
    case SetKind::kIfs:
      return RationalSource::make(ifs_point(spec, stream));
    case SetKind::kSingleton:
      return RationalSource::zero(spec.dim);
  }
  throw Error(errc::kInvalidSpec, "unhandled set kind");
}

PointSample generate_set(const SetSpec& spec, std::size_t count) {
  spec.validate();
  if (count < 1) throw Error(errc::kInvalidSpec, "count must be >= 1");
  PointSample out;
  out.provenance = to_string(spec.kind) + ":seed=" + std::to_string(spec.seed);
  out.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t stream = static_cast<std::uint64_t>(i);
    switch (spec.kind) {
      case SetKind::kCantor: {
        // Finite expansion N / 3^depth, rounded up so its first `depth`
        // ternary digits survive the dyadic representation.
        Integer n = 0;
        CantorPointSource src(spec.seed, stream);
        for (int k = 1; k <= spec.depth; ++k) n = 3 * n + src.ternary_digit(static_cast<std::uint64_t>(k));
        const Integer den = pow_ui(3, static_cast<unsigned long>(spec.depth));
        Integer scaled;
        mpz_mul_2exp(scaled.get_mpz_t(), n.get_mpz_t(), kSamplePrecision);
        Integer q;
        mpz_cdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
        out.points.emplace_back(std::vector<Integer>{q}, kSamplePrecision);
        break;
      }
      case SetKind::kSegmentFamily: {
        const int label = static_cast<int>(mix3(spec.seed, 0x5E600000ULL, stream) % static_cast<std::uint64_t>(spec.directions));
        auto [c, s] = segment_direction(spec.directions, label);
        const Rational t(Integer(static_cast<unsigned long>(mix3(spec.seed, 0x5E610000ULL, stream) >> 16)),
                         Integer(1) << 48);
        out.points.push_back(floor_point({c * t, s * t}, kSamplePrecision));
        out.labels.push_back(label);
        break;
      }
      case SetKind::kIfs:
        out.points.push_back(floor_point(ifs_point(spec, stream), kSamplePrecision));
        break;
      default:
        out.points.push_back(set_point_source(spec, i)->truncate(kSamplePrecision));
        break;
    }
  }
  return out;
}

double analytic_set_dimension(const SetSpec& spec) {
  switch (spec.kind) {
    case SetKind::kCantor: return std::log(2.0) / std::log(3.0);
    case SetKind::kUnitCube: return spec.dim;
    case SetKind::kUnitSegment: return 1.0;
    case SetKind::kSegmentFamily: return 1.0;  // finite union of segments
    case SetKind::kSingleton: return 0.0;
    case SetKind::kIfs: {
      // Similarity dimension: solve sum ratio_i^s = 1 by bisection.
      double lo = 0.0;
      double hi = 64.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double sum = 0.0;
        for (const Contraction& c : spec.maps) sum += std::pow(c.ratio.get_d(), mid);
        (sum > 1.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

}  // namespace dimlab
