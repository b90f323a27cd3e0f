#include "dimlab/kakeya.hpp"

#include <algorithm>
#include <cmath>

#include "dimlab/error.hpp"
#include "dimlab/generators.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/random.hpp"

namespace dimlab {

namespace {

Integer pow2(int e) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return out;
}

Rational pow2q(int e) {
  return e >= 0 ? Rational(pow2(e)) : Rational(Integer(1), pow2(-e));
}

DyadicPoint dyadic1(const Rational& v, int r) {
  const Rational c[1] = {v};
  return DyadicPoint::floor_of(c, r);
}

void check_precision(int r) {
  if (r < 1 || r > kMaxKakeyaPrecision) {
    throw Error(errc::kInvalidPoint, "kakeya precision must be in [1, " + std::to_string(kMaxKakeyaPrecision) + "]");
  }
}

// Candidate values in a form the tolerance test can use without GMP when
// every quantity is a small integer at precision r.
struct CompiledGrid {
  int r = 0;
  bool fast = false;
  std::vector<std::int64_t> v;
  std::vector<std::uint8_t> defined;
  const std::vector<std::optional<DyadicPoint>>* source = nullptr;
};

constexpr std::int64_t kFastLimit = std::int64_t{1} << 40;

bool small_at(const DyadicPoint& d, int r, std::int64_t& out) {
  if (d.dim() != 1 || d.precision() != r || !d.num(0).fits_slong_p()) return false;
  out = d.num(0).get_si();
  return out > -kFastLimit && out < kFastLimit;
}

CompiledGrid compile(int r, const std::vector<std::optional<DyadicPoint>>& grid) {
  CompiledGrid g;
  g.r = r;
  g.source = &grid;
  g.fast = true;
  g.v.resize(grid.size());
  g.defined.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    g.defined[i] = grid[i].has_value();
    if (grid[i] && !small_at(*grid[i], r, g.v[i])) g.fast = false;
  }
  return g;
}

// |u_i p + v - q| < 2^{2-r} with u_i = i / 2^r, exactly.
bool slow_test(std::uint64_t i, int r, const DyadicPoint& p, const DyadicPoint& v, const DyadicPoint& q) {
  const int e = std::max({p.precision(), v.precision(), q.precision()});
  Integer lhs = Integer(static_cast<unsigned long>(i)) * p.num(0) * pow2(e - p.precision()) +
                v.num(0) * pow2(r + e - v.precision()) - q.num(0) * pow2(r + e - q.precision());
  return abs(lhs) < pow2(e + 2);
}

struct Scan {
  const CompiledGrid& grid;
  const DyadicPoint& p;
  const DyadicPoint& q;
  bool fast = false;
  std::int64_t P = 0;
  std::int64_t Q = 0;

  Scan(const CompiledGrid& g, const DyadicPoint& p_, const DyadicPoint& q_) : grid(g), p(p_), q(q_) {
    fast = g.fast && small_at(p, g.r, P) && small_at(q, g.r, Q);
  }

  bool passes(std::uint64_t i) const {
    if (!grid.defined[i]) return false;
    if (fast) {
      const __int128 lhs = static_cast<__int128>(i) * P + (static_cast<__int128>(grid.v[i]) - Q) * (__int128{1} << grid.r);
      const __int128 bound = __int128{1} << (grid.r + 2);
      return lhs < bound && lhs > -bound;
    }
    return slow_test(i, grid.r, p, *(*grid.source)[i], q);
  }
};

void check_point(const DyadicPoint& d, const char* what) {
  if (d.dim() != 1) throw Error(errc::kInvalidPoint, std::string(what) + " must be 1-D");
}

MinH scan_min_h(const CompiledGrid& grid, const Rational& m, const Rational& b, const Rational& x) {
  const int r = grid.r;
  const DyadicPoint p = dyadic1(x, r);
  const DyadicPoint q = dyadic1(m * x + b, r);
  const Scan scan(grid, p, q);
  const std::uint64_t last = std::uint64_t{1} << r;

  // Only indices with |u_i - m| < 2^{1-r} can land in the target ball.
  const Rational mr = m * Rational(pow2(r));
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), mr.get_num_mpz_t(), mr.get_den_mpz_t());
  const Integer wlo = std::max<Integer>(fl - 2, Integer(0));
  const Integer whi = std::min<Integer>(fl + 2, Integer(static_cast<unsigned long>(last)));

  const Rational radius_sq = pow2q(2 - 2 * r);
  const Rational px = p.coord(0) - x;
  const Rational step = pow2q(-r);
  MinH out;
  for (Integer j = wlo; j <= whi; ++j) {
    const Rational u = Rational(j) * step;
    if (abs(u - m) < step && !scan.passes(j.get_ui())) out.tolerance_chain = false;
  }
  for (std::uint64_t i = 0; i <= last; ++i) {
    if (!scan.passes(i)) continue;
    ++out.passing;
    if (Integer(static_cast<unsigned long>(i)) < wlo || Integer(static_cast<unsigned long>(i)) > whi) continue;
    const Rational u = Rational(Integer(static_cast<unsigned long>(i))) * step;
    const Rational du = u - m;
    const Rational dv = (*grid.source)[i]->coord(0) - b;
    if (du * du + dv * dv + px * px < radius_sq) {
      out.h = out.passing;
      out.index = i;
      return out;
    }
  }
  throw Error(errc::kInternalInvariantViolation,
              "no candidate rank reaches B_{2^{1-r}}(m, b, x) at r = " + std::to_string(r));
}

}  // namespace

std::vector<std::optional<DyadicPoint>> LineOracle::eval_grid(int r) const {
  check_precision(r);
  std::vector<std::optional<DyadicPoint>> out;
  const std::uint64_t last = std::uint64_t{1} << r;
  out.reserve(last + 1);
  for (std::uint64_t i = 0; i <= last; ++i) {
    out.push_back(eval(DyadicPoint({Integer(static_cast<unsigned long>(i))}, r), r));
  }
  return out;
}

std::optional<DyadicPoint> ExactLineOracle::eval(const DyadicPoint& u, int r) const {
  check_point(u, "oracle input");
  return dyadic1(b_, r);
}

std::vector<std::optional<DyadicPoint>> ExactLineOracle::eval_grid(int r) const {
  check_precision(r);
  return std::vector<std::optional<DyadicPoint>>((std::size_t{1} << r) + 1, dyadic1(b_, r));
}

SubgridLineOracle::SubgridLineOracle(Rational m, Rational b, std::uint64_t stride)
    : exact_(std::move(m), std::move(b)), stride_(stride) {
  if (stride_ < 1) throw Error(errc::kInvalidSpec, "stride must be >= 1");
}

std::optional<DyadicPoint> SubgridLineOracle::eval(const DyadicPoint& u, int r) const {
  check_point(u, "oracle input");
  const Integer scaled = u.refined(std::max(r, u.precision())).num(0);
  Integer rem;
  mpz_fdiv_r_ui(rem.get_mpz_t(), scaled.get_mpz_t(), static_cast<unsigned long>(stride_));
  if (u.precision() > r || rem != 0) return std::nullopt;
  return exact_.eval(u, r);
}

std::vector<std::uint64_t> passing_candidates(int r, const DyadicPoint& p, const DyadicPoint& q,
                                              const std::vector<std::optional<DyadicPoint>>& v) {
  check_precision(r);
  check_point(p, "p");
  check_point(q, "q");
  if (v.size() != (std::size_t{1} << r) + 1) throw Error(errc::kInvalidPoint, "candidate grid has the wrong size");
  const CompiledGrid grid = compile(r, v);
  const Scan scan(grid, p, q);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < v.size(); ++i) {
    if (scan.passes(i)) out.push_back(i);
  }
  return out;
}

Triple reconstruct(const ReconstructionInput& in) {
  if (in.h < 1) throw Error(errc::kNoSuchCandidate, "h must be >= 1");
  if (in.oracle == nullptr) throw Error(errc::kInvalidPoint, "no oracle");
  check_precision(in.r);
  check_point(in.p, "p");
  check_point(in.q, "q");
  const std::vector<std::optional<DyadicPoint>> v = in.oracle->eval_grid(in.r);
  const CompiledGrid grid = compile(in.r, v);
  const Scan scan(grid, in.p, in.q);
  std::uint64_t candidate = 0;
  for (std::uint64_t i = 0; i < v.size(); ++i) {
    if (scan.passes(i) && ++candidate == in.h) {
      return {DyadicPoint({Integer(static_cast<unsigned long>(i))}, in.r), *v[i], in.p};
    }
  }
  throw Error(errc::kNoSuchCandidate, "only " + std::to_string(candidate) + " candidates pass, h = " + std::to_string(in.h));
}

MinH min_h(int r, const Rational& m, const Rational& b, const Rational& x, const LineOracle& oracle) {
  return min_h(r, m, b, x, oracle, oracle.eval_grid(r));
}

MinH min_h(int r, const Rational& m, const Rational& b, const Rational& x, const LineOracle&,
           const std::vector<std::optional<DyadicPoint>>& grid) {
  check_precision(r);
  if (grid.size() != (std::size_t{1} << r) + 1) throw Error(errc::kInvalidPoint, "candidate grid has the wrong size");
  return scan_min_h(compile(r, grid), m, b, x);
}

Rational candidate_interval_length(int r, const Rational& u, const Rational& v, const Rational& m,
                                   const Rational& b) {
  const Rational tau = pow2q(3 - r);
  const Rational a = u - m;
  const Rational c = v - b;
  if (a == 0) return abs(c) < tau ? Rational(1) : Rational(0);
  Rational e1 = (-tau - c) / a;
  Rational e2 = (tau - c) / a;
  if (e2 < e1) std::swap(e1, e2);
  const Rational lo = std::max(e1, Rational(0));
  const Rational hi = std::min(e2, Rational(1));
  return hi > lo ? Rational(hi - lo) : Rational(0);
}

CandidateProfile candidate_profile(int r, const Rational& m, const Rational& b) {
  check_precision(r);
  CandidateProfile out;
  out.r = r;
  const std::uint64_t last = std::uint64_t{1} << r;
  const Rational tau = pow2q(3 - r);
  const Rational v = dyadic1(b, r).coord(0);
  const Rational step = pow2q(-r);
  out.analytic_sum = 0;
  out.lengths.reserve(last + 1);
  for (std::uint64_t i = 0; i <= last; ++i) {
    const Rational u = Rational(Integer(static_cast<unsigned long>(i))) * step;
    const Rational len = candidate_interval_length(r, u, v, m, b);
    out.lengths.push_back(len);
    if (u == m) {
      out.analytic_sum += 1;
      continue;
    }
    const Rational gap = abs(u - m);
    const Rational bound = std::min(Rational(tau / gap), Rational(1));
    out.analytic_sum += bound;
    if (len > bound) {
      ++out.interval_bound_violations;
      if (v == b) ++out.interval_bound_violations_exact_v;
    }
    if (len > std::min(Rational(2 * tau / gap), Rational(1))) ++out.doubled_bound_violations;
  }
  Rational harmonic = 0;
  for (std::uint64_t k = 1; k <= last; ++k) harmonic += Rational(Integer(1), Integer(static_cast<unsigned long>(k)));
  out.harmonic_bound = 2 + 16 * harmonic;
  out.analytic_ok = out.analytic_sum <= out.harmonic_bound;
  return out;
}

Rational uniform_trial_x(std::uint64_t seed, std::uint64_t trial) {
  const std::uint64_t k = mix3(seed, 0x4B414B45ULL, trial);
  Integer num;
  mpz_import(num.get_mpz_t(), 1, -1, sizeof k, 0, 0, &k);
  return Rational(num, pow2(64));
}

HStatistics h_statistics(int r, const Rational& m, const Rational& b, std::size_t trials,
                         std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw Error(errc::kInvalidSpec, "trial count must be >= 1");
  check_precision(r);
  HStatistics out;
  out.r = r;
  out.m = m;
  out.b = b;
  out.seed = seed;
  const ExactLineOracle oracle(m, b);
  const std::vector<std::optional<DyadicPoint>> v = oracle.eval_grid(r);
  const CompiledGrid grid = compile(r, v);
  out.trials.resize(trials);
  std::vector<std::uint8_t> chain(trials, 1);
  parallel_for(trials, threads, [&](std::size_t t) {
    HTrial& tr = out.trials[t];
    tr.trial = t;
    tr.x = uniform_trial_x(seed, t);
    const MinH mh = scan_min_h(grid, m, b, tr.x);
    tr.h = mh.h;
    tr.log2h_over_r = std::log2(static_cast<double>(mh.h)) / r;
    chain[t] = mh.tolerance_chain;
  });
  double sum = 0.0;
  std::vector<double> hs;
  std::vector<double> ratios;
  for (const HTrial& tr : out.trials) {
    sum += static_cast<double>(tr.h);
    out.max = std::max(out.max, tr.h);
    hs.push_back(static_cast<double>(tr.h));
    ratios.push_back(tr.log2h_over_r);
  }
  out.tolerance_chain_ok = std::all_of(chain.begin(), chain.end(), [](std::uint8_t c) { return c != 0; });
  auto median = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  };
  out.mean = sum / static_cast<double>(trials);
  out.median = median(hs);
  out.median_log2h_over_r = median(ratios);
  out.mean_bound = r * 64.0;
  out.mean_ok = out.mean <= out.mean_bound;
  out.profile = candidate_profile(r, m, b);
  return out;
}

LowerAuditReport dim_lower_audit(const ComplexityModel& model, const std::string& m,
                                 const std::string& b, std::uint64_t seed,
                                 const PrecisionSchedule& schedule, const EstimatorOptions& opt,
                                 const std::string& x, double slack) {
  LowerAuditReport out;
  out.m_spec = m;
  out.b_spec = b;
  out.x_spec = x;
  out.slack = slack;
  const SourcePtr ms = coefficient_source(m, seed, kLineSlopeStream);
  const SourcePtr bs = coefficient_source(b, seed, kLineInterceptStream);
  SourcePtr xs;
  if (x == "m") {
    xs = ms;
  } else if (x == "random") {
    xs = std::make_shared<BernoulliSource>(0.5, seed, 1, kLineAbscissaStream);
  } else {
    xs = coefficient_source(x, seed, kLineAbscissaStream);
  }
  const SourcePtr mb = JointSource::make(ms, bs);
  const SourcePtr bm = JointSource::make(bs, ms);

  out.k_mbx = k_curve(model, *JointSource::make(mb, xs), schedule, opt);
  out.k_mbx.label = "K_r(m,b,x)";
  out.k_b_given_m = cond_curve(model, *bs, *ms, schedule, opt);
  out.k_b_given_m.label = "K_r(b|m)";
  out.k_line = k_curve(model, *make_line_point(ms, bs, xs), schedule, opt);
  out.k_line.label = "K_r(x,mx+b)";
  out.k_x_given_bm = cond_curve(model, *xs, *bm, schedule, opt);
  out.k_x_given_bm.label = "K_r(x|b,m)";
  out.k_m = k_curve(model, *ms, schedule, opt);
  out.k_m.label = "K_r(m)";

  for (std::size_t i = 0; i < out.k_mbx.size(); ++i) {
    out.lhs.push_back((out.k_mbx.value[i] - out.k_b_given_m.value[i]) / out.k_mbx.r[i]);
  }
  out.lhs_liminf = *std::min_element(out.lhs.begin() + static_cast<std::ptrdiff_t>(tail_start(out.lhs.size(), schedule.window)),
                                     out.lhs.end());
  out.line_dim = dim_pair(out.k_line, 2.0, schedule.window);
  out.x_given_bm_dim = dim_pair(out.k_x_given_bm, 1.0, schedule.window);
  out.m_dim = dim_pair(out.k_m, 1.0, schedule.window);
  out.decomposition = out.x_given_bm_dim.lower + out.m_dim.lower;
  out.lemma_ok = out.lhs_liminf <= out.line_dim.lower + slack;
  out.decomposition_ok = out.decomposition <= out.line_dim.lower + slack;
  return out;
}

}  // namespace dimlab
