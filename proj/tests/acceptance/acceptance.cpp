#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "dimlab/codes.hpp"
#include "dimlab/complexity.hpp"
#include "dimlab/dimension.hpp"
#include "dimlab/error.hpp"
#include "dimlab/generators.hpp"
#include "dimlab/geometry.hpp"
#include "dimlab/kakeya.hpp"
#include "dimlab/machine.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/random.hpp"
#include "experiment.hpp"

using namespace dimlab;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets, fixed here so that nothing downstream can loosen them.
constexpr int kKakeyaTriples = 100;
constexpr int kKakeyaRMin = 3;
constexpr int kKakeyaRMax = 16;
constexpr double kKakeyaExactSeconds = 120.0;
constexpr std::size_t kHTrials = 10000;
constexpr int kHPrecisions[] = {8, 10, 12};
constexpr double kHMeanFactor = 64.0;
constexpr double kHSeconds = 300.0;
constexpr std::uint64_t kCodeLimit = 1u << 20;
constexpr double kC0Max = 4.0;
constexpr double kCodeSeconds = 60.0;
constexpr int kLatticeBalls = 10000;
constexpr double kLatticeSeconds = 60.0;
constexpr int kPrefixBits = 16;
constexpr int kSubadditiveLen = 6;
constexpr int kMonotoneWLen = 6;
constexpr int kMonotoneVLen = 4;
constexpr double kMachineSeconds = 300.0;
constexpr double kEntropyP = 0.11;
constexpr double kEntropyLo = 0.40;
constexpr double kEntropyHi = 0.60;
constexpr double kZeroDimMax = 0.05;
constexpr double kEntropySeconds = 120.0;
constexpr double kDilutionAlpha = 0.3;
constexpr double kDilutionBeta = 0.9;
constexpr double kDilutionLowerLo = 0.15, kDilutionLowerHi = 0.45;
constexpr double kDilutionUpperLo = 0.75, kDilutionUpperHi = 1.0;
constexpr int kResidualR = 1 << 13;
constexpr double kResidualMax = 0.2;
constexpr int kRobustRMax = 1 << 13;
constexpr double kRobustMax = 0.1;
constexpr int kSensitivityRMax = 4096;
constexpr double kLipschitzExtra = 64.0;
constexpr double kCantorBoxTol = 0.05;
constexpr double kCantorGapTol = 0.12;
constexpr double kSquareBoxTol = 0.1;
constexpr int kP2SRMax = 1 << 13;
constexpr std::size_t kP2SPoints = 8;

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Rational pow2q(int e) { return e >= 0 ? Rational(Integer(1) << e) : Rational(1, Integer(1) << -e); }

DyadicPoint floor1(const Rational& v, int r) { return DyadicPoint::floor_of(std::vector<Rational>{v}, r); }

Rational random_rational(SplitMix64& g, long lo, long hi) {
  const long den = 1 + static_cast<long>(g.below(1000000));
  const long span = (hi - lo) * den;
  return Rational(lo * den + static_cast<long>(g.below(static_cast<std::uint64_t>(span) + 1)), den);
}

unsigned threads() { return resolve_threads(0); }

// 1 --------------------------------------------------------------------------
Verdict kakeya_exact() {
  const auto t0 = Clock::now();
  SplitMix64 g(20240601);
  int ok = 0, total = 0;
  std::string first_failure;
  for (int t = 0; t < kKakeyaTriples; ++t) {
    const Rational m = random_rational(g, 0, 1);
    const Rational b = random_rational(g, -1, 1);
    const Rational x = random_rational(g, 0, 1);
    const ExactLineOracle oracle(m, b);
    for (int r = kKakeyaRMin; r <= kKakeyaRMax; ++r) {
      ++total;
      try {
        const auto grid = oracle.eval_grid(r);
        const MinH mh = min_h(r, m, b, x, oracle, grid);
        ReconstructionInput in{r, floor1(x, r), floor1(m * x + b, r), &oracle, mh.h};
        const Triple tr = reconstruct(in);
        const Rational du = tr.u.coord(0) - m, dv = tr.v.coord(0) - b, dp = tr.p.coord(0) - x;
        if (du * du + dv * dv + dp * dp < pow2q(2 - 2 * r) && mh.tolerance_chain) {
          ++ok;
        } else if (first_failure.empty()) {
          first_failure = fmt(" first failure: triple %d r %d", t, r);
        }
      } catch (const Error& e) {
        if (first_failure.empty()) first_failure = fmt(" first failure: triple %d r %d: %s", t, r, e.what());
      }
    }
  }
  const double s = seconds_since(t0);
  return {ok == total && s < kKakeyaExactSeconds,
          fmt("%d/%d (triple, r) cases reach B_{2^{1-r}}(m,b,x) exactly, %.1f s (limit %.0f s)%s", ok, total, s,
              kKakeyaExactSeconds, first_failure.c_str())};
}

// 2 --------------------------------------------------------------------------
Verdict kakeya_h_bound() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  double prev_median = 1e9;
  for (int r : kHPrecisions) {
    const HStatistics st = h_statistics(r, Rational(1, 2), Rational(1, 4), kHTrials, 7, threads());
    const double bound = r * kHMeanFactor;
    const bool mean_ok = st.mean <= bound;
    const bool sum_ok = st.profile.analytic_sum <= st.profile.harmonic_bound;
    const bool median_ok = st.median_log2h_over_r <= prev_median;
    ok = ok && mean_ok && sum_ok && median_ok;
    prev_median = st.median_log2h_over_r;
    detail += fmt("r=%d mean %.2f<=%.0f sum %.2f<=%.2f median log2h/r %.4f; ", r, st.mean, bound,
                  st.profile.analytic_sum.get_d(), st.profile.harmonic_bound.get_d(), st.median_log2h_over_r);
  }
  const double s = seconds_since(t0);
  return {ok && s < kHSeconds, detail + fmt("%.1f s (limit %.0f s)", s, kHSeconds)};
}

// 3 --------------------------------------------------------------------------
Verdict delta_code_bound() {
  const auto t0 = Clock::now();
  double c0 = -1e9;
  std::uint64_t worst = 0;
  // Kraft sum of every codeword enumerated, scaled by 2^64 in long double.
  long double kraft = 0.0L;
  for (std::uint64_t j = 0; j < kCodeLimit; ++j) {
    const std::size_t len = nat_code_length(j);
    const double slack = static_cast<double>(len) - std::log2(1.0 + static_cast<double>(j)) -
                         2.0 * std::log2(std::log2(2.0 + static_cast<double>(j)));
    if (slack > c0) {
      c0 = slack;
      worst = j;
    }
    kraft += std::ldexp(1.0L, -static_cast<int>(len));
  }
  const double s = seconds_since(t0);
  return {c0 <= kC0Max && kraft <= 1.0L && s < kCodeSeconds,
          fmt("audited c0 = %.4f (at j = %llu) <= %.0f over j < 2^20; Kraft sum %.9Lf <= 1; %.1f s", c0,
              static_cast<unsigned long long>(worst), kC0Max, kraft, s)};
}

// 4 --------------------------------------------------------------------------
Verdict lattice_points() {
  const auto t0 = Clock::now();
  SplitMix64 g(4141);
  int ok = 0, total = 0;
  for (int m = 1; m <= 3; ++m) {
    for (int t = 0; t < kLatticeBalls; ++t) {
      const int r = static_cast<int>(g.below(40));
      const int extra = 1 + static_cast<int>(g.below(30));
      std::vector<Integer> c;
      for (int i = 0; i < m; ++i) {
        Integer v(static_cast<unsigned long>(g.next() >> 1));
        mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(std::max(0, r + extra - 60)));
        c.push_back(g.next() & 1 ? Integer(-v) : v);
      }
      const Ball ball(DyadicPoint(c, r + extra), r);
      const DyadicPoint q = lattice_point_in_ball(ball, m);
      const int spacing = r + half_log2_floor(m) + 1;
      ++total;
      if (ball.contains(q) && q.reduced().precision() <= spacing) ++ok;
    }
  }
  const double s = seconds_since(t0);
  return {ok == total && s < kLatticeSeconds,
          fmt("%d/%d random balls (m = 1, 2, 3) hold a strictly interior lattice point; %.1f s", ok, total, s)};
}

// 5 --------------------------------------------------------------------------
std::vector<BitString> strings_up_to(int len) {
  std::vector<BitString> out;
  for (int n = 0; n <= len; ++n) {
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) out.push_back(BitString::from_uint(x, n));
  }
  return out;
}

Verdict machine_properties() {
  const auto t0 = Clock::now();
  // prefix freeness: no valid program is a proper prefix of another
  std::vector<std::string> programs;
  for (const BitString& s : strings_up_to(kPrefixBits)) {
    try {
      parse_program(s);
      programs.push_back(s.to_string());
    } catch (const Error&) {
    }
  }
  std::sort(programs.begin(), programs.end());
  std::size_t prefix_violations = 0;
  for (std::size_t i = 1; i < programs.size(); ++i) {
    if (programs[i].rfind(programs[i - 1], 0) == 0) ++prefix_violations;
  }

  const MachineBudget budget;
  MachineSolver plain({}, budget);
  const auto words = strings_up_to(kSubadditiveLen);
  std::map<BitString, int> k;
  for (const BitString& w : words) k[w] = *plain.min_program_length(w);

  std::size_t monotone_violations = 0, monotone_checks = 0;
  for (const BitString& v : strings_up_to(kMonotoneVLen)) {
    MachineSolver cond(v, budget);
    for (const BitString& w : strings_up_to(kMonotoneWLen)) {
      const auto kv = cond.min_program_length(w);
      ++monotone_checks;
      if (!kv || *kv > k[w]) ++monotone_violations;
    }
  }

  std::size_t sub_violations = 0, sub_checks = 0;
  for (const BitString& u : words) {
    for (const BitString& v : words) {
      const auto kuv = plain.min_program_length(u + v);
      ++sub_checks;
      if (!kuv || *kuv > k[u] + k[v] + 2) ++sub_violations;
    }
  }
  const double s = seconds_since(t0);
  return {prefix_violations == 0 && monotone_violations == 0 && sub_violations == 0 && s < kMachineSeconds,
          fmt("%zu programs <= %d bits, %zu prefix clashes; conditioning %zu/%zu violations; "
              "K(uv) <= K(u)+K(v)+2 %zu/%zu violations; %.1f s",
              programs.size(), kPrefixBits, prefix_violations, monotone_violations, monotone_checks,
              sub_violations, sub_checks, s)};
}

// 6 --------------------------------------------------------------------------
Verdict entropy_convergence() {
  const auto t0 = Clock::now();
  const ModelPtr lz = make_model("lz78");
  EstimatorOptions opt;
  opt.threads = threads();
  const PrecisionSchedule sched;
  const BernoulliSource x(kEntropyP, 11, 1);
  const DimPair d = point_dim_pair(*lz, x, sched, opt);
  const DimPair z = point_dim_pair(*lz, *RationalSource::zero(1), sched, opt);
  const double h = -kEntropyP * std::log2(kEntropyP) - (1 - kEntropyP) * std::log2(1 - kEntropyP);
  const double s = seconds_since(t0);
  return {d.lower >= kEntropyLo && d.lower <= kEntropyHi && z.lower <= kZeroDimMax && s < kEntropySeconds,
          fmt("lz78 Bernoulli(%.2f) dim %.4f (Dim %.4f) vs band [%.2f, %.2f], H = %.4f; all-zero dim %.4f <= %.2f; "
              "%.1f s",
              kEntropyP, d.lower, d.upper, kEntropyLo, kEntropyHi, h, z.lower, kZeroDimMax, s)};
}

// 7 --------------------------------------------------------------------------
Verdict block_dilution() {
  const ModelPtr cm = make_model("cm");
  EstimatorOptions opt;
  opt.threads = threads();
  const BlockDilutionSource x(kDilutionAlpha, kDilutionBeta, 13, 1);
  const DimPair d = point_dim_pair(*cm, x, PrecisionSchedule{}, opt);
  return {d.lower >= kDilutionLowerLo && d.lower <= kDilutionLowerHi && d.upper >= kDilutionUpperLo &&
              d.upper <= kDilutionUpperHi,
          fmt("dim %.4f in [%.2f, %.2f], Dim %.4f in [%.2f, %.2f]", d.lower, kDilutionLowerLo, kDilutionLowerHi,
              d.upper, kDilutionUpperLo, kDilutionUpperHi)};
}

// 8, 9 -----------------------------------------------------------------------
struct PairResiduals {
  std::string name;
  double chain = 0.0;
  double mutual = 0.0;
};

std::vector<PairResiduals> residuals() {
  static std::vector<PairResiduals> cached;
  if (!cached.empty()) return cached;
  const ModelPtr cm = make_model("cm");
  EstimatorOptions opt;
  opt.threads = threads();
  const int r = kResidualR;
  for (PointKind kind : {PointKind::kJointCopy, PointKind::kJointIndependent}) {
    PointSpec spec;
    spec.kind = kind;
    spec.seed = 17;
    const auto [x, y] = generate_pair(spec);
    const double kx = precision_complexity(*cm, *x, r, opt);
    const double ky = precision_complexity(*cm, *y, r, opt);
    const double kxy = precision_complexity(*cm, *JointSource::make(x, y), r, opt);
    const double kx_y = cond_precision_complexity(*cm, *x, *y, r, r, opt);
    const double mutual = std::max(0.0, kx + ky - kxy);
    cached.push_back({to_string(kind), std::abs(kxy - kx_y - ky) / r, std::abs(mutual - (kx - kx_y)) / r});
  }
  return cached;
}

Verdict chain_residual() {
  bool ok = true;
  std::string detail;
  for (const auto& p : residuals()) {
    ok = ok && p.chain <= kResidualMax;
    detail += fmt("%s %.4f; ", p.name.c_str(), p.chain);
  }
  return {ok, detail + fmt("|K(x,y) - K(x|y) - K(y)|/r at r = 2^13, limit %.2f", kResidualMax)};
}

Verdict mutual_residual() {
  bool ok = true;
  std::string detail;
  for (const auto& p : residuals()) {
    ok = ok && p.mutual <= kResidualMax;
    detail += fmt("%s %.4f; ", p.name.c_str(), p.mutual);
  }
  return {ok, detail + fmt("|I(x:y) - (K(x) - K(x|y))|/r at r = 2^13, limit %.2f", kResidualMax)};
}

// 10 -------------------------------------------------------------------------
std::vector<std::pair<std::string, std::pair<SourcePtr, SourcePtr>>> generator_pairs() {
  std::vector<std::pair<std::string, std::pair<SourcePtr, SourcePtr>>> out;
  PointSpec spec;
  spec.seed = 23;
  for (PointKind kind : {PointKind::kJointCopy, PointKind::kJointIndependent, PointKind::kBernoulli,
                         PointKind::kBlockDilution, PointKind::kCantor}) {
    spec.kind = kind;
    spec.p = kind == PointKind::kBernoulli ? 0.11 : 0.5;
    out.push_back({to_string(kind), generate_pair(spec)});
  }
  PointSpec line;
  line.kind = PointKind::kLine;
  line.seed = 23;
  line.m = "random";
  line.b = "1/3";
  const SourcePtr l = generate_point(line);
  // x against the line's second coordinate m x + b
  const SourcePtr x = coefficient_source("random", line.seed, kLineAbscissaStream);
  const SourcePtr m = coefficient_source("random", line.seed, kLineSlopeStream);
  const SourcePtr y = std::make_shared<AffineSource>(
      x, std::vector<std::pair<SourcePtr, SourcePtr>>{{m, RationalSource::make({Rational(1, 3)})}});
  out.push_back({"line", {x, y}});
  return out;
}

Verdict schedule_robustness() {
  const ModelPtr cm = make_model("cm");
  EstimatorOptions opt;
  opt.threads = threads();
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, pair] : generator_pairs()) {
    PrecisionSchedule s;
    s.r_max = kRobustRMax;
    const DimPair id = cond_dim_pair(*cm, *pair.first, *pair.second, s, opt);
    double change = 0.0;
    for (ScheduleMode mode : {ScheduleMode::kPlusSqrt, ScheduleMode::kMinusSqrt}) {
      s.mode = mode;
      const DimPair d = cond_dim_pair(*cm, *pair.first, *pair.second, s, opt);
      change = std::max({change, std::abs(d.lower - id.lower), std::abs(d.upper - id.upper)});
    }
    worst = std::max(worst, change);
    ok = ok && change <= kRobustMax;
    detail += fmt("%s (%.3f, %.3f) max change %.4f; ", name.c_str(), id.lower, id.upper, change);
  }
  return {ok, detail + fmt("worst %.4f <= %.2f", worst, kRobustMax)};
}

// 11 -------------------------------------------------------------------------
Verdict sensitivity() {
  const ModelPtr cm = make_model("cm");
  EstimatorOptions opt;
  opt.threads = threads();
  PrecisionSchedule sched;
  sched.r_max = kSensitivityRMax;
  const auto pairs = generator_pairs();
  std::size_t mono_r = 0, lip_r = 0, mono_s = 0, lip_s = 0, checks = 0;
  for (const auto& [name, pair] : pairs) {
    const auto& [x, y] = pair;
    const PrecisionCurve c = k_curve(*cm, *x, sched, opt);
    for (std::size_t i = 1; i < c.size(); ++i) {
      const double delta = c.r[i] - c.r[i - 1];
      ++checks;
      if (c.value[i] < c.value[i - 1]) ++mono_r;
      if (c.value[i] > c.value[i - 1] + (x->dim() + 0.5) * delta + kLipschitzExtra) ++lip_r;
    }
    const int r = 512;
    const std::vector<int> s_values{64, 84, 110, 143, 186, 242, 315, 410, 533, 693};
    const std::vector<double> ladder = cond_precision_ladder(*cm, *x, *y, r, s_values, opt);
    for (std::size_t i = 1; i < ladder.size(); ++i) {
      const double delta = s_values[i] - s_values[i - 1];
      ++checks;
      if (ladder[i] > ladder[i - 1]) ++mono_s;
      if (ladder[i] < ladder[i - 1] - (y->dim() + 0.5) * delta - kLipschitzExtra) ++lip_s;
    }
  }
  return {mono_r + lip_r + mono_s + lip_s == 0,
          fmt("%zu steps on %zu points; r-monotonicity %zu, r-Lipschitz %zu, s-antimonotonicity %zu, "
              "s-Lipschitz %zu violations (slack (n+0.5)D + %.0f)",
              checks, pairs.size(), mono_r, lip_r, mono_s, lip_s, kLipschitzExtra)};
}

// 12 -------------------------------------------------------------------------
Verdict point_to_set() {
  const ModelPtr cm = make_model("cm");
  EstimatorOptions opt;
  opt.threads = threads();
  PrecisionSchedule sched;
  sched.r_max = kP2SRMax;
  PointToSetOptions p2s;
  p2s.dim_points = kP2SPoints;

  SetSpec cantor;
  cantor.kind = SetKind::kCantor;
  cantor.dim = 1;
  cantor.depth = 12;
  cantor.seed = 3;
  const PointToSetReport rc = point_to_set_audit(*cm, cantor, sched, p2s, opt);
  const double analytic = std::log(2.0) / std::log(3.0);
  const bool box_ok = std::abs(rc.box.slope - analytic) <= kCantorBoxTol;
  const bool gap_ok = std::abs(rc.box.slope - rc.max_lower) <= kCantorGapTol;

  SetSpec square;
  square.seed = 3;
  const PointSample sq = generate_set(square, 10000);
  const double sq_box = box_counting_dim(sq, 1, unsaturated_box_precision(sq));
  const bool square_ok = std::abs(sq_box - 2.0) <= kSquareBoxTol;

  std::size_t runs = 0, card_fail = 0;
  auto cover_runs = [&](const PointSample& sample, std::initializer_list<int> rs, std::initializer_list<double> ss) {
    for (int r : rs) {
      for (double s : ss) {
        const CoverResult c = low_complexity_cover_cost(*cm, sample, s, r, threads());
        ++runs;
        const long double limit = std::exp2(static_cast<long double>(r) * s + 1.0L);
        if (!(static_cast<long double>(c.cover.size()) < limit) || !c.cardinality_ok) ++card_fail;
      }
    }
  };
  cover_runs(generate_set(square, 200), {4, 6, 8}, {0.5, 1.0, 1.5, 2.0});
  cover_runs(generate_set(cantor, 200), {6, 10, 14}, {0.3, 0.63, 1.0});
  SetSpec single;
  single.kind = SetKind::kSingleton;
  cover_runs(generate_set(single, 1), {4, 12, 24}, {0.25, 1.0, 2.0});

  return {box_ok && gap_ok && square_ok && card_fail == 0,
          fmt("Cantor box %.4f vs %.4f (tol %.2f), max point dim %.4f, gap %.4f (tol %.2f); square box %.4f "
              "(tol %.1f); cover cardinality %zu/%zu runs ok",
              rc.box.slope, analytic, kCantorBoxTol, rc.max_lower, rc.box.slope - rc.max_lower, kCantorGapTol,
              sq_box, kSquareBoxTol, runs - card_fail, runs)};
}

// 13 -------------------------------------------------------------------------
std::map<std::string, std::string> csv_bodies(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

Verdict reproducibility() {
  using cli::Json;
  const std::vector<Json> configs = {
      Json{{"command", "dim"}, {"seed", 5}, {"point", {{"kind", "bernoulli"}, {"p", 0.3}}}, {"schedule", {{"r_max", 2048}}}},
      Json{{"command", "cond-dim"}, {"seed", 5}, {"point", {{"kind", "joint_independent"}}}, {"schedule", {{"r_max", 1024}, {"mode", "plus_sqrt"}}}},
      Json{{"command", "mdim"}, {"seed", 5}, {"point", {{"kind", "joint_copy"}}}, {"schedule", {{"r_max", 1024}}}},
      Json{{"command", "audit"}, {"seed", 5}, {"point", {{"kind", "joint_independent"}}}, {"schedule", {{"r_max", 1024}}}},
      Json{{"command", "box-dim"}, {"seed", 5}, {"set", {{"kind", "cantor"}, {"dim", 1}}}},
      Json{{"command", "cover"}, {"seed", 5}, {"set", {{"kind", "unit_cube"}}}, {"params", {{"r_values", {4, 6}}, {"s", 1.5}}}},
      Json{{"command", "packing"}, {"seed", 5}, {"set", {{"kind", "segment_family"}}}, {"params", {{"count", 2000}}}},
      Json{{"command", "p2s-audit"}, {"seed", 5}, {"set", {{"kind", "unit_segment"}}}, {"schedule", {{"r_max", 1024}}},
           {"params", {{"count", 2000}, {"dim_points", 2}}}},
      Json{{"command", "kakeya-stats"}, {"seed", 5}, {"params", {{"r", 8}, {"trials", 2000}}}},
      Json{{"command", "kakeya-audit"}, {"seed", 5}, {"schedule", {{"r_max", 1024}}}},
  };
  const fs::path root = fs::temp_directory_path() / "dimlab_acceptance_repro";
  fs::remove_all(root);
  std::size_t files = 0, identical = 0;
  std::string first_diff;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::map<std::string, std::string> bodies[2];
    for (int run = 0; run < 2; ++run) {
      Json cfg = configs[i];
      cfg["output_dir"] = (root / std::to_string(i) / std::to_string(run)).string();
      cfg["threads"] = static_cast<int>(threads());
      cli::run_experiment(cfg);
      bodies[run] = csv_bodies(cfg["output_dir"].get<std::string>());
    }
    for (const auto& [name, body] : bodies[0]) {
      ++files;
      const auto it = bodies[1].find(name);
      if (it != bodies[1].end() && it->second == body && !body.empty()) {
        ++identical;
      } else if (first_diff.empty()) {
        first_diff = fmt(" first difference: %s/%s", configs[i]["command"].get<std::string>().c_str(), name.c_str());
      }
    }
  }
  fs::remove_all(root);
  return {files > 0 && identical == files,
          fmt("%zu/%zu CSV files byte-identical across re-runs of %zu configs%s", identical, files, configs.size(),
              first_diff.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"kakeya reconstruction exact", kakeya_exact},
      {"kakeya candidate-rank bound", kakeya_h_bound},
      {"delta code bound and Kraft", delta_code_bound},
      {"lattice point in every ball", lattice_points},
      {"toy machine exact properties", machine_properties},
      {"entropy convergence (lz78)", entropy_convergence},
      {"block dilution dimensions", block_dilution},
      {"chain-rule residual", chain_residual},
      {"mutual-information residual", mutual_residual},
      {"schedule robustness", schedule_robustness},
      {"sensitivity bounds", sensitivity},
      {"point-to-set audit", point_to_set},
      {"reproducible CSV bodies", reproducibility},
  };
  // optional list of criterion numbers to run
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
