#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dimlab/complexity.hpp"
#include "dimlab/dimension.hpp"

namespace dimlab {

/// Approximates the intercept of a line from an approximation of its slope.
/// An empty result means the oracle rejects u.
class LineOracle {
 public:
  virtual ~LineOracle() = default;
  virtual std::optional<DyadicPoint> eval(const DyadicPoint& u, int r) const = 0;
  /// eval(i / 2^r, r) for i = 0 .. 2^r.
  virtual std::vector<std::optional<DyadicPoint>> eval_grid(int r) const;
  virtual std::string name() const = 0;
};

/// Answers truncate(b, r) for every u; always within 2^{-r} of b.
class ExactLineOracle final : public LineOracle {
 public:
  ExactLineOracle(Rational m, Rational b) : m_(std::move(m)), b_(std::move(b)) {}
  std::optional<DyadicPoint> eval(const DyadicPoint& u, int r) const override;
  std::vector<std::optional<DyadicPoint>> eval_grid(int r) const override;
  std::string name() const override { return "exact"; }
  const Rational& m() const { return m_; }
  const Rational& b() const { return b_; }

 private:
  Rational m_;
  Rational b_;
};

/// Like the exact oracle, but only on the sub-grid i = 0 mod stride.
class SubgridLineOracle final : public LineOracle {
 public:
  SubgridLineOracle(Rational m, Rational b, std::uint64_t stride);
  std::optional<DyadicPoint> eval(const DyadicPoint& u, int r) const override;
  std::string name() const override { return "subgrid:" + std::to_string(stride_); }

 private:
  ExactLineOracle exact_;
  std::uint64_t stride_;
};

class RejectOracle final : public LineOracle {
 public:
  std::optional<DyadicPoint> eval(const DyadicPoint&, int) const override { return std::nullopt; }
  std::string name() const override { return "reject"; }
};

struct ReconstructionInput {
  int r = 0;
  DyadicPoint p;
  DyadicPoint q;
  const LineOracle* oracle = nullptr;
  std::uint64_t h = 1;
};

struct Triple {
  DyadicPoint u;
  DyadicPoint v;
  DyadicPoint p;
};

inline constexpr int kMaxKakeyaPrecision = 24;

/// The h-th i in 0..2^r (increasing) with |u_i p + v_i - q| < 2^{2-r},
/// u_i = i 2^{-r}, v_i = oracle(u_i). Throws kakeya.NoSuchCandidate.
Triple reconstruct(const ReconstructionInput& in);

/// Indices passing the tolerance test, in order.
std::vector<std::uint64_t> passing_candidates(int r, const DyadicPoint& p, const DyadicPoint& q,
                                              const std::vector<std::optional<DyadicPoint>>& v);

struct MinH {
  std::uint64_t h = 0;
  std::uint64_t index = 0;
  std::uint64_t passing = 0;
  /// Every u_j within 2^{-r} of m passed the test.
  bool tolerance_chain = true;
};

/// Smallest h whose reconstruction lies in B_{2^{1-r}}(m, b, x), with
/// p = truncate(x, r), q = truncate(mx + b, r). Throws
/// kakeya.InternalInvariantViolation if there is none.
MinH min_h(int r, const Rational& m, const Rational& b, const Rational& x, const LineOracle& oracle);
MinH min_h(int r, const Rational& m, const Rational& b, const Rational& x, const LineOracle& oracle,
           const std::vector<std::optional<DyadicPoint>>& grid);

/// lambda(C^r_i), C^r_i = {x in [0,1] : |u_i x + v_i - (m x + b)| < 2^{3-r}}.
Rational candidate_interval_length(int r, const Rational& u, const Rational& v, const Rational& m,
                                   const Rational& b);

struct CandidateProfile {
  int r = 0;
  std::vector<Rational> lengths;
  /// Sum over i of min(2^{3-r}/|u_i - m|, 1) (1 when u_i = m), exact.
  Rational analytic_sum;
  /// 2 + 2^4 H_{2^r}, exact.
  Rational harmonic_bound;
  bool analytic_ok = false;
  /// lengths[i] <= min(2^{3-r}/|u_i - m|, 1) for every i with u_i != m.
  std::size_t interval_bound_violations = 0;
  /// Violations restricted to indices with v_i = b exactly.
  std::size_t interval_bound_violations_exact_v = 0;
  /// lengths[i] <= min(2^{4-r}/|u_i - m|, 1).
  std::size_t doubled_bound_violations = 0;
};

CandidateProfile candidate_profile(int r, const Rational& m, const Rational& b);

struct HTrial {
  std::uint64_t trial = 0;
  Rational x;
  std::uint64_t h = 0;
  double log2h_over_r = 0.0;
};

struct HStatistics {
  int r = 0;
  Rational m;
  Rational b;
  std::uint64_t seed = 0;
  std::vector<HTrial> trials;
  double mean = 0.0;
  double median = 0.0;
  std::uint64_t max = 0;
  double median_log2h_over_r = 0.0;
  double mean_bound = 0.0;
  bool mean_ok = false;
  bool tolerance_chain_ok = true;
  CandidateProfile profile;
};

/// x uniform on [0,1] at 64-bit dyadic resolution from mix3(seed, ., trial).
Rational uniform_trial_x(std::uint64_t seed, std::uint64_t trial);

HStatistics h_statistics(int r, const Rational& m, const Rational& b, std::size_t trials,
                         std::uint64_t seed, unsigned threads = 1);

struct LowerAuditReport {
  std::string m_spec;
  std::string b_spec;
  std::string x_spec;
  PrecisionCurve k_mbx;
  PrecisionCurve k_b_given_m;
  PrecisionCurve k_line;
  PrecisionCurve k_x_given_bm;
  PrecisionCurve k_m;
  /// (K_r(m,b,x) - K_r(b|m)) / r per sample.
  std::vector<double> lhs;
  double lhs_liminf = 0.0;
  DimPair line_dim;
  DimPair x_given_bm_dim;
  DimPair m_dim;
  double decomposition = 0.0;
  double slack = 0.25;
  bool lemma_ok = false;
  bool decomposition_ok = false;
};

/// m, b: a rational or "random"; x: "random" (Bernoulli(1/2)) or "m".
LowerAuditReport dim_lower_audit(const ComplexityModel& model, const std::string& m,
                                 const std::string& b, std::uint64_t seed,
                                 const PrecisionSchedule& schedule, const EstimatorOptions& opt = {},
                                 const std::string& x = "random", double slack = 0.25);

}  // namespace dimlab
