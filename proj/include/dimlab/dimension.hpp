#pragma once

#include <string>
#include <vector>

#include "dimlab/complexity.hpp"

namespace dimlab {

enum class ScheduleMode { kIdentity, kPlusSqrt, kMinusSqrt };

std::string to_string(ScheduleMode m);
ScheduleMode schedule_mode_from_string(const std::string& s);

/// Geometric precisions r1, ceil(r1 rho), ... up to r_max (always included),
/// with the conditioning precision s(r) chosen by `mode`.
struct PrecisionSchedule {
  int r1 = 64;
  double rho = 1.3;
  int r_max = 1 << 14;
  ScheduleMode mode = ScheduleMode::kIdentity;
  /// Fraction of the samples (taken from the end) forming the tail window.
  double window = 0.5;

  void validate() const;
  std::vector<int> precisions() const;
  int s_of(int r) const;
  std::string describe() const;
};

struct PrecisionCurve {
  std::string label;
  std::string schedule;
  std::vector<int> r;
  std::vector<double> value;

  std::size_t size() const { return r.size(); }
  double ratio(std::size_t i) const { return value[i] / r[i]; }
};

struct DimPair {
  double lower = 0.0;
  double upper = 0.0;
};

inline constexpr std::size_t kMinCurveSamples = 12;

/// Min and max of value/r over the last ceil(window * k) samples, clamped to
/// [0, n]. Throws dimension.InsufficientSamples below 12 samples.
DimPair dim_pair(const PrecisionCurve& curve, double n, double window = 0.5);
std::size_t tail_start(std::size_t samples, double window);

/// Running maximum along r.
void regularize_nondecreasing(PrecisionCurve& curve);

PrecisionCurve k_curve(const ComplexityModel& model, const PointSource& x,
                       const PrecisionSchedule& schedule, const EstimatorOptions& opt = {});
/// K_{r, s(r)}(x|y), regularized as a running maximum in r.
PrecisionCurve cond_curve(const ComplexityModel& model, const PointSource& x, const PointSource& y,
                          const PrecisionSchedule& schedule, const EstimatorOptions& opt = {});
/// I_r from already-regularized K curves, clipped at 0.
PrecisionCurve mutual_curve_from(const PrecisionCurve& kx, const PrecisionCurve& ky,
                                 const PrecisionCurve& kxy);
PrecisionCurve mutual_curve(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                            const PrecisionSchedule& schedule, const EstimatorOptions& opt = {});
PrecisionCurve side_info_curve(const ComplexityModel& model, const PointSource& x,
                               const PointSource& y, const PrecisionSchedule& schedule,
                               const EstimatorOptions& opt = {});

DimPair point_dim_pair(const ComplexityModel& model, const PointSource& x,
                       const PrecisionSchedule& schedule, const EstimatorOptions& opt = {});
DimPair cond_dim_pair(const ComplexityModel& model, const PointSource& x, const PointSource& y,
                      const PrecisionSchedule& schedule, const EstimatorOptions& opt = {});
DimPair mdim_pair(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                  const PrecisionSchedule& schedule, const EstimatorOptions& opt = {});

struct AuditCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct IdentityAudit {
  PrecisionCurve kx, ky, kxy, kx_given_y, ky_given_x, side_x_given_y, mutual;
  /// Per-sample |K(x,y) - K(x|y) - K(y)| / r.
  std::vector<double> chain_residual;
  /// Per-sample |I(x:y) - (K(x) - K(x|y))| / r.
  std::vector<double> mutual_residual;
  /// Per-sample K^y(x) - K(x|y) - |enc(r)|; its max is the audited constant.
  std::vector<double> side_info_excess;
  double lemma_constant = 0.0;
  std::vector<AuditCheck> checks;
  bool pass = true;
};

struct AuditTolerances {
  double residual = 0.2;
  double dim_slack = 0.2;
  double side_info_allowance = 32.0;
};

/// Chain rule, mutual-information identity, mutual-dimension bounds, the
/// four-link dimension chain and the side-information inequality, each as a
/// slack test. Residual checks look at the final (largest-r) sample.
IdentityAudit audit_identities(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                               const PrecisionSchedule& schedule, const EstimatorOptions& opt = {},
                               const AuditTolerances& tol = {});

}  // namespace dimlab
