#include "dimlab/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "dimlab/error.hpp"
#include "dimlab/parallel.hpp"

namespace dimlab {

std::string to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::kIdentity: return "identity";
    case ScheduleMode::kPlusSqrt: return "plus_sqrt";
    case ScheduleMode::kMinusSqrt: return "minus_sqrt";
  }
  return "?";
}

ScheduleMode schedule_mode_from_string(const std::string& s) {
  if (s == "identity") return ScheduleMode::kIdentity;
  if (s == "plus_sqrt") return ScheduleMode::kPlusSqrt;
  if (s == "minus_sqrt") return ScheduleMode::kMinusSqrt;
  throw Error(errc::kInvalidSchedule, "unknown schedule mode '" + s + "'");
}

void PrecisionSchedule::validate() const {
  if (r1 < 1) throw Error(errc::kInvalidSchedule, "r1 must be >= 1");
  if (!(rho > 1.0)) throw Error(errc::kInvalidSchedule, "rho must be > 1");
  if (r_max < r1) throw Error(errc::kInvalidSchedule, "r_max must be >= r1");
  if (!(window > 0.0 && window <= 1.0)) throw Error(errc::kInvalidSchedule, "window must be in (0, 1]");
}

std::vector<int> PrecisionSchedule::precisions() const {
  validate();
  std::vector<int> out;
  double r = r1;
  int last = 0;
  while (true) {
    int k = std::max(last + 1, static_cast<int>(std::ceil(r - 1e-9)));
    if (k >= r_max) break;
    out.push_back(k);
    last = k;
    r = k * rho;
  }
  out.push_back(r_max);
  return out;
}

namespace {

int ceil_sqrt(int r) {
  int s = static_cast<int>(std::sqrt(static_cast<double>(r)));
  while (s * s < r) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= r) --s;
  return s;
}

}  // namespace

int PrecisionSchedule::s_of(int r) const {
  switch (mode) {
    case ScheduleMode::kIdentity: return r;
    case ScheduleMode::kPlusSqrt: return r + ceil_sqrt(r);
    case ScheduleMode::kMinusSqrt: return std::max(1, r - ceil_sqrt(r));
  }
  return r;
}

std::string PrecisionSchedule::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "r1=%d;rho=%.4g;r_max=%d;mode=%s;window=%.4g", r1, rho, r_max,
                to_string(mode).c_str(), window);
  return buf;
}

std::size_t tail_start(std::size_t samples, double window) {
  const auto keep = static_cast<std::size_t>(std::ceil(window * static_cast<double>(samples) - 1e-9));
  return samples - std::clamp<std::size_t>(keep, 1, samples);
}

DimPair dim_pair(const PrecisionCurve& curve, double n, double window) {
  if (curve.size() < kMinCurveSamples) {
    throw Error(errc::kInsufficientSamples, "need at least 12 samples, have " + std::to_string(curve.size()));
  }
  DimPair out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = tail_start(curve.size(), window); i < curve.size(); ++i) {
    const double q = curve.ratio(i);
    out.lower = std::min(out.lower, q);
    out.upper = std::max(out.upper, q);
  }
  out.lower = std::clamp(out.lower, 0.0, n);
  out.upper = std::clamp(out.upper, 0.0, n);
  return out;
}

void regularize_nondecreasing(PrecisionCurve& curve) {
  for (std::size_t i = 1; i < curve.size(); ++i) curve.value[i] = std::max(curve.value[i], curve.value[i - 1]);
}

namespace {

template <class F>
PrecisionCurve sample_curve(const std::string& label, const PrecisionSchedule& schedule,
                            const EstimatorOptions& opt, F&& f) {
  PrecisionCurve c;
  c.label = label;
  c.schedule = schedule.describe();
  c.r = schedule.precisions();
  c.value.assign(c.r.size(), 0.0);
  // Largest precisions first so the longest jobs start early.
  parallel_for(c.r.size(), opt.threads, [&](std::size_t k) {
    const std::size_t i = c.r.size() - 1 - k;
    c.value[i] = f(c.r[i]);
  });
  return c;
}

EstimatorOptions inner_serial(const EstimatorOptions& opt) {
  EstimatorOptions o = opt;
  o.threads = 1;
  return o;
}

}  // namespace

PrecisionCurve k_curve(const ComplexityModel& model, const PointSource& x,
                       const PrecisionSchedule& schedule, const EstimatorOptions& opt) {
  const EstimatorOptions inner = inner_serial(opt);
  PrecisionCurve c = sample_curve("K_r(x)", schedule, opt,
                                  [&](int r) { return precision_complexity(model, x, r, inner); });
  regularize_nondecreasing(c);
  return c;
}

PrecisionCurve cond_curve(const ComplexityModel& model, const PointSource& x, const PointSource& y,
                          const PrecisionSchedule& schedule, const EstimatorOptions& opt) {
  const EstimatorOptions inner = inner_serial(opt);
  PrecisionCurve c = sample_curve("K_r,s(r)(x|y)", schedule, opt, [&](int r) {
    return cond_precision_complexity(model, x, y, r, schedule.s_of(r), inner);
  });
  regularize_nondecreasing(c);
  return c;
}

PrecisionCurve mutual_curve_from(const PrecisionCurve& kx, const PrecisionCurve& ky,
                                 const PrecisionCurve& kxy) {
  if (kx.r != ky.r || kx.r != kxy.r) throw Error(errc::kInvalidSchedule, "curves sampled at different precisions");
  PrecisionCurve c;
  c.label = "I_r(x:y)";
  c.schedule = kx.schedule;
  c.r = kx.r;
  for (std::size_t i = 0; i < kx.size(); ++i) {
    c.value.push_back(std::max(0.0, kx.value[i] + ky.value[i] - kxy.value[i]));
  }
  return c;
}

PrecisionCurve mutual_curve(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                            const PrecisionSchedule& schedule, const EstimatorOptions& opt) {
  PrecisionSchedule id = schedule;
  id.mode = ScheduleMode::kIdentity;
  return mutual_curve_from(k_curve(model, *x, id, opt), k_curve(model, *y, id, opt),
                           k_curve(model, *JointSource::make(x, y), id, opt));
}

PrecisionCurve side_info_curve(const ComplexityModel& model, const PointSource& x,
                               const PointSource& y, const PrecisionSchedule& schedule,
                               const EstimatorOptions& opt) {
  const EstimatorOptions inner = inner_serial(opt);
  PrecisionCurve c = sample_curve("K^y_r(x)", schedule, opt,
                                  [&](int r) { return side_info_complexity(model, x, y, r, inner); });
  regularize_nondecreasing(c);
  return c;
}

DimPair point_dim_pair(const ComplexityModel& model, const PointSource& x,
                       const PrecisionSchedule& schedule, const EstimatorOptions& opt) {
  return dim_pair(k_curve(model, x, schedule, opt), x.dim(), schedule.window);
}

DimPair cond_dim_pair(const ComplexityModel& model, const PointSource& x, const PointSource& y,
                      const PrecisionSchedule& schedule, const EstimatorOptions& opt) {
  return dim_pair(cond_curve(model, x, y, schedule, opt), x.dim(), schedule.window);
}

DimPair mdim_pair(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                  const PrecisionSchedule& schedule, const EstimatorOptions& opt) {
  return dim_pair(mutual_curve(model, x, y, schedule, opt), std::min(x->dim(), y->dim()), schedule.window);
}

IdentityAudit audit_identities(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                               const PrecisionSchedule& schedule, const EstimatorOptions& opt,
                               const AuditTolerances& tol) {
  PrecisionSchedule id = schedule;
  id.mode = ScheduleMode::kIdentity;
  IdentityAudit a;
  a.kx = k_curve(model, *x, id, opt);
  a.ky = k_curve(model, *y, id, opt);
  a.kxy = k_curve(model, *JointSource::make(x, y), id, opt);
  a.kx_given_y = cond_curve(model, *x, *y, id, opt);
  a.ky_given_x = cond_curve(model, *y, *x, id, opt);
  a.side_x_given_y = side_info_curve(model, *x, *y, id, opt);
  a.mutual = mutual_curve_from(a.kx, a.ky, a.kxy);
  a.kx.label = "K_r(x)";
  a.ky.label = "K_r(y)";
  a.kxy.label = "K_r(x,y)";
  a.kx_given_y.label = "K_r(x|y)";
  a.ky_given_x.label = "K_r(y|x)";

  a.lemma_constant = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.kx.size(); ++i) {
    const double r = a.kx.r[i];
    a.chain_residual.push_back(std::abs(a.kxy.value[i] - a.kx_given_y.value[i] - a.ky.value[i]) / r);
    a.mutual_residual.push_back(std::abs(a.mutual.value[i] - (a.kx.value[i] - a.kx_given_y.value[i])) / r);
    const double excess = a.side_x_given_y.value[i] - a.kx_given_y.value[i] -
                          static_cast<double>(nat_code_length(static_cast<std::uint64_t>(a.kx.r[i])));
    a.side_info_excess.push_back(excess);
    a.lemma_constant = std::max(a.lemma_constant, excess);
  }

  auto add = [&](std::string name, double lhs, double rhs) {
    const bool ok = lhs <= rhs;
    a.checks.push_back({std::move(name), lhs, rhs, ok});
    a.pass = a.pass && ok;
  };
  add("chain_residual", a.chain_residual.back(), tol.residual);
  add("mutual_residual", a.mutual_residual.back(), tol.residual);

  const double w = schedule.window;
  const DimPair dx = dim_pair(a.kx, x->dim(), w);
  const DimPair dxy = dim_pair(a.kxy, x->dim() + y->dim(), w);
  const DimPair dx_y = dim_pair(a.kx_given_y, x->dim(), w);
  const DimPair dy_x = dim_pair(a.ky_given_x, y->dim(), w);
  const DimPair md = dim_pair(a.mutual, std::min(x->dim(), y->dim()), w);
  const double s = tol.dim_slack;
  add("mdim >= dim(x) - Dim(x|y)", dx.lower - dx_y.upper, md.lower + s);
  add("Mdim <= Dim(x) - dim(x|y)", md.upper, dx.upper - dx_y.lower + s);
  add("dim(x) + dim(y|x) <= dim(x,y)", dx.lower + dy_x.lower, dxy.lower + s);
  add("dim(x,y) <= dim(x) + Dim(y|x)", dxy.lower, dx.lower + dy_x.upper + s);
  add("dim(x) + Dim(y|x) <= Dim(x,y)", dx.lower + dy_x.upper, dxy.upper + s);
  add("Dim(x,y) <= Dim(x) + Dim(y|x)", dxy.upper, dx.upper + dy_x.upper + s);
  add("K^y(x) - K(x|y) - K(r) <= c", a.lemma_constant, tol.side_info_allowance);
  return a;
}

}  // namespace dimlab
