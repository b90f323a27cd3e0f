#pragma once

#include <string>
#include <vector>

#include "dimlab/complexity.hpp"
#include "dimlab/dimension.hpp"
#include "dimlab/generators.hpp"

namespace dimlab {

struct BoxCount {
  int r = 0;
  std::size_t cells = 0;
};

struct BoxDimension {
  double slope = 0.0;
  std::vector<BoxCount> counts;
};

/// Least-squares slope of log2 N(r) against r for r_lo <= r <= r_hi, where
/// N(r) counts occupied dyadic cells of side 2^{-r}. Throws
/// geometry.DegenerateRange unless 1 <= r_lo < r_hi <= every point's precision.
BoxDimension box_counting(const PointSample& sample, int r_lo, int r_hi);
double box_counting_dim(const PointSample& sample, int r_lo, int r_hi);

/// Largest r such that N(r) <= sample size / 10, so the fit stays clear of
/// saturation (capped by the sample precision).
int unsaturated_box_precision(const PointSample& sample);

struct CoverElement {
  Ball ball;
  double witness = 0.0;
};

struct CoverResult {
  int r = 0;
  double s = 0.0;
  std::vector<CoverElement> cover;
  std::size_t candidates = 0;
  std::size_t covered = 0;
  std::size_t uncovered = 0;
  /// Sum of |ball|^s = kept * 2^{(1-r)s}.
  double cost = 0.0;
  /// kept < 2^{rs+1}
  bool cardinality_ok = false;
};

inline constexpr std::size_t kCoverGridCap = std::size_t{1} << 22;

/// Balls B_{2^{-r}}(q) for grid centres q at precision r around the sample's
/// bounding box whose estimated complexity is at most r*s.
CoverResult low_complexity_cover_cost(const ComplexityModel& model, const PointSample& sample,
                                      double s, int r, unsigned threads = 1);

struct PackingResult {
  std::vector<DyadicPoint> centers;
  int radius_exp = 0;
  double cost = 0.0;
};

/// Greedy disjoint packing by balls of radius 2^{-(delta_exp+2)} centred at
/// sample points, scanned in lexicographic order.
PackingResult packing(const PointSample& sample, double s, int delta_exp);
double packing_cost(const PointSample& sample, double s, int delta_exp);
/// Exact check that open balls of radius 2^{-radius_exp} at the centres are
/// pairwise disjoint.
bool pairwise_disjoint(const std::vector<DyadicPoint>& centers, int radius_exp);

struct PointDimension {
  std::size_t index = 0;
  DimPair dim;
};

struct PointToSetReport {
  std::string set;
  double analytic = 0.0;
  BoxDimension box;
  int box_r_lo = 0;
  int box_r_hi = 0;
  std::vector<PointDimension> points;
  double max_lower = 0.0;
  double max_upper = 0.0;
  /// box - max point lower / upper dimension.
  double gap_lower = 0.0;
  double gap_upper = 0.0;
  std::string note;
};

struct PointToSetOptions {
  std::size_t box_samples = 10000;
  int box_r_lo = 1;
  /// 0 picks unsaturated_box_precision.
  int box_r_hi = 0;
  std::size_t dim_points = 8;
};

PointToSetReport point_to_set_audit(const ComplexityModel& model, const SetSpec& spec,
                                    const PrecisionSchedule& schedule,
                                    const PointToSetOptions& p2s = {},
                                    const EstimatorOptions& opt = {});

}  // namespace dimlab
