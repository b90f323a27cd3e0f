#include "dimlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dimlab/error.hpp"
#include "dimlab/parallel.hpp"

namespace dimlab {

namespace {

using Cell = std::vector<Integer>;

Cell cell_of(const DyadicPoint& p, int r) { return p.floored(r).refined(r).nums(); }

std::size_t count_cells(const PointSample& sample, int r) {
  std::vector<Cell> cells;
  cells.reserve(sample.points.size());
  for (const DyadicPoint& p : sample.points) cells.push_back(cell_of(p, r));
  std::sort(cells.begin(), cells.end());
  return static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

int min_precision(const PointSample& sample) {
  int p = std::numeric_limits<int>::max();
  for (const DyadicPoint& x : sample.points) p = std::min(p, x.precision());
  return p;
}

void check_sample(const PointSample& sample) {
  if (sample.points.empty()) throw Error(errc::kDegenerateRange, "empty sample");
  for (const DyadicPoint& p : sample.points) {
    if (p.dim() != sample.points.front().dim()) throw Error(errc::kDegenerateRange, "mixed dimensions in sample");
  }
}

}  // namespace

BoxDimension box_counting(const PointSample& sample, int r_lo, int r_hi) {
  check_sample(sample);
  if (r_lo < 1 || r_hi <= r_lo) throw Error(errc::kDegenerateRange, "need 1 <= r_lo < r_hi");
  if (r_hi > min_precision(sample)) throw Error(errc::kDegenerateRange, "r_hi exceeds the sample resolution");
  BoxDimension out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int r = r_lo; r <= r_hi; ++r) {
    const std::size_t n = count_cells(sample, r);
    out.counts.push_back({r, n});
    const double y = std::log2(static_cast<double>(n));
    sx += r;
    sy += y;
    sxx += static_cast<double>(r) * r;
    sxy += r * y;
  }
  const double k = static_cast<double>(out.counts.size());
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

double box_counting_dim(const PointSample& sample, int r_lo, int r_hi) {
  return box_counting(sample, r_lo, r_hi).slope;
}

int unsaturated_box_precision(const PointSample& sample) {
  check_sample(sample);
  const std::size_t limit = std::max<std::size_t>(1, sample.points.size() / 10);
  const int cap = min_precision(sample);
  int best = std::min(2, cap);
  for (int r = 2; r <= cap; ++r) {
    if (count_cells(sample, r) > limit) break;
    best = r;
  }
  return best;
}

CoverResult low_complexity_cover_cost(const ComplexityModel& model, const PointSample& sample,
                                      double s, int r, unsigned threads) {
  check_sample(sample);
  const int n = sample.points.front().dim();
  if (!(s > 0.0) || s > n) throw Error(errc::kDegenerateRange, "cover exponent must be in (0, n]");
  if (r < 1) throw Error(errc::kDegenerateRange, "cover precision must be >= 1");

  std::vector<Integer> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < sample.points.size(); ++k) {
    const Cell c = cell_of(sample.points[k], r);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (k == 0 || c[i] < lo[i]) lo[i] = c[i];
      if (k == 0 || c[i] > hi[i]) hi[i] = c[i];
    }
  }
  double total = 1.0;
  for (int i = 0; i < n; ++i) {
    lo[static_cast<std::size_t>(i)] -= 1;
    hi[static_cast<std::size_t>(i)] += 1;
    total *= Integer(hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1).get_d();
  }
  if (total > static_cast<double>(kCoverGridCap)) {
    throw Error(errc::kCandidateExplosion, "cover grid has " + std::to_string(total) + " centres");
  }

  std::vector<Cell> centres;
  centres.reserve(static_cast<std::size_t>(total));
  Cell cur = lo;
  while (true) {
    centres.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == hi[static_cast<std::size_t>(i)]) {
      cur[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) break;
    cur[static_cast<std::size_t>(i)] += 1;
  }

  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (centres.size() + kChunk - 1) / kChunk;
  std::vector<double> cost(centres.size());
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(centres.size(), begin + kChunk);
    std::vector<BitString> ws;
    ws.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) ws.push_back(encode_point(DyadicPoint(centres[k], r)));
    const std::vector<double> est = model.estimate_batch(ws, BitString());
    std::copy(est.begin(), est.end(), cost.begin() + static_cast<std::ptrdiff_t>(begin));
  });

  CoverResult out;
  out.r = r;
  out.s = s;
  out.candidates = centres.size();
  const double threshold = r * s;
  std::set<Cell> kept;
  for (std::size_t k = 0; k < centres.size(); ++k) {
    if (cost[k] <= threshold) {
      out.cover.push_back({Ball(DyadicPoint(centres[k], r), r), cost[k]});
      kept.insert(centres[k]);
    }
  }
  const double kept_count = static_cast<double>(out.cover.size());
  out.cost = kept_count * std::exp2((1.0 - r) * s);
  out.cardinality_ok = kept_count < std::exp2(threshold + 1.0);

  // A centre strictly within 2^{-r} of p differs from p's cell by at most one
  // step per coordinate.
  for (const DyadicPoint& p : sample.points) {
    const Cell base = cell_of(p, r);
    bool hit = false;
    std::vector<int> off(static_cast<std::size_t>(n), -1);
    while (!hit) {
      Cell c = base;
      for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
      if (kept.count(c) && strictly_within(p, DyadicPoint(c, r), r)) hit = true;
      int i = n - 1;
      while (i >= 0 && off[static_cast<std::size_t>(i)] == 1) off[static_cast<std::size_t>(i--)] = -1;
      if (i < 0) break;
      ++off[static_cast<std::size_t>(i)];
    }
    (hit ? out.covered : out.uncovered) += 1;
  }
  return out;
}

PackingResult packing(const PointSample& sample, double s, int delta_exp) {
  check_sample(sample);
  if (!(s > 0.0)) throw Error(errc::kDegenerateRange, "packing exponent must be > 0");
  const int n = sample.points.front().dim();
  std::vector<DyadicPoint> order = sample.points;
  std::sort(order.begin(), order.end(), [](const DyadicPoint& a, const DyadicPoint& b) { return lex_less(a, b); });

  PackingResult out;
  out.radius_exp = delta_exp + 2;
  // Disjoint open balls of radius rho need centres at distance >= 2 rho; any
  // conflicting centre lies in a neighbouring cell of side 2 rho.
  const int cell_exp = delta_exp + 1;
  const Rational min_sq(Integer(1), Integer(1) << (2 * cell_exp));
  std::map<Cell, std::vector<std::size_t>> grid;
  for (const DyadicPoint& p : order) {
    const Cell base = cell_of(p, cell_exp);
    bool clash = false;
    std::vector<int> off(static_cast<std::size_t>(n), -1);
    while (!clash) {
      Cell c = base;
      for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
      if (auto it = grid.find(c); it != grid.end()) {
        for (std::size_t k : it->second) {
          if (squared_distance(p, out.centers[k]) < min_sq) clash = true;
        }
      }
      int i = n - 1;
      while (i >= 0 && off[static_cast<std::size_t>(i)] == 1) off[static_cast<std::size_t>(i--)] = -1;
      if (i < 0) break;
      ++off[static_cast<std::size_t>(i)];
    }
    if (clash) continue;
    grid[base].push_back(out.centers.size());
    out.centers.push_back(p);
  }
  out.cost = static_cast<double>(out.centers.size()) * std::exp2(-static_cast<double>(cell_exp) * s);
  return out;
}

double packing_cost(const PointSample& sample, double s, int delta_exp) {
  return packing(sample, s, delta_exp).cost;
}

bool pairwise_disjoint(const std::vector<DyadicPoint>& centers, int radius_exp) {
  const Rational min_sq(Integer(1), Integer(1) << (2 * (radius_exp - 1)));
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      if (squared_distance(centers[i], centers[j]) < min_sq) return false;
    }
  }
  return true;
}

PointToSetReport point_to_set_audit(const ComplexityModel& model, const SetSpec& spec,
                                    const PrecisionSchedule& schedule, const PointToSetOptions& p2s,
                                    const EstimatorOptions& opt) {
  PointToSetReport out;
  out.set = to_string(spec.kind);
  out.analytic = analytic_set_dimension(spec);
  const PointSample sample = generate_set(spec, p2s.box_samples);
  out.box_r_lo = p2s.box_r_lo;
  out.box_r_hi = p2s.box_r_hi > 0 ? p2s.box_r_hi : std::max(p2s.box_r_lo + 1, unsaturated_box_precision(sample));
  out.box = box_counting(sample, out.box_r_lo, out.box_r_hi);
  out.points.resize(p2s.dim_points);
  parallel_for(p2s.dim_points, opt.threads, [&](std::size_t i) {
    EstimatorOptions inner = opt;
    inner.threads = 1;
    out.points[i] = {i, point_dim_pair(model, *set_point_source(spec, i), schedule, inner)};
  });
  for (const PointDimension& p : out.points) {
    out.max_lower = std::max(out.max_lower, p.dim.lower);
    out.max_upper = std::max(out.max_upper, p.dim.upper);
  }
  out.gap_lower = out.box.slope - out.max_lower;
  out.gap_upper = out.box.slope - out.max_upper;
  out.note = "box-counting dimension is an upper bound on Hausdorff dimension; point dimensions are one-sided evidence";
  return out;
}

}  // namespace dimlab
