#include <cmath>
#include <set>

#include "doctest.h"
#include "dimlab/error.hpp"
#include "dimlab/geometry.hpp"

using namespace dimlab;

namespace {

PointSample sample_of(SetKind kind, std::size_t count, int dim = 2, int depth = 12) {
  SetSpec s;
  s.kind = kind;
  s.dim = dim;
  s.depth = depth;
  return generate_set(s, count);
}

// Occupied cells by direct floor of every coordinate.
std::size_t cells_oracle(const PointSample& sample, int r) {
  std::set<std::vector<Integer>> cells;
  for (const DyadicPoint& p : sample.points) {
    std::vector<Integer> c;
    for (int i = 0; i < p.dim(); ++i) {
      const Rational scaled = p.coord(i) * Rational(Integer(1) << r);
      Integer f;
      mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      c.push_back(f);
    }
    cells.insert(c);
  }
  return cells.size();
}

}  // namespace

TEST_CASE("box counting examples") {
  const PointSample square = sample_of(SetKind::kUnitCube, 10000);
  const int hi = unsaturated_box_precision(square);
  CHECK(box_counting_dim(square, 1, hi) == doctest::Approx(2.0).epsilon(0.05));

  const PointSample cantor = sample_of(SetKind::kCantor, 10000, 1);
  CHECK(std::abs(box_counting_dim(cantor, 1, unsaturated_box_precision(cantor)) - std::log(2.0) / std::log(3.0)) <= 0.05);

  const PointSample single = sample_of(SetKind::kSingleton, 1);
  CHECK(box_counting_dim(single, 1, 40) <= 0.05);

  CHECK_THROWS_AS(box_counting(square, 5, 5), Error);
  CHECK_THROWS_AS(box_counting(square, 0, 5), Error);
  CHECK_THROWS_AS(box_counting(square, 1, kSamplePrecision + 1), Error);
}

TEST_CASE("box counts match direct cell enumeration") {
  const PointSample seg = sample_of(SetKind::kSegmentFamily, 3000);
  const BoxDimension b = box_counting(seg, 1, 12);
  REQUIRE(b.counts.size() == 12);
  for (const BoxCount& c : b.counts) CHECK(c.cells == cells_oracle(seg, c.r));
}

TEST_CASE("product with a point does not lower box dimension") {
  const PointSample cantor = sample_of(SetKind::kCantor, 5000, 1);
  PointSample product;
  const DyadicPoint pt = DyadicPoint::from_text("1 3 5").refined(kSamplePrecision);
  for (const DyadicPoint& p : cantor.points) product.points.push_back(p.joined(pt));
  const int hi = unsaturated_box_precision(cantor);
  CHECK(box_counting_dim(product, 1, hi) >= box_counting_dim(cantor, 1, hi) - 1e-12);
}

TEST_CASE("packing") {
  const PointSample single = sample_of(SetKind::kSingleton, 1);
  for (int delta : {0, 3, 9}) {
    const PackingResult p = packing(single, 1.5, delta);
    CHECK(p.centers.size() == 1);
    CHECK(p.radius_exp == delta + 2);
    CHECK(p.cost == doctest::Approx(std::pow(std::exp2(1 - delta - 2), 1.5)));
  }

  const PointSample square = sample_of(SetKind::kUnitCube, 20000);
  double prev3 = 1e9;
  for (int delta = 1; delta <= 5; ++delta) {
    const PackingResult p = packing(square, 2.0, delta);
    CHECK(pairwise_disjoint(p.centers, p.radius_exp));
    // disjoint balls of radius rho inside the square grown by rho
    const double rho = std::exp2(-(delta + 2));
    CHECK(p.cost <= 4.0 / M_PI * (1 + 2 * rho) * (1 + 2 * rho));
    const double c3 = packing_cost(square, 3.0, delta);
    CHECK(c3 < prev3);
    prev3 = c3;
  }
  CHECK(prev3 < 0.05);

  const std::vector<DyadicPoint> close{DyadicPoint::from_text("1 3 0"), DyadicPoint::from_text("1 3 1")};
  CHECK(pairwise_disjoint(close, 4));
  CHECK_FALSE(pairwise_disjoint(close, 3));
}

TEST_CASE("cover soundness and cardinality") {
  const ModelPtr model = make_model("cm");
  const PointSample square = sample_of(SetKind::kUnitCube, 300);
  std::size_t prev_covered = 0;
  for (double s : {0.05, 0.5, 1.0, 1.5, 2.0}) {
    const CoverResult c = low_complexity_cover_cost(*model, square, s, 6);
    CHECK(c.cardinality_ok);
    CHECK(static_cast<double>(c.cover.size()) < std::exp2(6 * s + 1));
    CHECK(c.covered + c.uncovered == square.points.size());
    CHECK(c.covered >= prev_covered);
    prev_covered = c.covered;
    CHECK(c.cost == doctest::Approx(c.cover.size() * std::exp2((1 - 6) * s)));
    for (const CoverElement& e : c.cover) {
      CHECK(e.witness <= 6 * s);
      CHECK(e.witness >= 0);
      CHECK(e.ball.radius_exp == 6);
    }
    std::size_t inside = 0;
    for (const DyadicPoint& p : square.points) {
      for (const CoverElement& e : c.cover) {
        if (e.ball.contains(p)) {
          ++inside;
          break;
        }
      }
    }
    CHECK(inside == c.covered);
  }
  const CoverResult low = low_complexity_cover_cost(*model, square, 0.05, 6);
  CHECK(low.uncovered > square.points.size() / 2);

  const PointSample origin = sample_of(SetKind::kSingleton, 1);
  CHECK(low_complexity_cover_cost(*model, origin, 2.0, 12).covered == 1);
  CHECK(low_complexity_cover_cost(*model, origin, 1.0, 24).covered == 1);
  CHECK_THROWS_AS(low_complexity_cover_cost(*model, square, 3.0, 4), Error);
}

TEST_CASE("point to set audit on small sets") {
  const ModelPtr model = make_model("cm");
  PrecisionSchedule sched;
  sched.r1 = 64;
  sched.r_max = 2048;
  PointToSetOptions opt;
  opt.dim_points = 2;
  SetSpec single;
  single.kind = SetKind::kSingleton;
  const PointToSetReport rep = point_to_set_audit(*model, single, sched, opt);
  CHECK(rep.box.slope <= 0.05);
  CHECK(rep.max_lower <= 0.05);
  CHECK(rep.points.size() == 2);
  CHECK_FALSE(rep.note.empty());
}
