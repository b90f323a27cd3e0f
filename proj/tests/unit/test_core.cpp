#include <set>

#include "doctest.h"
#include "dimlab/core.hpp"
#include "dimlab/error.hpp"
#include "dimlab/random.hpp"

using namespace dimlab;

namespace {

// Binary digits of num/den by schoolbook long division.
Integer long_division_floor(long num, long den, int r) {
  Integer out = num / den;
  long rem = num % den;
  for (int k = 0; k < r; ++k) {
    rem *= 2;
    out = out * 2 + rem / den;
    rem %= den;
  }
  return out;
}

DyadicPoint point1(long num, int p) { return DyadicPoint({Integer(num)}, p); }

}  // namespace

TEST_CASE("truncate examples") {
  auto x = RationalSource::make({Rational(5, 8)});
  CHECK(truncate(*x, 2) == point1(1, 1));

  auto third = RationalSource::make({Rational(1, 3)});
  const DyadicPoint t = truncate(*third, 4);
  CHECK(t.num(0) == long_division_floor(1, 3, 4));
  CHECK(t.coord(0) == Rational(5, 16));

  auto z = RationalSource::zero(3);
  for (int r : {0, 1, 17, 300}) CHECK(truncate(*z, r) == DyadicPoint::zero(3));
}

TEST_CASE("truncate matches long division and refines") {
  for (long den : {3L, 7L, 10L, 29L}) {
    for (long num = 0; num < den; ++num) {
      auto x = RationalSource::make({Rational(num, den)});
      for (int r = 0; r < 70; ++r) {
        const DyadicPoint a = truncate(*x, r);
        CHECK(a.num(0) == long_division_floor(num, den, r));
        CHECK(a.floored(r) == a);
        const DyadicPoint b = truncate(*x, r + 1);
        CHECK(b.floored(r) == a);
        CHECK(strictly_within(a, b, r));
      }
    }
  }
}

TEST_CASE("negative coordinates floor toward -inf") {
  auto x = RationalSource::make({Rational(-1, 3)});
  CHECK(truncate(*x, 2).coord(0) == Rational(-1, 2));
  CHECK(DyadicPoint::from_text("1 3 -3").floored(1).coord(0) == Rational(-1, 2));
}

TEST_CASE("text form round trips") {
  const DyadicPoint p({Integer(3), Integer(-5)}, 4);
  CHECK(p.to_text() == "2 4 3 -5");
  CHECK(DyadicPoint::from_text(p.to_text()) == p);
  CHECK(p.refined(9) == p);
  CHECK(point1(4, 3).reduced().precision() == 1);
}

TEST_CASE("distance is exact, symmetric and obeys the triangle inequality") {
  SplitMix64 g(11);
  auto rnd = [&] {
    return DyadicPoint({Integer(static_cast<long>(g.below(200)) - 100), Integer(static_cast<long>(g.below(200)) - 100)},
                       static_cast<int>(g.below(6)));
  };
  for (int t = 0; t < 500; ++t) {
    const DyadicPoint a = rnd(), b = rnd(), c = rnd();
    CHECK(squared_distance(a, b) == squared_distance(b, a));
    // (d_ab + d_bc)^2 >= d_ac^2  <=>  d_ab^2 + d_bc^2 - d_ac^2 >= -2 d_ab d_bc
    const Rational ab = squared_distance(a, b), bc = squared_distance(b, c), ac = squared_distance(a, c);
    const Rational lhs = ac - ab - bc;
    if (lhs > 0) CHECK(lhs * lhs <= 4 * ab * bc);
  }
}

TEST_CASE("lattice point examples") {
  CHECK(lattice_point_in_ball(Ball(DyadicPoint::from_text("1 10 307"), 2), 1).coord(0) == Rational(1, 4));
  const Ball b(DyadicPoint::from_text("2 3 7 -3"), 2);
  CHECK(lattice_point_in_ball(b, 2) == b.center);
  CHECK(half_log2_floor(1) == 0);
  CHECK(half_log2_floor(3) == 0);
  CHECK(half_log2_floor(4) == 1);
}

TEST_CASE("lattice point is interior, on the lattice and deterministic") {
  SplitMix64 g(3);
  for (int m = 1; m <= 3; ++m) {
    for (int t = 0; t < 2000; ++t) {
      std::vector<Integer> c;
      for (int i = 0; i < m; ++i) c.emplace_back(static_cast<long>(g.below(1 << 20)) - (1 << 19));
      const int r = static_cast<int>(g.below(12));
      const Ball b(DyadicPoint(c, r + 10), r);
      const DyadicPoint q = lattice_point_in_ball(b, m);
      CHECK(b.contains(q));
      CHECK(q.reduced().precision() <= r + half_log2_floor(m) + 1);
      CHECK(q == lattice_point_in_ball(b, m));
    }
  }
}

TEST_CASE("ball grid examples") {
  const auto g1 = ball_grid(Ball(DyadicPoint::from_text("1 1 1"), 1), 1);
  REQUIRE(g1.size() == 3);
  CHECK(g1[0].coord(0) == Rational(1, 4));
  CHECK(g1[1].coord(0) == Rational(1, 2));
  CHECK(g1[2].coord(0) == Rational(3, 4));

  CHECK_THROWS_WITH_AS(ball_grid(Ball(DyadicPoint::zero(3), 2), 5), doctest::Contains("CandidateExplosion"), Error);
}

TEST_CASE("ball grid equals brute-force enumeration") {
  SplitMix64 g(5);
  for (int t = 0; t < 40; ++t) {
    const int r = 1 + static_cast<int>(g.below(4));
    const int guard = 1 + static_cast<int>(g.below(3));
    const DyadicPoint c({Integer(static_cast<long>(g.below(64))), Integer(static_cast<long>(g.below(64)))}, r + 3);
    const Ball b(c, r);
    const auto grid = ball_grid(b, guard);
    // every grid point with |coordinate offset| <= radius, tested one by one
    const int p = r + guard;
    std::vector<DyadicPoint> brute;
    const Integer cx = c.refined(std::max(p, c.precision())).num(0);
    const Integer cy = c.refined(std::max(p, c.precision())).num(1);
    const int shift = std::max(p, c.precision()) - p;
    const long span = 1L << guard;
    const Integer base_x = Integer(cx >> shift), base_y = Integer(cy >> shift);
    for (long i = -span - 1; i <= span + 1; ++i) {
      for (long j = -span - 1; j <= span + 1; ++j) {
        const DyadicPoint q({Integer(base_x + i), Integer(base_y + j)}, p);
        if (b.contains(q)) brute.push_back(q);
      }
    }
    std::sort(brute.begin(), brute.end(), [](const auto& a, const auto& c2) { return lex_less(a, c2); });
    REQUIRE(grid.size() == brute.size());
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(grid[k] == brute[k]);
    if (r == 2 && guard == 2) CHECK(grid.size() <= 49);
    CHECK(std::find(grid.begin(), grid.end(), lattice_point_in_ball(b, 2)) != grid.end());
  }
}

TEST_CASE("sampled grid is a subset of the full grid") {
  const Ball b(DyadicPoint::from_text("3 4 1 2 3"), 2);
  const auto full = ball_grid(b, 2);
  const auto sub = sample_ball_grid(b, 2, 16, 99);
  CHECK(sub.size() == 16);
  for (const auto& q : sub) CHECK(std::find(full.begin(), full.end(), q) != full.end());
  CHECK(std::find(sub.begin(), sub.end(), lattice_point_in_ball(b, 3)) != sub.end());
  CHECK(sub == sample_ball_grid(b, 2, 16, 99));
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/8") == Rational(3, 8));
  CHECK(parse_rational("-0.625") == Rational(-5, 8));
  CHECK(parse_rational("7") == Rational(7));
}
