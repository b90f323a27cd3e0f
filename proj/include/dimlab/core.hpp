#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dimlab {

using Integer = mpz_class;
using Rational = mpq_class;

/// A point of R^n with coordinates num_i / 2^p sharing one precision p >= 0.
///
/// Numerators are exact integers. Two points compare equal when they denote
/// the same element of R^n, whatever precision each one carries.
class DyadicPoint {
 public:
  DyadicPoint() = default;
  DyadicPoint(std::vector<Integer> numerators, int precision);

  static DyadicPoint zero(int dim, int precision = 0);
  /// Exact floor of a rational coordinate vector at precision p.
  static DyadicPoint floor_of(std::span<const Rational> coords, int precision);

  int dim() const { return static_cast<int>(nums_.size()); }
  int precision() const { return precision_; }
  const Integer& num(int i) const { return nums_[static_cast<std::size_t>(i)]; }
  const std::vector<Integer>& nums() const { return nums_; }

  /// Same value at a finer precision (p >= precision()).
  DyadicPoint refined(int p) const;
  /// Same value at the smallest precision that still represents it exactly.
  DyadicPoint reduced() const;
  /// Coordinatewise floor to precision p (identity when p >= precision()).
  DyadicPoint floored(int p) const;

  Rational coord(int i) const;
  double approx(int i) const;

  /// Concatenation of coordinates: (x, y) in R^{m+n}.
  DyadicPoint joined(const DyadicPoint& other) const;
  DyadicPoint translated(const DyadicPoint& offset) const;

  /// "n p num_1 ... num_n"
  std::string to_text() const;
  static DyadicPoint from_text(std::string_view text);

  friend bool operator==(const DyadicPoint& a, const DyadicPoint& b);
  /// Lexicographic order of numerators after aligning precisions.
  friend bool lex_less(const DyadicPoint& a, const DyadicPoint& b);

 private:
  std::vector<Integer> nums_;
  int precision_ = 0;
};

/// Squared Euclidean distance, exact.
Rational squared_distance(const DyadicPoint& a, const DyadicPoint& b);
/// |a - b| < 2^{-radius_exp}, decided exactly.
bool strictly_within(const DyadicPoint& a, const DyadicPoint& b, int radius_exp);

/// Open ball of radius 2^{-radius_exp}.
struct Ball {
  DyadicPoint center;
  int radius_exp = 0;

  Ball(DyadicPoint c, int r);
  bool contains(const DyadicPoint& q) const { return strictly_within(q, center, radius_exp); }
};

/// A real point that can be approximated to any precision.
/// `truncate(r)` must return the coordinatewise floor at precision r.
class PointSource {
 public:
  virtual ~PointSource() = default;
  virtual int dim() const = 0;
  virtual DyadicPoint truncate(int r) const = 0;
  virtual std::string describe() const = 0;
};

using SourcePtr = std::shared_ptr<const PointSource>;

/// Source with exact rational coordinates.
class RationalSource final : public PointSource {
 public:
  explicit RationalSource(std::vector<Rational> coords);
  static SourcePtr make(std::vector<Rational> coords);
  static SourcePtr from_dyadic(const DyadicPoint& p);
  static SourcePtr zero(int dim);

  int dim() const override { return static_cast<int>(coords_.size()); }
  DyadicPoint truncate(int r) const override;
  std::string describe() const override;
  const std::vector<Rational>& coords() const { return coords_; }

 private:
  std::vector<Rational> coords_;
};

/// Concatenation (x, y) of two sources.
class JointSource final : public PointSource {
 public:
  JointSource(SourcePtr first, SourcePtr second);
  static SourcePtr make(SourcePtr first, SourcePtr second);
  int dim() const override { return first_->dim() + second_->dim(); }
  DyadicPoint truncate(int r) const override;
  std::string describe() const override;

 private:
  SourcePtr first_;
  SourcePtr second_;
};

/// x + q for a rational translation q.
class TranslatedSource final : public PointSource {
 public:
  TranslatedSource(SourcePtr base, DyadicPoint offset);
  int dim() const override { return base_->dim(); }
  DyadicPoint truncate(int r) const override;
  std::string describe() const override;

 private:
  SourcePtr base_;
  DyadicPoint offset_;
};

/// m_r-style floor truncation of x at precision r (r >= 0).
DyadicPoint truncate(const PointSource& x, int r);

/// floor(log2(m)/2) for m >= 1, the lattice refinement of a ball in R^m.
int half_log2_floor(int m);

/// The lattice point of 2^{-(r + floor(log m / 2) + 1)} Z^m nearest the
/// center of b (ties toward -inf per coordinate); always strictly inside b.
DyadicPoint lattice_point_in_ball(const Ball& b, int m);

inline constexpr std::size_t kDefaultGridCap = 4096;

/// Every point of the 2^{-(radius_exp + guard)} grid strictly inside b, in
/// lexicographic order of numerators. Throws core.CandidateExplosion past cap.
std::vector<DyadicPoint> ball_grid(const Ball& b, int guard,
                                   std::size_t cap = kDefaultGridCap);

/// Up to `count` distinct grid points of ball_grid(b, guard), chosen by
/// seeded rejection sampling (no full enumeration). Always contains
/// lattice_point_in_ball(b, dim). Returned in lexicographic order.
std::vector<DyadicPoint> sample_ball_grid(const Ball& b, int guard, std::size_t count,
                                          std::uint64_t seed);

/// Parses "3/8", "-0.625", "1e-3"-free decimals, or integers into a rational.
Rational parse_rational(std::string_view text);

}  // namespace dimlab
