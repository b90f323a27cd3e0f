#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dimlab/core.hpp"

namespace dimlab {

/// A point of [0,1)^n whose binary digits are a pure function of
/// (coordinate, index). Digits are 1-indexed: digit 1 is the 1/2 bit.
class DigitSource : public PointSource {
 public:
  explicit DigitSource(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  DyadicPoint truncate(int r) const override;
  /// First r digits of one coordinate, most significant first.
  virtual std::vector<std::uint8_t> digits(int coord, int r) const = 0;

 private:
  int dim_;
};

/// IID Bernoulli(p) digits from the counter-based SplitMix64 stream
/// mix3(seed, stream_base + coord, index).
class BernoulliSource final : public DigitSource {
 public:
  BernoulliSource(double p, std::uint64_t seed, int dim, std::uint64_t stream_base = 0);
  std::vector<std::uint8_t> digits(int coord, int r) const override;
  std::string describe() const override;
  bool digit(int coord, std::uint64_t index) const;

 private:
  double p_;
  std::uint64_t seed_;
  std::uint64_t stream_base_;
};

/// Which digit positions of a block-dilution point are random (true) or
/// forced to zero (false), positions 1..n. Starts random; switches to zero
/// once the random fraction reaches min(beta, 1 - 1/sqrt(i)) after a warmup,
/// and back once it falls to max(alpha, 1/sqrt(i)). The running fraction then
/// has liminf alpha and limsup beta.
std::vector<std::uint8_t> block_dilution_mask(double alpha, double beta, int n);
inline constexpr int kBlockDilutionWarmup = 64;

class BlockDilutionSource final : public DigitSource {
 public:
  BlockDilutionSource(double alpha, double beta, std::uint64_t seed, int dim,
                      std::uint64_t stream_base = 0);
  std::vector<std::uint8_t> digits(int coord, int r) const override;
  std::string describe() const override;

 private:
  double alpha_;
  double beta_;
  BernoulliSource random_;
};

/// A point of the middle-thirds Cantor set with IID uniform digits in {0, 2}.
class CantorPointSource final : public PointSource {
 public:
  CantorPointSource(std::uint64_t seed, std::uint64_t stream = 0);
  int dim() const override { return 1; }
  DyadicPoint truncate(int r) const override;
  std::string describe() const override;
  /// Ternary digit k >= 1 (0 or 2).
  int ternary_digit(std::uint64_t k) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// (slope_j * t + intercept_j)_j for a 1-D source t and 1-D coefficient
/// sources. Truncations are exact: brackets are refined until the floor is
/// determined (or a refinement cap is hit on exact grid ties).
class AffineSource final : public PointSource {
 public:
  AffineSource(SourcePtr t, std::vector<std::pair<SourcePtr, SourcePtr>> coefficients);
  int dim() const override { return static_cast<int>(coeffs_.size()); }
  DyadicPoint truncate(int r) const override;
  std::string describe() const override;

 private:
  SourcePtr t_;
  std::vector<std::pair<SourcePtr, SourcePtr>> coeffs_;
};

/// (x, m x + b).
SourcePtr make_line_point(SourcePtr m, SourcePtr b, SourcePtr x);

inline constexpr std::uint64_t kLineSlopeStream = 101;
inline constexpr std::uint64_t kLineInterceptStream = 102;
inline constexpr std::uint64_t kLineAbscissaStream = 103;

/// A rational literal, or "random" for a Bernoulli(1/2) coordinate on `stream`.
SourcePtr coefficient_source(const std::string& text, std::uint64_t seed, std::uint64_t stream);

enum class PointKind { kAllZero, kBernoulli, kBlockDilution, kLine, kJointCopy, kJointIndependent, kCantor };

struct PointSpec {
  PointKind kind = PointKind::kAllZero;
  int dim = 1;
  std::uint64_t seed = 0;
  double p = 0.5;
  double alpha = 0.3;
  double beta = 0.9;
  /// Line coefficients: a rational ("3/8", "0.25") or "random" for an
  /// independent Bernoulli(1/2) coordinate.
  std::string m = "0.5";
  std::string b = "0.25";
  std::string x = "random";

  /// Throws generators.InvalidSpec.
  void validate() const;
};

std::string to_string(PointKind k);
PointKind point_kind_from_string(const std::string& s);

SourcePtr generate_point(const PointSpec& spec);

/// The (x, y) pair behind a joint kind, or (x, zero) for other kinds.
std::pair<SourcePtr, SourcePtr> generate_pair(const PointSpec& spec);

enum class SetKind { kCantor, kIfs, kSegmentFamily, kUnitCube, kUnitSegment, kSingleton };

struct Contraction {
  Rational ratio;
  std::vector<Rational> offset;
};

struct SetSpec {
  SetKind kind = SetKind::kUnitCube;
  int depth = 12;
  int dim = 2;
  int directions = 64;
  std::vector<Contraction> maps;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_string(SetKind k);
SetKind set_kind_from_string(const std::string& s);

struct PointSample {
  std::vector<DyadicPoint> points;
  /// Segment index per point for segment families, empty otherwise.
  std::vector<int> labels;
  std::string provenance;
};

inline constexpr int kSamplePrecision = 64;

PointSample generate_set(const SetSpec& spec, std::size_t count);

/// Dyadic unit direction of segment i of an N-direction family (angle i pi / N).
std::pair<Rational, Rational> segment_direction(int directions, int i);

/// An arbitrary-precision source for the i-th sampled point of the set, for
/// point-dimension estimates.
SourcePtr set_point_source(const SetSpec& spec, std::size_t i);

/// Known dimension of the set (analytic where available).
double analytic_set_dimension(const SetSpec& spec);

}  // namespace dimlab
