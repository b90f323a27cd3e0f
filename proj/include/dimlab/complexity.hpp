#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dimlab/codes.hpp"
#include "dimlab/core.hpp"
#include "dimlab/machine.hpp"

namespace dimlab {

/// Length in bits of a shortest description of w given v, as estimated by a
/// computable surrogate. Implementations are immutable and re-entrant.
class ComplexityModel {
 public:
  virtual ~ComplexityModel() = default;
  virtual std::string name() const = 0;
  virtual double estimate(const BitString& w, const BitString& v) const = 0;
  /// estimate(w, v) for every w; models may share work across the batch.
  virtual std::vector<double> estimate_batch(const std::vector<BitString>& ws,
                                             const BitString& v) const;
};

using ModelPtr = std::shared_ptr<const ComplexityModel>;

/// Flag bit, length code, then the cheaper of the compressed form and the
/// raw bits. The resulting lengths satisfy Kraft's inequality for any raw
/// cost that is itself an ideal code length.
double framed_cost(double raw_bits, std::size_t len);

/// Raw LZ78 surrogate: code length of the parse of v SEP w minus that of
/// v SEP, over the alphabet {0, 1, SEP}. Each phrase costs
/// ceil(log2(dictionary size)) + 2 bits.
double lz78_conditional(const BitString& w, const BitString& v);
/// Number of phrases the parse of v SEP w spends on w.
std::size_t lz78_phrase_count(const BitString& w, const BitString& v);

class LZ78Model final : public ComplexityModel {
 public:
  std::string name() const override { return "lz78"; }
  double estimate(const BitString& w, const BitString& v) const override;
};

/// Bitwise context-mixing coder; see docs/encoding.md for the model layout.
struct ContextMixParams {
  int learning_rate = 24;
  int max_table_bits = 22;
  /// Also offer the radix-expansion code, behind one flag bit.
  bool radix = true;
};

inline constexpr int kRadixBases[] = {3, 5, 7};
inline constexpr double kRadixSelectorBits = 2.0;

/// Length of a code that describes a point encoding w by the shortest
/// adaptive base-b expansion (b in kRadixBases) of a cylinder lying inside
/// each coordinate's dyadic cell: base selector, w's header verbatim, then
/// per coordinate |enc(depth)| and the KT cost of the digits. Infinite when
/// w is not a point encoding. Lengths satisfy Kraft's inequality.
double radix_expansion_cost(const BitString& w);

class ContextMixModel final : public ComplexityModel {
 public:
  explicit ContextMixModel(ContextMixParams params = {}) : params_(params) {}
  std::string name() const override { return "cm"; }
  double estimate(const BitString& w, const BitString& v) const override;
  std::vector<double> estimate_batch(const std::vector<BitString>& ws,
                                     const BitString& v) const override;
  /// Ideal code length of w after the coder has adapted to v.
  double raw_cost(const BitString& w, const BitString& v) const;
  std::vector<double> raw_cost_batch(const std::vector<BitString>& ws, const BitString& v) const;

 private:
  ContextMixParams params_;
};

/// Exact K_M(w|v) on the toy machine where the search is affordable, else the
/// LITERAL program length.
class MachineModel final : public ComplexityModel {
 public:
  explicit MachineModel(MachineBudget budget = {}, std::size_t exact_limit = 64);
  std::string name() const override;
  double estimate(const BitString& w, const BitString& v) const override;
  std::vector<double> estimate_batch(const std::vector<BitString>& ws,
                                     const BitString& v) const override;
  const MachineBudget& budget() const { return budget_; }

 private:
  MachineBudget budget_;
  std::size_t exact_limit_;
};

/// "cm", "lz78", "machine" or "machine:L,T".
ModelPtr make_model(std::string_view spec);

/// Self-delimiting serialization of a point, always of its reduced form:
/// enc(n) enc(p), then per coordinate a sign bit and enc(integer part of the
/// magnitude), then the p fractional magnitude bits of all coordinates
/// interleaved, most significant first.
BitString encode_point(const DyadicPoint& q);
DyadicPoint decode_point(const BitString& code);
/// Length of the header part (everything before the fractional bits).
std::size_t point_header_length(const DyadicPoint& q);

struct EstimatorOptions {
  int guard = 2;
  /// Candidate balls are centered at truncate(x, r + center_extra).
  int center_extra = 32;
  /// Grids of points in dimension >= 3 are subsampled to this many points.
  std::size_t subsample = 64;
  int subsample_from_dim = 3;
  std::uint64_t seed = 0x5eed;
  /// Condition depth of the side-information surrogate.
  int side_depth = 128;
  unsigned threads = 1;
};

/// Candidate rationals standing in for Q^n inside B_{2^{-r}}(x).
std::vector<DyadicPoint> candidate_points(const PointSource& x, int r, const EstimatorOptions& opt);

/// K_r(x): min over candidates q of estimate(encode_point(q), empty).
double precision_complexity(const ComplexityModel& model, const PointSource& x, int r,
                            const EstimatorOptions& opt = {});
/// K_{r,s}(x|y): max over q near y at precision s of min over p near x at
/// precision r of estimate(encode_point(p), encode_point(q)).
double cond_precision_complexity(const ComplexityModel& model, const PointSource& x,
                                 const PointSource& y, int r, int s,
                                 const EstimatorOptions& opt = {});
/// Running minimum of K_{r,s}(x|y) along increasing s.
std::vector<double> cond_precision_ladder(const ComplexityModel& model, const PointSource& x,
                                          const PointSource& y, int r,
                                          const std::vector<int>& s_values,
                                          const EstimatorOptions& opt = {});
/// I_r(x:y) = K_r(x) + K_r(y) - K_r(x, y), clipped at 0.
double mutual_info_precision(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                             int r, const EstimatorOptions& opt = {});
/// K^y_r(x): min over p near x of estimate(encode_point(p), encode_point(y deep)).
double side_info_complexity(const ComplexityModel& model, const PointSource& x,
                            const PointSource& y, int r, const EstimatorOptions& opt = {});

}  // namespace dimlab
