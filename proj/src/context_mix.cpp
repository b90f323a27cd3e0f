// Bitwise context-mixing coder used as the default complexity surrogate.
//
// Every bit is predicted by hashed order-k contexts over several periodic
// views of the history (so interleaved coordinates of a point are modeled as
// separate streams), plus a long-range match model. Predictions are combined
// by a gated logistic mixer. The cost of a bit is -log2 of the probability
// the mixer gave it, so the total is an ideal code length.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dimlab/complexity.hpp"
#include "dimlab/random.hpp"

namespace dimlab {

namespace {

struct ContextDef {
  int period;
  int order;
  int phase_mod;
};

constexpr ContextDef kContexts[] = {
    {1, 0, 1},  {1, 1, 1},  {1, 2, 1},  {1, 3, 1},  {1, 4, 1},  {1, 6, 1},  {1, 8, 1},
    {1, 11, 1}, {1, 14, 1}, {1, 18, 1}, {1, 24, 1}, {1, 1, 12}, {1, 2, 12}, {1, 3, 12},
    {1, 4, 12}, {1, 6, 12}, {1, 8, 12}, {1, 12, 12}, {2, 0, 2}, {2, 1, 2}, {2, 2, 2},
    {2, 4, 2},  {3, 0, 3},  {3, 1, 3},  {3, 3, 3},  {4, 0, 4},  {4, 1, 4},
};
constexpr int kNumContexts = static_cast<int>(std::size(kContexts));
constexpr int kInputs = kNumContexts + 2;  // + match + bias
constexpr int kMatchBuckets = 16;
// Unmatched bits pick weights by phase; matched bits share one set per
// coarse match length, so a long match does not re-learn its weights.
constexpr int kMatchWeightSets = 4;
constexpr int kWeightSets = 6 + kMatchWeightSets;
constexpr int kMatchMinLen = 24;

struct Tables {
  std::array<int, 4096> stretch{};
  std::array<int, 4095> squash{};  // index d + 2047
  std::array<double, 4096> cost{};
  std::array<int, 1024> reciprocal{};

  Tables() {
    for (int p = 0; p < 4096; ++p) {
      const double q = std::max(p, 1) / 4096.0;
      stretch[static_cast<std::size_t>(p)] =
          std::clamp(static_cast<int>(std::lround(256.0 * std::log(q / (1.0 - q)))), -2047, 2047);
      cost[static_cast<std::size_t>(p)] = -std::log2(q);
    }
    for (int d = -2047; d <= 2047; ++d) {
      const double p = 4096.0 / (1.0 + std::exp(-d / 256.0));
      squash[static_cast<std::size_t>(d + 2047)] = std::clamp(static_cast<int>(std::lround(p)), 1, 4095);
    }
    for (int n = 0; n < 1024; ++n) reciprocal[static_cast<std::size_t>(n)] = static_cast<int>(65536.0 / (n + 2.0) + 0.5);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

constexpr std::uint32_t kFreshSlot = (1U << 21) << 10;

// Adaptive probability with a hit count; rate 1/(n+2) reproduces the
// Krichevsky-Trofimov estimate until the count saturates at `limit`.
inline std::uint32_t update_slot(std::uint32_t s, int y, unsigned limit, const Tables& t) {
  unsigned n = s & 1023U;
  int p = static_cast<int>(s >> 10);
  const int target = y ? (1 << 22) - 1 : 0;
  p += static_cast<int>((static_cast<std::int64_t>(target - p) * t.reciprocal[n]) >> 16);
  if (n < limit) ++n;
  return (static_cast<std::uint32_t>(p) << 10) | n;
}

class Engine {
 public:
  Engine(const ContextMixParams& params, std::size_t total_bits) : t_(tables()), lr_(params.learning_rate) {
    const std::uint64_t want = std::max<std::uint64_t>(2ULL * kNumContexts * total_bits, 1ULL << 16);
    int bits = std::bit_width(want - 1);
    bits = std::clamp(bits, 16, std::max(16, params.max_table_bits));
    slots_.assign(std::size_t{1} << bits, kFreshSlot);
    checks_.assign(slots_.size(), 0);
    mask_ = slots_.size() - 1;
    const int mbits = std::clamp(static_cast<int>(std::bit_width(std::max<std::uint64_t>(total_bits, 1) - 1)) + 1, 12, 24);
    match_table_.assign(std::size_t{1} << mbits, 0);
    match_mask_ = match_table_.size() - 1;
    weights_.assign(static_cast<std::size_t>(kWeightSets) * kInputs, 1 << 12);
    for (int set = 6; set < kWeightSets; ++set) weights_[static_cast<std::size_t>(set * kInputs + kNumContexts)] = 1 << 16;
    match_sm_.fill(kFreshSlot);
    buf_.reserve(total_bits);
    for (int j = 0; j < kNumContexts; ++j) {
      limits_[static_cast<std::size_t>(j)] = kContexts[j].order <= 2 ? 1023U : 255U;
    }
  }

  void begin_segment() { phase_ = 0; }

  double code(const BitString& bits, bool charge) {
    double total = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      const double c = step(bits[i]);
      if (charge) total += c;
    }
    return total;
  }

  void checkpoint() {
    logging_ = true;
    slot_log_.clear();
    match_log_.clear();
    saved_ = State{weights_, match_sm_, hist1_, hist_, phase_, buf_.size(), ptr_, len_};
  }

  void rollback() {
    for (auto it = slot_log_.rbegin(); it != slot_log_.rend(); ++it) {
      slots_[it->idx] = it->slot;
      checks_[it->idx] = it->check;
    }
    for (auto it = match_log_.rbegin(); it != match_log_.rend(); ++it) match_table_[it->first] = it->second;
    slot_log_.clear();
    match_log_.clear();
    weights_ = saved_.weights;
    match_sm_ = saved_.match_sm;
    hist1_ = saved_.hist1;
    hist_ = saved_.hist;
    phase_ = saved_.phase;
    buf_.resize(saved_.buf_size);
    ptr_ = saved_.ptr;
    len_ = saved_.len;
  }

 private:
  struct SlotLog {
    std::size_t idx;
    std::uint32_t slot;
    std::uint8_t check;
  };
  struct State {
    std::vector<std::int32_t> weights;
    std::array<std::uint32_t, 2 * kMatchBuckets> match_sm{};
    std::uint64_t hist1 = 0;
    std::array<std::array<std::uint64_t, 4>, 5> hist{};
    std::uint64_t phase = 0;
    std::size_t buf_size = 0;
    std::size_t ptr = 0;
    std::size_t len = 0;
  };

  double step(int y) {
    const Tables& t = t_;
    std::array<int, kInputs> x{};
    std::array<std::size_t, kNumContexts> idx{};

    for (int j = 0; j < kNumContexts; ++j) {
      const ContextDef& c = kContexts[j];
      const std::uint64_t h = c.period == 1 ? hist1_ : hist_[static_cast<std::size_t>(c.period)][phase_ % static_cast<std::uint64_t>(c.period)];
      const std::uint64_t masked = c.order == 0 ? 0 : (h & ((1ULL << c.order) - 1));
      const std::uint64_t key = masked ^ (static_cast<std::uint64_t>(j) << 32) ^
                                ((phase_ % static_cast<std::uint64_t>(c.phase_mod)) << 40);
      const std::uint64_t hv = splitmix64(key);
      const std::size_t i = hv & mask_;
      const auto chk = static_cast<std::uint8_t>(hv >> 56);
      if (logging_) slot_log_.push_back({i, slots_[i], checks_[i]});
      if (checks_[i] != chk) {
        checks_[i] = chk;
        slots_[i] = kFreshSlot;
      }
      idx[static_cast<std::size_t>(j)] = i;
      x[static_cast<std::size_t>(j)] = t.stretch[slots_[i] >> 20];
    }

    int bucket = 0;
    int expected = 0;
    if (len_ > 0) {
      expected = buf_[ptr_];
      bucket = std::min(kMatchBuckets - 1, static_cast<int>(std::bit_width(len_)) - 1);
      x[kNumContexts] = t.stretch[match_sm_[static_cast<std::size_t>(bucket * 2 + expected)] >> 20];
    }
    x[kNumContexts + 1] = 256;

    const std::size_t set = len_ == 0 ? static_cast<std::size_t>(phase_ % 6)
                                      : static_cast<std::size_t>(6 + std::min(kMatchWeightSets - 1, (bucket - 4) / 2));
    std::int32_t* w = &weights_[set * kInputs];
    std::int64_t dot = 0;
    for (int i = 0; i < kInputs; ++i) dot += static_cast<std::int64_t>(w[i]) * x[static_cast<std::size_t>(i)];
    const int d = static_cast<int>(std::clamp<std::int64_t>(dot >> 16, -2047, 2047));
    const int p = t.squash[static_cast<std::size_t>(d + 2047)];
    const double cost = y ? t.cost[static_cast<std::size_t>(p)] : t.cost[static_cast<std::size_t>(4096 - p)];

    const int err = ((y << 12) - p) * lr_;
    for (int i = 0; i < kInputs; ++i) {
      w[i] += static_cast<std::int32_t>((static_cast<std::int64_t>(x[static_cast<std::size_t>(i)]) * err) >> 16);
    }
    for (int j = 0; j < kNumContexts; ++j) {
      const std::size_t i = idx[static_cast<std::size_t>(j)];
      slots_[i] = update_slot(slots_[i], y, limits_[static_cast<std::size_t>(j)], t);
    }
    if (len_ > 0) {
      auto& s = match_sm_[static_cast<std::size_t>(bucket * 2 + expected)];
      s = update_slot(s, y, 1023U, t);
      if (expected == y) {
        ++len_;
        ++ptr_;
      } else {
        len_ = 0;
      }
    }

    hist1_ = (hist1_ << 1) | static_cast<std::uint64_t>(y);
    for (std::size_t per = 2; per <= 4; ++per) {
      auto& h = hist_[per][phase_ % per];
      h = (h << 1) | static_cast<std::uint64_t>(y);
    }
    buf_.push_back(static_cast<std::uint8_t>(y));
    ++phase_;
    update_match();
    return cost;
  }

  void update_match() {
    const std::size_t pos = buf_.size();
    if (pos < static_cast<std::size_t>(kMatchMinLen)) return;
    const std::size_t h = splitmix64((hist1_ & 0xFFFFFFULL) ^ 0x6d61746368ULL) & match_mask_;
    if (len_ == 0) {
      const std::size_t cand = match_table_[h];
      if (cand > 0) {
        std::size_t n = 0;
        while (n < 32 && n < cand && buf_[cand - 1 - n] == buf_[pos - 1 - n]) ++n;
        if (n >= static_cast<std::size_t>(kMatchMinLen)) {
          ptr_ = cand;
          len_ = n;
        }
      }
    }
    if (logging_) match_log_.emplace_back(h, match_table_[h]);
    match_table_[h] = static_cast<std::uint32_t>(pos);
  }

  const Tables& t_;
  int lr_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::uint8_t> checks_;
  std::size_t mask_ = 0;
  std::array<unsigned, kNumContexts> limits_{};
  std::vector<std::uint32_t> match_table_;
  std::size_t match_mask_ = 0;
  std::vector<std::int32_t> weights_;
  std::array<std::uint32_t, 2 * kMatchBuckets> match_sm_{};
  std::uint64_t hist1_ = 0;
  std::array<std::array<std::uint64_t, 4>, 5> hist_{};
  std::uint64_t phase_ = 0;
  std::vector<std::uint8_t> buf_;
  std::size_t ptr_ = 0;
  std::size_t len_ = 0;

  bool logging_ = false;
  std::vector<SlotLog> slot_log_;
  std::vector<std::pair<std::size_t, std::uint32_t>> match_log_;
  State saved_;
};

}  // namespace

std::vector<double> ContextMixModel::raw_cost_batch(const std::vector<BitString>& ws,
                                                    const BitString& v) const {
  std::size_t longest = 0;
  for (const BitString& w : ws) longest = std::max(longest, w.size());
  Engine engine(params_, v.size() + longest);
  engine.begin_segment();
  engine.code(v, false);
  std::vector<double> out;
  out.reserve(ws.size());
  for (const BitString& w : ws) {
    engine.checkpoint();
    engine.begin_segment();
    out.push_back(engine.code(w, true));
    engine.rollback();
  }
  return out;
}

double ContextMixModel::raw_cost(const BitString& w, const BitString& v) const {
  Engine engine(params_, v.size() + w.size());
  engine.begin_segment();
  engine.code(v, false);
  engine.begin_segment();
  return engine.code(w, true);
}

double ContextMixModel::estimate(const BitString& w, const BitString& v) const {
  return estimate_batch({w}, v).front();
}

std::vector<double> ContextMixModel::estimate_batch(const std::vector<BitString>& ws,
                                                    const BitString& v) const {
  std::vector<double> raw = raw_cost_batch(ws, v);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    raw[i] = framed_cost(raw[i], ws[i].size());
    if (params_.radix) raw[i] = 1.0 + std::min(raw[i], radix_expansion_cost(ws[i]));
  }
  return raw;
}

}  // namespace dimlab
