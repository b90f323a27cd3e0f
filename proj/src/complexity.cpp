#include "dimlab/complexity.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "dimlab/error.hpp"
#include "dimlab/parallel.hpp"

namespace dimlab {

std::vector<double> ComplexityModel::estimate_batch(const std::vector<BitString>& ws,
                                                    const BitString& v) const {
  std::vector<double> out;
  out.reserve(ws.size());
  for (const BitString& w : ws) out.push_back(estimate(w, v));
  return out;
}

double framed_cost(double raw_bits, std::size_t len) {
  return 1.0 + static_cast<double>(nat_code_length(len)) +
         std::min(std::max(raw_bits, 0.0), static_cast<double>(len));
}

namespace {

struct LZ78Parse {
  double cost_after_sep = 0.0;
  double cost_total = 0.0;
  std::size_t phrases_after_sep = 0;
};

double phrase_bits(std::size_t dict_size) {
  return static_cast<double>(std::bit_width(dict_size - 1)) + 2.0;
}

LZ78Parse lz78_parse(const BitString& w, const BitString& v) {
  constexpr int kSep = 2;
  std::vector<std::array<std::int32_t, 3>> trie(1, {-1, -1, -1});
  trie.reserve(v.size() + w.size() + 2);
  LZ78Parse out;
  std::int32_t node = 0;
  double cost = 0.0;
  std::size_t phrases = 0;
  auto feed = [&](int sym) {
    auto& child = trie[static_cast<std::size_t>(node)][static_cast<std::size_t>(sym)];
    if (child >= 0) {
      node = child;
      return;
    }
    cost += phrase_bits(trie.size());
    ++phrases;
    child = static_cast<std::int32_t>(trie.size());
    trie.push_back({-1, -1, -1});
    node = 0;
  };
  for (std::size_t i = 0; i < v.size(); ++i) feed(v[i]);
  feed(kSep);  // SEP is new to the dictionary, so it always closes a phrase
  out.cost_after_sep = cost;
  const std::size_t phrases_before = phrases;
  for (std::size_t i = 0; i < w.size(); ++i) feed(w[i]);
  if (node != 0) {
    cost += phrase_bits(trie.size());
    ++phrases;
  }
  out.cost_total = cost;
  out.phrases_after_sep = phrases - phrases_before;
  return out;
}

}  // namespace

double lz78_conditional(const BitString& w, const BitString& v) {
  const LZ78Parse p = lz78_parse(w, v);
  return std::max(0.0, p.cost_total - p.cost_after_sep);
}

std::size_t lz78_phrase_count(const BitString& w, const BitString& v) {
  return lz78_parse(w, v).phrases_after_sep;
}

double LZ78Model::estimate(const BitString& w, const BitString& v) const {
  return framed_cost(lz78_conditional(w, v), w.size());
}

MachineModel::MachineModel(MachineBudget budget, std::size_t exact_limit)
    : budget_(budget), exact_limit_(exact_limit) {
  budget_.validate();
}

std::string MachineModel::name() const {
  return "machine:" + std::to_string(budget_.max_len) + "," + std::to_string(budget_.max_steps);
}

double MachineModel::estimate(const BitString& w, const BitString& v) const {
  return estimate_batch({w}, v).front();
}

std::vector<double> MachineModel::estimate_batch(const std::vector<BitString>& ws,
                                                 const BitString& v) const {
  MachineSolver solver(v, budget_);
  std::vector<double> out;
  out.reserve(ws.size());
  for (const BitString& w : ws) {
    std::optional<int> k;
    if (w.size() <= exact_limit_) k = solver.min_program_length(w);
    out.push_back(k ? static_cast<double>(*k) : static_cast<double>(literal_program_length(w.size())));
  }
  return out;
}

ModelPtr make_model(std::string_view spec) {
  if (spec == "cm") return std::make_shared<ContextMixModel>();
  if (spec == "lz78") return std::make_shared<LZ78Model>();
  if (spec == "machine") return std::make_shared<MachineModel>();
  if (spec.starts_with("machine:")) {
    std::string_view rest = spec.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) throw Error(errc::kInvalidModel, "expected machine:L,T");
    MachineBudget b;
    auto parse = [&](std::string_view s, auto& out) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(errc::kInvalidModel, "bad number in model spec '" + std::string(spec) + "'");
      }
    };
    parse(rest.substr(0, comma), b.max_len);
    parse(rest.substr(comma + 1), b.max_steps);
    return std::make_shared<MachineModel>(b);
  }
  throw Error(errc::kInvalidModel, "unknown model '" + std::string(spec) + "'");
}

BitString encode_point(const DyadicPoint& q) {
  const DyadicPoint r = q.reduced();
  const int n = r.dim();
  const int p = r.precision();
  BitString out;
  encode_nat_into(static_cast<std::uint64_t>(n), out);
  encode_nat_into(static_cast<std::uint64_t>(p), out);
  std::vector<Integer> frac(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Integer mag = abs(r.num(i));
    out.push_back(r.num(i) < 0);
    Integer whole;
    mpz_fdiv_q_2exp(whole.get_mpz_t(), mag.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
    out.append(encode_nat_big(whole));
    mpz_fdiv_r_2exp(frac[static_cast<std::size_t>(i)].get_mpz_t(), mag.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(p));
  }
  for (int k = p - 1; k >= 0; --k) {
    for (int i = 0; i < n; ++i) {
      out.push_back(mpz_tstbit(frac[static_cast<std::size_t>(i)].get_mpz_t(), static_cast<mp_bitcnt_t>(k)) != 0);
    }
  }
  return out;
}

std::size_t point_header_length(const DyadicPoint& q) {
  const DyadicPoint r = q.reduced();
  return encode_point(q).size() - static_cast<std::size_t>(r.dim()) * static_cast<std::size_t>(r.precision());
}

DyadicPoint decode_point(const BitString& code) {
  BitReader in(code);
  const std::uint64_t n = decode_nat(in);
  const std::uint64_t p = decode_nat(in);
  if (n < 1 || n > (1U << 20) || p > (1U << 30)) throw Error(errc::kMalformedCode, "bad point header");
  std::vector<bool> negative(n);
  std::vector<Integer> mags(n);
  for (std::size_t i = 0; i < n; ++i) {
    negative[i] = in.read();
    mags[i] = decode_nat_big(in);
    mpz_mul_2exp(mags[i].get_mpz_t(), mags[i].get_mpz_t(), static_cast<mp_bitcnt_t>(p));
  }
  for (std::uint64_t k = p; k-- > 0;) {
    for (std::size_t i = 0; i < n; ++i) {
      if (in.read()) mpz_setbit(mags[i].get_mpz_t(), static_cast<mp_bitcnt_t>(k));
    }
  }
  if (!in.at_end()) throw Error(errc::kMalformedCode, "trailing bits after point");
  for (std::size_t i = 0; i < n; ++i) {
    if (negative[i]) mags[i] = -mags[i];
  }
  return DyadicPoint(std::move(mags), static_cast<int>(p));
}

std::vector<DyadicPoint> candidate_points(const PointSource& x, int r, const EstimatorOptions& opt) {
  if (r < 0) throw Error(errc::kInvalidPoint, "precision must be >= 0");
  Ball ball(truncate(x, r + opt.center_extra), r);
  if (x.dim() >= opt.subsample_from_dim) {
    const std::uint64_t seed = opt.seed ^ (static_cast<std::uint64_t>(r) * 0x9E3779B97F4A7C15ULL);
    return sample_ball_grid(ball, opt.guard, opt.subsample, seed);
  }
  return ball_grid(ball, opt.guard);
}

namespace {

std::vector<BitString> encode_all(const std::vector<DyadicPoint>& pts) {
  std::vector<BitString> out;
  out.reserve(pts.size());
  for (const DyadicPoint& p : pts) out.push_back(encode_point(p));
  return out;
}

double min_of(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::infinity() : *std::min_element(v.begin(), v.end());
}

void check_precision(int r) {
  if (r < 1) throw Error(errc::kInvalidPoint, "precision must be >= 1");
}

}  // namespace

double precision_complexity(const ComplexityModel& model, const PointSource& x, int r,
                            const EstimatorOptions& opt) {
  check_precision(r);
  return min_of(model.estimate_batch(encode_all(candidate_points(x, r, opt)), BitString()));
}

double cond_precision_complexity(const ComplexityModel& model, const PointSource& x,
                                 const PointSource& y, int r, int s, const EstimatorOptions& opt) {
  check_precision(r);
  check_precision(s);
  const std::vector<BitString> ps = encode_all(candidate_points(x, r, opt));
  const std::vector<BitString> qs = encode_all(candidate_points(y, s, opt));
  std::vector<double> inner(qs.size());
  parallel_for(qs.size(), opt.threads, [&](std::size_t i) { inner[i] = min_of(model.estimate_batch(ps, qs[i])); });
  return *std::max_element(inner.begin(), inner.end());
}

std::vector<double> cond_precision_ladder(const ComplexityModel& model, const PointSource& x,
                                          const PointSource& y, int r,
                                          const std::vector<int>& s_values,
                                          const EstimatorOptions& opt) {
  std::vector<double> out;
  out.reserve(s_values.size());
  double running = std::numeric_limits<double>::infinity();
  int prev = 0;
  for (int s : s_values) {
    if (s <= prev) throw Error(errc::kInvalidSchedule, "s values must increase");
    prev = s;
    running = std::min(running, cond_precision_complexity(model, x, y, r, s, opt));
    out.push_back(running);
  }
  return out;
}

double mutual_info_precision(const ComplexityModel& model, const SourcePtr& x, const SourcePtr& y,
                             int r, const EstimatorOptions& opt) {
  const double kx = precision_complexity(model, *x, r, opt);
  const double ky = precision_complexity(model, *y, r, opt);
  const double kxy = precision_complexity(model, *JointSource::make(x, y), r, opt);
  return std::max(0.0, kx + ky - kxy);
}

double side_info_complexity(const ComplexityModel& model, const PointSource& x,
                            const PointSource& y, int r, const EstimatorOptions& opt) {
  check_precision(r);
  const BitString cond = encode_point(truncate(y, r + opt.side_depth));
  return min_of(model.estimate_batch(encode_all(candidate_points(x, r, opt)), cond));
}

}  // namespace dimlab
