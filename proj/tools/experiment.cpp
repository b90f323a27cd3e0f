#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dimlab/complexity.hpp"
#include "dimlab/dimension.hpp"
#include "dimlab/error.hpp"
#include "dimlab/generators.hpp"
#include "dimlab/geometry.hpp"
#include "dimlab/kakeya.hpp"
#include "dimlab/machine.hpp"
#include "dimlab/parallel.hpp"

namespace dimlab::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(errc::kConfigError, msg); }

using Schema = std::vector<std::pair<std::string, Json>>;

bool same_kind(const Json& value, const Json& def) {
  if (def.is_number_unsigned()) return value.is_number_unsigned();
  if (def.is_number_integer()) return value.is_number_integer();
  if (def.is_number()) return value.is_number();
  if (def.is_boolean()) return value.is_boolean();
  if (def.is_string()) return value.is_string();
  if (def.is_array()) return value.is_array();
  if (def.is_object()) return value.is_object();
  return true;
}

// Copies the keys of `schema` from `in` (or their defaults) into a new
// object, rejecting unknown keys and type mismatches.
Json fill(const Json& in, const Schema& schema, const std::string& where) {
  if (!in.is_null() && !in.is_object()) config_error("'" + where + "' must be an object");
  Json out = Json::object();
  if (in.is_object()) {
    for (auto it = in.begin(); it != in.end(); ++it) {
      bool known = false;
      for (const auto& [k, v] : schema) known = known || k == it.key();
      if (!known) config_error("unknown key '" + where + "." + it.key() + "'");
    }
  }
  for (const auto& [key, def] : schema) {
    if (in.is_object() && in.contains(key)) {
      const Json& v = in.at(key);
      if (!def.is_null() && !same_kind(v, def)) config_error("'" + where + "." + key + "' has the wrong type");
      out[key] = v;
    } else {
      out[key] = def;
    }
  }
  return out;
}

const Schema& point_schema() {
  static const Schema s = {{"kind", "all_zero"}, {"dim", 1}, {"p", 0.5}, {"alpha", 0.3}, {"beta", 0.9},
                           {"m", "0.5"},        {"b", "0.25"}, {"x", "random"}};
  return s;
}

const Schema& set_schema() {
  static const Schema s = {{"kind", "unit_cube"}, {"depth", 12}, {"dim", 2}, {"directions", 64}, {"maps", Json::array()}};
  return s;
}

const Schema& schedule_schema() {
  static const Schema s = {{"r1", 64}, {"rho", 1.3}, {"r_max", 16384}, {"mode", "identity"}, {"window", 0.5}};
  return s;
}

const Schema& estimator_schema() {
  static const Schema s = {{"guard", 2},           {"center_extra", 32}, {"subsample", 64},
                           {"subsample_from_dim", 3}, {"side_depth", 128}};
  return s;
}

const Schema& tolerance_schema() {
  static const Schema s = {{"residual", 0.2}, {"dim_slack", 0.2}, {"side_info_allowance", 32.0}, {"lower_slack", 0.25}};
  return s;
}

const std::map<std::string, Schema>& command_params() {
  static const std::map<std::string, Schema> m = {
      {"dim", {}},
      {"cond-dim", {}},
      {"mdim", {}},
      {"audit", {}},
      {"box-dim", {{"count", 10000}, {"r_lo", 1}, {"r_hi", 0}}},
      {"cover", {{"count", 200}, {"s", 1.0}, {"r_values", Json::array({8})}}},
      {"packing", {{"count", 10000}, {"s", 2.0}, {"deltas", Json::array({2, 4, 6})}}},
      {"p2s-audit", {{"count", 10000}, {"r_lo", 1}, {"r_hi", 0}, {"dim_points", 8}}},
      {"kakeya-reconstruct", {{"r", 3}, {"m", "0.5"}, {"b", "0.25"}, {"x", "0.5"}, {"h", 1}, {"oracle", "exact"}}},
      {"kakeya-stats", {{"r", 10}, {"trials", 10000}, {"m", "0.5"}, {"b", "0.25"}}},
      {"kakeya-audit", {{"m", "random"}, {"b", "0"}, {"x", "random"}}},
      {"machine-k", {{"w", ""}, {"v", ""}, {"max_len", 24}, {"max_steps", 4096}}},
  };
  return m;
}

template <class T>
T as(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const std::exception&) {
    config_error("'" + what + "' has the wrong type");
  }
}

PointSpec point_spec(const Json& j, std::uint64_t seed) {
  PointSpec s;
  s.kind = point_kind_from_string(as<std::string>(j["kind"], "point.kind"));
  s.dim = as<int>(j["dim"], "point.dim");
  s.seed = seed;
  s.p = as<double>(j["p"], "point.p");
  s.alpha = as<double>(j["alpha"], "point.alpha");
  s.beta = as<double>(j["beta"], "point.beta");
  s.m = as<std::string>(j["m"], "point.m");
  s.b = as<std::string>(j["b"], "point.b");
  s.x = as<std::string>(j["x"], "point.x");
  s.validate();
  return s;
}

SetSpec set_spec(const Json& j, std::uint64_t seed) {
  SetSpec s;
  s.kind = set_kind_from_string(as<std::string>(j["kind"], "set.kind"));
  s.depth = as<int>(j["depth"], "set.depth");
  s.dim = as<int>(j["dim"], "set.dim");
  s.directions = as<int>(j["directions"], "set.directions");
  s.seed = seed;
  for (const Json& m : j["maps"]) {
    if (!m.is_object() || !m.contains("ratio") || !m.contains("offset")) config_error("IFS maps need ratio and offset");
    Contraction c;
    c.ratio = parse_rational(as<std::string>(m["ratio"], "set.maps.ratio"));
    for (const Json& o : m["offset"]) c.offset.push_back(parse_rational(as<std::string>(o, "set.maps.offset")));
    s.maps.push_back(std::move(c));
  }
  s.validate();
  return s;
}

PrecisionSchedule schedule(const Json& j) {
  PrecisionSchedule s;
  s.r1 = as<int>(j["r1"], "schedule.r1");
  s.rho = as<double>(j["rho"], "schedule.rho");
  s.r_max = as<int>(j["r_max"], "schedule.r_max");
  s.mode = schedule_mode_from_string(as<std::string>(j["mode"], "schedule.mode"));
  s.window = as<double>(j["window"], "schedule.window");
  s.validate();
  return s;
}

EstimatorOptions estimator(const Json& j, std::uint64_t seed, unsigned threads) {
  EstimatorOptions o;
  o.guard = as<int>(j["guard"], "estimator.guard");
  o.center_extra = as<int>(j["center_extra"], "estimator.center_extra");
  o.subsample = as<std::size_t>(j["subsample"], "estimator.subsample");
  o.subsample_from_dim = as<int>(j["subsample_from_dim"], "estimator.subsample_from_dim");
  o.side_depth = as<int>(j["side_depth"], "estimator.side_depth");
  o.seed = seed;
  o.threads = threads;
  return o;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string curve_csv(const PrecisionCurve& c) {
  std::string out = "r,value,ratio\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out += std::to_string(c.r[i]) + "," + fmt(c.value[i]) + "," + fmt(c.ratio(i)) + "\n";
  }
  return out;
}

Json pair_json(const DimPair& p) { return Json{{"lower", p.lower}, {"upper", p.upper}}; }

Json curve_json(const PrecisionCurve& c) {
  return Json{{"label", c.label}, {"schedule", c.schedule}, {"r", c.r}, {"value", c.value}};
}

std::string rational_text(const Rational& q) { return q.get_str(); }

struct Context {
  Json cfg;
  fs::path dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Outcome out;

  const Json& params() const { return cfg["params"]; }

  void csv(const std::string& name, const std::string& body, const std::string& key) {
    const fs::path p = dir / name;
    write_atomic(p, body);
    out.files.push_back(p);
    out.report["outputs"][key] = p.filename().string();
  }
  void check(const std::string& name, bool ok, Json detail = Json::object()) {
    detail["pass"] = ok;
    out.report["checks"][name] = std::move(detail);
    out.pass = out.pass && ok;
    out.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + name);
  }
  void line(const std::string& s) { out.lines.push_back(s); }
  ModelPtr model() const { return make_model(cfg["model"].get<std::string>()); }
  PrecisionSchedule sched() const { return schedule(cfg["schedule"]); }
  EstimatorOptions est() const { return estimator(cfg["estimator"], seed, threads); }
  PointSpec point() const { return point_spec(cfg["point"], seed); }
  SetSpec set() const { return set_spec(cfg["set"], seed); }
};

void check_expect(Context& c, const DimPair& d) {
  const Json& e = c.cfg["expect"];
  for (const char* side : {"lower", "upper"}) {
    if (!e.contains(side)) continue;
    const Json& range = e[side];
    if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
      config_error(std::string("expect.") + side + " must be [min, max]");
    }
    const double v = side[0] == 'l' ? d.lower : d.upper;
    c.check(std::string("expect_") + side, v >= range[0].get<double>() && v <= range[1].get<double>(),
            Json{{"value", v}, {"range", range}});
  }
}

void run_dim(Context& c) {
  const SourcePtr x = generate_point(c.point());
  const PrecisionCurve k = k_curve(*c.model(), *x, c.sched(), c.est());
  const DimPair d = dim_pair(k, x->dim(), c.sched().window);
  c.csv("k_curve.csv", curve_csv(k), "k_curve");
  c.out.report["results"] = pair_json(d);
  c.line("dim lower " + fmt(d.lower) + " upper " + fmt(d.upper));
  check_expect(c, d);
}

std::pair<SourcePtr, SourcePtr> pair_of(const Context& c) {
  const PointSpec spec = c.point();
  if (spec.kind != PointKind::kJointCopy && spec.kind != PointKind::kJointIndependent) {
    config_error("this command needs a joint_copy or joint_independent point");
  }
  return generate_pair(spec);
}

void run_cond_dim(Context& c) {
  const auto [x, y] = pair_of(c);
  const PrecisionCurve k = cond_curve(*c.model(), *x, *y, c.sched(), c.est());
  const DimPair d = dim_pair(k, x->dim(), c.sched().window);
  c.csv("cond_curve.csv", curve_csv(k), "cond_curve");
  c.out.report["results"] = pair_json(d);
  c.line("cond-dim lower " + fmt(d.lower) + " upper " + fmt(d.upper));
  check_expect(c, d);
}

void run_mdim(Context& c) {
  const auto [x, y] = pair_of(c);
  const PrecisionCurve k = mutual_curve(*c.model(), x, y, c.sched(), c.est());
  const DimPair d = dim_pair(k, std::min(x->dim(), y->dim()), c.sched().window);
  c.csv("mutual_curve.csv", curve_csv(k), "mutual_curve");
  c.out.report["results"] = pair_json(d);
  c.line("mdim lower " + fmt(d.lower) + " upper " + fmt(d.upper));
  check_expect(c, d);
}

void run_audit(Context& c) {
  const auto [x, y] = pair_of(c);
  const Json& t = c.cfg["tolerances"];
  AuditTolerances tol;
  tol.residual = t["residual"].get<double>();
  tol.dim_slack = t["dim_slack"].get<double>();
  tol.side_info_allowance = t["side_info_allowance"].get<double>();
  const IdentityAudit a = audit_identities(*c.model(), x, y, c.sched(), c.est(), tol);
  const std::pair<const char*, const PrecisionCurve*> curves[] = {
      {"kx", &a.kx}, {"ky", &a.ky}, {"kxy", &a.kxy}, {"kx_given_y", &a.kx_given_y},
      {"ky_given_x", &a.ky_given_x}, {"side_x_given_y", &a.side_x_given_y}, {"mutual", &a.mutual}};
  for (const auto& [name, curve] : curves) c.csv(std::string(name) + ".csv", curve_csv(*curve), name);
  c.out.report["results"] = Json{{"chain_residual", a.chain_residual},
                                 {"mutual_residual", a.mutual_residual},
                                 {"side_info_excess", a.side_info_excess},
                                 {"lemma_constant", a.lemma_constant}};
  for (const AuditCheck& k : a.checks) c.check(k.name, k.pass, Json{{"lhs", k.lhs}, {"rhs", k.rhs}});
}

void run_box_dim(Context& c) {
  const Json& p = c.params();
  const PointSample sample = generate_set(c.set(), p["count"].get<std::size_t>());
  const int lo = p["r_lo"].get<int>();
  const int hi = p["r_hi"].get<int>() > 0 ? p["r_hi"].get<int>() : std::max(lo + 1, unsaturated_box_precision(sample));
  const BoxDimension b = box_counting(sample, lo, hi);
  std::string csv = "r,cells\n";
  for (const BoxCount& k : b.counts) csv += std::to_string(k.r) + "," + std::to_string(k.cells) + "\n";
  c.csv("box_counts.csv", csv, "box_counts");
  c.out.report["results"] = Json{{"box_dim", b.slope}, {"r_lo", lo}, {"r_hi", hi},
                                 {"note", "box-counting dimension upper-bounds Hausdorff dimension"}};
  c.line("box-dim " + fmt(b.slope) + " over r in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void run_cover(Context& c) {
  const Json& p = c.params();
  const PointSample sample = generate_set(c.set(), p["count"].get<std::size_t>());
  const double s = p["s"].get<double>();
  const ModelPtr model = c.model();
  std::string csv = "r,s,candidates,kept,covered,uncovered,cost,cardinality_ok\n";
  bool all_ok = true;
  for (const Json& rj : p["r_values"]) {
    const int r = as<int>(rj, "params.r_values");
    const CoverResult cr = low_complexity_cover_cost(*model, sample, s, r, c.threads);
    all_ok = all_ok && cr.cardinality_ok;
    csv += std::to_string(r) + "," + fmt(s) + "," + std::to_string(cr.candidates) + "," +
           std::to_string(cr.cover.size()) + "," + std::to_string(cr.covered) + "," +
           std::to_string(cr.uncovered) + "," + fmt(cr.cost) + "," + (cr.cardinality_ok ? "1" : "0") + "\n";
    c.line("cover r=" + std::to_string(r) + " kept " + std::to_string(cr.cover.size()) + " covered " +
           std::to_string(cr.covered) + "/" + std::to_string(sample.points.size()));
  }
  c.csv("cover.csv", csv, "cover");
  c.check("cardinality_bound", all_ok);
}

void run_packing(Context& c) {
  const Json& p = c.params();
  const PointSample sample = generate_set(c.set(), p["count"].get<std::size_t>());
  const double s = p["s"].get<double>();
  std::string csv = "delta,centers,cost\n";
  bool disjoint = true;
  for (const Json& dj : p["deltas"]) {
    const int d = as<int>(dj, "params.deltas");
    const PackingResult pr = packing(sample, s, d);
    if (pr.centers.size() <= 4096) disjoint = disjoint && pairwise_disjoint(pr.centers, pr.radius_exp);
    csv += std::to_string(d) + "," + std::to_string(pr.centers.size()) + "," + fmt(pr.cost) + "\n";
    c.line("packing delta=" + std::to_string(d) + " balls " + std::to_string(pr.centers.size()) + " cost " + fmt(pr.cost));
  }
  c.csv("packing.csv", csv, "packing");
  c.check("disjoint", disjoint);
}

void run_p2s(Context& c) {
  const Json& p = c.params();
  PointToSetOptions o;
  o.box_samples = p["count"].get<std::size_t>();
  o.box_r_lo = p["r_lo"].get<int>();
  o.box_r_hi = p["r_hi"].get<int>();
  o.dim_points = p["dim_points"].get<std::size_t>();
  const PointToSetReport r = point_to_set_audit(*c.model(), c.set(), c.sched(), o, c.est());
  std::string pts = "index,lower,upper\n";
  for (const PointDimension& d : r.points) pts += std::to_string(d.index) + "," + fmt(d.dim.lower) + "," + fmt(d.dim.upper) + "\n";
  std::string box = "r,cells\n";
  for (const BoxCount& k : r.box.counts) box += std::to_string(k.r) + "," + std::to_string(k.cells) + "\n";
  c.csv("point_dims.csv", pts, "point_dims");
  c.csv("box_counts.csv", box, "box_counts");
  c.out.report["results"] = Json{{"set", r.set},           {"analytic", r.analytic}, {"box_dim", r.box.slope},
                                 {"r_lo", r.box_r_lo},     {"r_hi", r.box_r_hi},     {"max_lower", r.max_lower},
                                 {"max_upper", r.max_upper}, {"gap_lower", r.gap_lower}, {"gap_upper", r.gap_upper},
                                 {"note", r.note}};
  c.line("p2s box " + fmt(r.box.slope) + " max point lower " + fmt(r.max_lower) + " gap " + fmt(r.gap_lower));
}

std::unique_ptr<LineOracle> make_oracle(const std::string& name, const Rational& m, const Rational& b) {
  if (name == "exact") return std::make_unique<ExactLineOracle>(m, b);
  if (name == "reject") return std::make_unique<RejectOracle>();
  if (name.rfind("subgrid:", 0) == 0) {
    return std::make_unique<SubgridLineOracle>(m, b, std::stoull(name.substr(8)));
  }
  config_error("unknown oracle '" + name + "'");
}

void run_reconstruct(Context& c) {
  const Json& p = c.params();
  const int r = p["r"].get<int>();
  const Rational m = parse_rational(p["m"].get<std::string>());
  const Rational b = parse_rational(p["b"].get<std::string>());
  const Rational x = parse_rational(p["x"].get<std::string>());
  const auto oracle = make_oracle(p["oracle"].get<std::string>(), m, b);
  ReconstructionInput in;
  in.r = r;
  const Rational px[1] = {x};
  const Rational qx[1] = {m * x + b};
  in.p = DyadicPoint::floor_of(px, r);
  in.q = DyadicPoint::floor_of(qx, r);
  in.oracle = oracle.get();
  in.h = p["h"].get<std::uint64_t>();
  const Triple t = reconstruct(in);
  const Rational dm = t.u.coord(0) - m, db = t.v.coord(0) - b, dx = t.p.coord(0) - x;
  const bool inside = dm * dm + db * db + dx * dx < Rational(Integer(1), Integer(1) << (2 * r - 2));
  c.out.report["results"] = Json{{"u", rational_text(t.u.coord(0))}, {"v", rational_text(t.v.coord(0))},
                                 {"p", rational_text(t.p.coord(0))}, {"in_target_ball", inside}};
  c.line("(u, v, p) = (" + rational_text(t.u.coord(0)) + ", " + rational_text(t.v.coord(0)) + ", " +
         rational_text(t.p.coord(0)) + ")" + (inside ? " inside" : " outside") + " B_{2^{1-r}}(m, b, x)");
}

void run_kakeya_stats(Context& c) {
  const Json& p = c.params();
  const int r = p["r"].get<int>();
  const HStatistics st = h_statistics(r, parse_rational(p["m"].get<std::string>()),
                                      parse_rational(p["b"].get<std::string>()),
                                      p["trials"].get<std::size_t>(), c.seed, c.threads);
  std::string csv = "trial,x,h,log2h_over_r\n";
  for (const HTrial& t : st.trials) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g", t.x.get_d());
    csv += std::to_string(t.trial) + "," + buf + "," + std::to_string(t.h) + "," + fmt(t.log2h_over_r) + "\n";
  }
  c.csv("kakeya_h.csv", csv, "kakeya_h");
  c.out.report["results"] = Json{{"mean", st.mean},
                                 {"median", st.median},
                                 {"max", st.max},
                                 {"median_log2h_over_r", st.median_log2h_over_r},
                                 {"mean_bound", st.mean_bound},
                                 {"analytic_sum", st.profile.analytic_sum.get_d()},
                                 {"harmonic_bound", st.profile.harmonic_bound.get_d()},
                                 {"interval_bound_violations", st.profile.interval_bound_violations},
                                 {"interval_bound_violations_exact_v", st.profile.interval_bound_violations_exact_v},
                                 {"doubled_interval_bound_violations", st.profile.doubled_bound_violations}};
  c.check("mean_h_bound", st.mean_ok, Json{{"mean", st.mean}, {"bound", st.mean_bound}});
  c.check("analytic_sum_bound", st.profile.analytic_ok);
  c.check("tolerance_chain", st.tolerance_chain_ok);
  c.check("doubled_interval_bound", st.profile.doubled_bound_violations == 0);
}

void run_kakeya_audit(Context& c) {
  const Json& p = c.params();
  const LowerAuditReport a =
      dim_lower_audit(*c.model(), p["m"].get<std::string>(), p["b"].get<std::string>(), c.seed, c.sched(),
                      c.est(), p["x"].get<std::string>(), c.cfg["tolerances"]["lower_slack"].get<double>());
  const std::pair<const char*, const PrecisionCurve*> curves[] = {{"k_mbx", &a.k_mbx},
                                                                  {"k_b_given_m", &a.k_b_given_m},
                                                                  {"k_line", &a.k_line},
                                                                  {"k_x_given_bm", &a.k_x_given_bm},
                                                                  {"k_m", &a.k_m}};
  for (const auto& [name, curve] : curves) c.csv(std::string(name) + ".csv", curve_csv(*curve), name);
  c.out.report["results"] = Json{{"lhs", a.lhs},
                                 {"lhs_liminf", a.lhs_liminf},
                                 {"line_dim", pair_json(a.line_dim)},
                                 {"x_given_bm_dim", pair_json(a.x_given_bm_dim)},
                                 {"m_dim", pair_json(a.m_dim)},
                                 {"decomposition", a.decomposition}};
  c.check("lower_bound_inequality", a.lemma_ok, Json{{"lhs", a.lhs_liminf}, {"rhs", a.line_dim.lower + a.slack}});
  c.check("decomposition", a.decomposition_ok, Json{{"lhs", a.decomposition}, {"rhs", a.line_dim.lower + a.slack}});
}

void run_machine_k(Context& c) {
  const Json& p = c.params();
  MachineBudget budget;
  budget.max_len = p["max_len"].get<int>();
  budget.max_steps = p["max_steps"].get<std::uint64_t>();
  budget.validate();
  MachineSolver solver(BitString::from_string(p["v"].get<std::string>()), budget);
  const std::optional<int> k = solver.min_program_length(BitString::from_string(p["w"].get<std::string>()));
  c.out.report["results"] = Json{{"k", k ? Json(*k) : Json("none")}};
  c.line(k ? std::to_string(*k) : std::string("none"));
}

const std::map<std::string, std::function<void(Context&)>>& runners() {
  static const std::map<std::string, std::function<void(Context&)>> m = {
      {"dim", run_dim},
      {"cond-dim", run_cond_dim},
      {"mdim", run_mdim},
      {"audit", run_audit},
      {"box-dim", run_box_dim},
      {"cover", run_cover},
      {"packing", run_packing},
      {"p2s-audit", run_p2s},
      {"kakeya-reconstruct", run_reconstruct},
      {"kakeya-stats", run_kakeya_stats},
      {"kakeya-audit", run_kakeya_audit},
      {"machine-k", run_machine_k},
  };
  return m;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

Json parse_config_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
}

Json load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Json effective_config(const Json& config) {
  if (!config.is_object()) config_error("config must be a JSON object");
  static const Schema top = {{"command", nullptr}, {"seed", nullptr},  {"model", "cm"},
                             {"output_dir", "dimlab-out"}, {"threads", 0}, {"point", Json::object()},
                             {"set", Json::object()}, {"schedule", Json::object()}, {"estimator", Json::object()},
                             {"tolerances", Json::object()}, {"params", Json::object()}, {"expect", Json::object()}};
  Json out = fill(config, top, "config");
  if (!out["command"].is_string()) config_error("'command' is required");
  if (!out["seed"].is_number_integer() || (!out["seed"].is_number_unsigned() && out["seed"].get<std::int64_t>() < 0)) {
    config_error("'seed' is required and must be a non-negative integer");
  }
  out["seed"] = out["seed"].get<std::uint64_t>();
  const std::string command = out["command"].get<std::string>();
  const auto params = command_params().find(command);
  if (params == command_params().end()) config_error("unknown command '" + command + "'");
  if (!out["model"].is_string()) config_error("'model' must be a string");
  (void)make_model(out["model"].get<std::string>());
  if (!out["output_dir"].is_string()) config_error("'output_dir' must be a string");
  if (!out["threads"].is_number_integer()) config_error("'threads' must be an integer");
  if (!out["expect"].is_object()) config_error("'expect' must be an object");
  out["point"] = fill(out["point"], point_schema(), "point");
  out["set"] = fill(out["set"], set_schema(), "set");
  out["schedule"] = fill(out["schedule"], schedule_schema(), "schedule");
  out["estimator"] = fill(out["estimator"], estimator_schema(), "estimator");
  out["tolerances"] = fill(out["tolerances"], tolerance_schema(), "tolerances");
  out["params"] = fill(out["params"], params->second, "params");
  out["threads"] = resolve_threads(out["threads"].get<int>());
  return out;
}

void write_atomic(const fs::path& path, const std::string& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(errc::kConfigError, "cannot write '" + tmp.string() + "'");
    f << body;
    if (!f.flush()) throw Error(errc::kConfigError, "write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

Outcome run_experiment(const Json& config) {
  Context c;
  c.cfg = effective_config(config);
  c.seed = c.cfg["seed"].get<std::uint64_t>();
  c.threads = c.cfg["threads"].get<unsigned>();
  c.dir = c.cfg["output_dir"].get<std::string>();
  fs::create_directories(c.dir);
  c.out.report = Json{{"created", utc_now()}, {"config", c.cfg}, {"outputs", Json::object()},
                      {"results", Json::object()}, {"checks", Json::object()}};
  const auto start = std::chrono::steady_clock::now();
  runners().at(c.cfg["command"].get<std::string>())(c);
  c.out.report["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.out.report["pass"] = c.out.pass;
  const fs::path report = c.dir / "report.json";
  write_atomic(report, c.out.report.dump(2) + "\n");
  c.out.files.push_back(report);
  return std::move(c.out);
}

}  // namespace dimlab::cli
