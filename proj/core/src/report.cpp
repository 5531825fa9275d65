#include "subwalk/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "subwalk/error.hpp"
#include "subwalk/estimates.hpp"
#include "subwalk/format.hpp"
#include "subwalk/montecarlo.hpp"

namespace subwalk {

const std::vector<std::string>& ReportConfig::keys() {
  static const std::vector<std::string> k = {"seed",  "trials",       "threads",       "weights.terms",
                                             "grid",  "harnack.grid", "harnack.gamma", "rerun",
                                             "only"};
  return k;
}

ReportConfig ReportConfig::from(const KeyValueConfig& kv) {
  kv.require_known(keys());
  ReportConfig c;
  c.seed = static_cast<std::uint64_t>(kv.integer_or("seed", static_cast<long>(c.seed)));
  const long trials = kv.integer_or("trials", static_cast<long>(c.trials));
  if (trials < 1) fail(ErrorKind::configuration, "trials must be >= 1");
  c.trials = static_cast<std::size_t>(trials);
  c.threads = static_cast<int>(kv.integer_or("threads", 0));
  const long terms = kv.integer_or("weights.terms", static_cast<long>(c.weight_terms));
  if (terms < 1) fail(ErrorKind::configuration, "weights.terms must be >= 1");
  c.weight_terms = static_cast<std::size_t>(terms);
  c.grid = static_cast<int>(kv.integer_or("grid", c.grid));
  c.harnack_grid = static_cast<int>(kv.integer_or("harnack.grid", c.harnack_grid));
  c.harnack_gamma = kv.number_or("harnack.gamma", c.harnack_gamma);
  c.rerun = kv.flag_or("rerun", c.rerun);
  if (auto only = kv.get("only")) {
    for (double v : parse_number_list(*only)) c.only.push_back(static_cast<int>(v));
  }
  return c;
}

Json ReportConfig::to_json() const {
  Json j;
  j["seed"] = seed;
  j["trials"] = trials;
  j["weights.terms"] = weight_terms;
  j["grid"] = grid;
  j["harnack.grid"] = harnack_grid;
  j["harnack.gamma"] = number(harnack_gamma);
  j["rerun"] = rerun;
  j["only"] = only;
  return j;
}

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> c = {
      {1, "weight oracle equivalence", 10.0},
      {2, "kernel cross-method and Chapman-Kolmogorov", 60.0},
      {3, "one-step comparability", 60.0},
      {4, "on-diagonal band", 300.0},
      {5, "global two-sided sandwich", 600.0},
      {6, "Pruitt domination", 30.0},
      {7, "tail-sum lemma", 30.0},
      {8, "exit times", 300.0},
      {9, "hitting bound", 300.0},
      {10, "maximal inequality", 300.0},
      {11, "Harnack ratio", 600.0},
      {12, "Gamma-tail lemma", 1.0},
      {13, "determinism", 0.0},
  };
  return c;
}

ReportContext::ReportContext(ReportConfig cfg) : cfg_(std::move(cfg)) {}
ReportContext::~ReportContext() = default;

const SubordinationWeights& ReportContext::stable_half_weights() {
  if (!weights_) {
    weights_ = std::make_unique<SubordinationWeights>(
        weights_quadrature_terms(PhiSpec::stable(0.5), cfg_.weight_terms));
  }
  return *weights_;
}

const IncrementSampler& ReportContext::stable_half_sampler() {
  if (!sampler_) {
    sampler_ = std::make_unique<IncrementSampler>(build_sampler(stable_half_weights(), cfg_.seed));
  }
  return *sampler_;
}

namespace {

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double max_abs_diff_box(const LatticeKernel& a, const LatticeKernel& b) {
  double worst = 0.0;
  a.for_each_in_box([&](const Site& x, double v) { worst = std::max(worst, std::abs(v - b(x))); });
  return worst;
}

SimulationConfig sim_config(const ReportConfig& cfg, int d, std::uint64_t salt) {
  SimulationConfig s;
  s.d = d;
  s.trials = cfg.trials;
  s.base_seed = mix_seed(cfg.seed, salt);
  s.threads = cfg.threads;
  return s;
}

CriterionResult c1_weights(ReportContext&) {
  CriterionResult r;
  Json rows = Json::array();
  bool ok = true;
  double worst_diff = 0.0, worst_mass = 0.0;
  for (double alpha : {0.3, 0.5, 0.7}) {
    const PhiSpec phi = PhiSpec::stable(alpha);
    const SubordinationWeights quad = weights_quadrature_terms(phi, 50);
    const SubordinationWeights series = weights_series(phi, 50);
    double d_qs = 0.0, d_qc = 0.0, d_sc = 0.0;
    for (std::size_t m = 1; m <= 50; ++m) {
      const double c = stable_weight_closed_form(alpha, m);
      d_qs = std::max(d_qs, std::abs(quad[m] - series[m]));
      d_qc = std::max(d_qc, std::abs(quad[m] - c));
      d_sc = std::max(d_sc, std::abs(series[m] - c));
    }
    const double mass = quad.partial_sum() + quad.tail_mass - 1.0;
    const double diff = std::max({d_qs, d_qc, d_sc});
    worst_diff = std::max(worst_diff, diff);
    worst_mass = std::max(worst_mass, std::abs(mass));
    ok = ok && diff <= 1e-8 && std::abs(mass) <= 1e-10;
    rows.push_back({{"phi", phi.label()},
                    {"quadrature_vs_series", number(d_qs)},
                    {"quadrature_vs_closed_form", number(d_qc)},
                    {"series_vs_closed_form", number(d_sc)},
                    {"sum_plus_tail_minus_one", number(mass)}});
  }
  r.passed = ok;
  r.detail = {{"m_max", 50}, {"tolerance", 1e-8}, {"mass_tolerance", 1e-10}, {"rows", rows}};
  r.summary = "max entry diff " + fmt(worst_diff) + ", max |sum + tail - 1| " + fmt(worst_mass);
  return r;
}

CriterionResult c2_cross_method(ReportContext& ctx) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  const int grid = ctx.config().grid;
  const int radius = grid / 4;
  const LatticeKernel step = subordinate_step_kernel(1, ctx.stable_half_weights(), radius, grid);
  std::map<int, LatticeKernel> conv;
  auto nstep = [&](int n) -> const LatticeKernel& {
    auto it = conv.find(n);
    if (it == conv.end()) it = conv.emplace(n, nstep_kernel_convolve(step, n)).first;
    return it->second;
  };
  Json cross = Json::array();
  double worst_cross = 0.0;
  for (int n : {1, 2, 4, 8, 16, 32}) {
    const LatticeKernel spec_k = nstep_kernel_spectral(phi, 1, n, grid, radius);
    const double diff = max_abs_diff_box(nstep(n), spec_k);
    worst_cross = std::max(worst_cross, diff);
    cross.push_back({{"n", n}, {"max_abs_diff", number(diff)}, {"defect", number(nstep(n).mass_defect())}});
  }
  Json ck = Json::array();
  bool ck_ok = true;
  double worst_ck = 0.0;
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 3}, {3, 5}, {4, 4}, {7, 9}, {8, 8}, {5, 27}}) {
    const LatticeKernel lhs = nstep(a + b);
    const LatticeKernel rhs = convolve(nstep(a), nstep(b));
    const double diff = max_abs_diff_box(lhs, rhs);
    const double allowance = 1e-10 + lhs.mass_defect() + rhs.mass_defect();
    worst_ck = std::max(worst_ck, diff);
    ck_ok = ck_ok && diff <= allowance;
    ck.push_back({{"a", a}, {"b", b}, {"residual", number(diff)}, {"allowance", number(allowance)}});
  }
  r.passed = worst_cross <= 1e-10 && ck_ok;
  r.detail = {{"phi", phi.label()}, {"radius", radius}, {"period", grid},
              {"weight_terms", ctx.stable_half_weights().terms()},
              {"step_defect", number(step.mass_defect())},
              {"cross_method", cross}, {"chapman_kolmogorov", ck}};
  r.summary = "cross-method " + fmt(worst_cross) + ", CK residual " + fmt(worst_ck);
  return r;
}

CriterionResult c3_one_step(ReportContext& ctx) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  const int grid = ctx.config().grid;
  bool ok = true;
  Json rows = Json::array();
  std::string summary;
  for (int d : {1, 2}) {
    const LatticeKernel step = subordinate_step_kernel(d, ctx.stable_half_weights(), grid / 4, grid);
    const EstimateEnvelope env(phi, d);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    Site at_lo{}, at_hi{};
    step.for_each_in_box([&](const Site& x, double p) {
      const double rad2 = norm2(x);
      if (rad2 < 1.0 || rad2 > 100.0 * 100.0) return;
      const double ratio = p / env.j(std::sqrt(rad2));
      if (ratio < lo) { lo = ratio; at_lo = x; }
      if (ratio > hi) { hi = ratio; at_hi = x; }
    });
    const double band = hi / lo;
    ok = ok && lo > 0.0 && band <= 10.0;
    rows.push_back({{"d", d}, {"ratio_inf", number(lo)}, {"ratio_sup", number(hi)}, {"band", number(band)},
                    {"argmin", site_json(at_lo, d)}, {"argmax", site_json(at_hi, d)},
                    {"step_defect", number(step.mass_defect())}});
    summary += (summary.empty() ? "" : ", ") + std::string("d=") + std::to_string(d) + " band " + fmt(band);
  }
  r.passed = ok;
  r.detail = {{"phi", phi.label()}, {"range", "1 <= |x| <= 100"}, {"limit", 10}, {"rows", rows}};
  r.summary = summary;
  return r;
}

CriterionResult c4_on_diagonal(ReportContext&) {
  CriterionResult r;
  bool ok = true;
  Json rows = Json::array();
  std::string summary;
  for (const PhiSpec& phi : {PhiSpec::stable(0.5), PhiSpec::stable_mixture(0.3, 0.7)}) {
    for (int d : {1, 2}) {
      const EstimateEnvelope env(phi, d);
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      Json values = Json::array();
      for (int n = 4; n <= 1024; n *= 2) {
        const double p = on_diagonal(phi, d, n);
        const double normalized = p / env.diagonal(n);
        lo = std::min(lo, normalized);
        hi = std::max(hi, normalized);
        values.push_back({{"n", n}, {"p", number(p)}, {"normalized", number(normalized)}});
      }
      ok = ok && lo > 0.0 && hi / lo <= 10.0;
      rows.push_back({{"phi", phi.label()}, {"d", d}, {"max_over_min", number(hi / lo)}, {"values", values}});
      summary += (summary.empty() ? "" : ", ") + phi.label() + " d=" + std::to_string(d) + " " + fmt(hi / lo);
    }
  }
  r.passed = ok;
  r.detail = {{"limit", 10}, {"rows", rows}};
  r.summary = summary;
  return r;
}

CriterionResult c5_two_sided(ReportContext& ctx) {
  CriterionResult r;
  const int grid = ctx.config().grid;
  const int radius = grid / 4;
  bool ok = true;
  Json rows = Json::array();
  std::string summary;
  for (const PhiSpec& phi : {PhiSpec::stable(0.5), PhiSpec::stable_mixture(0.3, 0.7)}) {
    const EstimateEnvelope env(phi, 1);
    std::vector<double> bands;
    Json reports = Json::array();
    for (int cell : {grid, 2 * grid}) {
      std::vector<LatticeKernel> kernels;
      for (int n = 1; n <= 128; ++n) kernels.push_back(nstep_kernel_spectral(phi, 1, n, cell, radius));
      const RatioReport rep = verify_two_sided(kernels, env);
      ok = ok && rep.ratio_inf > 0.0 && std::isfinite(rep.ratio_sup) && rep.band() <= 100.0;
      bands.push_back(rep.band());
      Json j = to_json(rep);
      j["period"] = cell;
      reports.push_back(j);
    }
    const double stability = std::max(bands[0], bands[1]) / std::min(bands[0], bands[1]);
    ok = ok && stability <= 2.0;
    rows.push_back({{"phi", phi.label()}, {"band_stability", number(stability)}, {"reports", reports}});
    summary += (summary.empty() ? "" : ", ") + phi.label() + " band " + fmt(bands[0]) + " -> " + fmt(bands[1]);
  }
  r.passed = ok;
  r.detail = {{"band_limit", 100}, {"stability_limit", 2}, {"rows", rows}};
  r.summary = summary;
  return r;
}

CriterionResult c6_pruitt(ReportContext& ctx) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  const int grid = 2 * ctx.config().grid;
  const LatticeKernel step = subordinate_step_kernel(1, ctx.stable_half_weights(), grid / 4, grid);
  std::vector<double> ratios;
  Json values = Json::array();
  for (int x = 1; x <= 128; ++x) {
    const double h = pruitt_h(step, x);
    const double ratio = h / phi(1.0 / (static_cast<double>(x) * x));
    ratios.push_back(ratio);
    values.push_back({{"x", x}, {"h", number(h)}, {"ratio", number(ratio)}});
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[63] + sorted[64]);
  const double sup = sorted.back();
  r.passed = std::isfinite(sup) && sup <= 10.0 * median;
  r.detail = {{"phi", phi.label()}, {"sup", number(sup)}, {"median", number(median)},
              {"step_defect", number(step.mass_defect())}, {"values", values}};
  r.summary = "sup " + fmt(sup) + ", median " + fmt(median);
  return r;
}

CriterionResult c7_tail_sum(ReportContext&) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  bool ok = true;
  Json rows = Json::array();
  std::string summary;
  for (int d : {1, 2}) {
    const EstimateEnvelope env(phi, d);
    std::vector<double> g1, g2;
    for (int k = 1; k <= 64; ++k) g1.push_back(k);
    for (int k = 1; k <= 128; ++k) g2.push_back(k);
    const RatioReport a = tail_sum_check(env, g1);
    const RatioReport b = tail_sum_check(env, g2);
    const double stability = std::max(a.ratio_sup, b.ratio_sup) / std::min(a.ratio_sup, b.ratio_sup);
    ok = ok && std::isfinite(a.ratio_sup) && std::isfinite(b.ratio_sup) && stability <= 1.5;
    rows.push_back({{"d", d}, {"grid_64", to_json(a)}, {"grid_128", to_json(b)}, {"stability", number(stability)}});
    summary += (summary.empty() ? "" : ", ") + std::string("d=") + std::to_string(d) + " sup " + fmt(a.ratio_sup);
  }
  r.passed = ok;
  r.detail = {{"phi", phi.label()}, {"stability_limit", 1.5}, {"rows", rows}};
  r.summary = summary;
  return r;
}

CriterionResult c8_exit(ReportContext& ctx) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  const SimulationConfig sim = sim_config(ctx.config(), 1, 8);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::size_t censored = 0, trials = 0;
  Json rows = Json::array();
  for (double rad : {8.0, 16.0, 32.0}) {
    const ExitTimeReport e = estimate_exit_time(sim, phi, ctx.stable_half_sampler(), rad);
    lo = std::min(lo, e.ratio);
    hi = std::max(hi, e.ratio);
    censored += e.censored;
    trials += e.trials;
    rows.push_back(to_json(e));
  }
  const double censor_fraction = static_cast<double>(censored) / static_cast<double>(trials);
  r.passed = lo > 0.0 && hi / lo <= 5.0 && censor_fraction < 1e-3;
  r.detail = {{"phi", phi.label()}, {"seed", sim.base_seed}, {"band", number(hi / lo)},
              {"censored_fraction", number(censor_fraction)}, {"rows", rows}};
  r.summary = "band " + fmt(hi / lo) + ", censored " + std::to_string(censored);
  return r;
}

CriterionResult c9_hitting(ReportContext& ctx) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  const SimulationConfig sim = sim_config(ctx.config(), 1, 9);
  double C = 0.0, C_upper = 0.0;
  Json rows = Json::array();
  Json excluded = Json::array();
  for (long n : {8L, 16L, 32L}) {
    for (long dist : {32L, 64L, 128L}) {
      const HittingReport h =
          estimate_hitting(sim, phi, ctx.stable_half_sampler(), make_site({dist}), Site{}, n);
      if (h.distance <= h.r_n * (1.0 + 1e-12)) {
        excluded.push_back({{"n", n}, {"distance", dist}, {"r_n", number(h.r_n)}});
        continue;
      }
      C = std::max(C, h.ratio);
      C_upper = std::max(C_upper, h.probability.upper / h.bound);
      rows.push_back(to_json(h, 1));
    }
  }
  bool dominated = true;
  for (const auto& row : rows) {
    dominated = dominated && row["probability"]["p"].get<double>() <= C * row["bound"].get<double>();
  }
  r.passed = std::isfinite(C) && std::isfinite(C_upper) && dominated && !rows.empty();
  r.detail = {{"phi", phi.label()}, {"seed", sim.base_seed}, {"C", number(C)}, {"C_upper95", number(C_upper)},
              {"excluded_precondition", excluded}, {"rows", rows}};
  r.summary = "C = " + fmt(C) + " (upper " + fmt(C_upper) + "), " + std::to_string(excluded.size()) +
              " point(s) with |x-y| <= r_n excluded";
  return r;
}

CriterionResult c10_maximal(ReportContext& ctx) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  const SimulationConfig calib = sim_config(ctx.config(), 1, 10);
  const SimulationConfig check = sim_config(ctx.config(), 1, 1010);
  const std::vector<double> grid{8.0, 16.0, 32.0};
  const GammaCalibration cal = calibrate_gamma(calib, phi, ctx.stable_half_sampler(), grid);
  bool ok = true;
  Json rows = Json::array();
  double worst = -1.0;
  for (double rad : {8.0, 16.0, 32.0, 64.0}) {
    const MaximalProbe p = maximal_inequality_probe(check, phi, ctx.stable_half_sampler(), rad, cal.gamma);
    const double limit = 0.25 + 3.0 * p.probability.std_error;
    ok = ok && p.probability.p <= limit;
    worst = std::max(worst, p.probability.p);
    Json j = to_json(p);
    j["limit"] = number(limit);
    rows.push_back(j);
  }
  r.passed = ok;
  r.detail = {{"phi", phi.label()}, {"gamma", number(cal.gamma)}, {"calibration_radii", grid},
              {"calibration_seed", calib.base_seed}, {"check_seed", check.base_seed}, {"rows", rows}};
  r.summary = "gamma " + fmt(cal.gamma) + ", max probability " + fmt(worst);
  return r;
}

CriterionResult c11_harnack(ReportContext& ctx) {
  CriterionResult r;
  const PhiSpec phi = PhiSpec::stable(0.5);
  const int grid = ctx.config().harnack_grid;
  bool ok = true;
  Json rows = Json::array();
  std::string summary;
  for (double R : {32.0, 64.0, 128.0}) {
    const HarnackWindow w = HarnackWindow::from_profile(phi, ctx.config().harnack_gamma, R, Site{});
    const long n0 = w.horizon(phi) + 1;
    const RatioReport base = harnack_ratio(phi, 1, n0, Site{}, w, kernel_harnack_function(phi, 1, n0, Site{}, grid));
    HarnackWindow shifted = w;
    const Site x0 = make_site({17});
    shifted.z = make_site({17});
    const RatioReport moved = harnack_ratio(phi, 1, n0, x0, shifted, kernel_harnack_function(phi, 1, n0, x0, grid));
    const RatioReport flat = harnack_ratio(phi, 1, n0, Site{}, w, [](long, const Site&) { return 0.75; });
    const bool finite = !base.degenerate && std::isfinite(base.ratio_sup) && base.ratio_sup > 0.0;
    const bool invariant = moved.ratio_sup == base.ratio_sup;
    const bool unit = flat.ratio_sup == 1.0;
    ok = ok && finite && invariant && unit;
    Json j = to_json(base);
    j["R"] = R;
    j["translation_invariant"] = invariant;
    j["constant_function_ratio"] = number(flat.ratio_sup);
    rows.push_back(j);
    summary += (summary.empty() ? "" : ", ") + std::string("R=") + fmt(R) + " C " + fmt(base.ratio_sup);
  }
  r.passed = ok;
  r.detail = {{"phi", phi.label()}, {"gamma", number(ctx.config().harnack_gamma)}, {"period", grid}, {"rows", rows}};
  r.summary = summary;
  return r;
}

CriterionResult c12_gamma_tail(ReportContext&) {
  CriterionResult r;
  bool ok = true;
  double min_gap = std::numeric_limits<double>::infinity();
  Json rows = Json::array();
  for (int n = 1; n <= 5; ++n) {
    for (int k = 1; k <= 10; ++k) {
      const double t = k / 10.0;
      const double cdf = gamma_arrival_cdf(n, t);
      const double gap = t - cdf;
      min_gap = std::min(min_gap, gap);
      ok = ok && cdf <= t && gap > 0.0;
      rows.push_back({{"n", n}, {"t", number(t)}, {"cdf", number(cdf)}, {"gap", number(gap)}});
    }
  }
  r.passed = ok;
  r.detail = {{"min_gap", number(min_gap)}, {"rows", rows}};
  r.summary = "min gap t - P(T_n <= t) = " + fmt(min_gap);
  return r;
}

bool selected(const ReportConfig& cfg, int id) {
  return cfg.only.empty() || std::find(cfg.only.begin(), cfg.only.end(), id) != cfg.only.end();
}

// Criteria 1-12 in order; `progress` sees each result.
std::vector<CriterionResult> run_pass(const ReportConfig& cfg, const ProgressFn& progress) {
  ReportContext ctx(cfg);
  std::vector<CriterionResult> out;
  for (const CriterionInfo& info : criteria()) {
    if (info.id == 13 || !selected(cfg, info.id)) continue;
    CriterionResult res = run_criterion(info.id, ctx);
    if (progress) progress(res);
    out.push_back(std::move(res));
  }
  return out;
}

Json aggregate(const ReportConfig& cfg, const std::vector<CriterionResult>& results) {
  Json j;
  j["tool"] = "subwalk";
  j["version"] = version_string();
  j["config"] = cfg.to_json();
  Json list = Json::array();
  bool all = true;
  for (const auto& c : results) {
    list.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"summary", c.summary},
                    {"detail", c.detail}});
    all = all && c.passed;
  }
  j["criteria"] = list;
  j["all_passed"] = all;
  return j;
}

}  // namespace

CriterionResult run_criterion(int id, ReportContext& ctx) {
  using Runner = CriterionResult (*)(ReportContext&);
  static const Runner runners[] = {c1_weights,  c2_cross_method, c3_one_step, c4_on_diagonal,
                                   c5_two_sided, c6_pruitt,      c7_tail_sum, c8_exit,
                                   c9_hitting,  c10_maximal,     c11_harnack, c12_gamma_tail};
  if (id < 1 || id > 12) fail(ErrorKind::domain, "criterion id out of 1..12: " + std::to_string(id));
  const CriterionInfo& info = criteria()[static_cast<std::size_t>(id - 1)];
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult res;
  try {
    res = runners[id - 1](ctx);
  } catch (const Error& e) {
    throw Error(e.kind(), "criterion " + std::to_string(id) + " (" + info.name + "): " + e.what());
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.id = id;
  res.name = info.name;
  res.limit_seconds = info.limit_seconds;
  return res;
}

bool ReportOutcome::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& c) { return c.passed; });
}

ReportOutcome run_report(const ReportConfig& cfg, const ProgressFn& progress) {
  ReportOutcome out;
  out.results = run_pass(cfg, progress);
  if (cfg.rerun && selected(cfg, 13)) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string first = sha256_hex(dump(aggregate(cfg, out.results)));
    const std::string second = sha256_hex(dump(aggregate(cfg, run_pass(cfg, {}))));
    CriterionResult det;
    det.id = 13;
    det.name = criteria().back().name;
    det.passed = first == second;
    det.detail = {{"first_sha256", first}, {"second_sha256", second}};
    det.summary = det.passed ? "rerun digest identical" : "rerun digest differs";
    det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) progress(det);
    out.results.push_back(std::move(det));
  }
  out.json = aggregate(cfg, out.results);
  out.digest = sha256_hex(dump(out.json));
  return out;
}

std::string summary_table(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  os << std::left << std::setw(4) << "id" << std::setw(46) << "criterion" << std::setw(6) << "pass"
     << std::setw(12) << "seconds" << "summary\n";
  for (const auto& c : results) {
    std::string secs = fmt(c.seconds, 3);
    if (c.limit_seconds > 0.0) secs += "/" + fmt(c.limit_seconds, 4);
    os << std::left << std::setw(4) << c.id << std::setw(46) << c.name << std::setw(6)
       << (c.passed ? "yes" : "NO") << std::setw(12) << secs << c.summary << '\n';
  }
  return os.str();
}

}  // namespace subwalk
