#include "subwalk/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "subwalk/error.hpp"
#include "subwalk/format.hpp"

namespace subwalk {

void SimulationConfig::validate() const {
  if (d < 1 || d > kMaxDim) fail(ErrorKind::domain, "dimension out of 1..8: got " + std::to_string(d));
  if (trials < 1) fail(ErrorKind::domain, "trials must be >= 1");
  if (n_steps < 0) fail(ErrorKind::domain, "n_steps must be >= 0");
  if (!(horizon >= 0.0)) fail(ErrorKind::domain, "horizon must be >= 0");
  if (step_cap < 1) fail(ErrorKind::domain, "step cap must be >= 1");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SUBWALK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
    fail(ErrorKind::configuration, std::string("SUBWALK_THREADS must be a positive integer: got '") +
                                       env + "'");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

// Runs trial(i) for i < count on a pool and returns the results by index.
template <class Result, class Trial>
std::vector<Result> run_trials(std::size_t count, int threads, Trial&& trial) {
  std::vector<Result> out(count);
  const auto workers = static_cast<std::size_t>(std::min<long>(resolve_threads(threads),
                                                               static_cast<long>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = trial(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (std::size_t i; !failed && (i = next.fetch_add(1)) < count;) out[i] = trial(i);
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// Net displacement of `moves` fair +-1 steps.
std::int64_t fair_sum(std::size_t moves, Xoshiro256& rng) {
  std::int64_t ups = 0;
  std::size_t left = moves;
  while (left >= 64) {
    ups += std::popcount(rng());
    left -= 64;
  }
  if (left) ups += std::popcount(rng() >> (64 - left));
  return 2 * ups - static_cast<std::int64_t>(moves);
}

}  // namespace

void advance_srw(Site& x, int d, std::size_t moves, Xoshiro256& rng) {
  if (d == 1) {
    x[0] += fair_sum(moves, rng);
    return;
  }
  std::array<std::size_t, kMaxDim> per_axis{};
  if (std::has_single_bit(static_cast<unsigned>(d))) {
    const int bits = std::countr_zero(static_cast<unsigned>(d));
    const std::uint64_t mask = static_cast<std::uint64_t>(d) - 1;
    const int per_word = 64 / bits;
    std::size_t left = moves;
    while (left) {
      std::uint64_t w = rng();
      const auto take = std::min<std::size_t>(left, static_cast<std::size_t>(per_word));
      for (std::size_t k = 0; k < take; ++k) {
        ++per_axis[w & mask];
        w >>= bits;
      }
      left -= take;
    }
  } else {
    for (std::size_t k = 0; k < moves; ++k) ++per_axis[rng.below(static_cast<std::uint64_t>(d))];
  }
  for (int i = 0; i < d; ++i) x[i] += fair_sum(per_axis[i], rng);
}

std::vector<Site> simulate_walk(const SimulationConfig& cfg, IncrementSampler& sampler) {
  cfg.validate();
  std::vector<Site> path;
  path.reserve(static_cast<std::size_t>(cfg.n_steps) + 1);
  Site x{};
  path.push_back(x);
  for (long k = 0; k < cfg.n_steps; ++k) {
    advance_srw(x, cfg.d, sampler(), sampler.rng());
    path.push_back(x);
  }
  return path;
}

CtrwPath simulate_ctrw(const SimulationConfig& cfg, IncrementSampler& sampler) {
  cfg.validate();
  CtrwPath path;
  Site x{};
  path.times.push_back(0.0);
  path.points.push_back(x);
  double t = 0.0;
  for (;;) {
    t += sampler.rng().exponential();
    if (!(t <= cfg.horizon)) break;
    if (static_cast<long>(path.times.size()) > cfg.step_cap) {
      fail(ErrorKind::numeric, "ctrw path exceeds the step cap");
    }
    advance_srw(x, cfg.d, sampler(), sampler.rng());
    path.times.push_back(t);
    path.points.push_back(x);
  }
  return path;
}

MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate m;
  m.samples = xs.size();
  if (xs.empty()) fail(ErrorKind::domain, "mean of an empty sample");
  // Welford, in sample order.
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  m.mean = mean;
  if (xs.size() < 2) {
    m.lower = m.upper = mean;
    return m;
  }
  const double n = static_cast<double>(xs.size());
  m.std_error = std::sqrt(m2 / (n - 1.0) / n);
  const boost::math::students_t dist(n - 1.0);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  m.lower = mean - tq * m.std_error;
  m.upper = mean + tq * m.std_error;
  return m;
}

ProbabilityEstimate wilson_estimate(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) fail(ErrorKind::domain, "probability estimate needs trials >= 1");
  if (successes > trials) fail(ErrorKind::domain, "more successes than trials");
  ProbabilityEstimate e;
  e.successes = successes;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  e.p = p;
  e.std_error = std::sqrt(p * (1.0 - p) / n);
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  e.lower = std::max(0.0, centre - half);
  e.upper = std::min(1.0, centre + half);
  if (successes == 0) {
    e.one_sided = true;
    e.lower = 0.0;
  }
  return e;
}

namespace {

struct ExitSample {
  double value = 0.0;
  bool censored = false;
};

}  // namespace

ExitTimeReport estimate_exit_time(const SimulationConfig& cfg, const PhiSpec& spec,
                                  const IncrementSampler& sampler, double r, ExitClock clock) {
  cfg.validate();
  if (!(r >= 1.0)) fail(ErrorKind::domain, "exit radius must be >= 1: got " + format_double(r));
  const double r2 = r * r;
  const int d = cfg.d;
  auto samples = run_trials<ExitSample>(cfg.trials, cfg.threads, [&](std::size_t i) {
    IncrementSampler s = sampler.reseeded(cfg.trial_seed(i));
    Site x{};
    double elapsed = 0.0;
    for (long k = 1; k <= cfg.step_cap; ++k) {
      if (clock == ExitClock::continuous) elapsed += s.rng().exponential();
      advance_srw(x, d, s(), s.rng());
      if (norm2(x) >= r2) {
        return ExitSample{clock == ExitClock::discrete ? static_cast<double>(k) : elapsed, false};
      }
    }
    return ExitSample{clock == ExitClock::discrete ? static_cast<double>(cfg.step_cap) : elapsed,
                      true};
  });
  std::vector<double> values(samples.size());
  ExitTimeReport rep;
  rep.r = r;
  rep.clock = clock;
  rep.trials = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    values[i] = samples[i].value;
    if (samples[i].censored) ++rep.censored;
  }
  rep.tau = mean_estimate(values);
  rep.reference = 1.0 / spec(1.0 / r2);
  rep.ratio = rep.tau.mean / rep.reference;
  rep.valid = static_cast<double>(rep.censored) <= 0.01 * static_cast<double>(rep.trials);
  return rep;
}

HittingReport estimate_hitting(const SimulationConfig& cfg, const PhiSpec& spec,
                               const IncrementSampler& sampler, const Site& x, const Site& y, long n) {
  cfg.validate();
  if (n < 0) fail(ErrorKind::domain, "hitting horizon n must be >= 0");
  HittingReport rep;
  rep.start = x;
  rep.target = y;
  rep.n = n;
  Site diff{};
  for (int i = 0; i < cfg.d; ++i) diff[i] = x[i] - y[i];
  rep.distance = norm(diff);
  if (n == 0) {  // no steps: the walk has entered only if it starts at y
    rep.starts_inside = rep.distance == 0.0;
    rep.probability = wilson_estimate(rep.starts_inside ? cfg.trials : 0, cfg.trials);
    rep.ratio = rep.starts_inside ? std::numeric_limits<double>::infinity() : 0.0;
    return rep;
  }
  rep.r_n = 1.0 / std::sqrt(invert_phi(spec, 1.0 / static_cast<double>(n)));
  const double rn2 = rep.r_n * rep.r_n;
  if (rep.distance > 0.0) {
    rep.bound = static_cast<double>(n) * std::pow(rep.r_n, cfg.d) *
                std::pow(rep.distance, -cfg.d) * spec(1.0 / (rep.distance * rep.distance));
  }
  // Open ball; the relative slack keeps |x - y| = r_n outside despite rounding in r_n.
  if (norm2(diff) < rn2 * (1.0 - 1e-12)) {
    rep.starts_inside = true;
    rep.probability = wilson_estimate(cfg.trials, cfg.trials);
    rep.ratio = rep.bound > 0.0 ? 1.0 / rep.bound : std::numeric_limits<double>::infinity();
    return rep;
  }
  const int d = cfg.d;
  auto hits = run_trials<char>(cfg.trials, cfg.threads, [&](std::size_t i) -> char {
    IncrementSampler s = sampler.reseeded(cfg.trial_seed(i));
    Site z = diff;  // position relative to y
    for (long k = 0; k < n; ++k) {
      advance_srw(z, d, s(), s.rng());
      if (norm2(z) < rn2 * (1.0 - 1e-12)) return 1;
    }
    return 0;
  });
  std::size_t count = 0;
  for (char h : hits) count += static_cast<std::size_t>(h);
  rep.probability = wilson_estimate(count, cfg.trials);
  rep.ratio = rep.probability.p / rep.bound;
  return rep;
}

namespace {

long window_depth(const PhiSpec& spec, double r, double gamma) {
  return static_cast<long>(std::floor(gamma / spec(1.0 / (r * r))));
}

// First k <= depth with |S_k| >= r/2 per trial, or depth + 1 if none.
std::vector<long> first_passages(const SimulationConfig& cfg, const IncrementSampler& sampler,
                                 double r, long depth) {
  const double level2 = 0.25 * r * r;
  const int d = cfg.d;
  return run_trials<long>(cfg.trials, cfg.threads, [&](std::size_t i) -> long {
    IncrementSampler s = sampler.reseeded(cfg.trial_seed(i));
    Site x{};
    for (long k = 1; k <= depth; ++k) {
      advance_srw(x, d, s(), s.rng());
      if (norm2(x) >= level2) return k;
    }
    return depth + 1;
  });
}

}  // namespace

MaximalProbe maximal_inequality_probe(const SimulationConfig& cfg, const PhiSpec& spec,
                                      const IncrementSampler& sampler, double r, double gamma) {
  cfg.validate();
  if (!(r > 0.0)) fail(ErrorKind::domain, "probe radius must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    fail(ErrorKind::domain, "gamma out of (0,1): got " + format_double(gamma));
  }
  MaximalProbe probe;
  probe.r = r;
  probe.gamma = gamma;
  probe.depth = window_depth(spec, r, gamma);
  std::size_t count = 0;
  if (probe.depth >= 1) {
    for (long k : first_passages(cfg, sampler, r, probe.depth)) count += k <= probe.depth ? 1 : 0;
  }
  probe.probability = wilson_estimate(count, cfg.trials);
  return probe;
}

GammaCalibration calibrate_gamma(const SimulationConfig& cfg, const PhiSpec& spec,
                                 const IncrementSampler& sampler, std::span<const double> r_grid) {
  cfg.validate();
  if (r_grid.empty()) fail(ErrorKind::domain, "calibrate_gamma: empty radius grid");
  constexpr int kGrid = 64;
  std::vector<std::vector<long>> passages;
  for (double r : r_grid) {
    if (!(r > 0.0)) fail(ErrorKind::domain, "probe radius must be > 0");
    const long depth = window_depth(spec, r, static_cast<double>(kGrid - 1) / kGrid);
    passages.push_back(first_passages(cfg, sampler, r, depth));
  }
  double worst_r = r_grid.front();
  double worst_upper = -1.0;
  for (int k = kGrid - 1; k >= 1; --k) {
    const double gamma = static_cast<double>(k) / kGrid;
    GammaCalibration cal;
    cal.gamma = gamma;
    bool ok = true;
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      MaximalProbe probe;
      probe.r = r_grid[j];
      probe.gamma = gamma;
      probe.depth = window_depth(spec, r_grid[j], gamma);
      std::size_t count = 0;
      for (long first : passages[j]) count += first <= probe.depth ? 1 : 0;
      probe.probability = wilson_estimate(count, cfg.trials);
      if (probe.probability.upper > 0.25) {
        ok = false;
        if (k == 1 && probe.probability.upper > worst_upper) {
          worst_upper = probe.probability.upper;
          worst_r = r_grid[j];
        }
      }
      cal.probes.push_back(probe);
    }
    if (ok) return cal;
  }
  fail(ErrorKind::numeric, "calibrate_gamma: no gamma on the grid k/64 keeps the probe below 1/4; worst r = " +
                               format_double(worst_r) + " with upper limit " + format_double(worst_upper));
}

std::uint64_t EmpiricalPmf::count(const Site& x) const {
  std::size_t idx = 0;
  const std::int64_t side = 2 * radius + 1;
  for (int i = 0; i < d; ++i) {
    if (x[i] < -radius || x[i] > radius) return 0;
    idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(x[i] + radius);
  }
  return counts[idx];
}

EmpiricalPmf empirical_pmf(const SimulationConfig& cfg, const IncrementSampler& sampler, long n,
                           int radius) {
  cfg.validate();
  if (n < 0) fail(ErrorKind::domain, "step count must be >= 0");
  if (radius < 0) fail(ErrorKind::domain, "radius must be >= 0");
  EmpiricalPmf pmf;
  pmf.d = cfg.d;
  pmf.radius = radius;
  pmf.n = n;
  pmf.trials = cfg.trials;
  std::size_t cells = 1;
  for (int i = 0; i < cfg.d; ++i) cells *= static_cast<std::size_t>(2 * radius + 1);
  if (cells > (std::size_t{1} << 26)) fail(ErrorKind::domain, "pmf box too large");
  pmf.counts.assign(cells, 0);
  const int d = cfg.d;
  auto ends = run_trials<Site>(cfg.trials, cfg.threads, [&](std::size_t i) {
    IncrementSampler s = sampler.reseeded(cfg.trial_seed(i));
    Site x{};
    for (long k = 0; k < n; ++k) advance_srw(x, d, s(), s.rng());
    return x;
  });
  for (const Site& x : ends) {
    bool inside = true;
    for (int i = 0; i < d; ++i) inside = inside && x[i] >= -radius && x[i] <= radius;
    if (!inside) {
      ++pmf.outside;
      continue;
    }
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) {
      idx = idx * static_cast<std::size_t>(2 * radius + 1) + static_cast<std::size_t>(x[i] + radius);
    }
    ++pmf.counts[idx];
  }
  return pmf;
}

double gamma_arrival_cdf(int n, double t) {
  if (n < 1) fail(ErrorKind::domain, "gamma_arrival_cdf needs n >= 1");
  if (!(t >= 0.0)) fail(ErrorKind::domain, "gamma_arrival_cdf needs t >= 0");
  if (t == 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(n), t);
}

}  // namespace subwalk
