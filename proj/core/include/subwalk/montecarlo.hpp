#pragma once

// Monte Carlo simulation of S^phi and its Poissonized version Y_t = S^phi_{N_t}.
//
// Trial i always runs on the stream seeded by mix_seed(base_seed, i) and
// per-trial results are reduced in trial order, so reports do not depend on
// the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/rng.hpp"
#include "subwalk/subordination.hpp"

namespace subwalk {

inline constexpr long kDefaultStepCap = 10'000'000;

struct SimulationConfig {
  int d = 1;
  long n_steps = 0;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  double horizon = 0.0;  // CTRW time t
  long step_cap = kDefaultStepCap;
  int threads = 0;       // 0: SUBWALK_THREADS, else hardware concurrency

  std::uint64_t trial_seed(std::size_t i) const noexcept { return mix_seed(base_seed, i); }
  void validate() const;
};

/// Worker count: the request if positive, else SUBWALK_THREADS, else the
/// hardware concurrency.
int resolve_threads(int requested);

/// Adds `moves` nearest-neighbour steps of the simple random walk to x.
void advance_srw(Site& x, int d, std::size_t moves, Xoshiro256& rng);

/// S^phi_0 = 0, ..., S^phi_n with n = cfg.n_steps, drawn from the sampler's stream.
std::vector<Site> simulate_walk(const SimulationConfig& cfg, IncrementSampler& sampler);

struct CtrwPath {
  std::vector<double> times;  // event times T_0 = 0 < T_1 < ... <= t
  std::vector<Site> points;   // Y at and after each event
};

/// Y on [0, t], t = cfg.horizon, with exponential(1) holding times.
CtrwPath simulate_ctrw(const SimulationConfig& cfg, IncrementSampler& sampler);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double lower = 0.0;  // 95% t-interval
  double upper = 0.0;
  std::size_t samples = 0;
};

struct ProbabilityEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double p = 0.0;
  double std_error = 0.0;
  double lower = 0.0;  // 95% Wilson interval
  double upper = 0.0;
  bool one_sided = false;  // no successes: only the upper limit is informative
};

MeanEstimate mean_estimate(std::span<const double> xs);
ProbabilityEstimate wilson_estimate(std::size_t successes, std::size_t trials, double z = 1.96);

enum class ExitClock { discrete, continuous };

struct ExitTimeReport {
  double r = 0.0;
  ExitClock clock = ExitClock::discrete;
  MeanEstimate tau;
  double reference = 0.0;  // 1 / phi(r^-2)
  double ratio = 0.0;      // mean / reference
  std::size_t trials = 0;
  std::size_t censored = 0;
  bool valid = true;       // censored fraction <= 1%
};

/// Exit step count (or exit time of Y) from B(0, r). Censored trials are
/// counted at the cap.
ExitTimeReport estimate_exit_time(const SimulationConfig& cfg, const PhiSpec& spec,
                                  const IncrementSampler& sampler, double r,
                                  ExitClock clock = ExitClock::discrete);

struct HittingReport {
  Site start{};
  Site target{};
  long n = 0;
  double distance = 0.0;
  double r_n = 0.0;
  double bound = 0.0;  // n r_n^d j(|x - y|)
  ProbabilityEstimate probability;
  double ratio = 0.0;  // probability / bound
  bool starts_inside = false;
};

/// P^x(the walk enters B(y, r_n) within n steps). A start inside the ball
/// gives probability 1 without simulation.
HittingReport estimate_hitting(const SimulationConfig& cfg, const PhiSpec& spec,
                               const IncrementSampler& sampler, const Site& x, const Site& y, long n);

struct MaximalProbe {
  double r = 0.0;
  double gamma = 0.0;
  long depth = 0;  // floor(gamma / phi(r^-2))
  ProbabilityEstimate probability;
};

/// P(max_{k <= depth} |S_k| >= r/2).
MaximalProbe maximal_inequality_probe(const SimulationConfig& cfg, const PhiSpec& spec,
                                      const IncrementSampler& sampler, double r, double gamma);

struct GammaCalibration {
  double gamma = 0.0;
  std::vector<MaximalProbe> probes;  // at the chosen gamma, one per radius
};

/// Largest gamma = k/64 whose probe upper limit stays <= 1/4 for every r.
/// All candidates share the same trial streams, so the estimate is monotone
/// in gamma.
GammaCalibration calibrate_gamma(const SimulationConfig& cfg, const PhiSpec& spec,
                                 const IncrementSampler& sampler, std::span<const double> r_grid);

struct EmpiricalPmf {
  int d = 1;
  int radius = 0;
  long n = 0;
  std::size_t trials = 0;
  std::size_t outside = 0;            // samples beyond the box
  std::vector<std::uint64_t> counts;  // row-major over [-radius, radius]^d

  std::uint64_t count(const Site& x) const;
};

/// Distribution of S^phi_n over cfg.trials independent walks.
EmpiricalPmf empirical_pmf(const SimulationConfig& cfg, const IncrementSampler& sampler, long n,
                           int radius);

/// P(T_n <= t) for T_n a sum of n exponential(1) variables.
double gamma_arrival_cdf(int n, double t);

}  // namespace subwalk
