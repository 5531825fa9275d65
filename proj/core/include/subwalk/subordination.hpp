#pragma once

// Step-distribution weights a_m = P(R = m) of the subordinating increments,
// computed along two independent routes, and an alias-table sampler for R.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/rng.hpp"

namespace subwalk {

enum class WeightMethod { quadrature, series, explicit_values };

const char* to_string(WeightMethod method) noexcept;

inline constexpr std::size_t kDefaultMaxTerms = std::size_t{1} << 16;
inline constexpr std::size_t kMaxSeriesTerms = std::size_t{1} << 16;

struct SubordinationWeights {
  std::vector<double> weights;  // weights[m - 1] = a_m, m = 1..M
  double tail_mass = 0.0;       // sum_{m > M} a_m
  WeightMethod method = WeightMethod::explicit_values;
  double tolerance = 0.0;       // requested tail tolerance (quadrature)
  bool tail_target_met = true;  // tail_mass <= tolerance
  double max_error = 0.0;       // error estimate per entry

  std::size_t terms() const noexcept { return weights.size(); }
  /// a_m for m >= 1; zero beyond M.
  double operator[](std::size_t m) const noexcept {
    return (m >= 1 && m <= weights.size()) ? weights[m - 1] : 0.0;
  }
  double partial_sum() const noexcept;

  /// Weights given directly (e.g. a_1 = 1). Checks nonnegativity and total mass.
  static SubordinationWeights from_values(std::vector<double> a, double tail_mass = 0.0);
};

/// Throws a validation error if an entry is negative or the mass is not 1.
void validate(const SubordinationWeights& w);

/// Quadrature route. M is the smallest power of two with tail <= tol, capped
/// at max_terms; the tail is computed by its own quadrature, not by
/// subtraction. Uses the Levy density (stable, stable_mixture) or the
/// Stieltjes density (stable_log).
SubordinationWeights weights_quadrature(const PhiSpec& spec, double tol,
                                        std::size_t max_terms = kDefaultMaxTerms);

/// Quadrature route with a fixed number of terms.
SubordinationWeights weights_quadrature_terms(const PhiSpec& spec, std::size_t terms);

enum class QuadratureRoute { automatic, levy, stieltjes };

/// Single weight a_m by quadrature along the chosen representation.
double weight_by_quadrature(const PhiSpec& spec, std::size_t m,
                            QuadratureRoute route = QuadratureRoute::automatic);

/// sum_{m > M} a_m by quadrature.
double tail_by_quadrature(const PhiSpec& spec, std::size_t M,
                          QuadratureRoute route = QuadratureRoute::automatic);

/// Generating-function route: a_m are the Taylor coefficients of
/// s -> 1 - phi(1 - s) at 0.
SubordinationWeights weights_series(const PhiSpec& spec, std::size_t M);

/// a_m = alpha Gamma(m - alpha) / (Gamma(1 - alpha) m!) for stable(alpha),
/// via log-gamma.
double stable_weight_closed_form(double alpha, std::size_t m);

class AliasTable;

class IncrementSampler {
 public:
  IncrementSampler(std::shared_ptr<const AliasTable> table, std::uint64_t seed);

  /// Draws R in {1, ..., M}.
  std::size_t operator()() noexcept;

  IncrementSampler reseeded(std::uint64_t seed) const;
  /// (1 - tail_mass)^-1 applied to the truncated weights.
  double renormalization() const noexcept;
  std::size_t max_increment() const noexcept;
  Xoshiro256& rng() noexcept { return rng_; }

 private:
  std::shared_ptr<const AliasTable> table_;
  Xoshiro256 rng_;
};

/// Refuses weights with tail_mass >= 0.01.
IncrementSampler build_sampler(const SubordinationWeights& w, std::uint64_t seed);

}  // namespace subwalk
