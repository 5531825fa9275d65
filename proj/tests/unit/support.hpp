#pragma once

// Hand-rolled generators and independent oracles shared by the unit tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "subwalk/bernstein.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  /// Random catalog entry with parameters away from the endpoints.
  subwalk::PhiSpec phi() {
    switch (integer(0, 3)) {
      case 0: return subwalk::PhiSpec::stable(uniform(0.1, 0.9));
      case 1: return subwalk::PhiSpec::stable_mixture(uniform(0.1, 0.9), uniform(0.1, 0.9));
      case 2: {
        const double a = uniform(0.1, 0.8);
        return subwalk::PhiSpec::stable_log(a, uniform(0.05, 0.95) * (1.0 - a));
      }
      default: return subwalk::PhiSpec::log_cosh(uniform(0.1, 0.9));
    }
  }

  /// Catalog entries with a Levy density (quadrature-friendly).
  subwalk::PhiSpec levy_phi() {
    if (integer(0, 1) == 0) return subwalk::PhiSpec::stable(uniform(0.1, 0.9));
    return subwalk::PhiSpec::stable_mixture(uniform(0.1, 0.9), uniform(0.1, 0.9));
  }

 private:
  std::mt19937_64 rng_;
};

/// Number of random cases per property.
inline constexpr int kCases = 40;

/// alpha / Gamma(1 - alpha) t^{-1-alpha}, the stable Levy density.
inline double stable_levy_density(double alpha, double t) {
  return alpha / std::tgamma(1.0 - alpha) * std::pow(t, -1.0 - alpha);
}

/// Taylor coefficients of 1 - (1 - s)^alpha by the binomial recursion.
inline std::vector<double> stable_binomial_weights(double alpha, int M) {
  std::vector<double> a(static_cast<std::size_t>(M) + 1, 0.0);
  double c = 1.0;  // (-1)^m binom(alpha, m)
  for (int m = 1; m <= M; ++m) {
    c *= (m - 1 - alpha) / m;
    a[static_cast<std::size_t>(m)] = -c;
  }
  return a;
}

/// P(S_m = x) for the one-dimensional simple random walk.
inline double srw1(int m, int x) {
  if ((m + x) % 2 != 0 || std::abs(x) > m) return 0.0;
  const int k = (m + x) / 2;
  return std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) -
                  m * std::log(2.0));
}

/// One-dimensional periodic kernel from a symbol by a direct O(N^2) sum.
template <class Symbol>
std::vector<double> direct_inverse_1d(int N, Symbol symbol) {
  std::vector<double> s(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) s[static_cast<std::size_t>(k)] = symbol(2.0 * std::numbers::pi * k / N);
  std::vector<double> out(static_cast<std::size_t>(N));
  for (int x = 0; x < N; ++x) {
    long double acc = 0.0L;
    for (int k = 0; k < N; ++k) {
      acc += static_cast<long double>(s[static_cast<std::size_t>(k)]) *
             std::cos(2.0L * std::numbers::pi_v<long double> * k * x / N);
    }
    out[static_cast<std::size_t>(x)] = static_cast<double>(acc / N);
  }
  return out;
}

/// Mean exit time of the one-dimensional SRW from {|y| < r} started at 0,
/// by solving the tridiagonal system E(y) = 1 + (E(y-1) + E(y+1)) / 2.
inline double srw_exit_time_dp(int r) {
  const int n = 2 * r - 1;  // interior points -r+1..r-1
  std::vector<double> c(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  // rows: -E(y-1)/2 + E(y) - E(y+1)/2 = 1 (Thomas algorithm)
  for (int i = 0; i < n; ++i) {
    const double a = (i == 0) ? 0.0 : -0.5;
    const double denom = 1.0 - a * (i == 0 ? 0.0 : c[static_cast<std::size_t>(i - 1)]);
    c[static_cast<std::size_t>(i)] = -0.5 / denom;
    d[static_cast<std::size_t>(i)] = (1.0 - a * (i == 0 ? 0.0 : d[static_cast<std::size_t>(i - 1)])) / denom;
  }
  std::vector<double> e(static_cast<std::size_t>(n));
  e[static_cast<std::size_t>(n - 1)] = d[static_cast<std::size_t>(n - 1)];
  for (int i = n - 2; i >= 0; --i) {
    e[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(i + 1)];
  }
  return e[static_cast<std::size_t>(r - 1)];
}

/// P(max_{k <= steps} |S_k| >= a) for the one-dimensional SRW, exact DP.
inline double srw_max_dp(long steps, double a) {
  const int barrier = static_cast<int>(std::ceil(a));
  if (barrier <= 0) return 1.0;
  std::vector<double> p(static_cast<std::size_t>(2 * barrier + 1), 0.0), q(p.size());
  p[static_cast<std::size_t>(barrier)] = 1.0;  // index = y + barrier
  double absorbed = 0.0;
  for (long k = 0; k < steps; ++k) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int y = -barrier + 1; y <= barrier - 1; ++y) {
      const double m = p[static_cast<std::size_t>(y + barrier)];
      if (m == 0.0) continue;
      for (int s : {-1, 1}) {
        const int z = y + s;
        if (std::abs(z) >= barrier) {
          absorbed += 0.5 * m;
        } else {
          q[static_cast<std::size_t>(z + barrier)] += 0.5 * m;
        }
      }
    }
    p.swap(q);
  }
  return absorbed;
}

}  // namespace testing
