#pragma once

// Bound functions of the two-sided estimate, ratio sweeps against exact
// kernels, the Pruitt function and the empirical parabolic Harnack ratio.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"

namespace subwalk {

class EstimateEnvelope {
 public:
  EstimateEnvelope(PhiSpec spec, int d);

  const PhiSpec& spec() const noexcept { return spec_; }
  int dim() const noexcept { return d_; }

  /// r^-d phi(r^-2), r > 0.
  double j(double r) const;
  /// (phi^-1(1/n))^{d/2}, n >= 1.
  double diagonal(long n) const;
  /// min{diagonal(n), n j(|x|)}; the diagonal branch alone at x = 0.
  double operator()(long n, const Site& x) const;
  double at_radius(long n, double r) const;
  /// r_n = (phi^-1(1/n))^{-1/2}.
  double r_n(long n) const;
  /// Radius where diagonal(n) = n j(r).
  double crossover_radius(long n) const;

 private:
  PhiSpec spec_;
  int d_;
};

double j_profile(const EstimateEnvelope& env, double r);
double envelope(const EstimateEnvelope& env, long n, const Site& x);

struct GridPoint {
  long n = 0;        // step index, or k for Harnack cylinders
  Site x{};
  double value = 0.0;      // kernel value (or q value)
  double reference = 0.0;  // envelope value (or the opposing extremum)
};

struct RatioReport {
  std::string kind;   // "two_sided", "tail_sum", "harnack", ...
  std::string phi;
  int dim = 0;
  std::string grid;   // human-readable grid description
  double ratio_inf = 0.0;
  double ratio_sup = 0.0;
  GridPoint argmin;
  GridPoint argmax;
  std::size_t points = 0;    // grid points used
  std::size_t filtered = 0;  // grid points dropped by the defect filter
  std::string method;
  std::vector<std::uint64_t> seeds;
  bool degenerate = false;

  double band() const { return ratio_sup / ratio_inf; }
};

/// h(x) = P(|S_1| > x) + x^-2 sum_{|y| <= x} |y|^2 p(y). Refuses x >= radius.
double pruitt_h(const LatticeKernel& step, double x);

/// sum_{|y| >= r} j(|y|) / phi(r^-2) for each r of the grid; lattice sum
/// inside |y| <= cutoff plus a radial integral beyond. inf/sup over r.
RatioReport tail_sum_check(const EstimateEnvelope& env, std::span<const double> r_grid);

/// sum_{|y| >= r} j(|y|) over Z^d.
double tail_sum(const EstimateEnvelope& env, double r);

/// inf/sup of p(n, 0, x) / envelope(n, x) over every kernel's reporting box,
/// skipping points with p <= 10 mass_defect. Ties go to the first point in
/// scan order (kernels in order, then lexicographic x).
RatioReport verify_two_sided(std::span<const LatticeKernel> kernels, const EstimateEnvelope& env);

struct HarnackWindow {
  double gamma = 0.5;
  double B = 3.0;
  long b = 3;
  double R = 0.0;
  Site z{};

  /// B and b from the scaling profile of spec.
  static HarnackWindow from_profile(const PhiSpec& spec, double gamma, double R, const Site& z,
                                    int levels = 20);

  double inner_radius() const noexcept { return R / B; }
  /// floor(gamma / phi(R^-2)), first time index of the upper cylinder.
  long start(const PhiSpec& spec) const;
  /// floor(gamma / phi((R/B)^-2)), time depth of the upper cylinder.
  long depth(const PhiSpec& spec) const;
  /// floor(gamma / phi((sqrt(b) R)^-2)), the parabolicity horizon.
  long horizon(const PhiSpec& spec) const;
};

/// Candidate parabolic function q(k, y).
using HarnackFunction = std::function<double(long k, const Site& y)>;

/// q(k, y) = p(n0 - k, y, x0) from spectral kernels on a d-dimensional grid,
/// computed lazily per step count.
HarnackFunction kernel_harnack_function(const PhiSpec& spec, int d, long n0, const Site& x0,
                                        int grid);

/// max of q over Q(start, z, R/B) divided by min of q(0, .) over B(z, R/B).
/// Scan order is lexicographic in (k, y); the first extremum wins.
RatioReport harnack_ratio(const PhiSpec& spec, int d, long n0, const Site& x0,
                          const HarnackWindow& window, const HarnackFunction& q);

/// Lattice points of B(z, r) = {|y - z| < r} in lexicographic order.
std::vector<Site> ball_points(const Site& z, double r, int d);

}  // namespace subwalk
