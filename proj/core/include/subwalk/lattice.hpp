#pragma once

// Exact transition kernels on Z^d.
//
// Kernels are held on a periodic cell (Z / N Z)^d of N points per axis and
// reported on the box [-L, L]^d with 2L < N. For the simple random walk with
// N > 2m the cell holds the Z^d kernel exactly; for subordinate walks the
// cell holds the periodization sum_k p(x + kN), whose deviation from the
// Z^d kernel is bounded by the mass that wraps around. Both the convolution
// and the spectral routes compute the same periodic object, so they agree
// to rounding.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/subordination.hpp"

namespace subwalk {

inline constexpr int kMaxDim = 8;       // Monte Carlo
inline constexpr int kMaxExactDim = 3;  // dense kernels

/// Lattice point; coordinates beyond the working dimension stay zero.
using Site = std::array<std::int64_t, kMaxDim>;

inline double norm2(const Site& x) noexcept {
  double s = 0.0;
  for (auto c : x) s += static_cast<double>(c) * static_cast<double>(c);
  return s;
}
inline double norm(const Site& x) noexcept { return std::sqrt(norm2(x)); }

Site make_site(std::initializer_list<std::int64_t> coords);
std::string to_string(const Site& x, int dim);

enum class KernelMethod { convolution, spectral, poissonized };

const char* to_string(KernelMethod method) noexcept;

class LatticeKernel {
 public:
  LatticeKernel(int dim, int period, int radius, KernelMethod method, double time,
                std::vector<double> cell, double mass_defect);

  int dim() const noexcept { return dim_; }
  int period() const noexcept { return period_; }
  int radius() const noexcept { return radius_; }
  KernelMethod method() const noexcept { return method_; }
  /// Step count n (discrete kernels) or time t (Poissonized).
  double time() const noexcept { return time_; }
  /// Mass not accounted for by the computation: unfolded weight tail,
  /// rounding and clipped negative values.
  double mass_defect() const noexcept { return mass_defect_; }

  double operator()(const Site& x) const noexcept { return cell_[index(x)]; }
  double at(std::int64_t x) const noexcept { return (*this)(make_site({x})); }

  std::span<const double> cell() const noexcept { return cell_; }
  std::size_t index(const Site& x) const noexcept;
  Site site_of(std::size_t index) const noexcept;

  double total_mass() const noexcept;
  double box_mass() const noexcept;
  /// Mass on the periodic cell outside the reporting box.
  double outside_mass() const noexcept { return total_mass() - box_mass(); }

  /// Visits the reporting box in lexicographic order of (x_1, ..., x_d).
  template <class F>
  void for_each_in_box(F&& f) const {
    Site x{};
    for (int i = 0; i < dim_; ++i) x[i] = -radius_;
    for (;;) {
      f(static_cast<const Site&>(x), (*this)(x));
      int i = dim_ - 1;
      while (i >= 0 && x[i] == radius_) {
        x[i] = -radius_;
        --i;
      }
      if (i < 0) return;
      ++x[i];
    }
  }

  LatticeKernel scaled(double factor) const;

 private:
  int dim_;
  int period_;
  int radius_;
  KernelMethod method_;
  double time_;
  std::vector<double> cell_;
  double mass_defect_;
};

inline constexpr double kDefectLimit = 1e-6;

/// p(m, 0, x) of the simple random walk by m-fold stencil convolution.
/// radius >= m; the cell has 2 radius + 1 points per axis.
LatticeKernel srw_kernel(int d, int m, int radius);

/// p^phi(1, 0, x) = sum_m a_m p(m, 0, x), assembled per Fourier mode from the
/// weights as sum_m a_m Psi(theta)^m. grid = 0 picks the smallest power of
/// two >= 4 radius. Refuses when the unfolded weight tail exceeds 1e-6.
LatticeKernel subordinate_step_kernel(int d, const SubordinationWeights& w, int radius,
                                      int grid = 0);

/// Cyclic convolution of two kernels on the same cell.
LatticeKernel convolve(const LatticeKernel& a, const LatticeKernel& b);

/// n-fold self-convolution by repeated squaring; n = 0 gives the identity.
LatticeKernel nstep_kernel_convolve(const LatticeKernel& step, int n);

/// p^phi(n, 0, x) = (2 pi)^-d int (1 - phi(1 - Psi))^n e^{-i theta x} on the
/// uniform grid of N points per axis (N a power of two, N >= 4 radius).
/// radius = 0 picks N / 4.
LatticeKernel nstep_kernel_spectral(const PhiSpec& spec, int d, int n, int grid, int radius = 0);

/// q(t, 0, x) of the Poissonized walk from its symbol exp(-t phi(1 - Psi)).
LatticeKernel ctrw_kernel(const PhiSpec& spec, int d, double t, int grid, int radius = 0);

/// q(t, 0, x) as e^-t sum_k t^k/k! p^phi(k, 0, x) over spectral kernels,
/// truncated where the Poisson tail drops below 1e-12.
LatticeKernel ctrw_kernel_poisson_sum(const PhiSpec& spec, int d, double t, int grid,
                                      int radius = 0);

/// p^phi(n, 0, 0) on Z^d (no periodization) by adaptive cubature of the
/// Fourier integral over [0, pi]^d.
double on_diagonal(const PhiSpec& spec, int d, int n);

/// Psi(theta) = (1/d) sum cos(theta_i) and 1 - Psi computed without
/// cancellation as (2/d) sum sin^2(theta_i / 2).
double srw_symbol_gap(std::span<const double> theta);

}  // namespace subwalk
