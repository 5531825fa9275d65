#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "subwalk/error.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/subordination.hpp"
#include "support.hpp"

using namespace subwalk;
using testing::Gen;

namespace {

double max_diff(const LatticeKernel& a, const LatticeKernel& b) {
  double worst = 0.0;
  a.for_each_in_box([&](const Site& x, double v) { worst = std::max(worst, std::abs(v - b(x))); });
  return worst;
}

// Renormalized leading weights with no tail.
SubordinationWeights truncated(const PhiSpec& phi, std::size_t M) {
  const SubordinationWeights w = weights_quadrature_terms(phi, M);
  std::vector<double> a(w.weights);
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  for (double& v : a) v /= total;
  return SubordinationWeights::from_values(a);
}

// Every image of x under the hyperoctahedral group has the same value.
void check_symmetry(const LatticeKernel& k) {
  const int d = k.dim();
  k.for_each_in_box([&](const Site& x, double v) {
    std::array<int, kMaxDim> perm{};
    std::iota(perm.begin(), perm.begin() + d, 0);
    do {
      for (int signs = 0; signs < (1 << d); ++signs) {
        Site y{};
        for (int i = 0; i < d; ++i) {
          const auto c = x[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
          y[static_cast<std::size_t>(i)] = (signs >> i & 1) ? -c : c;
        }
        REQUIRE(k(y) == v);
      }
    } while (std::next_permutation(perm.begin(), perm.begin() + d));
  });
}

}  // namespace

TEST_CASE("simple random walk kernels") {
  const LatticeKernel k1 = srw_kernel(1, 1, 2);
  CHECK(k1.at(-1) == 0.5);
  CHECK(k1.at(1) == 0.5);
  CHECK(k1.at(0) == 0.0);
  const LatticeKernel k2 = srw_kernel(1, 2, 2);
  CHECK(k2.at(-2) == doctest::Approx(0.25));
  CHECK(k2.at(0) == doctest::Approx(0.5));
  CHECK(k2.at(2) == doctest::Approx(0.25));
  CHECK(srw_kernel(2, 3, 4)(Site{}) == 0.0);
  for (int m = 1; m <= 12; ++m) {
    const LatticeKernel k = srw_kernel(1, m, 12);
    for (int x = -12; x <= 12; ++x) CHECK(k.at(x) == doctest::Approx(testing::srw1(m, x)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(srw_kernel(1, 5, 4), Error);
}

TEST_CASE("step kernel with degenerate weights is the SRW") {
  const LatticeKernel step = subordinate_step_kernel(2, SubordinationWeights::from_values({1.0}), 4);
  const LatticeKernel srw = srw_kernel(2, 1, 4);
  step.for_each_in_box([&](const Site& x, double v) { CHECK(v == doctest::Approx(srw(x)).epsilon(1e-14)); });
  CHECK(step.mass_defect() < 1e-13);
}

TEST_CASE("step kernel at the origin against direct summation") {
  const SubordinationWeights w = truncated(PhiSpec::stable(0.5), 4096);
  const int N = 256;
  const LatticeKernel step = subordinate_step_kernel(1, w, 64, N);
  // Torus: P(S_m = 0 mod N) = sum_k P(S_m = k N).
  long double acc = 0.0L;
  for (std::size_t m = 1; m <= w.terms(); ++m) {
    long double torus = 0.0L;
    for (long k = -static_cast<long>(m) / N - 1; k <= static_cast<long>(m) / N + 1; ++k) {
      torus += testing::srw1(static_cast<int>(m), static_cast<int>(k * N));
    }
    acc += w[m] * torus;
  }
  CHECK(step.at(0) > 0.0);
  CHECK(step.at(0) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-12));
}

TEST_CASE("step kernel one-step band") {
  const LatticeKernel step =
      subordinate_step_kernel(1, weights_quadrature_terms(PhiSpec::stable(0.5), 1 << 16), 64, 256);
  double lo = 1e300, hi = 0.0;
  for (int x = 1; x <= 50; ++x) {
    const double r = step.at(x) / (std::pow(x, -1.0) * PhiSpec::stable(0.5)(1.0 / (x * x)));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 10.0);
}

TEST_CASE("step kernel refuses a large unfolded tail") {
  CHECK_THROWS_WITH_AS(subordinate_step_kernel(1, weights_quadrature_terms(PhiSpec::stable(0.5), 64), 128, 512),
                       doctest::Contains("1e-6"), Error);
}

TEST_CASE("spectral kernel against a direct transform") {
  for (const PhiSpec& phi : {PhiSpec::stable(0.5), PhiSpec::stable_mixture(0.3, 0.7), PhiSpec::log_cosh(0.6)}) {
    for (int n : {1, 3, 16}) {
      const int N = 128;
      const auto direct =
          testing::direct_inverse_1d(N, [&](double th) { return std::pow(1.0 - phi(1.0 - std::cos(th)), n); });
      const LatticeKernel k = nstep_kernel_spectral(phi, 1, n, N);
      for (int x = -N / 4; x <= N / 4; ++x) {
        CHECK(std::abs(k.at(x) - direct[static_cast<std::size_t>((x + N) % N)]) <= 1e-14);
      }
    }
  }
}

TEST_CASE("spectral kernel with n = 0 is a point mass") {
  const LatticeKernel k = nstep_kernel_spectral(PhiSpec::stable(0.5), 2, 0, 32);
  k.for_each_in_box([](const Site& x, double v) { CHECK(v == doctest::Approx(norm2(x) == 0 ? 1.0 : 0.0)); });
}

TEST_CASE("nstep by convolution") {
  const LatticeKernel step =
      subordinate_step_kernel(1, weights_quadrature_terms(PhiSpec::stable(0.5), 1 << 16), 32, 128);
  const LatticeKernel one = nstep_kernel_convolve(step, 1);
  step.for_each_in_box([&](const Site& x, double v) { CHECK(one(x) == v); });
  const LatticeKernel zero = nstep_kernel_convolve(step, 0);
  CHECK(zero(Site{}) == 1.0);
  for (int n : {2, 4, 8, 16, 32}) {
    CHECK(max_diff(nstep_kernel_convolve(step, n), nstep_kernel_spectral(PhiSpec::stable(0.5), 1, n, 128, 32)) <= 1e-10);
  }
}

TEST_CASE("convolve rejects mismatched cells") {
  CHECK_THROWS_AS(convolve(nstep_kernel_spectral(PhiSpec::stable(0.5), 1, 1, 64),
                           nstep_kernel_spectral(PhiSpec::stable(0.5), 1, 1, 128)),
                  Error);
}

TEST_CASE("Poissonized kernel") {
  const PhiSpec phi = PhiSpec::stable(0.5);
  const LatticeKernel q = ctrw_kernel(phi, 1, 4.0, 512);
  const LatticeKernel oracle = ctrw_kernel_poisson_sum(phi, 1, 4.0, 512);
  CHECK(std::abs(q.at(0) - oracle.at(0)) <= 1e-10);
  CHECK(max_diff(q, oracle) <= 1e-10);
  const auto direct =
      testing::direct_inverse_1d(128, [&](double th) { return std::exp(-4.0 * phi(1.0 - std::cos(th))); });
  const LatticeKernel small = ctrw_kernel(phi, 1, 4.0, 128);
  for (int x = -32; x <= 32; ++x) CHECK(std::abs(small.at(x) - direct[static_cast<std::size_t>((x + 128) % 128)]) <= 1e-14);

  const double t = 1e-12;
  CHECK(ctrw_kernel(phi, 2, t, 32)(Site{}) == doctest::Approx(1.0 - t).epsilon(1e-13));

  double lo = 1e300, hi = 0.0;
  for (double s = 1.0; s <= 1024.0; s *= 2.0) {
    const double r = ctrw_kernel(phi, 1, s, 8192).at(0) / std::sqrt(invert_phi(phi, 1.0 / s));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(std::isfinite(hi));
  CHECK(hi / lo < 10.0);
}

TEST_CASE("on-diagonal cubature against a wide periodic cell") {
  for (const PhiSpec& phi : {PhiSpec::stable(0.5), PhiSpec::stable_mixture(0.3, 0.7)}) {
    for (int n : {4, 16, 64}) {
      CHECK(on_diagonal(phi, 1, n) == doctest::Approx(nstep_kernel_spectral(phi, 1, n, 1 << 16).at(0)).epsilon(1e-4));
    }
    CHECK(on_diagonal(phi, 2, 8) == doctest::Approx(nstep_kernel_spectral(phi, 2, 8, 512)(Site{})).epsilon(1e-3));
  }
}

TEST_CASE("symbol gap") {
  const std::vector<double> th{0.3, 1.1, 2.9};
  double mean = 0.0;
  for (double t : th) mean += std::cos(t) / 3.0;
  CHECK(srw_symbol_gap(th) == doctest::Approx(1.0 - mean).epsilon(1e-14));
  const std::vector<double> tiny{1e-9};
  CHECK(srw_symbol_gap(tiny) == doctest::Approx(0.5e-18).epsilon(1e-12));
}

TEST_CASE("property: symmetry, nonnegativity and conservation") {
  Gen g(301);
  for (int i = 0; i < 24; ++i) {
    const PhiSpec phi = g.phi();
    const int d = g.integer(1, 3);
    const int grid = d == 3 ? 16 : (d == 2 ? 32 : 128);
    const int n = g.integer(0, 40);
    CAPTURE(phi.label());
    CAPTURE(d);
    CAPTURE(n);
    const LatticeKernel k = g.integer(0, 1) ? nstep_kernel_spectral(phi, d, n, grid)
                                            : ctrw_kernel(phi, d, g.uniform(0.1, 40.0), grid);
    check_symmetry(k);
    for (double v : k.cell()) REQUIRE(v >= 0.0);
    CHECK(std::abs(k.total_mass() + k.mass_defect() - 1.0) <= 1e-10);
    CHECK(k.box_mass() <= k.total_mass() + 1e-15);
  }
}

TEST_CASE("property: semigroup") {
  Gen g(302);
  for (int i = 0; i < 16; ++i) {
    const PhiSpec phi = g.phi();
    const int d = g.integer(1, 2);
    const int grid = d == 1 ? 256 : 32;
    const int a = g.integer(0, 20), b = g.integer(0, 20);
    CAPTURE(phi.label());
    const LatticeKernel lhs = nstep_kernel_spectral(phi, d, a + b, grid);
    const LatticeKernel rhs = convolve(nstep_kernel_spectral(phi, d, a, grid), nstep_kernel_spectral(phi, d, b, grid));
    CHECK(max_diff(lhs, rhs) <= 1e-10 + lhs.mass_defect() + rhs.mass_defect());
    const double s = g.uniform(0.1, 5.0), t = g.uniform(0.1, 5.0);
    const LatticeKernel qs = convolve(ctrw_kernel(phi, d, s, grid), ctrw_kernel(phi, d, t, grid));
    CHECK(max_diff(ctrw_kernel(phi, d, s + t, grid), qs) <= 1e-10);
  }
}

TEST_CASE("property: diagonal upper bound with one constant") {
  Gen g(303);
  for (int i = 0; i < 6; ++i) {
    const PhiSpec phi = g.levy_phi();
    CAPTURE(phi.label());
    double worst = 0.0, best = 1e300;
    int used = 0;
    for (int n = 1; n <= 128; n *= 2) {
      const double scale = std::sqrt(invert_phi(phi, 1.0 / n));
      if (1.0 / scale > 1024.0 / 16.0) break;  // spread comparable to the cell
      const LatticeKernel k = nstep_kernel_spectral(phi, 1, n, 1024);
      double sup = 0.0;
      k.for_each_in_box([&](const Site&, double v) { sup = std::max(sup, v); });
      ++used;
      worst = std::max(worst, sup / scale);
      best = std::min(best, sup / scale);
    }
    CHECK(used >= 1);
    CHECK(worst / best < 10.0);
  }
}
