#include <doctest.h>

#include <cmath>
#include <vector>

#include "subwalk/error.hpp"
#include "subwalk/estimates.hpp"
#include "subwalk/subordination.hpp"
#include "support.hpp"

using namespace subwalk;
using testing::Gen;

TEST_CASE("j profile and envelope examples") {
  const EstimateEnvelope env(PhiSpec::stable(0.5), 1);
  CHECK(j_profile(env, 1.0) == doctest::Approx(1.0));
  CHECK(j_profile(env, 10.0) == doctest::Approx(0.01));
  CHECK(j_profile(env, 2.0) < j_profile(env, 1.0));
  CHECK(envelope(env, 4, make_site({10})) == doctest::Approx(0.04));
  CHECK(envelope(env, 4, make_site({0})) == doctest::Approx(0.25));
  CHECK(env.r_n(16) == doctest::Approx(16.0));
  CHECK(env.crossover_radius(16) == doctest::Approx(env.r_n(16)).epsilon(1e-9));
  CHECK(envelope(env, 16, make_site({2})) == doctest::Approx(env.diagonal(16)));
}

TEST_CASE("envelope in two dimensions") {
  const EstimateEnvelope env(PhiSpec::stable(0.5), 2);
  // j(r) = r^-2 r^-1, diagonal (1/n^2)^{1}
  CHECK(env.j(4.0) == doctest::Approx(1.0 / 64.0));
  CHECK(env.diagonal(4) == doctest::Approx(1.0 / 16.0));
  CHECK(env(4, make_site({3, 4})) == doctest::Approx(std::min(1.0 / 16.0, 4.0 / 125.0)));
}

TEST_CASE("Pruitt function") {
  const SubordinationWeights w = weights_quadrature_terms(PhiSpec::stable(0.5), 1 << 18);
  const LatticeKernel step = subordinate_step_kernel(1, w, 128, 512);
  CHECK(pruitt_h(step, 0.5) == doctest::Approx(1.0 - step.at(0)).epsilon(1e-12));
  double lo = 1e300, hi = 0.0;
  for (int x = 1; x <= 64; x *= 2) {
    const double r = pruitt_h(step, x) / PhiSpec::stable(0.5)(1.0 / (x * x));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(std::isfinite(hi));
  CHECK(hi / lo < 10.0);
  CHECK_THROWS_AS(pruitt_h(step, 128.0), Error);
  CHECK_THROWS_AS(pruitt_h(step, 0.0), Error);

  const LatticeKernel point = nstep_kernel_spectral(PhiSpec::stable(0.5), 1, 0, 64);
  for (double x : {1.0, 2.0, 7.5}) CHECK(pruitt_h(point, x) == 0.0);
}

TEST_CASE("tail sum against direct summation") {
  // stable(0.5), d = 1: sum_{|y| >= r} |y|^-2.
  const EstimateEnvelope env(PhiSpec::stable(0.5), 1);
  for (int r : {1, 3, 10, 64}) {
    long double acc = 0.0L;
    const long Y = 20000000;
    for (long y = Y; y >= r; --y) acc += 2.0L / (static_cast<long double>(y) * y);
    acc += 2.0L / (Y + 0.5L);
    CHECK(tail_sum(env, r) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-9));
  }
  CHECK(tail_sum(env, 0.3) == tail_sum(env, 1.0));
  CHECK(tail_sum(env, 2.0) <= 0.5 * tail_sum(env, 1.0) + 1e-15);

  const std::vector<double> grid{1, 2, 3, 4, 5, 6, 7, 8};
  const RatioReport rep = tail_sum_check(env, grid);
  CHECK(rep.kind == "tail_sum");
  CHECK(std::isfinite(rep.ratio_sup));
  CHECK(rep.ratio_sup >= rep.ratio_inf);
}

TEST_CASE("tail sum in two dimensions by brute force") {
  const EstimateEnvelope env(PhiSpec::stable(0.5), 2);
  for (int r : {1, 5}) {
    long double acc = 0.0L;
    const long Y = 3000;
    for (long a = -Y; a <= Y; ++a) {
      for (long b = -Y; b <= Y; ++b) {
        const double q = static_cast<double>(a * a + b * b);
        if (q >= static_cast<double>(r) * r && q <= static_cast<double>(Y) * Y) acc += std::pow(q, -1.5);
      }
    }
    acc += 2.0L * std::numbers::pi_v<long double> / Y;  // int_Y^inf 2 pi s s^-3 ds
    CHECK(tail_sum(env, r) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-5));
  }
}

TEST_CASE("two-sided sweep") {
  const PhiSpec phi = PhiSpec::stable(0.5);
  const EstimateEnvelope env(phi, 1);
  std::vector<LatticeKernel> kernels;
  for (int n = 1; n <= 16; ++n) kernels.push_back(nstep_kernel_spectral(phi, 1, n, 256, 64));
  const RatioReport rep = verify_two_sided(kernels, env);
  CHECK(rep.ratio_inf > 0.0);
  CHECK(rep.ratio_inf <= rep.ratio_sup);
  CHECK(std::isfinite(rep.ratio_sup));
  CHECK(rep.points == 16u * 129u);

  // The extremes are attained where reported.
  const LatticeKernel& kmin = kernels[static_cast<std::size_t>(rep.argmin.n - 1)];
  CHECK(kmin(rep.argmin.x) == rep.argmin.value);
  CHECK(rep.argmin.value / env(rep.argmin.n, rep.argmin.x) == rep.ratio_inf);
  const RatioReport again = verify_two_sided(kernels, env);
  CHECK(again.ratio_inf == rep.ratio_inf);
  CHECK(again.ratio_sup == rep.ratio_sup);

  std::vector<LatticeKernel> doubled;
  for (const auto& k : kernels) doubled.push_back(k.scaled(2.0));
  const RatioReport twice = verify_two_sided(doubled, env);
  CHECK(twice.ratio_inf == 2.0 * rep.ratio_inf);
  CHECK(twice.ratio_sup == 2.0 * rep.ratio_sup);

  const std::vector<LatticeKernel> first(kernels.begin(), kernels.begin() + 1);
  CHECK(verify_two_sided(first, env).band() <= 10.0);
}

TEST_CASE("defect filter drops noise-level points") {
  const PhiSpec phi = PhiSpec::stable(0.5);
  const LatticeKernel k = nstep_kernel_spectral(phi, 1, 1, 1024, 256);
  std::vector<double> cell(k.cell().begin(), k.cell().end());
  const LatticeKernel noisy(1, k.period(), k.radius(), KernelMethod::spectral, 1.0, cell, 1e-6);
  std::size_t below = 0;
  noisy.for_each_in_box([&](const Site&, double v) { below += v <= 1e-5 ? 1 : 0; });
  REQUIRE(below > 0u);
  const RatioReport rep = verify_two_sided(std::vector<LatticeKernel>{noisy}, EstimateEnvelope(phi, 1));
  CHECK(rep.filtered == below);
  CHECK(rep.points + rep.filtered == 513u);
  const LatticeKernel hopeless(1, k.period(), k.radius(), KernelMethod::spectral, 1.0, cell, 1e-3);
  CHECK_THROWS_AS(verify_two_sided(std::vector<LatticeKernel>{hopeless}, EstimateEnvelope(phi, 1)), Error);
}

TEST_CASE("Harnack window and ratio") {
  const PhiSpec phi = PhiSpec::stable(0.5);
  const HarnackWindow w = HarnackWindow::from_profile(phi, 0.5, 64.0, Site{});
  CHECK(w.B == doctest::Approx(3.0));
  CHECK(w.b == 10);
  CHECK(w.start(phi) == 32);
  CHECK(w.depth(phi) == static_cast<long>(std::floor(0.5 * 64.0 / 3.0)));
  CHECK(w.horizon(phi) == static_cast<long>(std::floor(0.5 * std::sqrt(static_cast<double>(w.b)) * 64.0)));

  const long n0 = w.horizon(phi) + 1;
  const RatioReport flat = harnack_ratio(phi, 1, n0, Site{}, w, [](long, const Site&) { return 3.0; });
  CHECK(flat.ratio_sup == 1.0);

  const RatioReport base = harnack_ratio(phi, 1, n0, Site{}, w, kernel_harnack_function(phi, 1, n0, Site{}, 4096));
  CHECK(std::isfinite(base.ratio_sup));
  CHECK(base.ratio_sup >= 1.0);

  for (long shift : {17L, 34L, -5L}) {
    HarnackWindow moved = w;
    moved.z = make_site({shift});
    const Site x0 = make_site({shift});
    const RatioReport r = harnack_ratio(phi, 1, n0, x0, moved, kernel_harnack_function(phi, 1, n0, x0, 4096));
    CHECK(r.ratio_sup == base.ratio_sup);
  }

  // Ties resolve to the first point in (k, y) order.
  const RatioReport tie = harnack_ratio(phi, 1, n0, Site{}, w, [](long, const Site&) { return 1.0; });
  CHECK(tie.argmax.n == w.start(phi));
}

TEST_CASE("ball points") {
  const auto b = ball_points(make_site({5}), 3.0, 1);
  REQUIRE(b.size() == 5u);
  CHECK(b.front()[0] == 3);
  CHECK(b.back()[0] == 7);
  CHECK(ball_points(Site{}, 2.0, 2).size() == 9u);  // |y| < 2: 1 + 4 + 4
  CHECK(ball_points(Site{}, 0.5, 3).size() == 1u);
}

TEST_CASE("property: envelope branch changes at the crossover radius") {
  Gen g(401);
  for (int i = 0; i < testing::kCases; ++i) {
    const PhiSpec phi = g.phi();
    const int d = g.integer(1, 3);
    const long n = g.integer(1, 5000);
    CAPTURE(phi.label());
    const EstimateEnvelope env(phi, d);
    const double r = env.crossover_radius(n);
    CHECK(std::isfinite(r));
    CHECK(env.diagonal(n) == doctest::Approx(n * env.j(r)).epsilon(1e-8));
    for (double f : {0.1, 0.5, 0.9}) CHECK(env.diagonal(n) < n * env.j(f * r));
    for (double f : {1.1, 2.0, 10.0}) CHECK(env.diagonal(n) > n * env.j(f * r));
  }
}

TEST_CASE("property: tail sums decrease in r") {
  Gen g(402);
  for (int i = 0; i < 10; ++i) {
    const PhiSpec phi = g.phi();
    const int d = g.integer(1, 2);
    const EstimateEnvelope env(phi, d);
    double prev = tail_sum(env, 1.0);
    for (double r = 2.0; r <= 64.0; r *= 2.0) {
      const double cur = tail_sum(env, r);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}
