#include <doctest.h>

#include <cmath>
#include <vector>

#include "subwalk/error.hpp"
#include "subwalk/subordination.hpp"
#include "support.hpp"

using namespace subwalk;
using testing::Gen;

TEST_CASE("quadrature weights for stable(0.5)") {
  const SubordinationWeights w = weights_quadrature(PhiSpec::stable(0.5), 1e-10);
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(w[2] - 0.125) <= 1e-9);
  CHECK(std::abs(w[3] - 0.0625) <= 1e-9);
  CHECK(std::abs(w.partial_sum() + w.tail_mass - 1.0) <= 1e-10);
  CHECK(w.method == WeightMethod::quadrature);
  CHECK(w.tail_mass > 0.0);
}

TEST_CASE("mixture weights are the half-sum of the stable weights") {
  const auto a = testing::stable_binomial_weights(0.3, 64);
  const auto b = testing::stable_binomial_weights(0.7, 64);
  const SubordinationWeights w = weights_quadrature_terms(PhiSpec::stable_mixture(0.3, 0.7), 64);
  for (std::size_t m = 1; m <= 64; ++m) CHECK(std::abs(w[m] - 0.5 * (a[m] + b[m])) <= 1e-9);
}

TEST_CASE("series examples") {
  const SubordinationWeights s = weights_series(PhiSpec::stable(0.5), 3);
  REQUIRE(s.terms() == 3);
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s[2] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(s[3] == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(weights_series(PhiSpec::stable(0.3), 1)[1] == doctest::Approx(0.3).epsilon(1e-12));

  const PhiSpec sl = PhiSpec::stable_log(0.5, 0.2);
  const SubordinationWeights q = weights_quadrature_terms(sl, 8);
  const SubordinationWeights r = weights_series(sl, 8);
  for (std::size_t m = 1; m <= 8; ++m) CHECK(std::abs(q[m] - r[m]) <= 1e-8);
}

TEST_CASE("closed form against the binomial recursion") {
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto a = testing::stable_binomial_weights(alpha, 200);
    for (std::size_t m = 1; m <= 200; ++m) {
      CHECK(stable_weight_closed_form(alpha, m) == doctest::Approx(a[m]).epsilon(1e-12));
    }
  }
  CHECK(std::isfinite(stable_weight_closed_form(0.5, 1000000)));
}

TEST_CASE("tail by quadrature matches the binomial remainder") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    const auto a = testing::stable_binomial_weights(alpha, 2000);
    double partial = 0.0;
    for (std::size_t m = 1; m <= 2000; ++m) partial += a[m];
    CHECK(tail_by_quadrature(PhiSpec::stable(alpha), 2000) == doctest::Approx(1.0 - partial).epsilon(1e-9));
  }
}

TEST_CASE("quadrature routes agree for the stable kind") {
  const PhiSpec phi = PhiSpec::stable(0.4);
  for (std::size_t m : {1u, 2u, 7u, 50u, 1000u}) {
    CHECK(weight_by_quadrature(phi, m, QuadratureRoute::levy) ==
          doctest::Approx(weight_by_quadrature(phi, m, QuadratureRoute::stieltjes)).epsilon(1e-10));
  }
}

TEST_CASE("log_cosh has no quadrature route but a series") {
  const PhiSpec lc = PhiSpec::log_cosh(0.5);
  CHECK_THROWS_AS(weights_quadrature_terms(lc, 8), Error);
  const SubordinationWeights s = weights_series(lc, 64);
  for (std::size_t m = 1; m <= 64; ++m) CHECK(s[m] >= 0.0);
  CHECK(s.partial_sum() < 1.0);
}

TEST_CASE("from_values validates") {
  CHECK_NOTHROW(SubordinationWeights::from_values({1.0}));
  CHECK_THROWS_AS(SubordinationWeights::from_values({0.5, 0.4}), Error);
  CHECK_THROWS_AS(SubordinationWeights::from_values({1.2, -0.2}), Error);
}

TEST_CASE("sampler frequencies and determinism") {
  const SubordinationWeights w = weights_quadrature_terms(PhiSpec::stable(0.5), 1 << 16);
  IncrementSampler s = build_sampler(w, 1);
  const int draws = 1000000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) ones += s() == 1 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(ones) / draws - 0.5) <= 3e-3);

  IncrementSampler a = build_sampler(w, 99), b = build_sampler(w, 99);
  for (int i = 0; i < 10000; ++i) REQUIRE(a() == b());

  IncrementSampler one = build_sampler(SubordinationWeights::from_values({1.0}), 7);
  for (int i = 0; i < 10000; ++i) REQUIRE(one() == 1);
  CHECK(one.max_increment() == 1);
}

TEST_CASE("sampler passes a chi-square test against the renormalized weights") {
  const SubordinationWeights w = weights_quadrature_terms(PhiSpec::stable(0.5), 1 << 16);
  IncrementSampler s = build_sampler(w, 2024);
  // bins {1}, ..., {15}, [16, 63], [64, M]
  std::vector<double> expected(17, 0.0);
  auto bin = [](std::size_t m) { return m <= 15 ? m - 1 : (m <= 63 ? 15 : 16); };
  for (std::size_t m = 1; m <= w.terms(); ++m) expected[bin(m)] += w[m] * s.renormalization();
  std::vector<double> observed(17, 0.0);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) observed[bin(s())] += 1.0;
  double chi2 = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const double e = expected[k] * draws;
    chi2 += (observed[k] - e) * (observed[k] - e) / e;
  }
  CHECK(chi2 < 39.25);  // 0.999 quantile, 16 degrees of freedom
}

TEST_CASE("sampler refuses a heavy truncation tail") {
  CHECK_THROWS_AS(build_sampler(weights_quadrature_terms(PhiSpec::stable(0.5), 64), 1), Error);
}

TEST_CASE("property: quadrature and series agree for catalog entries") {
  Gen g(201);
  for (int i = 0; i < 12; ++i) {
    const PhiSpec phi = g.integer(0, 2) == 0 ? PhiSpec::stable_log(g.uniform(0.2, 0.6), g.uniform(0.05, 0.35))
                                             : g.levy_phi();
    CAPTURE(phi.label());
    const SubordinationWeights q = weights_quadrature_terms(phi, 50);
    const SubordinationWeights s = weights_series(phi, 50);
    for (std::size_t m = 1; m <= 50; ++m) CHECK(std::abs(q[m] - s[m]) <= 1e-8);
    CHECK(std::abs(q.partial_sum() + q.tail_mass - 1.0) <= 1e-10);
  }
}

TEST_CASE("property: decay band a_m m / phi(1/m)") {
  Gen g(202);
  for (int i = 0; i < 8; ++i) {
    const PhiSpec phi = g.levy_phi();
    CAPTURE(phi.label());
    const SubordinationWeights w = weights_quadrature_terms(phi, 4096);
    double lo = 1e300, hi = 0.0;
    for (std::size_t m = 10; m <= w.terms(); ++m) {
      const double v = w[m] * static_cast<double>(m) / phi(1.0 / static_cast<double>(m));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (m > 10) CHECK(w[m] <= w[m - 1]);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 10.0);
  }
}
