#include "subwalk/subordination.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "subwalk/error.hpp"
#include "subwalk/format.hpp"
#include "subwalk/quadrature.hpp"

namespace subwalk {

const char* to_string(WeightMethod method) noexcept {
  switch (method) {
    case WeightMethod::quadrature: return "quadrature";
    case WeightMethod::series: return "series";
    case WeightMethod::explicit_values: return "explicit";
  }
  return "unknown";
}

double SubordinationWeights::partial_sum() const noexcept {
  // Smallest terms first.
  double s = 0.0;
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) s += *it;
  return s;
}

void validate(const SubordinationWeights& w) {
  if (w.weights.empty()) fail(ErrorKind::validation, "weights are empty");
  for (std::size_t m = 1; m <= w.terms(); ++m) {
    if (!(w[m] >= 0.0) || !std::isfinite(w[m])) {
      fail(ErrorKind::validation, "weight a_" + std::to_string(m) + " is negative or not finite");
    }
  }
  if (!(w.tail_mass >= 0.0)) fail(ErrorKind::validation, "tail mass is negative");
  const double total = w.partial_sum() + w.tail_mass;
  if (std::abs(total - 1.0) > 1e-10) {
    fail(ErrorKind::validation,
         "weights do not sum to 1: sum + tail = " + format_double(total));
  }
}

SubordinationWeights SubordinationWeights::from_values(std::vector<double> a, double tail_mass) {
  SubordinationWeights w;
  w.weights = std::move(a);
  w.tail_mass = tail_mass;
  w.method = WeightMethod::explicit_values;
  validate(w);
  return w;
}

double stable_weight_closed_form(double alpha, std::size_t m) {
  if (m == 0) return 0.0;
  const double md = static_cast<double>(m);
  return alpha / std::tgamma(1.0 - alpha) *
         std::exp(std::lgamma(md - alpha) - std::lgamma(md + 1.0));
}

namespace {

constexpr double kLogDrop = 46.0;  // e^-46 ~ 1e-20

// Smallest delta with scale * shape(delta) >= kLogDrop, shape increasing.
template <class Shape>
double drop_distance(double scale, Shape shape) {
  double delta = 1e-3;
  while (scale * shape(delta) < kLogDrop) delta *= 1.5;
  return delta;
}

QuadratureOptions weight_options() {
  QuadratureOptions opt;
  opt.rel_tol = 1e-13;
  opt.max_panels = 4000;
  return opt;
}

// (1/m!) int_0^inf t^m e^-t t^(-1-a) dt * a / Gamma(1-a), the stable(a)
// Levy-density weight, integrated in u = log t.
double stable_levy_weight(double a, std::size_t m) {
  const double k = static_cast<double>(m) - a;  // exponent of t after t du
  const double u_peak = std::log(k);
  const double g_peak = k * u_peak - k;
  const double left = drop_distance(k, [](double d) { return std::exp(-d) - 1.0 + d; });
  const double right = drop_distance(k, [](double d) { return std::expm1(d) - d; });
  // k u - e^u - g_peak = -k (e^v - 1 - v), v = u - u_peak, free of cancellation.
  auto f = [&](double v) { return std::exp(-k * (std::expm1(v) - v)); };
  const double sd = 1.0 / std::sqrt(k);
  const double cuts[] = {-6 * sd, -3 * sd, -1.5 * sd, 0.0, 1.5 * sd, 3 * sd, 6 * sd};
  const double integral =
      integrate_or_throw(f, -left, right, weight_options(), cuts, "stable Levy weight");
  const double md = static_cast<double>(m);
  return integral * std::exp(g_peak + std::log(a) - std::lgamma(1.0 - a) - std::lgamma(md + 1.0));
}

// a/Gamma(1-a) int_0^inf t^(-1-a) P(M+1, t) dt, P the regularized lower
// incomplete gamma function = P(Poisson(t) >= M+1).
double stable_levy_tail(double a, std::size_t M) {
  const double n = static_cast<double>(M) + 1.0;
  const double u_c = std::log(n);
  const double left = drop_distance(n, [](double d) { return std::exp(-d) - 1.0 + d; });
  const double hi = u_c + 40.0 / a + 5.0;
  auto f = [&](double u) {
    const double t = std::exp(u);
    return std::exp(-a * (u - u_c)) * boost::math::gamma_p(n, t);
  };
  const double cuts[] = {u_c - 1.0, u_c, u_c + 1.0};
  const double integral =
      integrate_or_throw(f, u_c - left - 1.0, hi, weight_options(), cuts, "stable Levy tail");
  return integral * std::exp(-a * u_c + std::log(a) - std::lgamma(1.0 - a));
}

struct StieltjesExponents {
  double small;  // sigma(s) ~ s^(small - 1) as s -> 0
  double large;  // sigma(s) grows at most like s^(large - 1) as s -> inf
};

StieltjesExponents stieltjes_exponents(const PhiSpec& spec) {
  switch (spec.kind()) {
    case PhiKind::stable: return {spec.alpha(), spec.alpha()};
    case PhiKind::stable_mixture:
      return {std::min(spec.alpha(), spec.beta()), std::max(spec.alpha(), spec.beta())};
    case PhiKind::stable_log: return {spec.alpha() + spec.beta(), spec.alpha() + 1e-3};
    default: break;
  }
  fail(ErrorKind::capability, spec.label() + " has no Stieltjes density");
}

// int sigma(s) s^power (1+s)^(-n) ds in u = log s, with power + small > 0.
double stieltjes_integral(const PhiSpec& spec, double power, double n, const char* what) {
  const auto ex = stieltjes_exponents(spec);
  const double c = power + ex.small;  // log-slope at u -> -inf
  const double u_peak = std::log(c / std::max(n - c, 1e-3));
  const double right_slope = n - power - ex.large;
  if (!(right_slope > 0.0)) fail(ErrorKind::numeric, std::string(what) + ": divergent integral");
  const double lo = u_peak - kLogDrop / c - 5.0;
  const double hi = std::max(u_peak, 0.0) + kLogDrop / right_slope + 10.0;
  auto f = [&](double u) {
    const double s = std::exp(u);
    return spec.stieltjes_density(s) * std::exp((power + 1.0) * u - n * std::log1p(s));
  };
  const double cuts[] = {u_peak, 0.0};
  return integrate_or_throw(f, lo, hi, weight_options(), cuts, what);
}

QuadratureRoute resolve(const PhiSpec& spec, QuadratureRoute route) {
  if (route == QuadratureRoute::automatic) {
    if (spec.has_levy_density()) return QuadratureRoute::levy;
    if (spec.has_stieltjes_density()) return QuadratureRoute::stieltjes;
    fail(ErrorKind::capability,
         spec.label() + ": no Levy or Stieltjes density; use weights_series");
  }
  if (route == QuadratureRoute::levy && !spec.has_levy_density()) {
    fail(ErrorKind::capability, spec.label() + " has no closed-form Levy density");
  }
  if (route == QuadratureRoute::stieltjes && !spec.has_stieltjes_density()) {
    fail(ErrorKind::capability, spec.label() + " has no Stieltjes density");
  }
  return route;
}

}  // namespace

double weight_by_quadrature(const PhiSpec& spec, std::size_t m, QuadratureRoute route) {
  if (m == 0) fail(ErrorKind::domain, "weights are indexed from m = 1");
  route = resolve(spec, route);
  if (route == QuadratureRoute::levy) {
    double w = stable_levy_weight(spec.alpha(), m);
    if (spec.kind() == PhiKind::stable_mixture) w += stable_levy_weight(spec.beta(), m);
    return spec.normalization() * w;
  }
  // a_m = int sigma(s) s (1+s)^-(m+1) ds
  return stieltjes_integral(spec, 1.0, static_cast<double>(m) + 1.0, "Stieltjes weight");
}

double tail_by_quadrature(const PhiSpec& spec, std::size_t M, QuadratureRoute route) {
  route = resolve(spec, route);
  if (route == QuadratureRoute::levy) {
    double t = stable_levy_tail(spec.alpha(), M);
    if (spec.kind() == PhiKind::stable_mixture) t += stable_levy_tail(spec.beta(), M);
    return spec.normalization() * t;
  }
  // sum_{m>M} s (1+s)^-(m+1) = (1+s)^-(M+1)
  return stieltjes_integral(spec, 0.0, static_cast<double>(M) + 1.0, "Stieltjes tail");
}

SubordinationWeights weights_quadrature_terms(const PhiSpec& spec, std::size_t terms) {
  if (terms == 0) fail(ErrorKind::domain, "need at least one weight");
  SubordinationWeights w;
  w.method = WeightMethod::quadrature;
  w.weights.resize(terms);
  for (std::size_t m = 1; m <= terms; ++m) w.weights[m - 1] = weight_by_quadrature(spec, m);
  w.tail_mass = tail_by_quadrature(spec, terms);
  w.tolerance = w.tail_mass;
  w.tail_target_met = true;
  w.max_error = 1e-13;
  validate(w);
  return w;
}

SubordinationWeights weights_quadrature(const PhiSpec& spec, double tol, std::size_t max_terms) {
  if (!(tol > 0.0 && tol <= 1e-3)) {
    fail(ErrorKind::domain, "weights_quadrature needs tol in (0, 1e-3]: got " + format_double(tol));
  }
  if (max_terms == 0) fail(ErrorKind::domain, "max_terms must be positive");
  resolve(spec, QuadratureRoute::automatic);
  std::size_t M = std::min<std::size_t>(16, max_terms);
  double tail = tail_by_quadrature(spec, M);
  while (tail > tol && M < max_terms) {
    M = std::min(M * 2, max_terms);
    tail = tail_by_quadrature(spec, M);
  }
  SubordinationWeights w;
  w.method = WeightMethod::quadrature;
  w.weights.resize(M);
  for (std::size_t m = 1; m <= M; ++m) w.weights[m - 1] = weight_by_quadrature(spec, m);
  w.tail_mass = tail;
  w.tolerance = tol;
  w.tail_target_met = tail <= tol;
  w.max_error = 1e-13;
  validate(w);
  return w;
}

namespace {

// Taylor coefficients of f(s) = 1 - phi(1 - s) from the trapezoid rule on the
// circle |s| = rho (discrete Cauchy integral).
std::vector<double> contour_coefficients(const PhiSpec& spec, std::size_t M, double& err) {
  std::size_t K = 256;
  while (K < 8 * (M + 1)) K *= 2;
  const double rho = std::pow(10.0, -18.0 / static_cast<double>(K));
  std::vector<std::complex<double>> f(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(K);
    const std::complex<double> s = std::polar(rho, angle);
    f[j] = 1.0 - spec(1.0 - s);
  }
  const int extent[] = {static_cast<int>(K)};
  detail::dft_inplace(f, extent, -1);
  std::vector<double> a(M);
  for (std::size_t m = 1; m <= M; ++m) {
    a[m - 1] = f[m].real() / static_cast<double>(K) / std::pow(rho, static_cast<double>(m));
  }
  err = 1e-15 * std::sqrt(static_cast<double>(K)) * std::pow(rho, -static_cast<double>(M));
  return a;
}

// Real-axis route for specs without an analytic continuation: Chebyshev
// interpolation of f on s in [0, 1/2] and differentiation at s = 0.
std::vector<double> chebyshev_coefficients(const PhiSpec& spec, std::size_t M, double& err) {
  constexpr int K = 32;
  std::vector<double> fx(K + 1);
  double fmax = 0.0;
  for (int j = 0; j <= K; ++j) {
    const double x = std::cos(std::numbers::pi * j / K);
    const double s = 0.25 * (x + 1.0);
    fx[j] = 1.0 - spec(1.0 - s);
    fmax = std::max(fmax, std::abs(fx[j]));
  }
  std::vector<double> c(K + 1);
  for (int k = 0; k <= K; ++k) {
    double sum = 0.0;
    for (int j = 0; j <= K; ++j) {
      const double w = (j == 0 || j == K) ? 0.5 : 1.0;
      sum += w * fx[j] * std::cos(std::numbers::pi * j * k / K);
    }
    c[k] = 2.0 / K * sum * ((k == 0 || k == K) ? 0.5 : 1.0);
  }
  const double noise = 1e-15 * fmax + std::abs(c[K]) + std::abs(c[K - 1]);
  std::vector<double> a(M);
  err = 0.0;
  for (std::size_t m = 1; m <= M; ++m) {
    // d^m/ds^m T_k(4s - 1) at s = 0, divided by m!.
    double value = 0.0, bound = 0.0;
    for (int k = 0; k <= K; ++k) {
      double deriv = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double jd = static_cast<double>(j);
        deriv *= (static_cast<double>(k) * k - jd * jd) / (2.0 * jd + 1.0);
      }
      deriv *= ((k + static_cast<int>(m)) % 2 == 0) ? 1.0 : -1.0;
      value += c[k] * deriv;
      bound += std::abs(deriv);
    }
    const double scale = std::exp(static_cast<double>(m) * std::log(4.0) -
                                  std::lgamma(static_cast<double>(m) + 1.0));
    a[m - 1] = value * scale;
    const double e = noise * bound * scale;
    err = std::max(err, e);
    if (e > 1e-6) {
      fail(ErrorKind::capability,
           "series conditioning failure at m = " + std::to_string(m) +
               " (error estimate " + format_double(e) + "); reduce M or use weights_quadrature");
    }
  }
  return a;
}

}  // namespace

SubordinationWeights weights_series(const PhiSpec& spec, std::size_t M) {
  if (M < 1) fail(ErrorKind::domain, "weights_series needs M >= 1");
  if (M > kMaxSeriesTerms) {
    fail(ErrorKind::capability, "weights_series supports M <= " +
                                    std::to_string(kMaxSeriesTerms) + "; use weights_quadrature");
  }
  double err = 0.0;
  std::vector<double> a =
      spec.is_analytic() ? contour_coefficients(spec, M, err) : chebyshev_coefficients(spec, M, err);
  for (std::size_t m = 1; m <= M; ++m) {
    double& v = a[m - 1];
    if (v < -1e-12) {
      fail(ErrorKind::numeric, "series coefficient a_" + std::to_string(m) +
                                   " is negative: " + format_double(v));
    }
    v = std::max(v, 0.0);
  }
  SubordinationWeights w;
  w.method = WeightMethod::series;
  w.weights = std::move(a);
  const double tail = 1.0 - w.partial_sum();
  if (tail < -1e-10) {
    fail(ErrorKind::numeric, "series weights exceed unit mass by " + format_double(-tail));
  }
  w.tail_mass = std::max(tail, 0.0);
  w.tolerance = w.tail_mass;
  w.max_error = err;
  validate(w);
  return w;
}

// Vose alias method over {1, ..., M}.
class AliasTable {
 public:
  explicit AliasTable(const SubordinationWeights& w) {
    const std::size_t n = w.terms();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    const double mass = w.partial_sum();
    renorm_ = 1.0 / mass;
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = w.weights[i] / mass * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (auto i : large) prob_[i] = 1.0;
    for (auto i : small) prob_[i] = 1.0;
  }

  std::size_t sample(Xoshiro256& rng) const noexcept {
    const std::size_t i = static_cast<std::size_t>(rng.below(prob_.size()));
    return (rng.uniform() < prob_[i] ? i : alias_[i]) + 1;
  }

  std::size_t size() const noexcept { return prob_.size(); }
  double renormalization() const noexcept { return renorm_; }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  double renorm_ = 1.0;
};

IncrementSampler::IncrementSampler(std::shared_ptr<const AliasTable> table, std::uint64_t seed)
    : table_(std::move(table)), rng_(seed) {}

std::size_t IncrementSampler::operator()() noexcept { return table_->sample(rng_); }

IncrementSampler IncrementSampler::reseeded(std::uint64_t seed) const {
  return IncrementSampler(table_, seed);
}

double IncrementSampler::renormalization() const noexcept { return table_->renormalization(); }

std::size_t IncrementSampler::max_increment() const noexcept { return table_->size(); }

IncrementSampler build_sampler(const SubordinationWeights& w, std::uint64_t seed) {
  validate(w);
  if (w.tail_mass >= 0.01) {
    fail(ErrorKind::numeric, "refusing to sample: weight tail mass " + format_double(w.tail_mass) +
                                 " >= 0.01 would bias the walk");
  }
  if (w.terms() > 0xFFFFFFFFull) fail(ErrorKind::capability, "too many weights for the sampler");
  return IncrementSampler(std::make_shared<const AliasTable>(w), seed);
}

}  // namespace subwalk
