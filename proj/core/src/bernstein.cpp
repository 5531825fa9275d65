#include "subwalk/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "subwalk/error.hpp"
#include "subwalk/format.hpp"

namespace subwalk {

const char* to_string(PhiKind kind) noexcept {
  switch (kind) {
    case PhiKind::stable: return "stable";
    case PhiKind::stable_mixture: return "stable_mixture";
    case PhiKind::stable_log: return "stable_log";
    case PhiKind::log_cosh: return "log_cosh";
    case PhiKind::user_table: return "user_table";
  }
  return "unknown";
}

// PCHIP interpolation of log(phi) against log(lambda), linear extrapolation
// in log-log coordinates outside the sampled range.
class MonotoneTable {
 public:
  MonotoneTable(std::vector<double> lambdas, std::vector<double> values)
      : lambdas_(std::move(lambdas)), values_(std::move(values)) {
    const std::size_t n = lambdas_.size();
    if (n < 2 || values_.size() != n) {
      fail(ErrorKind::configuration, "user_table needs at least two (lambda, phi) samples");
    }
    x_.resize(n);
    y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(lambdas_[i] > 0.0) || !(values_[i] > 0.0) || !std::isfinite(lambdas_[i]) ||
          !std::isfinite(values_[i])) {
        fail(ErrorKind::configuration, "user_table samples must be positive and finite");
      }
      if (i > 0 && !(lambdas_[i] > lambdas_[i - 1])) {
        fail(ErrorKind::configuration, "user_table lambdas must be strictly increasing");
      }
      if (i > 0 && values_[i] < values_[i - 1]) {
        fail(ErrorKind::configuration, "user_table values must be nondecreasing");
      }
      x_[i] = std::log(lambdas_[i]);
      y_[i] = std::log(values_[i]);
    }
    if (lambdas_.front() > 1.0 || lambdas_.back() < 1.0) {
      fail(ErrorKind::configuration, "user_table must bracket lambda = 1");
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    d_.front() = delta.front();
    d_.back() = delta.back();
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }

  double operator()(double lambda) const {
    if (lambda <= 0.0) return 0.0;
    const double x = std::log(lambda);
    const std::size_t n = x_.size();
    if (x <= x_.front()) return std::exp(y_.front() + d_.front() * (x - x_.front()));
    if (x >= x_.back()) return std::exp(y_.back() + d_.back() * (x - x_.back()));
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double y = (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
                     (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
    (void)n;
    return std::exp(y);
  }

  std::size_t size() const noexcept { return x_.size(); }

 private:
  std::vector<double> lambdas_, values_;
  std::vector<double> x_, y_, d_;
};

namespace {

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    fail(ErrorKind::configuration, std::string(name) + " out of (0,1): got " + format_double(v));
  }
}

double log_cosh_sqrt(double lambda) {
  const double x = std::sqrt(lambda);
  if (x < 20.0) {
    const double s = std::sinh(0.5 * x);
    return std::log1p(2.0 * s * s);
  }
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

}  // namespace

PhiSpec::PhiSpec(PhiKind kind, std::vector<double> params,
                 std::shared_ptr<const MonotoneTable> table)
    : kind_(kind), params_(std::move(params)), table_(std::move(table)) {}

PhiSpec PhiSpec::stable(double alpha) {
  require_open_unit(alpha, "alpha");
  PhiSpec s(PhiKind::stable, {alpha}, nullptr);
  s.normalize_and_check();
  return s;
}

PhiSpec PhiSpec::stable_mixture(double alpha, double beta) {
  require_open_unit(alpha, "alpha");
  require_open_unit(beta, "beta");
  PhiSpec s(PhiKind::stable_mixture, {alpha, beta}, nullptr);
  s.normalize_and_check();
  return s;
}

PhiSpec PhiSpec::stable_log(double alpha, double beta) {
  require_open_unit(alpha, "alpha");
  if (!(beta > 0.0 && beta < 1.0 - alpha)) {
    fail(ErrorKind::configuration,
         "beta out of (0, 1-alpha): got " + format_double(beta));
  }
  PhiSpec s(PhiKind::stable_log, {alpha, beta}, nullptr);
  s.normalize_and_check();
  return s;
}

PhiSpec PhiSpec::log_cosh(double alpha) {
  require_open_unit(alpha, "alpha");
  PhiSpec s(PhiKind::log_cosh, {alpha}, nullptr);
  s.normalize_and_check();
  return s;
}

PhiSpec PhiSpec::user_table(std::vector<double> lambdas, std::vector<double> values) {
  auto table = std::make_shared<const MonotoneTable>(std::move(lambdas), std::move(values));
  PhiSpec s(PhiKind::user_table, {}, std::move(table));
  s.normalize_and_check();
  return s;
}

PhiSpec PhiSpec::from_parameters(PhiKind kind, std::span<const double> params, double drift) {
  if (drift != 0.0) {
    fail(ErrorKind::configuration, "drift must be 0: got " + format_double(drift));
  }
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      fail(ErrorKind::configuration, std::string(to_string(kind)) + " takes " +
                                         std::to_string(n) + " parameter(s), got " +
                                         std::to_string(params.size()));
    }
  };
  switch (kind) {
    case PhiKind::stable: need(1); return stable(params[0]);
    case PhiKind::stable_mixture: need(2); return stable_mixture(params[0], params[1]);
    case PhiKind::stable_log: need(2); return stable_log(params[0], params[1]);
    case PhiKind::log_cosh: need(1); return log_cosh(params[0]);
    case PhiKind::user_table:
      fail(ErrorKind::configuration, "user_table is built from samples, not parameters");
  }
  fail(ErrorKind::configuration, "unknown phi kind");
}

double PhiSpec::alpha() const {
  if (params_.empty()) fail(ErrorKind::capability, "user_table has no alpha parameter");
  return params_[0];
}

double PhiSpec::beta() const {
  if (params_.size() < 2) fail(ErrorKind::capability, label() + " has no beta parameter");
  return params_[1];
}

double PhiSpec::raw(double lambda) const {
  if (lambda <= 0.0) return 0.0;
  switch (kind_) {
    case PhiKind::stable: return std::pow(lambda, params_[0]);
    case PhiKind::stable_mixture:
      return std::pow(lambda, params_[0]) + std::pow(lambda, params_[1]);
    case PhiKind::stable_log:
      return std::pow(lambda, params_[0]) * std::pow(std::log1p(lambda), params_[1]);
    case PhiKind::log_cosh: return std::pow(log_cosh_sqrt(lambda), params_[0]);
    case PhiKind::user_table: return (*table_)(lambda);
  }
  return 0.0;
}

std::complex<double> PhiSpec::operator()(std::complex<double> z) const {
  using C = std::complex<double>;
  C v;
  switch (kind_) {
    case PhiKind::stable: v = std::pow(z, params_[0]); break;
    case PhiKind::stable_mixture: v = std::pow(z, params_[0]) + std::pow(z, params_[1]); break;
    case PhiKind::stable_log:
      v = std::pow(z, params_[0]) * std::pow(std::log(C(1.0) + z), params_[1]);
      break;
    case PhiKind::log_cosh: v = std::pow(std::log(std::cosh(std::sqrt(z))), params_[0]); break;
    case PhiKind::user_table:
      fail(ErrorKind::capability, "user_table has no analytic continuation");
  }
  return c_norm_ * v;
}

bool PhiSpec::has_levy_density() const noexcept {
  return kind_ == PhiKind::stable || kind_ == PhiKind::stable_mixture;
}

bool PhiSpec::has_stieltjes_density() const noexcept {
  return has_levy_density() || kind_ == PhiKind::stable_log;
}

double PhiSpec::stieltjes_density(double s) const {
  if (!(s > 0.0)) fail(ErrorKind::domain, "stieltjes density needs s > 0");
  constexpr double pi = std::numbers::pi;
  auto stable_part = [&](double a) { return std::sin(pi * a) / pi * std::pow(s, a - 1.0); };
  switch (kind_) {
    case PhiKind::stable: return c_norm_ * stable_part(params_[0]);
    case PhiKind::stable_mixture:
      return c_norm_ * (stable_part(params_[0]) + stable_part(params_[1]));
    case PhiKind::stable_log: {
      const double a = params_[0], b = params_[1];
      if (s < 1.0) {
        // log(1 - s + i0) is real negative with argument +pi.
        return c_norm_ * std::pow(s, a - 1.0) * std::pow(-std::log1p(-s), b) *
               std::sin(pi * (a + b)) / pi;
      }
      const std::complex<double> L(std::log(s - 1.0), pi);
      const std::complex<double> v = std::polar(1.0, pi * a) * std::pow(L, b);
      return c_norm_ * std::pow(s, a - 1.0) * v.imag() / pi;
    }
    default: break;
  }
  fail(ErrorKind::capability, label() + " has no closed-form Stieltjes density");
}

std::string PhiSpec::label() const {
  std::string out;
  switch (kind_) {
    case PhiKind::stable: out = "stable:"; break;
    case PhiKind::stable_mixture: out = "mix:"; break;
    case PhiKind::stable_log: out = "stable_log:"; break;
    case PhiKind::log_cosh: out = "log_cosh:"; break;
    case PhiKind::user_table: return "table:" + std::to_string(table_->size());
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i) out += ',';
    out += format_double(params_[i]);
  }
  return out;
}

void PhiSpec::normalize_and_check() {
  const double at_one = raw(1.0);
  if (!(at_one > 0.0) || !std::isfinite(at_one)) {
    fail(ErrorKind::configuration, "phi(1) must be positive and finite");
  }
  c_norm_ = 1.0 / at_one;
  if (std::abs((*this)(1.0) - 1.0) > 1e-12) {
    fail(ErrorKind::validation, "normalization failed: phi(1) != 1");
  }
  // First divided differences on a dyadic grid: positive and non-increasing.
  double prev_dd = INFINITY;
  double prev_lam = std::ldexp(1.0, -30);
  double prev_val = (*this)(prev_lam);
  for (int k = -29; k <= 6; ++k) {
    const double lam = std::ldexp(1.0, k);
    const double val = (*this)(lam);
    const double dd = (val - prev_val) / (lam - prev_lam);
    if (!(dd > 0.0)) {
      fail(ErrorKind::configuration,
           label() + " is not increasing near lambda = " + format_double(lam));
    }
    if (dd > prev_dd * (1.0 + 1e-9)) {
      fail(ErrorKind::configuration,
           label() + " is not concave near lambda = " + format_double(lam));
    }
    prev_dd = dd;
    prev_lam = lam;
    prev_val = val;
  }
}

double eval_phi(const PhiSpec& spec, double lam) {
  if (!(lam >= 0.0)) fail(ErrorKind::domain, "eval_phi needs lambda >= 0");
  return spec(lam);
}

double eval_levy_density(const PhiSpec& spec, double t) {
  if (!(t > 0.0)) fail(ErrorKind::domain, "Levy density needs t > 0");
  auto stable_density = [t](double a) {
    return a / std::tgamma(1.0 - a) * std::pow(t, -1.0 - a);
  };
  switch (spec.kind()) {
    case PhiKind::stable: return spec.normalization() * stable_density(spec.alpha());
    case PhiKind::stable_mixture:
      return spec.normalization() *
             (stable_density(spec.alpha()) + stable_density(spec.beta()));
    default: break;
  }
  fail(ErrorKind::capability, spec.label() + " has no closed-form Levy density");
}

double invert_phi(const PhiSpec& spec, double y) {
  if (!(y > 0.0 && y <= 1.0)) {
    fail(ErrorKind::domain, "invert_phi needs y in (0,1]: got " + format_double(y));
  }
  if (y == 1.0) return 1.0;
  // phi(l) >= l on (0,1], so the root lies in (0, y].
  double hi = y;
  double lo = y;
  for (int e = 1; spec(lo) >= y; e *= 2) {
    lo = hi * std::ldexp(1.0, -e);
    if (lo == 0.0) fail(ErrorKind::numeric, "invert_phi: lower bracket underflow");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) break;
    if (spec(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(spec(lo) - y) < std::abs(spec(hi) - y) ? lo : hi;
}

double ScalingProfile::harnack_B() const {
  return std::max(3.0, std::pow(2.0 / c_lower, 1.0 / (2.0 * alpha_lower)));
}

long ScalingProfile::harnack_b() const {
  const double v = std::floor(std::pow(3.0 / c_lower, 1.0 / alpha_lower)) + 1.0;
  return std::max(3L, static_cast<long>(v));
}

ScalingProfile scaling_profile(const PhiSpec& spec, int num_dyadic_levels) {
  if (num_dyadic_levels < 4) {
    fail(ErrorKind::domain, "scaling_profile needs at least 4 dyadic levels");
  }
  ScalingProfile p;
  p.levels = num_dyadic_levels;
  std::vector<double> vals;
  for (int i = 0; i <= num_dyadic_levels; ++i) {
    p.grid.push_back(std::ldexp(1.0, -i));
    vals.push_back(spec(p.grid.back()));
  }
  p.alpha_lower = INFINITY;
  p.alpha_upper = -INFINITY;
  for (int i = 0; i < num_dyadic_levels; ++i) {
    const double slope = std::log2(vals[i] / vals[i + 1]);
    auto pair = [&] {
      return "(" + format_double(p.grid[i + 1]) + ", " + format_double(p.grid[i]) + ")";
    };
    if (!(slope > 0.0)) {
      fail(ErrorKind::validation, "scaling exponent <= 0 on grid pair " + pair());
    }
    if (!(slope < 1.0)) {
      fail(ErrorKind::validation, "scaling exponent >= 1 on grid pair " + pair());
    }
    p.alpha_lower = std::min(p.alpha_lower, slope);
    p.alpha_upper = std::max(p.alpha_upper, slope);
  }
  p.c_lower = INFINITY;
  p.c_upper = -INFINITY;
  for (int i = 0; i <= num_dyadic_levels; ++i) {      // R = 2^-i
    for (int j = i + 1; j <= num_dyadic_levels; ++j) {  // r = 2^-j
      const double ratio = vals[i] / vals[j];
      const double span = static_cast<double>(j - i);
      p.c_lower = std::min(p.c_lower, ratio / std::exp2(span * p.alpha_lower));
      p.c_upper = std::max(p.c_upper, ratio / std::exp2(span * p.alpha_upper));
    }
  }
  return p;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidationReport verify_bernstein_axioms(const PhiSpec& spec, double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::domain, "verify_bernstein_axioms needs tol > 0");
  ValidationReport report;

  {
    CheckResult c{"phi(lambda t) <= lambda phi(t)", true, -INFINITY, ""};
    for (double lam : {1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 100.0, 1e4}) {
      for (int k = -24; k <= 8; ++k) {
        const double t = std::ldexp(1.0, k);
        const double lhs = spec(lam * t), rhs = lam * spec(t);
        const double margin = (lhs - rhs) / rhs;
        if (margin > c.worst) {
          c.worst = margin;
          c.detail = "lambda=" + format_double(lam) + " t=" + format_double(t);
        }
      }
    }
    c.passed = c.worst <= tol;
    report.checks.push_back(c);
  }

  {
    // Forward differences of a Bernstein function alternate in sign:
    // (-1)^(k-1) Delta_h^k phi(t) >= 0 for every h > 0.
    CheckResult c{"alternating finite differences (orders 1-4)", true, -INFINITY, ""};
    for (int e = -20; e <= 6; ++e) {
      const double t = std::ldexp(1.0, e);
      const double h = 0.25 * t;
      double f[5];
      for (int i = 0; i < 5; ++i) f[i] = spec(t + i * h);
      const double diffs[4] = {
          f[1] - f[0],
          f[2] - 2 * f[1] + f[0],
          f[3] - 3 * f[2] + 3 * f[1] - f[0],
          f[4] - 4 * f[3] + 6 * f[2] - 4 * f[1] + f[0],
      };
      const double scales[4] = {f[1] + f[0], f[2] + 2 * f[1] + f[0],
                                f[3] + 3 * f[2] + 3 * f[1] + f[0],
                                f[4] + 4 * f[3] + 6 * f[2] + 4 * f[1] + f[0]};
      for (int k = 0; k < 4; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const double margin = -sign * diffs[k] / scales[k];
        if (margin > c.worst) {
          c.worst = margin;
          c.detail = "order " + std::to_string(k + 1) + " at t=" + format_double(t);
        }
      }
    }
    c.passed = c.worst <= tol;
    report.checks.push_back(c);
  }

  {
    CheckResult c{"extended scaling for R <= L, L in {2,4,8}", true, -INFINITY, ""};
    const int levels = 12;
    const ScalingProfile prof = scaling_profile(spec, levels);
    for (double L : {2.0, 4.0, 8.0}) {
      const double lower_c = prof.c_lower / std::pow(L, prof.alpha_lower);
      const double upper_c = spec(L) * prof.c_upper;
      for (int j = 0; j <= levels; ++j) {
        const double r = std::ldexp(1.0, -j);
        for (double R = r; R <= L * (1 + 1e-12); R *= 2.0) {
          const double ratio = spec(R) / spec(r);
          const double lo = lower_c * std::pow(R / r, prof.alpha_lower);
          const double hi = upper_c * std::pow(R / r, prof.alpha_upper);
          const double margin = std::max((lo - ratio) / ratio, (ratio - hi) / ratio);
          if (margin > c.worst) {
            c.worst = margin;
            c.detail = "L=" + format_double(L) + " r=" + format_double(r) +
                       " R=" + format_double(R);
          }
        }
      }
    }
    c.passed = c.worst <= tol;
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace subwalk
