#include "subwalk/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>

#include "subwalk/error.hpp"
#include "subwalk/format.hpp"
#include "subwalk/quadrature.hpp"

namespace subwalk {

EstimateEnvelope::EstimateEnvelope(PhiSpec spec, int d) : spec_(std::move(spec)), d_(d) {
  if (d < 1 || d > kMaxDim) fail(ErrorKind::domain, "dimension out of 1..8: got " + std::to_string(d));
}

double EstimateEnvelope::j(double r) const {
  if (!(r > 0.0)) fail(ErrorKind::domain, "j needs r > 0: got " + format_double(r));
  return std::pow(r, -d_) * spec_(1.0 / (r * r));
}

double EstimateEnvelope::diagonal(long n) const {
  if (n < 1) fail(ErrorKind::domain, "envelope needs n >= 1: got " + std::to_string(n));
  return std::pow(invert_phi(spec_, 1.0 / static_cast<double>(n)), 0.5 * d_);
}

double EstimateEnvelope::at_radius(long n, double r) const {
  const double diag = diagonal(n);
  if (r == 0.0) return diag;
  return std::min(diag, static_cast<double>(n) * j(r));
}

double EstimateEnvelope::operator()(long n, const Site& x) const { return at_radius(n, norm(x)); }

double EstimateEnvelope::r_n(long n) const {
  if (n < 1) fail(ErrorKind::domain, "r_n needs n >= 1: got " + std::to_string(n));
  return 1.0 / std::sqrt(invert_phi(spec_, 1.0 / static_cast<double>(n)));
}

double EstimateEnvelope::crossover_radius(long n) const {
  const double diag = diagonal(n);
  const double nd = static_cast<double>(n);
  auto excess = [&](double r) { return nd * j(r) - diag; };  // decreasing in r
  double lo = 1e-6, hi = 1.0;
  while (excess(hi) > 0.0) hi *= 2.0;
  while (excess(lo) < 0.0) lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double j_profile(const EstimateEnvelope& env, double r) { return env.j(r); }

double envelope(const EstimateEnvelope& env, long n, const Site& x) { return env(n, x); }

double pruitt_h(const LatticeKernel& step, double x) {
  if (!(x > 0.0)) fail(ErrorKind::domain, "pruitt_h needs x > 0: got " + format_double(x));
  if (x >= step.radius()) {
    fail(ErrorKind::domain, "pruitt_h: x = " + format_double(x) + " is not resolved by a box of radius " +
                                std::to_string(step.radius()));
  }
  const double x2 = x * x;
  double inner = 0.0, moment = 0.0;
  step.for_each_in_box([&](const Site& y, double p) {
    const double r2 = norm2(y);
    if (r2 <= x2) {
      inner += p;
      moment += r2 * p;
    }
  });
  return std::max(0.0, 1.0 - inner) + moment / x2;
}

namespace {

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// sum_{|y| >= r} j(|y|) over Z^d: exact lattice sum over |y| <= Y, then a
// radial integral from Y + 1/2 outward.
class TailTable {
 public:
  TailTable(const EstimateEnvelope& env, double r_max) : d_(env.dim()) {
    if (d_ > kMaxExactDim) fail(ErrorKind::domain, "tail sums support d <= 3");
    const long base = d_ == 1 ? 1L << 16 : d_ == 2 ? 1024 : 128;
    const long per_r = d_ == 3 ? 4 : 8;
    Y_ = std::max(base, static_cast<long>(std::ceil(per_r * std::max(r_max, 1.0))));
    if (d_ == 1) {
      // suffix_[y] = sum over |y'| >= y, y' <= Y; smallest terms first.
      suffix_.assign(static_cast<std::size_t>(Y_) + 2, 0.0);
      for (long y = Y_; y >= 1; --y) {
        suffix_[y] = suffix_[y + 1] + 2.0 * env.j(static_cast<double>(y));
      }
    } else {
      const auto q_max = static_cast<std::size_t>(Y_ * Y_);
      std::vector<std::uint64_t> count(q_max + 1, 0);
      std::array<long, kMaxExactDim> y{};
      for (int i = 0; i < d_; ++i) y[i] = -Y_;
      for (;;) {
        long q = 0;
        for (int i = 0; i < d_; ++i) q += y[i] * y[i];
        if (q > 0 && q <= Y_ * Y_) ++count[static_cast<std::size_t>(q)];
        int i = d_ - 1;
        while (i >= 0 && y[i] == Y_) y[i--] = -Y_;
        if (i < 0) break;
        ++y[i];
      }
      // suffix_[q] = sum over q <= |y|^2 <= Y^2.
      suffix_.assign(q_max + 2, 0.0);
      for (std::size_t q = q_max; q >= 1; --q) {
        suffix_[q] = suffix_[q + 1];
        if (count[q]) {
          suffix_[q] += static_cast<double>(count[q]) * env.j(std::sqrt(static_cast<double>(q)));
        }
      }
    }
    const double area = unit_sphere_area(d_);
    const double start = static_cast<double>(Y_) + 0.5;
    QuadratureOptions opt;
    opt.rel_tol = 1e-10;
    // s = start / u maps [start, inf) onto (0, 1].
    beyond_ = integrate_or_throw(
        [&](double u) {
          if (u <= 0.0) return 0.0;
          const double s = start / u;
          return area * std::pow(s, d_ - 1) * env.j(s) * start / (u * u);
        },
        0.0, 1.0, opt, {}, "tail-sum radial integral");
  }

  double operator()(double r) const {
    const double rr = std::max(r, 1.0);
    const auto q = static_cast<std::size_t>(std::ceil(d_ == 1 ? rr : rr * rr));
    if (q >= suffix_.size()) fail(ErrorKind::domain, "tail-sum radius beyond the lattice cutoff");
    return suffix_[q] + beyond_;
  }

 private:
  int d_;
  long Y_ = 0;
  std::vector<double> suffix_;
  double beyond_ = 0.0;
};

}  // namespace

double tail_sum(const EstimateEnvelope& env, double r) {
  if (!(r >= 0.0)) fail(ErrorKind::domain, "tail_sum needs r >= 0");
  return TailTable(env, r)(r);
}

RatioReport tail_sum_check(const EstimateEnvelope& env, std::span<const double> r_grid) {
  if (r_grid.empty()) fail(ErrorKind::domain, "tail_sum_check: empty radius grid");
  RatioReport rep;
  rep.kind = "tail_sum";
  rep.phi = env.spec().label();
  rep.dim = env.dim();
  rep.method = "lattice sum + radial integral";
  rep.grid = "r in [" + format_double(r_grid.front()) + ", " + format_double(r_grid.back()) + "], " +
             std::to_string(r_grid.size()) + " points";
  rep.ratio_inf = std::numeric_limits<double>::infinity();
  rep.ratio_sup = 0.0;
  double r_max = 0.0;
  for (double r : r_grid) {
    if (!(r > 0.0)) fail(ErrorKind::domain, "tail_sum_check needs r > 0");
    r_max = std::max(r_max, r);
  }
  const TailTable table(env, r_max);
  for (double r : r_grid) {
    const double s = table(r);
    const double ref = env.spec()(1.0 / (r * r));
    const double ratio = s / ref;
    GridPoint gp;
    gp.x[0] = static_cast<std::int64_t>(std::llround(r));
    gp.value = s;
    gp.reference = ref;
    if (ratio < rep.ratio_inf) {
      rep.ratio_inf = ratio;
      rep.argmin = gp;
    }
    if (ratio > rep.ratio_sup) {
      rep.ratio_sup = ratio;
      rep.argmax = gp;
    }
    ++rep.points;
  }
  return rep;
}

RatioReport verify_two_sided(std::span<const LatticeKernel> kernels, const EstimateEnvelope& env) {
  RatioReport rep;
  rep.kind = "two_sided";
  rep.phi = env.spec().label();
  rep.dim = env.dim();
  rep.ratio_inf = std::numeric_limits<double>::infinity();
  rep.ratio_sup = 0.0;
  long nmin = std::numeric_limits<long>::max(), nmax = 0;
  int rmax = 0;
  for (const LatticeKernel& k : kernels) {
    if (k.dim() != env.dim()) fail(ErrorKind::domain, "kernel dimension differs from the envelope");
    if (k.mass_defect() > kDefectLimit) {
      fail(ErrorKind::numeric, "kernel defect " + format_double(k.mass_defect()) + " exceeds 1e-6");
    }
    const long n = std::lround(k.time());
    if (n < 1) continue;
    nmin = std::min(nmin, n);
    nmax = std::max(nmax, n);
    rmax = std::max(rmax, k.radius());
    rep.method = to_string(k.method());
    const double floor = 10.0 * k.mass_defect();
    const double diag = env.diagonal(n);
    k.for_each_in_box([&](const Site& x, double p) {
      if (!(p > floor)) {
        ++rep.filtered;
        return;
      }
      const double r = norm(x);
      const double e = r == 0.0 ? diag : std::min(diag, static_cast<double>(n) * env.j(r));
      const double ratio = p / e;
      ++rep.points;
      if (ratio < rep.ratio_inf) {
        rep.ratio_inf = ratio;
        rep.argmin = GridPoint{n, x, p, e};
      }
      if (ratio > rep.ratio_sup) {
        rep.ratio_sup = ratio;
        rep.argmax = GridPoint{n, x, p, e};
      }
    });
  }
  if (rep.points == 0) fail(ErrorKind::domain, "verify_two_sided: no grid point survives the defect filter");
  rep.grid = "n in [" + std::to_string(nmin) + ", " + std::to_string(nmax) + "], |x_i| <= " +
             std::to_string(rmax);
  return rep;
}

HarnackWindow HarnackWindow::from_profile(const PhiSpec& spec, double gamma, double R, const Site& z,
                                          int levels) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    fail(ErrorKind::domain, "gamma out of (0,1): got " + format_double(gamma));
  }
  if (!(R >= 1.0)) fail(ErrorKind::domain, "R must be >= 1: got " + format_double(R));
  const ScalingProfile prof = scaling_profile(spec, levels);
  HarnackWindow w;
  w.gamma = gamma;
  w.B = prof.harnack_B();
  w.b = prof.harnack_b();
  w.R = R;
  w.z = z;
  return w;
}

namespace {

long time_span(const PhiSpec& spec, double gamma, double r) {
  return static_cast<long>(std::floor(gamma / spec(1.0 / (r * r))));
}

}  // namespace

long HarnackWindow::start(const PhiSpec& spec) const { return time_span(spec, gamma, R); }
long HarnackWindow::depth(const PhiSpec& spec) const { return time_span(spec, gamma, R / B); }
long HarnackWindow::horizon(const PhiSpec& spec) const {
  return time_span(spec, gamma, std::sqrt(static_cast<double>(b)) * R);
}

std::vector<Site> ball_points(const Site& z, double r, int d) {
  std::vector<Site> out;
  if (!(r > 0.0)) return out;
  const auto e = static_cast<std::int64_t>(std::ceil(r));
  const double r2 = r * r;
  Site off{};
  for (int i = 0; i < d; ++i) off[i] = -e;
  for (;;) {
    if (norm2(off) < r2) {
      Site y = z;
      for (int i = 0; i < d; ++i) y[i] += off[i];
      out.push_back(y);
    }
    int i = d - 1;
    while (i >= 0 && off[i] == e) off[i--] = -e;
    if (i < 0) break;
    ++off[i];
  }
  return out;
}

HarnackFunction kernel_harnack_function(const PhiSpec& spec, int d, long n0, const Site& x0,
                                        int grid) {
  auto cache = std::make_shared<std::map<long, LatticeKernel>>();
  return [spec, d, n0, x0, grid, cache](long k, const Site& y) -> double {
    const long n = n0 - k;
    if (n < 0) fail(ErrorKind::domain, "harnack function queried beyond n0");
    auto it = cache->find(n);
    if (it == cache->end()) {
      it = cache->emplace(n, nstep_kernel_spectral(spec, d, static_cast<int>(n), grid)).first;
    }
    Site off{};
    for (int i = 0; i < d; ++i) off[i] = y[i] - x0[i];
    return it->second(off);
  };
}

RatioReport harnack_ratio(const PhiSpec& spec, int d, long n0, const Site& x0,
                          const HarnackWindow& window, const HarnackFunction& q) {
  const long k0 = window.start(spec);
  const long depth = window.depth(spec);
  if (depth < 1) {
    fail(ErrorKind::domain, "Harnack window depth is " + std::to_string(depth) + "; need >= 1");
  }
  if (n0 - (k0 + depth) < 1) {
    fail(ErrorKind::domain, "n0 = " + std::to_string(n0) + " leaves kernel indices below 1; need n0 >= " +
                                std::to_string(k0 + depth + 1));
  }
  const std::vector<Site> ball = ball_points(window.z, window.inner_radius(), d);
  if (ball.empty()) fail(ErrorKind::domain, "Harnack ball is empty");

  GridPoint hi, lo;
  hi.value = -std::numeric_limits<double>::infinity();
  lo.value = std::numeric_limits<double>::infinity();
  for (long k = k0; k <= k0 + depth; ++k) {
    for (const Site& y : ball) {
      const double v = q(k, y);
      if (v > hi.value) hi = GridPoint{k, y, v, 0.0};
    }
  }
  for (const Site& w : ball) {
    const double v = q(0, w);
    if (v < lo.value) lo = GridPoint{0, w, v, 0.0};
  }
  hi.reference = lo.value;
  lo.reference = hi.value;

  RatioReport rep;
  rep.kind = "harnack";
  rep.phi = spec.label();
  rep.dim = d;
  rep.grid = "R = " + format_double(window.R) + ", B = " + format_double(window.B) +
             ", b = " + std::to_string(window.b) + ", gamma = " + format_double(window.gamma) +
             ", n0 = " + std::to_string(n0) + ", x0 = " + to_string(x0, d) + ", k in [" + std::to_string(k0) + ", " +
             std::to_string(k0 + depth) + "], " + std::to_string(ball.size()) + " ball points";
  rep.method = "exhaustive";
  rep.points = ball.size() * static_cast<std::size_t>(depth + 2);
  rep.argmax = hi;
  rep.argmin = lo;
  if (!(lo.value > 1e-300)) {
    rep.degenerate = true;
    rep.ratio_inf = rep.ratio_sup = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.ratio_inf = rep.ratio_sup = hi.value / lo.value;
  return rep;
}

}  // namespace subwalk
