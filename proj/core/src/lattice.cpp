#include "subwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "fft.hpp"
#include "subwalk/error.hpp"
#include "subwalk/format.hpp"
#include "subwalk/quadrature.hpp"

namespace subwalk {

namespace {

constexpr double kClip = 1e-13;
constexpr std::size_t kMaxCell = std::size_t{1} << 24;

std::size_t cell_size(int d, int period) {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(period);
  return n;
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

int next_power_of_two(long n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void check_exact_dim(int d) {
  if (d < 1 || d > kMaxExactDim) {
    fail(ErrorKind::domain, "exact kernels need d in 1..3: got " + std::to_string(d));
  }
}

void check_grid(int d, int grid, int radius) {
  check_exact_dim(d);
  if (!is_power_of_two(grid)) {
    fail(ErrorKind::domain, "grid must be a power of two: got " + std::to_string(grid));
  }
  if (radius < 0 || static_cast<long>(grid) < 4L * radius) {
    fail(ErrorKind::domain, "grid " + std::to_string(grid) + " is below 4 * radius " +
                                std::to_string(radius));
  }
  if (cell_size(d, grid) > kMaxCell) {
    fail(ErrorKind::domain, "grid " + std::to_string(grid) + "^" + std::to_string(d) +
                                " exceeds the dense-cell limit");
  }
}

std::size_t fold(std::size_t c, std::size_t period) { return std::min(c, period - c); }

// Averages the cell over the orbits of the hyperoctahedral group (sign flips
// and coordinate permutations), so that symmetric kernels are bit-identical
// across each orbit.
void symmetrize(std::vector<double>& cell, int d, int period) {
  if (d == 1) {
    const auto n = static_cast<std::size_t>(period);
    for (std::size_t c = 1; c < n - c; ++c) {
      const double v = 0.5 * (cell[c] + cell[n - c]);
      cell[c] = v;
      cell[n - c] = v;
    }
    return;
  }
  const auto n = static_cast<std::size_t>(period);
  std::vector<std::size_t> canon(cell.size());
  std::array<std::size_t, kMaxExactDim> coord{};
  for (std::size_t idx = 0; idx < cell.size(); ++idx) {
    std::size_t rest = idx;
    for (int i = d - 1; i >= 0; --i) {
      coord[i] = fold(rest % n, n);
      rest /= n;
    }
    std::sort(coord.begin(), coord.begin() + d);
    std::size_t key = 0;
    for (int i = 0; i < d; ++i) key = key * n + coord[i];
    canon[idx] = key;
  }
  std::vector<double> sum(cell.size(), 0.0);
  std::vector<int> count(cell.size(), 0);
  for (std::size_t idx = 0; idx < cell.size(); ++idx) {
    sum[canon[idx]] += cell[idx];
    ++count[canon[idx]];
  }
  for (std::size_t idx = 0; idx < cell.size(); ++idx) {
    cell[idx] = sum[canon[idx]] / count[canon[idx]];
  }
}

// Clips rounding negatives; returns the clipped mass.
double clip_negatives(std::vector<double>& cell, const char* what) {
  double clipped = 0.0;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    double& v = cell[i];
    if (v < 0.0) {
      if (v < -kClip) {
        fail(ErrorKind::numeric, std::string(what) + ": negative value " + format_double(v) +
                                     " at cell index " + std::to_string(i));
      }
      clipped -= v;
      v = 0.0;
    }
  }
  return clipped;
}

double neumaier_sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

// 1 - Psi per axis-mode k: (2/d) sin^2(pi k / N), one entry per k in [0, N).
std::vector<double> axis_gaps(int d, int period) {
  std::vector<double> g(static_cast<std::size_t>(period));
  for (int k = 0; k < period; ++k) {
    const double s = std::sin(std::numbers::pi * k / period);
    g[k] = 2.0 * s * s / d;
  }
  return g;
}

// Evaluates symbol(gap) on every Fourier node of the cell, computing each
// value once per folded, sorted mode tuple, then inverts. Returns the real
// cell normalized by N^-d.
template <class Symbol>
std::vector<double> invert_symbol(int d, int period, Symbol&& symbol) {
  const auto n = static_cast<std::size_t>(period);
  const auto gaps = axis_gaps(d, period);
  const std::size_t size = cell_size(d, period);
  std::vector<std::complex<double>> data(size);

  const std::size_t half = n / 2 + 1;
  std::vector<double> reduced(cell_size(d, static_cast<int>(half)), 0.0);
  std::vector<char> done(reduced.size(), 0);
  std::array<std::size_t, kMaxExactDim> coord{};
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rest = idx;
    for (int i = d - 1; i >= 0; --i) {
      coord[i] = fold(rest % n, n);
      rest /= n;
    }
    std::sort(coord.begin(), coord.begin() + d);
    std::size_t key = 0;
    double gap = 0.0;
    for (int i = 0; i < d; ++i) {
      key = key * half + coord[i];
      gap += gaps[coord[i]];
    }
    if (!done[key]) {
      reduced[key] = symbol(gap, coord, d);
      done[key] = 1;
    }
    data[idx] = reduced[key];
  }
  const std::array<int, 3> extents{period, period, period};
  detail::dft_inplace(data, std::span<const int>(extents.data(), d), +1);
  std::vector<double> cell(size);
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) cell[i] = data[i].real() * scale;
  return cell;
}

bool is_nyquist_corner(const std::array<std::size_t, kMaxExactDim>& coord, int d,
                       std::size_t period) {
  for (int i = 0; i < d; ++i) {
    if (2 * coord[i] != period) return false;
  }
  return true;
}

// (1 - phi(1 - Psi))^n with 1 - Psi passed as gap.
double symbol_power(const PhiSpec& spec, double gap, int n) {
  if (n == 0) return 1.0;
  const double f = spec(gap);
  const double s = 1.0 - f;
  if (std::abs(s) > 1.0 + 1e-15) {
    fail(ErrorKind::numeric, "symbol modulus exceeds 1: 1 - phi(" + format_double(gap) +
                                 ") = " + format_double(s));
  }
  if (s > 0.0) return std::exp(n * std::log1p(-f));
  return std::pow(s, n);
}

LatticeKernel finish(int d, int period, int radius, KernelMethod method, double time,
                     std::vector<double> cell, double defect, const char* what) {
  symmetrize(cell, d, period);
  defect += clip_negatives(cell, what);
  defect += std::abs(1.0 - neumaier_sum(cell));
  return LatticeKernel(d, period, radius, method, time, std::move(cell), defect);
}

}  // namespace

Site make_site(std::initializer_list<std::int64_t> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) {
    fail(ErrorKind::domain, "site has more than 8 coordinates");
  }
  Site x{};
  std::copy(coords.begin(), coords.end(), x.begin());
  return x;
}

std::string to_string(const Site& x, int dim) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << x[i];
  os << ')';
  return os.str();
}

const char* to_string(KernelMethod method) noexcept {
  switch (method) {
    case KernelMethod::convolution: return "convolution";
    case KernelMethod::spectral: return "spectral";
    case KernelMethod::poissonized: return "poissonized";
  }
  return "unknown";
}

LatticeKernel::LatticeKernel(int dim, int period, int radius, KernelMethod method, double time,
                             std::vector<double> cell, double mass_defect)
    : dim_(dim),
      period_(period),
      radius_(radius),
      method_(method),
      time_(time),
      cell_(std::move(cell)),
      mass_defect_(mass_defect) {
  check_exact_dim(dim);
  if (2L * radius >= period) {
    fail(ErrorKind::domain, "reporting box of radius " + std::to_string(radius) +
                                " does not fit a cell of period " + std::to_string(period));
  }
  if (cell_.size() != cell_size(dim, period)) {
    fail(ErrorKind::validation, "kernel cell has the wrong size");
  }
}

std::size_t LatticeKernel::index(const Site& x) const noexcept {
  std::size_t idx = 0;
  const std::int64_t n = period_;
  for (int i = 0; i < dim_; ++i) {
    std::int64_t c = x[i] % n;
    if (c < 0) c += n;
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
  }
  return idx;
}

Site LatticeKernel::site_of(std::size_t index) const noexcept {
  Site x{};
  const auto n = static_cast<std::size_t>(period_);
  for (int i = dim_ - 1; i >= 0; --i) {
    auto c = static_cast<std::int64_t>(index % n);
    index /= n;
    if (2 * c > period_) c -= period_;
    x[i] = c;
  }
  return x;
}

double LatticeKernel::total_mass() const noexcept { return neumaier_sum(cell_); }

double LatticeKernel::box_mass() const noexcept {
  double s = 0.0, c = 0.0;
  for_each_in_box([&](const Site&, double v) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  });
  return s + c;
}

LatticeKernel LatticeKernel::scaled(double factor) const {
  std::vector<double> out(cell_);
  for (double& v : out) v *= factor;
  return LatticeKernel(dim_, period_, radius_, method_, time_, std::move(out),
                       mass_defect_ * std::abs(factor));
}

double srw_symbol_gap(std::span<const double> theta) {
  double g = 0.0;
  for (double t : theta) {
    const double s = std::sin(0.5 * t);
    g += 2.0 * s * s;
  }
  return g / static_cast<double>(theta.size());
}

LatticeKernel srw_kernel(int d, int m, int radius) {
  check_exact_dim(d);
  if (m < 0) fail(ErrorKind::domain, "step count must be >= 0: got " + std::to_string(m));
  if (radius < m) {
    fail(ErrorKind::domain, "radius " + std::to_string(radius) + " is below the step count " +
                                std::to_string(m));
  }
  const int period = 2 * radius + 1;
  if (cell_size(d, period) > kMaxCell) fail(ErrorKind::domain, "srw box exceeds the cell limit");
  const std::size_t size = cell_size(d, period);
  std::vector<double> cur(size, 0.0), next(size);
  cur[0] = 1.0;
  std::array<std::size_t, kMaxExactDim> stride{};
  stride[d - 1] = 1;
  for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * period;
  const double w = 1.0 / (2.0 * d);
  const auto n = static_cast<std::size_t>(period);
  for (int step = 0; step < m; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      const double v = cur[idx];
      if (v == 0.0) continue;
      for (int i = 0; i < d; ++i) {
        const std::size_t c = (idx / stride[i]) % n;
        const std::size_t base = idx - c * stride[i];
        next[base + ((c + 1) % n) * stride[i]] += w * v;
        next[base + ((c + n - 1) % n) * stride[i]] += w * v;
      }
    }
    std::swap(cur, next);
  }
  return LatticeKernel(d, period, radius, KernelMethod::convolution, m, std::move(cur), 0.0);
}

LatticeKernel subordinate_step_kernel(int d, const SubordinationWeights& w, int radius, int grid) {
  check_exact_dim(d);
  if (radius < 1) fail(ErrorKind::domain, "radius must be >= 1");
  validate(w);
  if (grid == 0) grid = next_power_of_two(4L * radius);
  check_grid(d, grid, radius);

  const std::size_t M = w.terms();
  // suffix[m] = sum_{j > m} a_j + tail, m = 0..M
  std::vector<double> suffix(M + 1);
  suffix[M] = w.tail_mass;
  for (std::size_t m = M; m >= 1; --m) suffix[m - 1] = suffix[m] + w[m];
  const double total = w.partial_sum() + w.tail_mass;
  // Alternating tail sum_{m > M} (-1)^m a_m for non-increasing a_m.
  const double aM = w[M];
  const double alt_tail =
      w.tail_mass > 0.0 ? ((M + 1) % 2 == 0 ? 1.0 : -1.0) * 0.5 * std::min(aM, w.tail_mass) : 0.0;
  const double alt_error =
      std::min(w.tail_mass, M >= 2 ? std::abs(aM - w[M - 1]) : aM);

  double residual = 0.0;
  auto symbol = [&](double gap, const std::array<std::size_t, kMaxExactDim>& coord, int dd) {
    if (gap == 0.0) return total;
    const double psi = 1.0 - gap;
    if (is_nyquist_corner(coord, dd, static_cast<std::size_t>(grid))) {
      double s = 0.0;
      for (std::size_t m = M; m >= 1; --m) s += (m % 2 == 0 ? 1.0 : -1.0) * w[m];
      residual = std::max(residual, alt_error);
      return s + alt_tail;
    }
    const double apsi = std::abs(psi);
    double s = 0.0, p = 1.0;
    std::size_t m = 1;
    for (; m <= M; ++m) {
      p *= psi;
      s += w[m] * p;
      if (std::abs(p) * suffix[m] <= 1e-18) break;
    }
    if (m > M) residual = std::max(residual, std::pow(apsi, static_cast<double>(M + 1)) * w.tail_mass);
    return s;
  };
  std::vector<double> cell = invert_symbol(d, grid, symbol);
  double defect = residual + std::abs(1.0 - total);
  if (defect > kDefectLimit) {
    const double gap_min = 2.0 * std::pow(std::sin(std::numbers::pi / grid), 2) / d;
    const double need =
        std::max(2.0 * M, std::log(std::max(w.tail_mass, kDefectLimit) / kDefectLimit) / gap_min);
    fail(ErrorKind::numeric, "step kernel defect " + format_double(defect) + " exceeds 1e-6 with M = " +
                                 std::to_string(M) + " on grid " + std::to_string(grid) +
                                 "; use at least M = " + std::to_string(static_cast<long>(std::ceil(need))) +
                                 " terms or a smaller radius");
  }
  return finish(d, grid, radius, KernelMethod::convolution, 1.0, std::move(cell), defect,
                "subordinate step kernel");
}

LatticeKernel convolve(const LatticeKernel& a, const LatticeKernel& b) {
  if (a.dim() != b.dim() || a.period() != b.period()) {
    fail(ErrorKind::domain, "convolve needs kernels on the same cell");
  }
  const int d = a.dim();
  const int period = a.period();
  const std::size_t size = a.cell().size();
  std::vector<double> out(size, 0.0);
  if (d == 1) {
    const auto n = static_cast<std::size_t>(period);
    const auto av = a.cell();
    const auto bv = b.cell();
    for (std::size_t x = 0; x < n; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < n; ++y) s += av[y] * bv[(x + n - y) % n];
      out[x] = s;
    }
  } else {
    std::vector<std::complex<double>> fa(a.cell().begin(), a.cell().end());
    std::vector<std::complex<double>> fb(b.cell().begin(), b.cell().end());
    const std::array<int, 3> extents{period, period, period};
    const std::span<const int> ext(extents.data(), d);
    detail::dft_inplace(fa, ext, -1);
    detail::dft_inplace(fb, ext, -1);
    for (std::size_t i = 0; i < size; ++i) fa[i] *= fb[i];
    detail::dft_inplace(fa, ext, +1);
    const double scale = 1.0 / static_cast<double>(size);
    for (std::size_t i = 0; i < size; ++i) out[i] = fa[i].real() * scale;
  }
  symmetrize(out, d, period);
  const double clipped = clip_negatives(out, "convolution");
  const double defect = a.mass_defect() + b.mass_defect() + clipped;
  if (defect > kDefectLimit) {
    fail(ErrorKind::numeric, "convolution defect " + format_double(defect) + " exceeds 1e-6");
  }
  return LatticeKernel(d, period, std::min(a.radius(), b.radius()), KernelMethod::convolution,
                       a.time() + b.time(), std::move(out), defect);
}

LatticeKernel nstep_kernel_convolve(const LatticeKernel& step, int n) {
  if (n < 0) fail(ErrorKind::domain, "step count must be >= 0: got " + std::to_string(n));
  if (n == 0) {
    std::vector<double> cell(step.cell().size(), 0.0);
    cell[0] = 1.0;
    return LatticeKernel(step.dim(), step.period(), step.radius(), KernelMethod::convolution, 0.0,
                         std::move(cell), 0.0);
  }
  std::optional<LatticeKernel> result;
  LatticeKernel power = step;
  for (int bits = n;;) {
    if (bits & 1) result = result ? convolve(*result, power) : power;
    bits >>= 1;
    if (!bits) break;
    power = convolve(power, power);
  }
  return *result;
}

LatticeKernel nstep_kernel_spectral(const PhiSpec& spec, int d, int n, int grid, int radius) {
  if (n < 0) fail(ErrorKind::domain, "step count must be >= 0: got " + std::to_string(n));
  if (radius == 0) radius = grid / 4;
  check_grid(d, grid, radius);
  auto cell = invert_symbol(d, grid, [&](double gap, const auto&, int) {
    return symbol_power(spec, gap, n);
  });
  return finish(d, grid, radius, KernelMethod::spectral, n, std::move(cell), 0.0,
                "spectral kernel");
}

LatticeKernel ctrw_kernel(const PhiSpec& spec, int d, double t, int grid, int radius) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    fail(ErrorKind::domain, "time must be positive: got " + format_double(t));
  }
  if (radius == 0) radius = grid / 4;
  check_grid(d, grid, radius);
  auto cell = invert_symbol(d, grid, [&](double gap, const auto&, int) {
    return std::exp(-t * spec(gap));
  });
  return finish(d, grid, radius, KernelMethod::poissonized, t, std::move(cell), 0.0,
                "ctrw kernel");
}

LatticeKernel ctrw_kernel_poisson_sum(const PhiSpec& spec, int d, double t, int grid, int radius) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    fail(ErrorKind::domain, "time must be positive: got " + format_double(t));
  }
  if (radius == 0) radius = grid / 4;
  check_grid(d, grid, radius);
  std::vector<double> acc(cell_size(d, grid), 0.0);
  double cdf = 0.0;
  double defect = 0.0;
  for (int k = 0;; ++k) {
    const double pk = std::exp(-t + k * std::log(t) - std::lgamma(k + 1.0));
    const LatticeKernel pn = nstep_kernel_spectral(spec, d, k, grid, radius);
    const auto v = pn.cell();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += pk * v[i];
    defect += pk * pn.mass_defect();
    cdf += pk;
    if (k > t && 1.0 - cdf <= 1e-12) break;
  }
  defect += std::max(0.0, 1.0 - cdf);
  return finish(d, grid, radius, KernelMethod::poissonized, t, std::move(acc), defect,
                "poisson-sum kernel");
}

double on_diagonal(const PhiSpec& spec, int d, int n) {
  check_exact_dim(d);
  if (n < 0) fail(ErrorKind::domain, "step count must be >= 0: got " + std::to_string(n));
  if (n == 0) return 1.0;
  const double pi = std::numbers::pi;
  const double width = std::sqrt(2.0 * invert_phi(spec, 1.0 / n));
  std::vector<double> cuts;
  for (double f : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    if (f * width < pi) cuts.push_back(f * width);
  }
  QuadratureOptions opt;
  opt.abs_tol = 1e-17;
  opt.rel_tol = 1e-12;
  opt.max_panels = 2000;

  auto half_gap = [](double th) {
    const double s = std::sin(0.5 * th);
    return 2.0 * s * s;
  };
  // Integrates over the remaining `left` axes with the gap sum so far.
  std::function<double(int, double)> level = [&](int left, double gap_sum) -> double {
    if (left == 0) return symbol_power(spec, gap_sum / d, n);
    return integrate_or_throw(
        [&](double th) { return level(left - 1, gap_sum + half_gap(th)); }, 0.0, pi, opt, cuts,
        "on-diagonal cubature");
  };
  return level(d, 0.0) / std::pow(pi, d);
}

}  // namespace subwalk
