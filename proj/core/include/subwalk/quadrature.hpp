#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace subwalk {

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-13;
  int max_panels = 4000;
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
  Panel worst;  // panel with the largest error estimate at exit
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double resabs = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    kronrod += kKronrodWeights[j] * sum;
    resabs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  const double mean = 0.5 * kronrod;
  double resasc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double scale = std::abs(half);
  resasc *= scale;
  resabs *= scale;
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return Panel{a, b, kronrod * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b].
///
/// `breakpoints` (inside (a, b), any order) seed the initial panels; put them
/// at known kinks or integrable singularities. The panel with the largest
/// error is bisected until the summed error meets the tolerance or
/// `max_panels` is reached. Final summation runs over panels in left-endpoint
/// order, so the result does not depend on the refinement history.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {},
                           std::span<const double> breakpoints = {}) {
  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Panel> panels;
  panels.reserve(64);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push_back(detail::kronrod15(f, cuts[i], cuts[i + 1]));
  }
  auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::make_heap(panels.begin(), panels.end(), by_error);

  QuadratureResult out;
  for (;;) {
    double value = 0.0;
    double error = 0.0;
    for (const Panel& p : panels) {
      value += p.value;
      error += p.error;
    }
    out.value = value;
    out.error = error;
    out.panels = static_cast<int>(panels.size());
    if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(panels.size()) >= opt.max_panels) break;
    std::pop_heap(panels.begin(), panels.end(), by_error);
    const Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      panels.push_back(worst);
      std::push_heap(panels.begin(), panels.end(), by_error);
      break;
    }
    panels.push_back(detail::kronrod15(f, worst.a, mid));
    std::push_heap(panels.begin(), panels.end(), by_error);
    panels.push_back(detail::kronrod15(f, mid, worst.b));
    std::push_heap(panels.begin(), panels.end(), by_error);
  }

  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double sum = 0.0, comp = 0.0;  // Neumaier
  double error = 0.0;
  for (const Panel& p : panels) {
    const double t = sum + p.value;
    comp += std::abs(sum) >= std::abs(p.value) ? (sum - t) + p.value : (p.value - t) + sum;
    sum = t;
    error += p.error;
    if (p.error > out.worst.error || out.worst.b == out.worst.a) out.worst = p;
  }
  out.value = sum + comp;
  out.error = error;
  return out;
}

/// As `integrate`, but throws a numeric error naming the worst panel when the
/// tolerance is not met.
template <class F>
double integrate_or_throw(F&& f, double a, double b, const QuadratureOptions& opt,
                          std::span<const double> breakpoints, const char* what);

std::string describe_panel(const Panel& p);
[[noreturn]] void throw_quadrature_failure(const char* what, const QuadratureResult& r);

template <class F>
double integrate_or_throw(F&& f, double a, double b, const QuadratureOptions& opt,
                          std::span<const double> breakpoints, const char* what) {
  QuadratureResult r = integrate(f, a, b, opt, breakpoints);
  if (!r.converged) throw_quadrature_failure(what, r);
  return r.value;
}

}  // namespace subwalk
