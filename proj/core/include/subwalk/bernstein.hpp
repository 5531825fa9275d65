#pragma once

// Complete Bernstein functions: catalog, evaluation, inversion, scaling
// profile and axiom checks.
//
// Every PhiSpec is normalized on construction so that phi(1) = 1; the raw
// (unnormalized) catalog formula stays available through raw().

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace subwalk {

enum class PhiKind { stable, stable_mixture, stable_log, log_cosh, user_table };

const char* to_string(PhiKind kind) noexcept;

class MonotoneTable;

class PhiSpec {
 public:
  /// lambda^alpha, alpha in (0,1).
  static PhiSpec stable(double alpha);
  /// (lambda^alpha + lambda^beta) / 2, alpha, beta in (0,1).
  static PhiSpec stable_mixture(double alpha, double beta);
  /// lambda^alpha log(1+lambda)^beta, alpha in (0,1), beta in (0, 1-alpha).
  static PhiSpec stable_log(double alpha, double beta);
  /// log(cosh(sqrt(lambda)))^alpha, alpha in (0,1).
  static PhiSpec log_cosh(double alpha);
  /// Monotone interpolation (PCHIP in log-log coordinates) of samples
  /// (lambda_i, phi_i); the table must bracket lambda = 1.
  static PhiSpec user_table(std::vector<double> lambdas, std::vector<double> values);
  /// Generic constructor used by config parsing. A nonzero drift is rejected.
  static PhiSpec from_parameters(PhiKind kind, std::span<const double> params,
                                 double drift = 0.0);

  PhiKind kind() const noexcept { return kind_; }
  std::span<const double> parameters() const noexcept { return params_; }
  double alpha() const;
  double beta() const;
  double drift() const noexcept { return 0.0; }
  /// Scale factor c_norm with phi = c_norm * raw.
  double normalization() const noexcept { return c_norm_; }

  double raw(double lambda) const;
  double operator()(double lambda) const { return c_norm_ * raw(lambda); }

  /// Normalized analytic continuation to Re z > 0 (not for user_table).
  std::complex<double> operator()(std::complex<double> z) const;
  bool is_analytic() const noexcept { return kind_ != PhiKind::user_table; }

  /// Closed-form Levy density exists (stable, stable_mixture).
  bool has_levy_density() const noexcept;
  /// Stieltjes representing density phi(l) = int l/(l+s) sigma(s) ds is
  /// available (stable, stable_mixture, stable_log).
  bool has_stieltjes_density() const noexcept;
  /// sigma(s) = Im phi(-s + i0) / (pi s), normalized.
  double stieltjes_density(double s) const;

  /// Short literal, e.g. "stable:0.5", "mix:0.3,0.7".
  std::string label() const;

 private:
  PhiSpec(PhiKind kind, std::vector<double> params, std::shared_ptr<const MonotoneTable> table);
  void normalize_and_check();

  PhiKind kind_;
  std::vector<double> params_;
  std::shared_ptr<const MonotoneTable> table_;
  double c_norm_ = 1.0;
};

/// Normalized phi(lam); lam >= 0.
double eval_phi(const PhiSpec& spec, double lam);

/// Density of the Levy measure of the normalized phi at t > 0.
double eval_levy_density(const PhiSpec& spec, double t);

/// lambda in (0,1] with phi(lambda) = y, y in (0,1]. Geometric bisection.
double invert_phi(const PhiSpec& spec, double y);

struct ScalingProfile {
  double alpha_lower = 0.0;  // alpha_*
  double alpha_upper = 0.0;  // alpha^*
  double c_lower = 0.0;      // c_*
  double c_upper = 0.0;      // c^*
  int levels = 0;
  std::vector<double> grid;  // 2^0, 2^-1, ..., 2^-levels

  /// Harnack geometry constants B = 3 v (2/c_*)^{1/(2 alpha_*)} and
  /// b = 3 v (floor((3/c_*)^{1/alpha_*}) + 1).
  double harnack_B() const;
  long harnack_b() const;
};

ScalingProfile scaling_profile(const PhiSpec& spec, int num_dyadic_levels);

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest violation margin seen (<= 0 when passing)
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

ValidationReport verify_bernstein_axioms(const PhiSpec& spec, double tol);

}  // namespace subwalk
