#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "dflab/orbit_rule.hpp"
#include "dflab/testconfig.hpp"

namespace dflab {

struct SlopeOptions {
  /// Relative tolerance on the total pullback mass ell^n when a shifted
  /// measure is integrated with a rule fixed on X.
  double mass_tolerance = 1e-6;
  OrbitRuleOptions orbit;
};

/// Shift c_alpha(s) = s * b_alpha / |b|_inf = s * ell * b_alpha / max|b|.
std::vector<double> orbit_shift(const TestConfiguration& config, double s);

/// Derivative of the normalized log Chow norm along the orbit at parameter s:
///   (|b|_1 ell^n)^{-1} * integral of <b, mu_c> (Phi_c^* omega_FS)^n,
/// with <b, mu_c> = sum b e^{2c}|sigma|^2 / sum e^{2c}|sigma|^2.
/// At s = 0 the rule on X is used. For s != 0, torus-compatible
/// configurations use an orbit-adapted rule; others use the rule on X and
/// fail with NumericalError when the pullback mass is not resolved.
double fdot(const TestConfiguration& config, const PolarizedManifoldModel& model,
            const QuadratureRule& rule, double s, const SlopeOptions& options = {});
/// Same, with the rule the configuration's basis was built from.
double fdot(const TestConfiguration& config, const PolarizedManifoldModel& model, double s,
            const SlopeOptions& options = {});

struct SlopeZeroDiagnostics {
  double fdot0 = 0.0;
  double r1 = 0.0;  // pullback-volume part
  double r2 = 0.0;  // Bergman-kernel part
  /// Upper bounds obtained by replacing b by |b| and the differences by
  /// their absolute values.
  double r1_bound = 0.0;
  double r2_bound = 0.0;
  double c3 = 0.0;  // sup |Phi^* omega_FS^n / omega^n - ell^n| / ell^{n-1}
  double n_fact_c3 = 0.0;
  double c4 = 0.0;  // sup |B^{-1} - n!/ell^n| * ell^{n+1}
  double c5 = 0.0;  // n! c3 + c4

  nlohmann::json to_json() const;
};

SlopeZeroDiagnostics slope_zero_decomposition(const TestConfiguration& config,
                                              const PolarizedManifoldModel& model,
                                              const QuadratureRule& rule);
SlopeZeroDiagnostics slope_zero_decomposition(const TestConfiguration& config,
                                              const PolarizedManifoldModel& model);

struct SlopeProfile {
  int ell = 0;
  std::vector<double> s;
  std::vector<double> fdot;
  std::vector<double> f;  // cumulative trapezoid from s.front(), f(s.front()) = 0
  double monotonicity_defect = 0.0;    // min of fdot[i+1] - fdot[i]
  double second_difference_min = 0.0;  // min of f[i+1] - 2 f[i] + f[i-1]
};

/// Default grid {-6, -5.5, ..., 0}.
std::vector<double> default_s_grid();

/// Throws ConfigError unless the grid is nonpositive, strictly increasing,
/// contains 0 and has at least 3 points.
void validate_s_grid(const std::vector<double>& grid);

SlopeProfile slope_profile(const TestConfiguration& config, const PolarizedManifoldModel& model,
                           const std::vector<double>& grid, const SlopeOptions& options = {});

struct AsymptoteFit {
  double a = 0.0;  // limit as s -> -infinity
  double b = 0.0;
  double kappa = 0.0;
  double rms = 0.0;
};

/// Least-squares fit of L(s) ~ a + b e^{kappa s} with b >= 0, kappa > 0.
AsymptoteFit fit_asymptote(const std::vector<double>& s, const std::vector<double>& values);

struct F1Report {
  nlohmann::json sequence;
  std::vector<double> s_grid;
  std::size_t tail_start = 0;
  std::vector<std::size_t> included;  // sequence indices with a profile
  std::vector<int> exponents;         // exponents of the included configurations
  std::vector<SlopeProfile> profiles;
  std::vector<double> tail_liminf;  // L(s) = min_{j >= j0} fdot_j(s)
  /// min over the grid of L; equals L(s_min) when L is non-decreasing.
  double estimate = 0.0;
  double l_at_smin = 0.0;
  double l_at_zero = 0.0;
  double monotonicity_defect = 0.0;
  double upper_bound = 0.0;        // max_j fdot_j(0)
  double zero_slope_scaled = 0.0;  // max_j ell_j |fdot_j(0)|
  AsymptoteFit asymptote;
  std::vector<double> tail_sensitivity;  // estimate for each tail start
  std::vector<std::string> flags;

  nlohmann::json to_json() const;
  std::string slopes_csv() const;
  std::string plot_data() const;
};

/// Throws ConfigError if the sequence violates the growth condition or the
/// tail start is out of range, NumericalError if no profile succeeds.
F1Report f1_estimate(const ConfigSequence& seq, const PolarizedManifoldModel& model,
                     const std::vector<double>& grid, std::size_t tail_start,
                     const SlopeOptions& options = {});

}  // namespace dflab
