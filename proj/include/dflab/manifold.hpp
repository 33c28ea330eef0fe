#pragma once

#include <Eigen/Dense>
#include <complex>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "dflab/rational.hpp"

namespace dflab {

using Complex = std::complex<double>;

enum class Family { ProjectiveSpace };

/// Real-analytic potentials phi(u) of u = |Z_0|^2 / |Z|^2 used to perturb
/// the Fubini-Study metric: h = h_FS * exp(-eps * phi).
enum class Potential { U, USquared, UOneMinusU };

std::string to_string(Potential p);
Potential parse_potential(const std::string& name);

struct MetricSpec {
  enum class Kind { FubiniStudy, Perturbed };
  Kind kind = Kind::FubiniStudy;
  double eps = 0.0;
  Potential phi = Potential::U;
};

/// A point of P^n in the affine chart {Z_chart = 1}; `coords` lists Z_k/Z_chart
/// for k != chart in increasing k.
struct ChartPoint {
  int chart = 0;
  std::vector<Complex> coords;
};

/// Homogeneous coordinates of a chart point with Z_chart = 1.
std::vector<Complex> homogeneous(const ChartPoint& p);

/// Re-express homogeneous coordinates in the chart of the largest modulus.
ChartPoint best_chart(const std::vector<Complex>& homog);

/// log(|Z_k|^2 / |Z|^2) for k = 0..n.
std::vector<double> log_moment(const ChartPoint& p);

/// (P^n, O(1), h). Immutable after construction.
class PolarizedManifoldModel {
 public:
  static constexpr double kMaxEps = 0.2;

  PolarizedManifoldModel(int n, MetricSpec metric);

  static PolarizedManifoldModel fubini_study(int n);
  static PolarizedManifoldModel perturbed(int n, double eps, Potential phi);
  static PolarizedManifoldModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Family family() const { return Family::ProjectiveSpace; }
  int dimension() const { return n_; }
  const MetricSpec& metric() const { return metric_; }

  /// c_1(L)^n[X]; O(1) on P^n has degree 1.
  int degree() const { return 1; }

  /// True for Fubini-Study and for the eps = 0 perturbation.
  bool is_fubini_study() const;

  /// Every catalog metric depends on |Z_k| only.
  bool is_torus_invariant() const { return true; }

  /// eps * phi(u) and its first two u-derivatives.
  double potential(double u0) const;
  double potential_d1(double u0) const;
  double potential_d2(double u0) const;

  /// Hermitian matrix of d dbar of the Kahler potential of omega in the
  /// affine coordinates of `p` (no 1/2pi factor).
  Eigen::MatrixXcd kahler_matrix(const ChartPoint& p) const;

  /// Same for the Fubini-Study form.
  Eigen::MatrixXcd fubini_study_matrix(const ChartPoint& p) const;

  /// omega^n / omega_FS^n at p. Throws NumericalError if omega is not
  /// positive definite there.
  double volume_density(const ChartPoint& p) const;

  /// log of the pointwise factor |s|_h^2 / |s(z)|^2 for a degree-ell section
  /// written in the chart of p.
  double log_hermitian_factor(const ChartPoint& p, int ell) const;

 private:
  int n_;
  MetricSpec metric_;
};

/// S_omega = n c_1(X) c_1(L)^{n-1}[X] / c_1(L)^n[X] = n(n+1) on P^n.
/// Throws Unsupported for metrics that are not constant scalar curvature.
Rational scalar_curvature(const PolarizedManifoldModel& model);

}  // namespace dflab
