#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dflab/manifold.hpp"

namespace dflab {

/// One node of a rule on X. Weights are stored as logarithms because
/// orbit-adapted rules place nodes where omega^n is astronomically small.
struct QuadratureNode {
  ChartPoint point;
  std::vector<double> log_u;  // log(|Z_k|^2/|Z|^2), k = 0..n
  double log_weight = 0.0;    // weight relative to omega_FS^n
  double density = 1.0;       // omega^n / omega_FS^n at the node
  double weight() const;
};

enum class RuleKind {
  /// Gauss-Legendre on the moment simplex times a trapezoid on the torus.
  MomentTorus,
  /// Nodes pulled back from the moment polytope of a shifted embedding.
  OrbitAdapted,
};

struct QuadratureOptions {
  int resolution = 32;         // Gauss-Legendre nodes per simplex coordinate
  int angular = 0;             // trapezoid nodes per torus angle; 0 = automatic
  bool torus_reduced = false;  // one torus sample; valid for invariant integrands only
};

struct QuadratureRule {
  RuleKind kind = RuleKind::MomentTorus;
  int dimension = 1;
  std::vector<QuadratureNode> nodes;
  /// Largest 2*ell such that all degree-ell monomial Gram integrals are exact
  /// for the Fubini-Study metric.
  int exactness_degree = 0;
  int resolution = 0;
  int angular = 0;
  bool torus_reduced = false;
  std::string description;
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule integrating degree <= target_exactness monomial pair products exactly
/// against omega_FS^n. Throws ExactnessError (with the achieved degree) when
/// the resolution is too low, ConfigError on bad arguments.
QuadratureRule build_quadrature(const PolarizedManifoldModel& model, int target_exactness,
                                const QuadratureOptions& options = {});

/// Sum of weight * density * f over the nodes, reduced in a fixed order.
/// Throws NumericalError naming the first node with a non-finite value.
double integrate(const QuadratureRule& rule, const std::function<double(const ChartPoint&)>& f);
double integrate_nodes(const QuadratureRule& rule,
                       const std::function<double(const QuadratureNode&)>& f);

/// Audit export: chart, coordinates, weight, log weight, density.
void write_rule_csv(const QuadratureRule& rule, std::ostream& out);

}  // namespace dflab
