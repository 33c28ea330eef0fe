#pragma once

#include <span>
#include <vector>

#include "dflab/sections.hpp"

namespace dflab {

/// Nodes for integrals against (Phi_c^* omega_FS)^n, where Phi_c is the
/// embedding by e^{c_alpha} sigma_alpha for a monomial-aligned basis.
///
/// The gradient of log Q_c in logarithmic torus coordinates pushes this
/// measure forward to n! times Lebesgue measure on ell * (standard simplex).
/// The simplex is cut into unit lattice simplices carrying tanh-sinh
/// (n = 1) or collapsed Gauss-Legendre (n = 2) rules, and every node is pulled
/// back to X by solving grad log Q_c = y with a safeguarded Newton method.
/// This stays accurate for shifts of any size, where rules fixed on X miss
/// the concentrating mass.
struct OrbitRule {
  int dimension = 0;
  int ell = 0;
  int order = 0;
  std::vector<std::vector<double>> log_u;  // moment coordinates of each node
  std::vector<double> weight;              // sums to ell^n
};

struct OrbitRuleOptions {
  /// n = 1: tanh-sinh steps per unit parameter; n = 2: Gauss-Legendre nodes
  /// per panel coordinate. 0 selects 16 and 4 respectively.
  int order = 0;
  double newton_tolerance = 1e-12;
};

/// Throws ConfigError for bases that are not monomial-aligned or n > 2, and
/// NumericalError if a node cannot be pulled back.
OrbitRule orbit_adapted_rule(const OrthonormalBasis& onb, std::span<const double> shift,
                             const OrbitRuleOptions& options = {});

}  // namespace dflab
