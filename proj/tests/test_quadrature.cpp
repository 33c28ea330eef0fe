#include <doctest.h>

#include <cmath>

#include "dflab/error.hpp"
#include "dflab/quadrature.hpp"
#include "dflab/sections.hpp"
#include "support.hpp"

using namespace dflab;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2k-1 on [0,1]") {
  std::vector<double> x, w;
  for (int k = 1; k <= 20; ++k) {
    gauss_legendre(k, x, w);
    for (int d = 0; d < 2 * k; ++d) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += w[i] * std::pow(x[i], d);
      CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("FS rule reproduces the monomial beta integrals") {
  for (int n = 1; n <= 2; ++n) {
    const auto model = PolarizedManifoldModel::fubini_study(n);
    for (int ell : {1, 3, 6}) {
      const auto rule = build_quadrature(model, 2 * ell, {});
      CHECK(rule.exactness_degree >= 2 * ell);
      const double mass = integrate_nodes(rule, [](const QuadratureNode&) { return 1.0; });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
      SectionBasis basis(n, ell);
      for (const auto& m : basis.monomials()) {
        const double v = integrate_nodes(rule, [&](const QuadratureNode& node) {
          double l = 0.0;
          for (int k = 0; k <= n; ++k) l += m[k] * node.log_u[k];
          return std::exp(l);
        });
        // |Z^m|^2 / |Z|^{2 ell} = prod u_k^{m_k}.
        CHECK(v == doctest::Approx(testsupport::fs_gram_entry(m)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("insufficient resolution is reported with the achieved exactness") {
  const auto model = PolarizedManifoldModel::fubini_study(1);
  QuadratureOptions o;
  o.resolution = 2;
  try {
    build_quadrature(model, 16, o);
    FAIL("expected ExactnessError");
  } catch (const ExactnessError& e) {
    CHECK(e.achieved() < 16);
    CHECK(e.achieved() >= 0);
  }
  CHECK_THROWS_AS(build_quadrature(model, -1, {}), ConfigError);
}

TEST_CASE("torus-reduced rule has the same mass and moment integrals") {
  const auto model = PolarizedManifoldModel::perturbed(2, 0.1, Potential::U);
  QuadratureOptions full, reduced;
  reduced.torus_reduced = true;
  const auto a = build_quadrature(model, 8, full);
  const auto b = build_quadrature(model, 8, reduced);
  CHECK(b.nodes.size() < a.nodes.size());
  auto f = [](const QuadratureNode& node) { return std::exp(node.log_u[0]) * std::exp(2 * node.log_u[2]); };
  CHECK(integrate_nodes(a, f) == doctest::Approx(integrate_nodes(b, f)).epsilon(1e-13));
}
