#include <doctest.h>

#include <random>

#include "dflab/error.hpp"
#include "dflab/manifold.hpp"
#include "support.hpp"

using namespace dflab;

namespace {

ChartPoint random_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> z(n + 1);
  for (auto& x : z) x = {g(rng), g(rng)};
  return best_chart(z);
}

}  // namespace

TEST_CASE("chart round trip keeps the projective point") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const auto p = random_point(rng, n);
    const auto z = homogeneous(p);
    CHECK(z[p.chart] == Complex(1.0));
    for (const auto& c : z) CHECK(std::abs(c) <= 1.0 + 1e-15);
    const auto q = best_chart(z);
    CHECK(q.chart == p.chart);
    const auto lu = log_moment(p);
    double total = 0.0;
    for (double v : lu) total += std::exp(v);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("Fubini-Study volume density is one") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    const auto m = PolarizedManifoldModel::fubini_study(n);
    for (int i = 0; i < 20; ++i) CHECK(m.volume_density(random_point(rng, n)) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("perturbed P1 density matches the moment-map closed form") {
  std::mt19937_64 rng(5);
  const Potential kinds[] = {Potential::U, Potential::USquared, Potential::UOneMinusU};
  for (int k = 0; k < 3; ++k) {
    for (double eps : {0.05, 0.1, -0.15}) {
      const auto m = PolarizedManifoldModel::perturbed(1, eps, kinds[k]);
      for (int i = 0; i < 20; ++i) {
        const auto p = random_point(rng, 1);
        const double u = std::exp(log_moment(p)[0]);
        const double want = testsupport::p1_perturbed_density(u, eps, testsupport::Phi{k});
        CHECK(m.volume_density(p) == doctest::Approx(want).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("Kahler matrix equals a finite-difference Laplacian of the potential") {
  // d dbar psi = Laplacian(psi) / 4 in one complex variable.
  const testsupport::Phi phi{2};
  const double eps = 0.1;
  const auto m = PolarizedManifoldModel::perturbed(1, eps, Potential::UOneMinusU);
  auto psi = [&](double x, double y) {
    const double r2 = x * x + y * y;
    return std::log1p(r2) + eps * phi(1.0 / (1.0 + r2));
  };
  const double h = 1e-3;
  for (double x : {0.1, 0.7, -1.3}) {
    for (double y : {0.0, 0.4, 2.0}) {
      const double lap = (psi(x + h, y) + psi(x - h, y) + psi(x, y + h) + psi(x, y - h) - 4 * psi(x, y)) / (h * h);
      const ChartPoint p{0, {Complex(x, y)}};
      CHECK(m.kahler_matrix(p)(0, 0).real() == doctest::Approx(lap / 4).epsilon(1e-5));
    }
  }
}

TEST_CASE("scalar curvature is exact on Fubini-Study and refused otherwise") {
  for (int n = 1; n <= 3; ++n) CHECK(scalar_curvature(PolarizedManifoldModel::fubini_study(n)) == Rational(n * (n + 1)));
  CHECK_THROWS_AS(scalar_curvature(PolarizedManifoldModel::perturbed(1, 0.1, Potential::U)), Unsupported);
  CHECK(scalar_curvature(PolarizedManifoldModel::perturbed(2, 0.0, Potential::U)) == Rational(6));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(PolarizedManifoldModel::perturbed(1, 0.5, Potential::U), ConfigError);
  CHECK_THROWS_AS(PolarizedManifoldModel::fubini_study(0), ConfigError);
  CHECK_THROWS_AS(parse_potential("cos"), ConfigError);
  const auto m = PolarizedManifoldModel::from_json({{"n", 2}, {"metric", {{"type", "perturbed"}, {"eps", 0.1}, {"phi", "u^2"}}}});
  CHECK(m.dimension() == 2);
  CHECK(PolarizedManifoldModel::from_json(m.to_json()).to_json() == m.to_json());
}
