#pragma once

// Independent reference computations and generators shared by the tests.
// Nothing here calls into the quadrature or section code under test.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dflab/rational.hpp"

namespace testsupport {

inline double log_factorial(int k) { return std::lgamma(k + 1.0); }

/// FS Gram diagonal n! prod m_k! / (ell + n)!.
inline double fs_gram_entry(const std::vector<int>& m) {
  const int n = static_cast<int>(m.size()) - 1;
  int ell = 0;
  double v = log_factorial(n);
  for (int k : m) {
    v += log_factorial(k);
    ell += k;
  }
  return std::exp(v - log_factorial(ell + n));
}

/// Composite Simpson rule on [a, b] with `intervals` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Potentials phi(u) with first and second derivatives, named as in the model.
struct Phi {
  int kind;  // 0: u, 1: u^2, 2: u(1-u)
  double operator()(double u) const { return kind == 0 ? u : kind == 1 ? u * u : u * (1 - u); }
  double d1(double u) const { return kind == 0 ? 1.0 : kind == 1 ? 2 * u : 1 - 2 * u; }
  double d2(double) const { return kind == 0 ? 0.0 : kind == 1 ? 2.0 : -2.0; }
};

/// Density of the perturbed P^1 form with respect to du on [0, 1], where
/// u = |Z_0|^2/|Z|^2. Derived from the moment map of the potential
/// log(1 + |z|^2) + eps phi(u) in the coordinate t = log|z|^2.
inline double p1_perturbed_density(double u, double eps, const Phi& phi) {
  return 1.0 + eps * (phi.d2(u) * u * (1 - u) + phi.d1(u) * (1 - 2 * u));
}

/// Gram diagonal of Z_0^{m0} Z_1^{m1} on P^1 for h = h_FS e^{-eps phi(u)}.
inline double p1_perturbed_gram(int m0, int m1, double eps, const Phi& phi) {
  const int ell = m0 + m1;
  return simpson(
      [&](double u) {
        return std::pow(u, m0) * std::pow(1 - u, m1) * std::exp(-ell * eps * phi(u)) *
               p1_perturbed_density(u, eps, phi);
      },
      0.0, 1.0, 20000);
}

/// Slope on P^1 for a torus-compatible basis with squared coefficients g
/// (index a has m_1 = ell - a): with p_a(t) proportional to g_a e^{2c_a + m1 t},
///   fdot = ell / sum|b| * integral of E_p[b] Var_p[m1] dt over the real line,
/// evaluated with the trapezoid rule (the integrand is analytic in a strip).
inline double p1_fdot_oracle(const std::vector<double>& g, const std::vector<double>& b, double s) {
  const int N = static_cast<int>(g.size());
  const int ell = N - 1;
  double sum_abs = 0.0, max_abs = 0.0;
  for (double x : b) {
    sum_abs += std::abs(x);
    max_abs = std::max(max_abs, std::abs(x));
  }
  if (max_abs == 0.0) return 0.0;
  std::vector<double> base(N);
  double cmax = 0.0;
  for (int a = 0; a < N; ++a) {
    const double c = s * ell * b[a] / max_abs;
    base[a] = std::log(g[a]) + 2 * c;
    cmax = std::max(cmax, std::abs(2 * c) + std::abs(std::log(g[a])));
  }
  const double T = 2 * cmax + 80.0;
  const double h = 0.005;
  const long steps = static_cast<long>(2 * T / h);
  double total = 0.0;
  std::vector<double> e(N);
  for (long i = 0; i <= steps; ++i) {
    const double t = -T + i * h;
    double mx = -INFINITY;
    for (int a = 0; a < N; ++a) {
      e[a] = base[a] + (ell - a) * t;
      mx = std::max(mx, e[a]);
    }
    double z = 0, eb = 0, em = 0, em2 = 0;
    for (int a = 0; a < N; ++a) {
      const double w = std::exp(e[a] - mx);
      const double m1 = ell - a;
      z += w;
      eb += w * b[a];
      em += w * m1;
      em2 += w * m1 * m1;
    }
    eb /= z;
    em /= z;
    const double var = em2 / z - em * em;
    total += (i == 0 || i == steps ? 0.5 : 1.0) * eb * var;
  }
  return ell / sum_abs * total * h;
}

/// Uniform rational p/q with |p| <= range * q, q in [1, qmax].
inline dflab::Rational random_rational(std::mt19937_64& rng, long long range, long long qmax) {
  std::uniform_int_distribution<long long> qd(1, qmax);
  const long long q = qd(rng);
  std::uniform_int_distribution<long long> pd(-range * q, range * q);
  return dflab::Rational(pd(rng)) / q;
}

inline std::vector<dflab::Rational> random_weights(std::mt19937_64& rng, std::size_t count) {
  std::vector<dflab::Rational> w;
  for (std::size_t i = 0; i < count; ++i) w.push_back(random_rational(rng, 5, 7));
  return w;
}

}  // namespace testsupport
