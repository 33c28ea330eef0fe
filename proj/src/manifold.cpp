#include "dflab/manifold.hpp"

#include <cmath>

#include "dflab/error.hpp"

namespace dflab {

std::string to_string(Potential p) {
  switch (p) {
    case Potential::U:
      return "u";
    case Potential::USquared:
      return "u^2";
    case Potential::UOneMinusU:
      return "u(1-u)";
  }
  return "?";
}

Potential parse_potential(const std::string& name) {
  if (name == "u") return Potential::U;
  if (name == "u^2" || name == "u2") return Potential::USquared;
  if (name == "u(1-u)") return Potential::UOneMinusU;
  throw ConfigError("unknown potential '" + name + "' (expected u, u^2, u(1-u))");
}

std::vector<Complex> homogeneous(const ChartPoint& p) {
  const int n = static_cast<int>(p.coords.size());
  std::vector<Complex> z(n + 1);
  int c = 0;
  for (int k = 0; k <= n; ++k) z[k] = (k == p.chart) ? Complex(1.0) : p.coords[c++];
  return z;
}

ChartPoint best_chart(const std::vector<Complex>& homog) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(homog.size()); ++k)
    if (std::abs(homog[k]) > std::abs(homog[best])) best = k;
  ChartPoint p;
  p.chart = best;
  for (int k = 0; k < static_cast<int>(homog.size()); ++k)
    if (k != best) p.coords.push_back(homog[k] / homog[best]);
  return p;
}

std::vector<double> log_moment(const ChartPoint& p) {
  const auto z = homogeneous(p);
  double total = 0.0;
  for (const auto& c : p.coords) total += std::norm(c);
  const double log_norm = std::log1p(total);
  std::vector<double> out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double a = std::abs(z[k]);
    out[k] = (a > 0.0 ? 2.0 * std::log(a) : -INFINITY) - log_norm;
  }
  return out;
}

PolarizedManifoldModel::PolarizedManifoldModel(int n, MetricSpec metric)
    : n_(n), metric_(metric) {
  if (n < 1) throw ConfigError("complex dimension must be >= 1");
  if (metric.kind == MetricSpec::Kind::Perturbed) {
    if (!std::isfinite(metric.eps) || std::abs(metric.eps) > kMaxEps)
      throw ConfigError("perturbation eps must satisfy |eps| <= 0.2");
  } else {
    metric_.eps = 0.0;
  }
}

PolarizedManifoldModel PolarizedManifoldModel::fubini_study(int n) {
  return PolarizedManifoldModel(n, MetricSpec{});
}

PolarizedManifoldModel PolarizedManifoldModel::perturbed(int n, double eps, Potential phi) {
  return PolarizedManifoldModel(n, MetricSpec{MetricSpec::Kind::Perturbed, eps, phi});
}

PolarizedManifoldModel PolarizedManifoldModel::from_json(const nlohmann::json& j) {
  const std::string family = j.value("family", "projective-space");
  if (family != "projective-space")
    throw ConfigError("unsupported model family '" + family + "'");
  const int n = j.value("n", 1);
  MetricSpec spec;
  if (j.contains("metric")) {
    const auto& m = j.at("metric");
    const std::string type = m.value("type", "fubini-study");
    if (type == "perturbed") {
      spec.kind = MetricSpec::Kind::Perturbed;
      spec.eps = m.value("eps", 0.0);
      spec.phi = parse_potential(m.value("phi", "u"));
    } else if (type != "fubini-study") {
      throw ConfigError("unknown metric type '" + type + "'");
    }
  }
  return PolarizedManifoldModel(n, spec);
}

nlohmann::json PolarizedManifoldModel::to_json() const {
  nlohmann::json metric;
  if (metric_.kind == MetricSpec::Kind::FubiniStudy) {
    metric = {{"type", "fubini-study"}};
  } else {
    metric = {{"type", "perturbed"}, {"eps", metric_.eps}, {"phi", to_string(metric_.phi)}};
  }
  return {{"family", "projective-space"}, {"n", n_}, {"metric", metric}};
}

bool PolarizedManifoldModel::is_fubini_study() const {
  return metric_.kind == MetricSpec::Kind::FubiniStudy || metric_.eps == 0.0;
}

double PolarizedManifoldModel::potential(double u) const {
  if (is_fubini_study()) return 0.0;
  switch (metric_.phi) {
    case Potential::U:
      return metric_.eps * u;
    case Potential::USquared:
      return metric_.eps * u * u;
    case Potential::UOneMinusU:
      return metric_.eps * u * (1.0 - u);
  }
  return 0.0;
}

double PolarizedManifoldModel::potential_d1(double u) const {
  if (is_fubini_study()) return 0.0;
  switch (metric_.phi) {
    case Potential::U:
      return metric_.eps;
    case Potential::USquared:
      return 2.0 * metric_.eps * u;
    case Potential::UOneMinusU:
      return metric_.eps * (1.0 - 2.0 * u);
  }
  return 0.0;
}

double PolarizedManifoldModel::potential_d2(double) const {
  if (is_fubini_study()) return 0.0;
  switch (metric_.phi) {
    case Potential::U:
      return 0.0;
    case Potential::USquared:
      return 2.0 * metric_.eps;
    case Potential::UOneMinusU:
      return -2.0 * metric_.eps;
  }
  return 0.0;
}

Eigen::MatrixXcd PolarizedManifoldModel::fubini_study_matrix(const ChartPoint& p) const {
  const int n = n_;
  double s = 1.0;
  for (const auto& c : p.coords) s += std::norm(c);
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = (i == j ? Complex(1.0 / s) : Complex(0.0)) -
                std::conj(p.coords[i]) * p.coords[j] / (s * s);
  return g;
}

Eigen::MatrixXcd PolarizedManifoldModel::kahler_matrix(const ChartPoint& p) const {
  Eigen::MatrixXcd g = fubini_study_matrix(p);
  if (is_fubini_study()) return g;
  // u0 = |w|^2 / S with w = 1 in chart 0 and w = z_0 otherwise.
  const int n = n_;
  double s = 1.0;
  for (const auto& c : p.coords) s += std::norm(c);
  const Complex w = p.chart == 0 ? Complex(1.0) : p.coords[0];
  const double a = std::norm(w);
  const double u0 = a / s;
  std::vector<Complex> a_i(n, Complex(0.0));  // d_i |w|^2
  if (p.chart != 0) a_i[0] = std::conj(w);
  std::vector<Complex> u_i(n);
  for (int i = 0; i < n; ++i) u_i[i] = a_i[i] / s - a * std::conj(p.coords[i]) / (s * s);
  const double d1 = potential_d1(u0);
  const double d2 = potential_d2(u0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex a_ij = (p.chart != 0 && i == 0 && j == 0) ? Complex(1.0) : Complex(0.0);
      const Complex s_i = std::conj(p.coords[i]);
      const Complex s_jb = p.coords[j];
      const Complex a_jb = std::conj(a_i[j]);
      const Complex u_ij = a_ij / s - a_i[i] * s_jb / (s * s) - a_jb * s_i / (s * s) -
                           a * (i == j ? 1.0 : 0.0) / (s * s) +
                           2.0 * a * s_i * s_jb / (s * s * s);
      g(i, j) += d1 * u_ij + d2 * u_i[i] * std::conj(u_i[j]);
    }
  }
  return g;
}

double PolarizedManifoldModel::volume_density(const ChartPoint& p) const {
  if (is_fubini_study()) return 1.0;
  const Eigen::MatrixXcd g = kahler_matrix(p);
  Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() != Eigen::Success)
    throw NumericalError("perturbed Kahler form is not positive at a sample point");
  double det = 1.0;
  for (int i = 0; i < n_; ++i) {
    const double d = llt.matrixL()(i, i).real();
    det *= d * d;
  }
  double s = 1.0;
  for (const auto& c : p.coords) s += std::norm(c);
  return det * std::pow(s, n_ + 1);
}

double PolarizedManifoldModel::log_hermitian_factor(const ChartPoint& p, int ell) const {
  double total = 0.0;
  for (const auto& c : p.coords) total += std::norm(c);
  const double log_s = std::log1p(total);
  double u0;
  if (p.chart == 0) {
    u0 = 1.0 / (1.0 + total);
  } else {
    u0 = std::norm(p.coords[0]) / (1.0 + total);
  }
  return -ell * (log_s + potential(u0));
}

Rational scalar_curvature(const PolarizedManifoldModel& model) {
  if (!model.is_fubini_study())
    throw Unsupported("scalar curvature of a perturbed metric is not constant");
  const int n = model.dimension();
  // c_1(P^n) = (n+1) H, so n (n+1) H^n / H^n.
  return Rational(n * (n + 1));
}

}  // namespace dflab
