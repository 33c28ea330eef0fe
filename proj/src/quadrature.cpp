#include "dflab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "dflab/error.hpp"
#include "dflab/parallel.hpp"
#include "dflab/report_io.hpp"

namespace dflab {

double QuadratureNode::weight() const { return std::exp(log_weight); }

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Map [-1, 1] -> [0, 1]; x is in decreasing order.
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (1.0 - x);
    nodes[order - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

QuadratureRule build_quadrature(const PolarizedManifoldModel& model, int target_exactness,
                                const QuadratureOptions& options) {
  const int n = model.dimension();
  const int r = options.resolution;
  if (r < 1) throw ConfigError("quadrature resolution must be >= 1");
  if (target_exactness < 0) throw ConfigError("target exactness must be >= 0");
  const int m = options.angular > 0 ? options.angular : target_exactness / 2 + 1;

  const int poly_ell = 2 * r - n;
  const int torus_ell = options.torus_reduced ? poly_ell : m - 1;
  const int achieved = std::max(0, 2 * std::min(poly_ell, torus_ell));
  if (achieved < target_exactness) {
    throw ExactnessError("resolution " + std::to_string(r) + " certifies exactness " +
                             std::to_string(achieved) + " < requested " +
                             std::to_string(target_exactness),
                         achieved);
  }

  std::vector<double> t, w;
  gauss_legendre(r, t, w);

  QuadratureRule rule;
  rule.kind = RuleKind::MomentTorus;
  rule.dimension = n;
  rule.exactness_degree = achieved;
  rule.resolution = r;
  rule.angular = options.torus_reduced ? 1 : m;
  rule.torus_reduced = options.torus_reduced;
  rule.description = "gauss-legendre simplex x trapezoid torus";

  const int m_eff = rule.angular;
  std::size_t simplex_count = 1, torus_count = 1;
  for (int k = 0; k < n; ++k) {
    simplex_count *= r;
    torus_count *= m_eff;
  }
  double log_fact = 0.0;
  for (int k = 2; k <= n; ++k) log_fact += std::log(static_cast<double>(k));
  const double log_torus = -n * std::log(static_cast<double>(m_eff));

  rule.nodes.resize(simplex_count * torus_count);
  parallel_for(simplex_count, [&](std::size_t si) {
    // Collapsed coordinates: u_k = (1-t_1)...(1-t_{k-1}) t_k, u_0 = prod(1-t_k).
    std::vector<double> log_u(n + 1);
    double log_w = log_fact + log_torus;
    double log_rest = 0.0;
    std::size_t idx = si;
    for (int k = 1; k <= n; ++k) {
      const int g = static_cast<int>(idx % r);
      idx /= r;
      log_u[k] = log_rest + std::log(t[g]);
      log_w += std::log(w[g]) + (n - k) * std::log1p(-t[g]);
      log_rest += std::log1p(-t[g]);
    }
    log_u[0] = log_rest;
    for (std::size_t ti = 0; ti < torus_count; ++ti) {
      std::vector<Complex> z(n + 1);
      z[0] = std::exp(0.5 * log_u[0]);
      std::size_t tidx = ti;
      for (int k = 1; k <= n; ++k) {
        const int j = static_cast<int>(tidx % m_eff);
        tidx /= m_eff;
        const double theta = 2.0 * std::numbers::pi * j / m_eff;
        z[k] = std::polar(std::exp(0.5 * log_u[k]), theta);
      }
      QuadratureNode node;
      node.point = best_chart(z);
      node.log_u = log_u;
      node.log_weight = log_w;
      try {
        node.density = model.volume_density(node.point);
      } catch (const NumericalError&) {
        throw NumericalError("metric not positive at quadrature node " +
                             std::to_string(si * torus_count + ti));
      }
      rule.nodes[si * torus_count + ti] = std::move(node);
    }
  });
  return rule;
}

double integrate_nodes(const QuadratureRule& rule,
                       const std::function<double(const QuadratureNode&)>& f) {
  std::vector<double> terms(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    const auto& node = rule.nodes[i];
    const double v = f(node);
    if (!std::isfinite(v))
      throw NumericalError("non-finite integrand at quadrature node " + std::to_string(i));
    terms[i] = node.weight() * node.density * v;
  });
  return pairwise_sum(terms);
}

double integrate(const QuadratureRule& rule, const std::function<double(const ChartPoint&)>& f) {
  return integrate_nodes(rule, [&](const QuadratureNode& node) { return f(node.point); });
}

void write_rule_csv(const QuadratureRule& rule, std::ostream& out) {
  const int n = rule.dimension;
  out << "index,chart";
  for (int k = 0; k < n; ++k) out << ",re_z" << k << ",im_z" << k;
  out << ",weight,log_weight,density\n";
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto& node = rule.nodes[i];
    out << i << ',' << node.point.chart;
    for (const auto& c : node.point.coords)
      out << ',' << format_double(c.real()) << ',' << format_double(c.imag());
    out << ',' << format_double(node.weight()) << ',' << format_double(node.log_weight) << ','
        << format_double(node.density) << '\n';
  }
}

}  // namespace dflab
