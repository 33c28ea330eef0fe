#include "dflab/chowslope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dflab/error.hpp"
#include "dflab/parallel.hpp"
#include "dflab/report_io.hpp"

namespace dflab {

namespace {

struct WeightData {
  std::vector<double> b;
  std::vector<double> abs_b;
  double sum_abs = 0.0;
  double max_abs = 0.0;
};

WeightData weight_data(const TestConfiguration& config) {
  WeightData w;
  Rational sum = 0, mx = 0;
  for (const auto& x : config.weights.b) {
    const Rational a = abs(x);
    sum += a;
    if (a > mx) mx = a;
    w.b.push_back(to_double(x));
    w.abs_b.push_back(to_double(a));
  }
  w.sum_abs = to_double(sum);
  w.max_abs = to_double(mx);
  return w;
}

double int_pow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void check_rule(const TestConfiguration& config, const PolarizedManifoldModel& model,
                const QuadratureRule& rule) {
  if (rule.dimension != model.dimension())
    throw ConfigError("quadrature rule dimension does not match the model");
  if (rule.exactness_degree < 2 * config.ell)
    throw ExactnessError("quadrature exactness " + std::to_string(rule.exactness_degree) +
                             " is below 2*ell = " + std::to_string(2 * config.ell),
                         rule.exactness_degree);
  if (rule.torus_reduced && !config.toric)
    throw ConfigError("a torus-reduced rule cannot integrate a configuration whose basis is "
                      "not monomial-aligned");
}

}  // namespace

std::vector<double> orbit_shift(const TestConfiguration& config, double s) {
  const auto w = weight_data(config);
  std::vector<double> c(w.b.size(), 0.0);
  if (w.max_abs == 0.0) return c;
  const double scale = s * config.ell / w.max_abs;
  for (std::size_t a = 0; a < c.size(); ++a) c[a] = scale * w.b[a];
  return c;
}

double fdot(const TestConfiguration& config, const PolarizedManifoldModel& model,
            const QuadratureRule& rule, double s, const SlopeOptions& options) {
  if (!std::isfinite(s)) throw ConfigError("orbit parameter s must be finite");
  if (config.trivial) return 0.0;
  const auto w = weight_data(config);
  if (w.max_abs == 0.0) throw ConfigError("nonzero weight vector with zero sup norm");
  // (|b|_1 ell^n)^{-1} with |b|_1 = sum|b| / ell^{n+1}
  const double prefactor = config.ell / w.sum_abs;
  const std::vector<double> shift = orbit_shift(config, s);
  EmbeddingEvaluator ev(model, *config.onb);

  if (s != 0.0 && config.toric && model.dimension() <= 2) {
    const OrbitRule orbit = orbit_adapted_rule(*config.onb, shift, options.orbit);
    std::vector<double> terms(orbit.weight.size());
    SampleRequest req;
    req.shift = shift;
    req.weights = w.b;
    parallel_for(terms.size(), [&](std::size_t i) {
      terms[i] = orbit.weight[i] * ev.at_log_moment(orbit.log_u[i], 1.0, req).weighted_mean;
    });
    return prefactor * pairwise_sum(terms);
  }

  check_rule(config, model, rule);
  std::vector<double> terms(rule.nodes.size()), mass(rule.nodes.size());
  SampleRequest req;
  if (s != 0.0) req.shift = shift;
  req.weights = w.b;
  req.pullback = true;
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    const auto& node = rule.nodes[i];
    const auto smp = ev.at(node, req);
    const double m = node.weight() * node.density * std::exp(smp.log_pullback);
    mass[i] = m;
    terms[i] = m * smp.weighted_mean;
  });
  if (s != 0.0) {
    const double total = pairwise_sum(mass);
    const double expected = int_pow(config.ell, model.dimension());
    const double rel = std::abs(total / expected - 1.0);
    if (!(rel <= options.mass_tolerance))
      throw NumericalError("unresolved shift at s = " + format_double(s) +
                           ": pullback mass error " + format_double(rel) +
                           " exceeds tolerance " + format_double(options.mass_tolerance) +
                           " (narrow the s range or raise the resolution)");
  }
  return prefactor * pairwise_sum(terms);
}

double fdot(const TestConfiguration& config, const PolarizedManifoldModel& model, double s,
            const SlopeOptions& options) {
  return fdot(config, model, config.sections->rule, s, options);
}

nlohmann::json SlopeZeroDiagnostics::to_json() const {
  return {{"fdot0", json_number(fdot0)},       {"r1", json_number(r1)},
          {"r2", json_number(r2)},             {"r1_bound", json_number(r1_bound)},
          {"r2_bound", json_number(r2_bound)}, {"c3", json_number(c3)},
          {"n_fact_c3", json_number(n_fact_c3)}, {"c4", json_number(c4)},
          {"c5", json_number(c5)}};
}

SlopeZeroDiagnostics slope_zero_decomposition(const TestConfiguration& config,
                                              const PolarizedManifoldModel& model,
                                              const QuadratureRule& rule) {
  SlopeZeroDiagnostics out;
  if (config.trivial) return out;
  check_rule(config, model, rule);
  const auto w = weight_data(config);
  const int n = model.dimension();
  const double prefactor = config.ell / w.sum_abs;
  const double ln = int_pow(config.ell, n);
  const double fact = factorial(n);
  EmbeddingEvaluator ev(model, *config.onb);

  const std::size_t count = rule.nodes.size();
  std::vector<double> f(count), r1(count), r2(count), r1b(count), r2b(count), c3(count), c4(count);
  parallel_for(count, [&](std::size_t i) {
    const auto& node = rule.nodes[i];
    SampleRequest req;
    req.weights = w.b;
    req.pullback = true;
    const auto smp = ev.at(node, req);
    SampleRequest abs_req;
    abs_req.weights = w.abs_b;
    const double amean = ev.at(node, abs_req).weighted_mean;
    const double wd = node.weight() * node.density;
    const double pull = std::exp(smp.log_pullback);
    const double kernel = std::exp(smp.log_kernel);
    const double mean = smp.weighted_mean;
    f[i] = wd * pull * mean;
    r1[i] = wd * mean * (pull - ln);
    r2[i] = wd * mean * (ln - fact * kernel);
    r1b[i] = wd * amean * std::abs(pull - ln);
    const double inv_dev = std::abs(1.0 / kernel - fact / ln);
    r2b[i] = wd * inv_dev * amean * kernel * ln;
    c3[i] = std::abs(pull - ln) / int_pow(config.ell, n - 1);
    c4[i] = inv_dev * int_pow(config.ell, n + 1);
  });
  out.fdot0 = prefactor * pairwise_sum(f);
  out.r1 = prefactor * pairwise_sum(r1);
  out.r2 = prefactor * pairwise_sum(r2);
  out.r1_bound = prefactor * pairwise_sum(r1b);
  out.r2_bound = prefactor * pairwise_sum(r2b);
  out.c3 = *std::max_element(c3.begin(), c3.end());
  out.n_fact_c3 = fact * out.c3;
  out.c4 = *std::max_element(c4.begin(), c4.end());
  out.c5 = out.n_fact_c3 + out.c4;
  return out;
}

SlopeZeroDiagnostics slope_zero_decomposition(const TestConfiguration& config,
                                              const PolarizedManifoldModel& model) {
  return slope_zero_decomposition(config, model, config.sections->rule);
}

std::vector<double> default_s_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 12; ++k) g.push_back(-6.0 + 0.5 * k);
  return g;
}

void validate_s_grid(const std::vector<double>& grid) {
  if (grid.size() < 3) throw ConfigError("s grid needs at least 3 points");
  bool has_zero = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] > 0.0) throw ConfigError("s grid must be nonpositive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("s grid must be strictly increasing");
    if (grid[i] == 0.0) has_zero = true;
  }
  if (!has_zero) throw ConfigError("s grid must contain 0");
}

SlopeProfile slope_profile(const TestConfiguration& config, const PolarizedManifoldModel& model,
                           const std::vector<double>& grid, const SlopeOptions& options) {
  validate_s_grid(grid);
  SlopeProfile p;
  p.ell = config.ell;
  p.s = grid;
  for (double s : grid) p.fdot.push_back(fdot(config, model, s, options));
  p.f.assign(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i)
    p.f[i] = p.f[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (p.fdot[i] + p.fdot[i - 1]);
  p.monotonicity_defect = INFINITY;
  for (std::size_t i = 1; i < grid.size(); ++i)
    p.monotonicity_defect = std::min(p.monotonicity_defect, p.fdot[i] - p.fdot[i - 1]);
  p.second_difference_min = INFINITY;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    p.second_difference_min = std::min(p.second_difference_min, p.f[i + 1] - 2.0 * p.f[i] + p.f[i - 1]);
  return p;
}

AsymptoteFit fit_asymptote(const std::vector<double>& s, const std::vector<double>& values) {
  AsymptoteFit best;
  best.rms = INFINITY;
  const std::size_t m = s.size();
  if (m == 0) return best;
  constexpr int kGrid = 241;
  for (int g = 0; g < kGrid; ++g) {
    const double kappa = std::pow(10.0, -2.0 + 4.0 * g / (kGrid - 1));
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = std::exp(kappa * s[i]);
      sx += x[i];
      sy += values[i];
      sxx += x[i] * x[i];
      sxy += x[i] * values[i];
    }
    const double det = m * sxx - sx * sx;
    double a = sy / m, b = 0.0;
    if (det > 1e-300) {
      b = (m * sxy - sx * sy) / det;
      a = (sy - b * sx) / m;
      if (b < 0.0) {
        b = 0.0;
        a = sy / m;
      }
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = values[i] - a - b * x[i];
      rss += r * r;
    }
    const double rms = std::sqrt(rss / m);
    if (rms < best.rms) best = {a, b, kappa, rms};
  }
  return best;
}

F1Report f1_estimate(const ConfigSequence& seq, const PolarizedManifoldModel& model,
                     const std::vector<double>& grid, std::size_t tail_start,
                     const SlopeOptions& options) {
  const auto membership = is_member_of_M(seq);
  if (!membership.member)
    throw ConfigError("sequence violates the exponent growth condition: " + membership.reason);
  if (tail_start >= seq.configs.size())
    throw ConfigError("tail start " + std::to_string(tail_start) + " is beyond the sequence");
  validate_s_grid(grid);

  F1Report rep;
  rep.sequence = seq.to_json();
  rep.s_grid = grid;
  rep.tail_start = tail_start;
  rep.flags = seq.flags;
  for (std::size_t j = 0; j < seq.configs.size(); ++j) {
    try {
      rep.profiles.push_back(slope_profile(seq.configs[j], model, grid, options));
      rep.included.push_back(j);
      rep.exponents.push_back(seq.configs[j].ell);
    } catch (const NumericalError& e) {
      rep.flags.push_back("configuration " + std::to_string(j) + " (ell = " +
                          std::to_string(seq.configs[j].ell) + ") excluded: " + e.what());
    }
  }
  if (rep.included.empty()) throw NumericalError("no slope profile could be computed");

  const std::size_t zero_idx = grid.size() - 1;
  auto tail_min = [&](std::size_t j0, std::size_t si) {
    double v = INFINITY;
    for (std::size_t k = 0; k < rep.included.size(); ++k)
      if (rep.included[k] >= j0) v = std::min(v, rep.profiles[k].fdot[si]);
    return v;
  };
  rep.tail_liminf.resize(grid.size());
  for (std::size_t si = 0; si < grid.size(); ++si) rep.tail_liminf[si] = tail_min(tail_start, si);
  if (!std::isfinite(rep.tail_liminf[0]))
    throw NumericalError("every configuration in the tail was excluded");
  rep.estimate = *std::min_element(rep.tail_liminf.begin(), rep.tail_liminf.end());
  rep.l_at_smin = rep.tail_liminf.front();
  rep.l_at_zero = rep.tail_liminf[zero_idx];
  rep.monotonicity_defect = INFINITY;
  for (std::size_t si = 1; si < grid.size(); ++si)
    rep.monotonicity_defect =
        std::min(rep.monotonicity_defect, rep.tail_liminf[si] - rep.tail_liminf[si - 1]);

  rep.upper_bound = -INFINITY;
  for (std::size_t k = 0; k < rep.included.size(); ++k) {
    const double f0 = rep.profiles[k].fdot[zero_idx];
    rep.upper_bound = std::max(rep.upper_bound, f0);
    rep.zero_slope_scaled = std::max(rep.zero_slope_scaled, rep.exponents[k] * std::abs(f0));
  }
  for (std::size_t j0 = 0; j0 < seq.configs.size(); ++j0) {
    double v = INFINITY;
    for (std::size_t si = 0; si < grid.size(); ++si) v = std::min(v, tail_min(j0, si));
    rep.tail_sensitivity.push_back(std::isfinite(v) ? v : NAN);
  }
  rep.asymptote = fit_asymptote(grid, rep.tail_liminf);
  return rep;
}

nlohmann::json F1Report::to_json() const {
  nlohmann::json j;
  j["sequence"] = sequence;
  nlohmann::json sg = nlohmann::json::array();
  for (double s : s_grid) sg.push_back(json_number(s));
  j["s_grid"] = sg;
  j["tail_start"] = tail_start;
  j["included"] = included;
  j["exponents"] = exponents;
  nlohmann::json prof = nlohmann::json::array();
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    nlohmann::json fd = nlohmann::json::array(), f = nlohmann::json::array();
    for (double v : profiles[k].fdot) fd.push_back(json_number(v));
    for (double v : profiles[k].f) f.push_back(json_number(v));
    prof.push_back({{"index", included[k]},
                    {"ell", profiles[k].ell},
                    {"fdot", fd},
                    {"f", f},
                    {"monotonicity_defect", json_number(profiles[k].monotonicity_defect)},
                    {"second_difference_min", json_number(profiles[k].second_difference_min)}});
  }
  j["profiles"] = prof;
  nlohmann::json l = nlohmann::json::array();
  for (double v : tail_liminf) l.push_back(json_number(v));
  j["tail_liminf"] = l;
  j["estimate"] = json_number(estimate);
  j["l_at_smin"] = json_number(l_at_smin);
  j["l_at_zero"] = json_number(l_at_zero);
  j["monotonicity_defect"] = json_number(monotonicity_defect);
  j["upper_bound"] = json_number(upper_bound);
  j["zero_slope_scaled"] = json_number(zero_slope_scaled);
  j["asymptote"] = {{"a", json_number(asymptote.a)},
                    {"b", json_number(asymptote.b)},
                    {"kappa", json_number(asymptote.kappa)},
                    {"rms", json_number(asymptote.rms)}};
  nlohmann::json ts = nlohmann::json::array();
  for (double v : tail_sensitivity) ts.push_back(json_number(v));
  j["tail_sensitivity"] = ts;
  j["flags"] = flags;
  return j;
}

std::string F1Report::slopes_csv() const {
  std::ostringstream out;
  out << "j,ell,s,fdot\n";
  for (std::size_t k = 0; k < profiles.size(); ++k)
    for (std::size_t i = 0; i < s_grid.size(); ++i)
      out << included[k] << ',' << profiles[k].ell << ',' << format_double(s_grid[i]) << ','
          << format_double(profiles[k].fdot[i]) << '\n';
  return out.str();
}

std::string F1Report::plot_data() const {
  std::ostringstream out;
  out << "# s L(s)\n";
  for (std::size_t i = 0; i < s_grid.size(); ++i)
    out << format_double(s_grid[i]) << ' ' << format_double(tail_liminf[i]) << '\n';
  return out.str();
}

}  // namespace dflab
