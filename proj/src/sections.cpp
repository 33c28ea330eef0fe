#include "dflab/sections.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dflab/error.hpp"
#include "dflab/parallel.hpp"
#include "dflab/report_io.hpp"

namespace dflab {

namespace {

void enumerate(int pos, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
  const int last = static_cast<int>(cur.size()) - 1;
  if (pos == last) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur[pos] = k;
    enumerate(pos + 1, remaining - k, cur, out);
  }
}

constexpr double kAlignTolerance = 1e-12;

void detect_alignment(OrthonormalBasis& onb) {
  const auto n = onb.coeffs.rows();
  std::vector<std::size_t> aligned(onb.coeffs.cols());
  std::vector<double> log_c(onb.coeffs.cols());
  for (Eigen::Index a = 0; a < onb.coeffs.cols(); ++a) {
    Eigen::Index best = 0;
    double big = onb.coeffs.col(a).cwiseAbs().maxCoeff(&best);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r != best && std::abs(onb.coeffs(r, a)) > kAlignTolerance * big) return;
    }
    aligned[a] = static_cast<std::size_t>(best);
    log_c[a] = 2.0 * std::log(big);
  }
  // A permutation is required so that distinct basis vectors stay distinct.
  std::vector<std::size_t> sorted = aligned;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return;
  onb.aligned = std::move(aligned);
  onb.log_abs2_coeff = std::move(log_c);
}

OrthonormalBasis cholesky_basis(const GramMatrix& gram, const Eigen::MatrixXcd& span,
                                const std::string& provenance) {
  const Eigen::MatrixXcd g = span.adjoint() * gram.entries * span;
  const Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
  Eigen::LLT<Eigen::MatrixXcd> llt(h);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Cholesky factorization failed: Gram matrix is not positive definite");
  const auto n = h.rows();
  // C = span * (L^*)^{-1}
  Eigen::MatrixXcd linv = Eigen::MatrixXcd::Identity(n, n);
  llt.matrixL().solveInPlace(linv);
  OrthonormalBasis onb{gram.basis, span * linv.adjoint(), provenance, {}, {}, 1.0, {}};

  Eigen::VectorXd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = h(i, i).real();
  bool is_diag = true;
  for (Eigen::Index i = 0; i < n && is_diag; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && h(i, j) != Complex(0.0)) {
        is_diag = false;
        break;
      }
  if (is_diag) {
    onb.condition_number = diag.maxCoeff() / diag.minCoeff();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    onb.condition_number = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  }
  if (onb.condition_number > 1e12) {
    std::ostringstream msg;
    msg << "Gram condition number " << onb.condition_number << " exceeds 1e12";
    onb.warnings.push_back(msg.str());
  }
  detect_alignment(onb);
  return onb;
}

double log_sum_exp(const std::vector<double>& v, double& max_out) {
  double mx = -INFINITY;
  for (double x : v) mx = std::max(mx, x);
  max_out = mx;
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) {
    const double d = x - mx;
    if (d > -745.0) s += std::exp(d);
  }
  return mx + std::log(s);
}

}  // namespace

SectionBasis::SectionBasis(int n, int ell) : n_(n), ell_(ell) {
  if (n < 1) throw ConfigError("dimension must be >= 1");
  if (ell < 1) throw ConfigError("section exponent must be >= 1");
  MultiIndex cur(n + 1, 0);
  enumerate(0, ell, cur, monomials_);
  for (std::size_t i = 0; i < monomials_.size(); ++i) index_[monomials_[i]] = i;
}

std::size_t SectionBasis::index_of(const MultiIndex& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) throw std::out_of_range("multi-index not in section basis");
  return it->second;
}

std::size_t binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  b = std::min(b, a - b);
  std::size_t r = 1;
  for (int i = 1; i <= b; ++i) r = r * static_cast<std::size_t>(a - b + i) / i;
  return r;
}

GramMatrix gram(const PolarizedManifoldModel& model, const QuadratureRule& rule, int ell) {
  if (rule.exactness_degree < 2 * ell)
    throw ExactnessError("quadrature exactness " + std::to_string(rule.exactness_degree) +
                             " is below 2*ell = " + std::to_string(2 * ell),
                         rule.exactness_degree);
  if (rule.dimension != model.dimension())
    throw ConfigError("quadrature rule dimension does not match the model");
  SectionBasis basis(model.dimension(), ell);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  const int n = model.dimension();
  const bool diagonal = rule.torus_reduced;

  // Column of sqrt(weight) * (monomial value in a unitary frame).
  auto column = [&](const QuadratureNode& node, Eigen::VectorXcd& v) {
    const auto z = homogeneous(node.point);
    std::vector<double> arg(n + 1);
    for (int k = 0; k <= n; ++k) arg[k] = std::arg(z[k]);
    const double u0 = std::exp(node.log_u[0]);
    const double log_w = node.log_weight + std::log(node.density) - ell * model.potential(u0);
    for (Eigen::Index a = 0; a < nb; ++a) {
      const auto& m = basis.monomial(static_cast<std::size_t>(a));
      double lm = log_w, ph = 0.0;
      for (int k = 0; k <= n; ++k) {
        if (m[k] == 0) continue;
        lm += m[k] * node.log_u[k];
        ph += m[k] * arg[k];
      }
      v(a) = std::polar(std::exp(0.5 * lm), ph);
    }
  };

  constexpr std::size_t kBlock = 64;
  Eigen::MatrixXcd zero = diagonal ? Eigen::MatrixXcd::Zero(nb, 1) : Eigen::MatrixXcd::Zero(nb, nb);
  Eigen::MatrixXcd g = blocked_reduce(
      rule.nodes.size(), kBlock, zero,
      [&](std::size_t begin, std::size_t end) {
        Eigen::MatrixXcd vals(nb, static_cast<Eigen::Index>(end - begin));
        Eigen::VectorXcd v(nb);
        for (std::size_t i = begin; i < end; ++i) {
          column(rule.nodes[i], v);
          vals.col(static_cast<Eigen::Index>(i - begin)) = v;
        }
        if (diagonal) return Eigen::MatrixXcd(vals.cwiseAbs2().rowwise().sum().cast<Complex>());
        return Eigen::MatrixXcd(vals * vals.adjoint());
      },
      [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return Eigen::MatrixXcd(a + b); });

  GramMatrix out{basis, Eigen::MatrixXcd::Zero(nb, nb), 0.0, diagonal};
  if (diagonal) {
    for (Eigen::Index a = 0; a < nb; ++a) out.entries(a, a) = Complex(g(a, 0).real(), 0.0);
    out.min_eigenvalue = g.col(0).real().minCoeff();
  } else {
    out.entries = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.entries, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  if (!(out.min_eigenvalue > 0.0))
    throw NumericalError("Gram matrix for ell = " + std::to_string(ell) +
                         " is not positive definite (min eigenvalue " +
                         format_double(out.min_eigenvalue) + ")");
  return out;
}

OrthonormalBasis orthonormalize(const GramMatrix& gram) {
  const auto n = gram.entries.rows();
  return cholesky_basis(gram, Eigen::MatrixXcd::Identity(n, n), "cholesky(monomial gram)");
}

OrthonormalBasis orthonormalize_spanning(const GramMatrix& gram, const Eigen::MatrixXcd& span,
                                         const std::string& provenance) {
  if (span.rows() != gram.entries.rows() || span.cols() != gram.entries.cols())
    throw ConfigError("spanning set must be a square matrix of monomial coordinates");
  return cholesky_basis(gram, span, provenance);
}

std::shared_ptr<const SectionData> build_section_data(const PolarizedManifoldModel& model,
                                                      int ell,
                                                      const QuadratureOptions& options) {
  auto rule = build_quadrature(model, 2 * ell, options);
  auto g = gram(model, rule, ell);
  auto onb = orthonormalize(g);
  return std::make_shared<const SectionData>(
      SectionData{std::move(rule), std::move(g), std::move(onb)});
}

SectionCache::SectionCache(PolarizedManifoldModel model, QuadratureOptions options)
    : model_(std::move(model)), options_(options) {}

std::shared_ptr<const SectionData> SectionCache::get(int ell) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(ell);
    if (it != cache_.end()) return it->second;
  }
  auto data = build_section_data(model_, ell, options_);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(ell, std::move(data)).first->second;
}

EmbeddingEvaluator::EmbeddingEvaluator(const PolarizedManifoldModel& model,
                                       const OrthonormalBasis& onb, bool force_general)
    : model_(&model),
      onb_(&onb),
      log_domain_(onb.monomial_aligned() && model.is_torus_invariant() && !force_general) {
  if (onb.basis.dimension() != model.dimension())
    throw ConfigError("orthonormal basis dimension does not match the model");
}

EmbeddingSample EmbeddingEvaluator::at(const QuadratureNode& node, const SampleRequest& req) const {
  if (log_domain_ && !req.eigenvalues) return log_domain(node.log_u, node.density, req);
  return general(node.point, node.density, req);
}

EmbeddingSample EmbeddingEvaluator::at(const ChartPoint& point, const SampleRequest& req) const {
  const double density = req.pullback || req.eigenvalues ? model_->volume_density(point) : 1.0;
  if (log_domain_ && !req.eigenvalues) return log_domain(log_moment(point), density, req);
  return general(point, density, req);
}

EmbeddingSample EmbeddingEvaluator::at_log_moment(const std::vector<double>& log_u,
                                                  double density,
                                                  const SampleRequest& req) const {
  if (!log_domain_) throw ConfigError("moment-coordinate evaluation needs a monomial-aligned basis");
  return log_domain(log_u, density, req);
}

EmbeddingSample EmbeddingEvaluator::log_domain(const std::vector<double>& log_u, double density,
                                               const SampleRequest& req) const {
  const auto& onb = *onb_;
  const std::size_t nb = onb.size();
  const int n = model_->dimension();
  std::vector<double> tau(nb);
  for (std::size_t a = 0; a < nb; ++a) {
    const auto& m = onb.basis.monomial(onb.aligned[a]);
    double t = onb.log_abs2_coeff[a] + (req.shift.empty() ? 0.0 : 2.0 * req.shift[a]);
    for (int k = 0; k <= n; ++k)
      if (m[k] != 0) t += m[k] * log_u[k];
    tau[a] = t;
  }
  double mx;
  const double lse = log_sum_exp(tau, mx);
  EmbeddingSample out;
  out.log_kernel = lse - onb.exponent() * model_->potential(std::exp(log_u[0]));
  if (!req.weights.empty() || req.pullback) {
    double mean = 0.0;
    Eigen::VectorXd first = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> p(nb);
    for (std::size_t a = 0; a < nb; ++a) p[a] = std::exp(tau[a] - lse);
    if (!req.weights.empty())
      for (std::size_t a = 0; a < nb; ++a) mean += req.weights[a] * p[a];
    out.weighted_mean = mean;
    if (req.pullback) {
      for (std::size_t a = 0; a < nb; ++a)
        for (int i = 0; i < n; ++i) first(i) += p[a] * onb.basis.monomial(onb.aligned[a])[i + 1];
      for (std::size_t a = 0; a < nb; ++a) {
        if (p[a] == 0.0) continue;
        const auto& m = onb.basis.monomial(onb.aligned[a]);
        Eigen::VectorXd d(n);
        for (int i = 0; i < n; ++i) d(i) = m[i + 1] - first(i);
        second.noalias() += p[a] * d * d.transpose();
      }
      double log_det;
      if (n == 1) {
        log_det = std::log(second(0, 0));
      } else {
        Eigen::LLT<Eigen::MatrixXd> llt(second);
        if (llt.info() != Eigen::Success) {
          log_det = -INFINITY;
        } else {
          log_det = 0.0;
          for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
        }
      }
      if (!std::isfinite(log_det))
        throw NumericalError("degenerate shifted Hessian at moment point log u0 = " +
                             format_double(log_u[0]));
      double log_fs = 0.0;
      for (int k = 0; k <= n; ++k) log_fs += log_u[k];
      out.log_pullback = log_det - log_fs - std::log(density);
    }
  }
  return out;
}

EmbeddingSample EmbeddingEvaluator::general(const ChartPoint& point, double density,
                                            const SampleRequest& req) const {
  const auto& onb = *onb_;
  const int n = model_->dimension();
  const int ell = onb.exponent();
  const auto nb = static_cast<Eigen::Index>(onb.size());

  // Powers of the chart coordinates.
  std::vector<std::vector<Complex>> pw(n, std::vector<Complex>(ell + 1));
  for (int j = 0; j < n; ++j) {
    pw[j][0] = 1.0;
    for (int d = 1; d <= ell; ++d) pw[j][d] = pw[j][d - 1] * point.coords[j];
  }
  // Monomial values and first derivatives in the chart.
  Eigen::VectorXcd mono(nb);
  Eigen::MatrixXcd dmono(nb, n);
  std::vector<int> e(n);
  for (Eigen::Index a = 0; a < nb; ++a) {
    const auto& m = onb.basis.monomial(static_cast<std::size_t>(a));
    int c = 0;
    for (int k = 0; k <= n; ++k)
      if (k != point.chart) e[c++] = m[k];
    Complex v = 1.0;
    for (int j = 0; j < n; ++j) v *= pw[j][e[j]];
    mono(a) = v;
    for (int j = 0; j < n; ++j) {
      if (e[j] == 0) {
        dmono(a, j) = 0.0;
        continue;
      }
      Complex d = static_cast<double>(e[j]) * pw[j][e[j] - 1];
      for (int i = 0; i < n; ++i)
        if (i != j) d *= pw[i][e[i]];
      dmono(a, j) = d;
    }
  }
  Eigen::VectorXcd sig(nb);
  Eigen::MatrixXcd dsig(nb, n);
  if (onb.monomial_aligned()) {
    for (Eigen::Index a = 0; a < nb; ++a) {
      const auto r = static_cast<Eigen::Index>(onb.aligned[a]);
      sig(a) = onb.coeffs(r, a) * mono(r);
      dsig.row(a) = onb.coeffs(r, a) * dmono.row(r);
    }
  } else {
    sig = onb.coeffs.transpose() * mono;
    dsig = onb.coeffs.transpose() * dmono;
  }
  double cmax = 0.0;
  if (!req.shift.empty()) {
    cmax = -INFINITY;
    for (double c : req.shift) cmax = std::max(cmax, c);
    for (Eigen::Index a = 0; a < nb; ++a) {
      const double f = std::exp(req.shift[a] - cmax);
      sig(a) *= f;
      dsig.row(a) *= f;
    }
  }
  const Eigen::VectorXd abs2 = sig.cwiseAbs2();
  const double q = abs2.sum();
  if (!(q > 0.0) || !std::isfinite(q))
    throw NumericalError("section sum vanishes or overflows at a sample point");
  EmbeddingSample out;
  out.log_kernel = std::log(q) + 2.0 * cmax + model_->log_hermitian_factor(point, ell);
  if (!req.weights.empty()) {
    double s = 0.0;
    for (Eigen::Index a = 0; a < nb; ++a) s += req.weights[a] * abs2(a);
    out.weighted_mean = s / q;
  }
  if (req.pullback || req.eigenvalues) {
    // d_i dbar_j log Q = (sum dA_i conj(dA_j)) / Q - q_i conj(q_j) / Q^2
    const Eigen::VectorXcd qv = dsig.transpose() * sig.conjugate();
    Eigen::MatrixXcd h = dsig.transpose() * dsig.conjugate() / q - qv * qv.adjoint() / (q * q);
    h = 0.5 * (h + h.adjoint()).eval();
    const Eigen::MatrixXcd g = model_->kahler_matrix(point);
    Eigen::LLT<Eigen::MatrixXcd> lh(h);
    if (lh.info() != Eigen::Success)
      throw NumericalError("degenerate shifted Hessian at chart point in chart " +
                           std::to_string(point.chart));
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(lh.matrixL()(i, i).real());
    double s = 1.0;
    for (const auto& c : point.coords) s += std::norm(c);
    // det g_FS = S^{-(n+1)}; density = det g / det g_FS.
    out.log_pullback = log_det + (n + 1) * std::log(s) - std::log(density);
    if (req.eigenvalues) {
      Eigen::LLT<Eigen::MatrixXcd> lg(g);
      if (lg.info() != Eigen::Success)
        throw NumericalError("Kahler form is not positive at a sample point");
      Eigen::MatrixXcd m = lg.matrixL().solve(h);
      m = lg.matrixL().solve(m.adjoint()).adjoint().eval();
      m = 0.5 * (m + m.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
      double dev = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        dev = std::max(dev, std::abs(es.eigenvalues()(i) - ell));
      out.eigen_deviation = dev;
    }
  }
  return out;
}

double bergman_kernel(const OrthonormalBasis& onb, const PolarizedManifoldModel& model,
                      const ChartPoint& point) {
  EmbeddingEvaluator ev(model, onb);
  return std::exp(ev.at(point, SampleRequest{}).log_kernel);
}

double fs_pullback_density(const OrthonormalBasis& onb, const PolarizedManifoldModel& model,
                           std::span<const double> shift, const ChartPoint& point) {
  if (!shift.empty() && shift.size() != onb.size())
    throw ConfigError("shift vector length does not match the section dimension");
  for (double c : shift)
    if (!std::isfinite(c)) throw ConfigError("shift vector must be finite");
  EmbeddingEvaluator ev(model, onb);
  SampleRequest req;
  req.shift = shift;
  req.pullback = true;
  return std::exp(ev.at(point, req).log_pullback);
}

namespace {

/// Least-squares polynomial fit of y against x with the given degree;
/// returns coefficients from the constant term upward.
Eigen::VectorXd poly_fit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), degree + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      a(static_cast<Eigen::Index>(i), d) = p;
      p *= x[i];
    }
    b(static_cast<Eigen::Index>(i)) = y[i];
  }
  return a.colPivHouseholderQr().solve(b);
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

BergmanReport bergman_expansion_check(const PolarizedManifoldModel& model,
                                      const std::vector<int>& ells,
                                      const QuadratureOptions& options) {
  if (ells.size() < 3) throw ConfigError("Bergman check needs at least 3 exponents");
  for (std::size_t i = 0; i < ells.size(); ++i) {
    if (ells[i] < 1) throw ConfigError("exponents must be >= 1");
    if (i > 0 && ells[i] <= ells[i - 1]) throw ConfigError("exponents must increase");
  }
  const int n = model.dimension();
  const double nfact = factorial(n);
  BergmanReport rep;
  rep.model = model.to_json();
  rep.resolution = options.resolution;
  rep.cscK = model.is_fubini_study();
  if (rep.cscK) {
    rep.scalar_curvature = to_double(scalar_curvature(model));
  } else {
    rep.flags.push_back("metric is not cscK: remainder and scaled pullback checks skipped");
  }

  for (int ell : ells) {
    auto data = build_section_data(model, ell, options);
    EmbeddingEvaluator ev(model, data->onb);
    const auto& nodes = data->rule.nodes;
    std::vector<double> kernel(nodes.size()), dev(nodes.size());
    SampleRequest req;
    req.eigenvalues = true;
    parallel_for(nodes.size(), [&](std::size_t i) {
      kernel[i] = std::exp(ev.at(nodes[i], SampleRequest{}).log_kernel);
      dev[i] = ev.at(nodes[i], req).eigen_deviation;
    });
    BergmanLevel lv;
    lv.ell = ell;
    lv.dimension = data->onb.size();
    lv.kernel_min = *std::min_element(kernel.begin(), kernel.end());
    lv.kernel_max = *std::max_element(kernel.begin(), kernel.end());
    std::vector<double> wk(nodes.size()), w(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      w[i] = nodes[i].weight() * nodes[i].density;
      wk[i] = w[i] * kernel[i];
    }
    lv.kernel_integral = pairwise_sum(wk);
    lv.kernel_mean = std::clamp(lv.kernel_integral / pairwise_sum(w), lv.kernel_min, lv.kernel_max);
    const double lead = std::pow(ell, n) / nfact;
    double sup1 = 0.0;
    for (double b : kernel) sup1 = std::max(sup1, std::abs(b - lead));
    lv.c1 = sup1 / std::pow(ell, n - 1);
    lv.c2 = *std::max_element(dev.begin(), dev.end());
    if (rep.cscK) {
      const double pred = (std::pow(ell, n) + 0.5 * rep.scalar_curvature * std::pow(ell, n - 1)) / nfact;
      double sup_r = 0.0;
      for (double b : kernel) sup_r = std::max(sup_r, std::abs(b - pred));
      lv.remainder_sup = sup_r * std::pow(ell, 2 - n);
      lv.pullback_scaled = static_cast<double>(ell) * ell * lv.c2;
    }
    rep.levels.push_back(lv);
  }

  std::vector<double> xs, means;
  for (const auto& lv : rep.levels) {
    rep.fitted_c1 = std::max(rep.fitted_c1, lv.c1);
    rep.fitted_c2 = std::max(rep.fitted_c2, lv.c2);
    if (rep.cscK) {
      rep.fitted_c6 = std::isnan(rep.fitted_c6) ? lv.remainder_sup : std::max(rep.fitted_c6, lv.remainder_sup);
      rep.fitted_c7 = std::isnan(rep.fitted_c7) ? lv.pullback_scaled : std::max(rep.fitted_c7, lv.pullback_scaled);
    }
    xs.push_back(lv.ell);
    means.push_back(lv.kernel_mean);
  }
  if (static_cast<int>(xs.size()) >= n + 1) {
    const Eigen::VectorXd coef = poly_fit(xs, means, n);
    rep.leading_coefficient = coef(n);
    rep.subleading_coefficient = coef(n - 1);
  }
  return rep;
}

nlohmann::json BergmanReport::to_json() const {
  nlohmann::json j;
  j["model"] = model;
  j["resolution"] = resolution;
  j["cscK"] = cscK;
  j["scalar_curvature"] = json_number(scalar_curvature);
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels) {
    lv.push_back({{"ell", l.ell},
                  {"dimension", l.dimension},
                  {"kernel_min", json_number(l.kernel_min)},
                  {"kernel_max", json_number(l.kernel_max)},
                  {"kernel_mean", json_number(l.kernel_mean)},
                  {"kernel_integral", json_number(l.kernel_integral)},
                  {"c1", json_number(l.c1)},
                  {"c2", json_number(l.c2)},
                  {"remainder_sup", json_number(l.remainder_sup)},
                  {"pullback_scaled", json_number(l.pullback_scaled)}});
  }
  j["levels"] = lv;
  j["fitted"] = {{"c1", json_number(fitted_c1)},
                 {"c2", json_number(fitted_c2)},
                 {"c6", json_number(fitted_c6)},
                 {"c7", json_number(fitted_c7)},
                 {"leading_coefficient", json_number(leading_coefficient)},
                 {"subleading_coefficient", json_number(subleading_coefficient)}};
  j["flags"] = flags;
  return j;
}

std::string BergmanReport::curves_csv() const {
  std::ostringstream out;
  out << "ell,dimension,kernel_min,kernel_max,kernel_mean,kernel_integral,c1,c2,remainder_sup,"
         "pullback_scaled\n";
  for (const auto& l : levels) {
    out << l.ell << ',' << l.dimension << ',' << format_double(l.kernel_min) << ','
        << format_double(l.kernel_max) << ',' << format_double(l.kernel_mean) << ','
        << format_double(l.kernel_integral) << ',' << format_double(l.c1) << ','
        << format_double(l.c2) << ',' << format_double(l.remainder_sup) << ','
        << format_double(l.pullback_scaled) << '\n';
  }
  return out.str();
}

}  // namespace dflab
