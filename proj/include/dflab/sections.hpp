#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "dflab/manifold.hpp"
#include "dflab/quadrature.hpp"

namespace dflab {

using MultiIndex = std::vector<int>;

/// Monomial basis of H^0(P^n, O(ell)) in ascending lexicographic order of
/// (m_0, ..., m_n).
class SectionBasis {
 public:
  SectionBasis(int n, int ell);

  int dimension() const { return n_; }
  int exponent() const { return ell_; }
  std::size_t size() const { return monomials_.size(); }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }
  const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }
  /// Throws std::out_of_range for a multi-index not in the basis.
  std::size_t index_of(const MultiIndex& m) const;

 private:
  int n_;
  int ell_;
  std::vector<MultiIndex> monomials_;
  std::map<MultiIndex, std::size_t> index_;
};

/// C(a, b) as a double-safe integer.
std::size_t binomial(int a, int b);

struct GramMatrix {
  SectionBasis basis;
  Eigen::MatrixXcd entries;
  double min_eigenvalue = 0.0;
  bool diagonal = false;

  int exponent() const { return basis.exponent(); }
};

/// rho_h^(ell)(m_a, m_b) = integral of (m_a, m_b)_h omega^n. Requires
/// rule.exactness_degree >= 2 ell. On a torus-reduced rule only the diagonal
/// is integrated; the off-diagonal torus averages vanish identically for
/// invariant metrics.
GramMatrix gram(const PolarizedManifoldModel& model, const QuadratureRule& rule, int ell);

struct OrthonormalBasis {
  SectionBasis basis;
  /// Column alpha holds the monomial coefficients of sigma_alpha.
  Eigen::MatrixXcd coeffs;
  std::string provenance;
  /// sigma_alpha = coeff * monomial(aligned[alpha]) when every column has a
  /// single nonzero entry; empty otherwise.
  std::vector<std::size_t> aligned;
  std::vector<double> log_abs2_coeff;
  double condition_number = 1.0;
  std::vector<std::string> warnings;

  int exponent() const { return basis.exponent(); }
  std::size_t size() const { return basis.size(); }
  bool monomial_aligned() const { return !aligned.empty(); }
};

/// C = (L^*)^{-1} for the lower Cholesky factor G = L L^*; C^* G C = I.
OrthonormalBasis orthonormalize(const GramMatrix& gram);

/// Gram-Schmidt of the ordered spanning set whose monomial coordinates are
/// the columns of `span` (same Cholesky construction applied to span^* G span).
OrthonormalBasis orthonormalize_spanning(const GramMatrix& gram, const Eigen::MatrixXcd& span,
                                         const std::string& provenance);

/// Quadrature rule, Gram matrix and canonical orthonormal basis for one ell.
struct SectionData {
  QuadratureRule rule;
  GramMatrix gram;
  OrthonormalBasis onb;
};

std::shared_ptr<const SectionData> build_section_data(const PolarizedManifoldModel& model,
                                                      int ell,
                                                      const QuadratureOptions& options);

/// Memoizes build_section_data per exponent.
class SectionCache {
 public:
  SectionCache(PolarizedManifoldModel model, QuadratureOptions options);
  std::shared_ptr<const SectionData> get(int ell);
  const PolarizedManifoldModel& model() const { return model_; }
  const QuadratureOptions& options() const { return options_; }

 private:
  PolarizedManifoldModel model_;
  QuadratureOptions options_;
  std::mutex mutex_;
  std::map<int, std::shared_ptr<const SectionData>> cache_;
};

/// Pointwise data of the embedding x -> [e^{c_alpha} sigma_alpha(x)].
struct EmbeddingSample {
  /// log sum_alpha e^{2c_alpha} |sigma_alpha|_h^2
  double log_kernel = 0.0;
  /// sum_alpha b_alpha e^{2c_alpha}|sigma_alpha|^2 / sum_alpha e^{2c_alpha}|sigma_alpha|^2
  double weighted_mean = 0.0;
  /// log of (i/2pi d dbar log Q_c)^n / omega^n
  double log_pullback = 0.0;
  /// max_i |lambda_i - ell| for the eigenvalues of the pullback form relative
  /// to omega (only when requested).
  double eigen_deviation = 0.0;
};

struct SampleRequest {
  std::span<const double> shift;    // c_alpha; empty means 0
  std::span<const double> weights;  // b_alpha; empty skips weighted_mean
  bool pullback = false;
  bool eigenvalues = false;
};

/// Evaluates sections and the Hessian of log Q_c from exact polynomial
/// derivatives. Monomial-aligned bases use a log-domain path that stays
/// finite for arbitrarily large shifts.
class EmbeddingEvaluator {
 public:
  EmbeddingEvaluator(const PolarizedManifoldModel& model, const OrthonormalBasis& onb,
                     bool force_general = false);

  EmbeddingSample at(const QuadratureNode& node, const SampleRequest& req) const;
  EmbeddingSample at(const ChartPoint& point, const SampleRequest& req) const;
  /// Log-domain evaluation at a point given by its moment coordinates
  /// log(|Z_k|^2/|Z|^2). Requires a monomial-aligned basis.
  EmbeddingSample at_log_moment(const std::vector<double>& log_u, double density,
                                const SampleRequest& req) const;

  bool uses_log_domain() const { return log_domain_; }

 private:
  EmbeddingSample log_domain(const std::vector<double>& log_u, double density,
                             const SampleRequest& req) const;
  EmbeddingSample general(const ChartPoint& point, double density, const SampleRequest& req) const;

  const PolarizedManifoldModel* model_;
  const OrthonormalBasis* onb_;
  bool log_domain_;
};

/// B(omega) = sum_alpha |sigma_alpha|_h^2 at a point.
double bergman_kernel(const OrthonormalBasis& onb, const PolarizedManifoldModel& model,
                      const ChartPoint& point);

/// Density of (i/2pi d dbar log sum e^{2c}|sigma|^2)^n relative to omega^n.
double fs_pullback_density(const OrthonormalBasis& onb, const PolarizedManifoldModel& model,
                           std::span<const double> shift, const ChartPoint& point);

struct BergmanLevel {
  int ell = 0;
  std::size_t dimension = 0;
  double kernel_min = 0.0, kernel_max = 0.0, kernel_mean = 0.0;
  double kernel_integral = 0.0;  // should equal dimension
  double c1 = 0.0;               // sup |B - ell^n/n!| / ell^{n-1}
  double c2 = 0.0;               // sup |lambda - ell|
  double remainder_sup = NAN;    // sup |R_ell|, cscK only
  double pullback_scaled = NAN;  // ell^2 sup |lambda - ell|, cscK only
};

struct BergmanReport {
  nlohmann::json model;
  int resolution = 0;
  bool cscK = false;
  double scalar_curvature = NAN;
  std::vector<BergmanLevel> levels;
  double fitted_c1 = 0.0, fitted_c2 = 0.0;
  double fitted_c6 = NAN, fitted_c7 = NAN;
  /// Least-squares fit of mean B against ell: coefficients of ell^n and ell^{n-1}.
  double leading_coefficient = NAN, subleading_coefficient = NAN;
  std::vector<std::string> flags;

  nlohmann::json to_json() const;
  std::string curves_csv() const;
};

/// Measures the expansion constants of B and of the pullback form over the given
/// exponents. cscK-only quantities are skipped (and flagged) otherwise.
BergmanReport bergman_expansion_check(const PolarizedManifoldModel& model,
                                      const std::vector<int>& ells,
                                      const QuadratureOptions& options);

}  // namespace dflab
