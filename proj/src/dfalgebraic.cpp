#include "dflab/dfalgebraic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "dflab/error.hpp"
#include "dflab/report_io.hpp"

namespace dflab {

int RationalPolynomial::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    if (coeffs[k] != 0) return k;
  return -1;
}

Rational RationalPolynomial::operator()(const Rational& x) const {
  Rational v = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<std::string> RationalPolynomial::to_strings() const { return dflab::to_strings(coeffs); }

namespace {

/// Newton divided-difference interpolation through (x_i, y_i), returned in
/// the monomial basis.
RationalPolynomial interpolate(const std::vector<Rational>& x, const std::vector<Rational>& y) {
  const std::size_t m = x.size();
  std::vector<Rational> dd = y;
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = m - 1; i >= level; --i)
      dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - level]);
  // Horner expansion of sum dd[k] prod_{i<k} (t - x_i).
  std::vector<Rational> poly{dd[m - 1]};
  for (std::size_t k = m - 1; k-- > 0;) {
    std::vector<Rational> next(poly.size() + 1, Rational(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * x[k];
    }
    next[0] += dd[k];
    poly = std::move(next);
  }
  return RationalPolynomial{poly};
}

}  // namespace

FittedPolynomials fit_polynomials(const WeightSamples& samples, int n) {
  if (n < 1) throw ConfigError("dimension must be >= 1");
  const std::size_t need = static_cast<std::size_t>(n) + 2;
  if (samples.size() < need)
    throw ConfigError("underdetermined weight data: " + std::to_string(samples.size()) +
                      " samples, need at least " + std::to_string(need));
  WeightSamples sorted = samples;
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightSample& a, const WeightSample& b) { return a.ell < b.ell; });
  std::set<long long> seen;
  for (const auto& s : sorted) {
    if (s.ell < 1) throw ConfigError("sample exponents must be >= 1");
    if (!seen.insert(s.ell).second)
      throw ConfigError("duplicate sample exponent " + std::to_string(s.ell));
  }
  std::vector<Rational> x, yw, yn;
  for (const auto& s : sorted) {
    x.emplace_back(s.ell);
    yw.push_back(s.total);
    yn.push_back(s.dimension);
  }
  FittedPolynomials fit;
  fit.w = interpolate({x.begin(), x.begin() + need}, {yw.begin(), yw.begin() + need});
  fit.N = interpolate({x.begin(), x.begin() + need - 1}, {yn.begin(), yn.begin() + need - 1});
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i >= need && fit.w(x[i]) != yw[i])
      throw ConfigError("inconsistent weight data: w is not a polynomial of degree <= " +
                        std::to_string(n + 1) + " (held-out ell = " + std::to_string(sorted[i].ell) +
                        ")");
    if (i >= need - 1 && fit.N(x[i]) != yn[i])
      throw ConfigError("inconsistent dimension data: N is not a polynomial of degree <= " +
                        std::to_string(n) + " (held-out ell = " + std::to_string(sorted[i].ell) +
                        ")");
  }
  fit.w.coeffs.resize(n + 2, Rational(0));
  fit.N.coeffs.resize(n + 1, Rational(0));
  return fit;
}

DonaldsonCoefficients donaldson_f1(const RationalPolynomial& w, const RationalPolynomial& N, int n) {
  auto coeff = [](const RationalPolynomial& p, int k) {
    return k >= 0 && k < static_cast<int>(p.coeffs.size()) ? p.coeffs[k] : Rational(0);
  };
  if (w.degree() > n + 1) throw ConfigError("w has degree above n + 1");
  if (N.degree() != n || coeff(N, n) <= 0)
    throw ConfigError("N must have degree n with positive leading coefficient");
  // w / (ell N) = (w_{n+1} + w_n x + ...) / (N_n + N_{n-1} x + ...), x = 1/ell.
  const Rational nn = coeff(N, n);
  DonaldsonCoefficients out;
  out.f0 = coeff(w, n + 1) / nn;
  out.f1 = (coeff(w, n) - out.f0 * coeff(N, n - 1)) / nn;
  return out;
}

DFResult compute_df(const WeightSamples& samples, int n) {
  DFResult r;
  r.fit = fit_polynomials(samples, n);
  const auto c = donaldson_f1(r.fit.w, r.fit.N, n);
  r.f0 = c.f0;
  r.f1 = c.f1;
  r.samples = samples;
  return r;
}

nlohmann::json samples_to_json(const WeightSamples& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : s)
    j.push_back({{"ell", x.ell}, {"N", to_string(x.dimension)}, {"w", to_string(x.total)}});
  return j;
}

WeightSamples samples_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("samples must be an array");
  WeightSamples out;
  auto rat = [](const nlohmann::json& v, const char* what) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw ConfigError(std::string("sample field '") + what + "' must be an integer or \"p/q\"");
  };
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("ell") || !e.contains("N") || !e.contains("w"))
      throw ConfigError("each sample needs ell, N and w");
    if (!e["ell"].is_number_integer()) throw ConfigError("sample ell must be an integer");
    out.push_back({e["ell"].get<long long>(), rat(e["N"], "N"), rat(e["w"], "w")});
  }
  return out;
}

nlohmann::json DFResult::to_json() const {
  return {{"w_coefficients", fit.w.to_strings()},
          {"N_coefficients", fit.N.to_strings()},
          {"F0", to_string(f0)},
          {"F1", to_string(f1)},
          {"samples", samples_to_json(samples)}};
}

WeightSamples samples_from_sequence(const ConfigSequence& seq) {
  WeightSamples out;
  for (const auto& c : seq.configs) {
    Rational total = 0;
    for (const auto& b : c.weights.b) total += b;
    const auto count = static_cast<long long>(c.weights.b.size());
    total += c.centering * count;
    out.push_back({c.ell, Rational(count), total});
  }
  return out;
}

double default_lambda(int n) { return std::pow(n + 1.0, n) / std::numbers::pi; }

double beta_from_sequence(const ConfigSequence& seq, int n) {
  if (seq.configs.empty()) throw ConfigError("empty sequence has no beta");
  return to_double(norms(seq.configs.back().weights, n).l1);
}

namespace {

int sign_class(double v, double tol) {
  if (std::abs(v) <= tol) return 0;
  return v > 0 ? 1 : -1;
}

}  // namespace

FactComparison fact_compare(double f1_sequence, const DFResult& df, double beta, double lambda,
                            double zero_tolerance) {
  if (!(beta > 0.0)) throw ConfigError("comparison needs beta > 0");
  FactComparison c;
  c.f1_sequence = f1_sequence;
  c.f1_algebraic = to_double(df.f1);
  c.beta = beta;
  c.lambda = lambda;
  c.rhs = lambda * c.f1_algebraic / beta;
  c.difference = f1_sequence - c.rhs;
  c.zero_tolerance = zero_tolerance;
  c.verdict = sign_class(f1_sequence, zero_tolerance) == sign_class(c.rhs, zero_tolerance)
                  ? "agree"
                  : "disagree";
  c.notes.push_back("verdict compares sign classes only; the normalization of lambda is not fixed");
  return c;
}

nlohmann::json FactComparison::to_json() const {
  return {{"f1_sequence", json_number(f1_sequence)},
          {"f1_algebraic", json_number(f1_algebraic)},
          {"beta", json_number(beta)},
          {"lambda", json_number(lambda)},
          {"rhs", json_number(rhs)},
          {"difference", json_number(difference)},
          {"zero_tolerance", json_number(zero_tolerance)},
          {"verdict", verdict},
          {"notes", notes}};
}

}  // namespace dflab
