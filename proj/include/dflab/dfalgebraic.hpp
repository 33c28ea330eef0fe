#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "dflab/rational.hpp"
#include "dflab/testconfig.hpp"

namespace dflab {

struct WeightSample {
  long long ell = 0;
  Rational dimension;  // N_ell
  Rational total;      // w_ell
};

using WeightSamples = std::vector<WeightSample>;

/// Polynomial in ell with exact coefficients, constant term first.
struct RationalPolynomial {
  std::vector<Rational> coeffs;

  int degree() const;  // -1 for the zero polynomial
  Rational operator()(const Rational& x) const;
  std::vector<std::string> to_strings() const;
};

struct FittedPolynomials {
  RationalPolynomial w;  // degree <= n + 1
  RationalPolynomial N;  // degree <= n
};

/// Exact interpolation of w (n+2 samples) and N (n+1 samples); every further
/// sample is a held-out check. Throws ConfigError when underdetermined or
/// inconsistent.
FittedPolynomials fit_polynomials(const WeightSamples& samples, int n);

struct DonaldsonCoefficients {
  Rational f0;
  Rational f1;
};

/// Coefficients of ell^0 and ell^-1 in w / (ell N) at ell = infinity.
DonaldsonCoefficients donaldson_f1(const RationalPolynomial& w, const RationalPolynomial& N, int n);

struct DFResult {
  FittedPolynomials fit;
  Rational f0;
  Rational f1;
  WeightSamples samples;

  nlohmann::json to_json() const;
};

DFResult compute_df(const WeightSamples& samples, int n);

/// Weight data of a generated sequence: w_ell = sum_alpha b_alpha + N_ell * centering,
/// i.e. the total of the raw weights before SL normalization.
WeightSamples samples_from_sequence(const ConfigSequence& seq);

/// c_1(X)^n[X] / pi on P^n, with pi read as the circle constant.
double default_lambda(int n);

struct FactComparison {
  double f1_sequence = 0.0;
  double f1_algebraic = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double rhs = 0.0;  // lambda * F1(X, L) / beta
  double difference = 0.0;
  double zero_tolerance = 0.0;
  std::string verdict;  // "agree" or "disagree"
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

/// Qualitative comparison of the sequence invariant against beta^-1 lambda
/// F1(X, L): verdict "agree" when both sides have the same sign class
/// (negative, zero within tolerance, positive). Throws ConfigError if beta <= 0.
FactComparison fact_compare(double f1_sequence, const DFResult& df, double beta, double lambda,
                            double zero_tolerance = 1e-6);

/// Limit surrogate for |b_j|_1: the value at the largest exponent.
double beta_from_sequence(const ConfigSequence& seq, int n);

WeightSamples samples_from_json(const nlohmann::json& j);
nlohmann::json samples_to_json(const WeightSamples& s);

}  // namespace dflab
