#pragma once

#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <random>
#include <string>
#include <vector>

#include "dflab/rational.hpp"
#include "dflab/sections.hpp"

namespace dflab {

/// SL-normalized weights of a one-parameter subgroup on V_ell, indexed by
/// the orthonormal basis of the owning configuration.
struct WeightVector {
  int ell = 0;
  std::vector<Rational> b;

  bool is_zero() const;
  std::vector<double> to_doubles() const;
};

/// b = raw - mean(raw). Throws ConfigError on empty input.
WeightVector sl_normalize(int ell, const std::vector<Rational>& raw);

struct WeightNorms {
  Rational l1;    // sum |b_alpha| / ell^{n+1}
  Rational linf;  // max |b_alpha| / ell
};

WeightNorms norms(const WeightVector& w, int n);

struct TestConfiguration {
  int ell = 0;
  WeightVector weights;
  /// Mean of the raw weights removed by SL normalization.
  Rational centering;
  /// Quadrature rule and Gram matrix the basis was built from.
  std::shared_ptr<const SectionData> sections;
  /// Basis diagonalizing the action: sigma_alpha has weight b_alpha.
  std::shared_ptr<const OrthonormalBasis> onb;
  bool trivial = true;
  /// The basis is monomial-aligned, so the action commutes with the torus.
  bool toric = false;
  /// d = ell^n * c_1(L)^n[X]
  long long d = 0;
  std::vector<std::string> flags;
};

/// Assembles a configuration; the weights are SL-normalized here.
TestConfiguration make_configuration(const PolarizedManifoldModel& model,
                                     std::shared_ptr<const SectionData> sections,
                                     std::shared_ptr<const OrthonormalBasis> onb,
                                     const std::vector<Rational>& raw);

struct ConfigSequence {
  std::string generator;
  nlohmann::json params = nlohmann::json::object();
  std::vector<TestConfiguration> configs;
  std::vector<std::string> flags;

  std::vector<int> exponents() const;
  nlohmann::json to_json() const;
};

struct Membership {
  bool member = false;
  std::vector<int> exponents;
  std::string reason;
};

/// Desk-scale growth condition: exponents strictly increase.
Membership is_member_of_M(const ConfigSequence& seq);

/// Raw weight of each basis section = its vanishing order at p. Torus-fixed
/// points use the canonical basis; other points use the order-of-vanishing
/// filtration in a rotated frame, orthonormalized by Gram-Schmidt (flagged).
ConfigSequence gen_vanishing_order_sequence(SectionCache& cache, const std::vector<Complex>& p,
                                            const std::vector<int>& ells);

/// Weight of the monomial Z^m is -<m, a>.
ConfigSequence gen_automorphism_sequence(SectionCache& cache, const std::vector<long long>& a,
                                         const std::vector<int>& ells);

/// Independent uniform integer weights in [-range, range] on the monomials.
ConfigSequence gen_random_sequence(SectionCache& cache, const std::vector<int>& ells,
                                   std::uint64_t seed, int range = 5);

ConfigSequence gen_trivial_sequence(SectionCache& cache, const std::vector<int>& ells);

/// Raw weights given per exponent against the canonical basis.
ConfigSequence gen_explicit_sequence(SectionCache& cache, const std::vector<int>& ells,
                                     const std::vector<std::vector<Rational>>& raw);

/// Builds a sequence from {"generator": ..., ...} as accepted by the CLI.
ConfigSequence sequence_from_json(SectionCache& cache, const nlohmann::json& spec,
                                  std::uint64_t seed);

/// Integer in [lo, hi] from a mt19937_64 stream. The mapping is fixed here
/// rather than left to a standard library distribution, so sequences are
/// identical across toolchains.
long long uniform_integer(std::mt19937_64& rng, long long lo, long long hi);

}  // namespace dflab
