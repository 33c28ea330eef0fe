#include "dflab/testconfig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dflab/error.hpp"

namespace dflab {

bool WeightVector::is_zero() const {
  return std::all_of(b.begin(), b.end(), [](const Rational& x) { return x == 0; });
}

std::vector<double> WeightVector::to_doubles() const {
  std::vector<double> out;
  out.reserve(b.size());
  for (const auto& x : b) out.push_back(to_double(x));
  return out;
}

WeightVector sl_normalize(int ell, const std::vector<Rational>& raw) {
  if (raw.empty()) throw ConfigError("weight vector must be nonempty");
  Rational sum = 0;
  for (const auto& x : raw) sum += x;
  const Rational mean = sum / static_cast<long long>(raw.size());
  WeightVector w{ell, {}};
  w.b.reserve(raw.size());
  for (const auto& x : raw) w.b.push_back(x - mean);
  return w;
}

WeightNorms norms(const WeightVector& w, int n) {
  Rational l1 = 0, mx = 0;
  for (const auto& x : w.b) {
    const Rational a = abs(x);
    l1 += a;
    if (a > mx) mx = a;
  }
  Rational ell_pow = 1;
  for (int k = 0; k < n + 1; ++k) ell_pow *= w.ell;
  return {l1 / ell_pow, mx / w.ell};
}

TestConfiguration make_configuration(const PolarizedManifoldModel& model,
                                     std::shared_ptr<const SectionData> sections,
                                     std::shared_ptr<const OrthonormalBasis> onb,
                                     const std::vector<Rational>& raw) {
  if (raw.size() != onb->size())
    throw ConfigError("weight vector has " + std::to_string(raw.size()) +
                      " entries, expected N = " + std::to_string(onb->size()));
  TestConfiguration c;
  c.ell = onb->exponent();
  c.weights = sl_normalize(c.ell, raw);
  c.centering = raw.empty() ? Rational(0) : raw[0] - c.weights.b[0];
  c.sections = std::move(sections);
  c.onb = std::move(onb);
  c.trivial = c.weights.is_zero();
  c.toric = c.onb->monomial_aligned() && model.is_torus_invariant();
  long long d = 1;
  for (int k = 0; k < model.dimension(); ++k) d *= c.ell;
  c.d = d * model.degree();
  return c;
}

std::vector<int> ConfigSequence::exponents() const {
  std::vector<int> out;
  for (const auto& c : configs) out.push_back(c.ell);
  return out;
}

nlohmann::json ConfigSequence::to_json() const {
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& c : configs) weights.push_back(to_strings(c.weights.b));
  return {{"generator", generator},
          {"params", params},
          {"exponents", exponents()},
          {"weights", weights},
          {"flags", flags}};
}

Membership is_member_of_M(const ConfigSequence& seq) {
  Membership m;
  m.exponents = seq.exponents();
  if (m.exponents.empty()) {
    m.reason = "empty sequence";
    return m;
  }
  for (std::size_t i = 1; i < m.exponents.size(); ++i) {
    if (m.exponents[i] <= m.exponents[i - 1]) {
      m.reason = "exponents not strictly increasing at position " + std::to_string(i);
      return m;
    }
  }
  m.member = true;
  return m;
}

long long uniform_integer(std::mt19937_64& rng, long long lo, long long hi) {
  if (hi < lo) throw ConfigError("empty integer range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling keeps the mapping exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return lo + static_cast<long long>(v % span);
}

namespace {

void check_exponents(const std::vector<int>& ells) {
  if (ells.empty()) throw ConfigError("exponent list must be nonempty");
  for (int l : ells)
    if (l < 1) throw ConfigError("exponents must be >= 1");
}

std::shared_ptr<const OrthonormalBasis> canonical_basis(const std::shared_ptr<const SectionData>& d) {
  return std::shared_ptr<const OrthonormalBasis>(d, &d->onb);
}

/// Monomial coordinates of prod_k W_k^{m_k}, where W_k = sum_j forms(j, k) Z_j.
Eigen::VectorXcd expand_product(const Eigen::MatrixXcd& forms, const MultiIndex& m, int n) {
  std::vector<Complex> poly{Complex(1.0)};
  std::vector<MultiIndex> terms{MultiIndex(n + 1, 0)};
  int degree = 0;
  for (int k = 0; k <= n; ++k) {
    for (int r = 0; r < m[k]; ++r) {
      SectionBasis to(n, degree + 1);
      std::vector<Complex> next(to.size(), Complex(0.0));
      for (std::size_t i = 0; i < terms.size(); ++i) {
        if (poly[i] == Complex(0.0)) continue;
        MultiIndex e = terms[i];
        for (int j = 0; j <= n; ++j) {
          if (forms(j, k) == Complex(0.0)) continue;
          ++e[j];
          next[to.index_of(e)] += poly[i] * forms(j, k);
          --e[j];
        }
      }
      poly = std::move(next);
      terms = to.monomials();
      ++degree;
    }
  }
  Eigen::VectorXcd out(static_cast<Eigen::Index>(poly.size()));
  for (std::size_t i = 0; i < poly.size(); ++i) out(static_cast<Eigen::Index>(i)) = poly[i];
  return out;
}

}  // namespace

ConfigSequence gen_vanishing_order_sequence(SectionCache& cache, const std::vector<Complex>& p,
                                            const std::vector<int>& ells) {
  const auto& model = cache.model();
  const int n = model.dimension();
  if (static_cast<int>(p.size()) != n + 1)
    throw ConfigError("point must have n+1 homogeneous coordinates");
  check_exponents(ells);
  double norm2 = 0.0;
  int nonzero = 0, fixed_index = -1;
  for (int k = 0; k <= n; ++k) {
    if (!std::isfinite(p[k].real()) || !std::isfinite(p[k].imag()))
      throw ConfigError("point coordinates must be finite");
    norm2 += std::norm(p[k]);
    if (p[k] != Complex(0.0)) {
      ++nonzero;
      fixed_index = k;
    }
  }
  if (nonzero == 0) throw ConfigError("point must have a nonzero coordinate");

  ConfigSequence seq;
  seq.generator = "vanishing-order";
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& c : p) pj.push_back({c.real(), c.imag()});
  seq.params = {{"point", pj}};
  const bool fixed = nonzero == 1 && model.is_torus_invariant();

  Eigen::MatrixXcd unitary;
  if (!fixed) {
    seq.flags.push_back(
        "point is not torus-fixed: weights assigned by the order-of-vanishing filtration in a "
        "Gram-Schmidt basis");
    Eigen::VectorXcd v(n + 1);
    for (int k = 0; k <= n; ++k) v(k) = p[k] / std::sqrt(norm2);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr{Eigen::MatrixXcd(v)};
    unitary = qr.householderQ() * Eigen::MatrixXcd::Identity(n + 1, n + 1);
  }

  for (int ell : ells) {
    auto data = cache.get(ell);
    const auto& basis = data->onb.basis;
    std::vector<Rational> raw;
    if (fixed) {
      for (std::size_t a = 0; a < basis.size(); ++a)
        raw.emplace_back(ell - basis.monomial(a)[fixed_index]);
      seq.configs.push_back(make_configuration(model, data, canonical_basis(data), raw));
      continue;
    }
    // W_k = sum_j conj(U_jk) Z_j; W_1..W_n vanish at p, so W^m vanishes to order ell - m_0.
    const Eigen::MatrixXcd forms = unitary.conjugate();
    std::vector<std::size_t> order(basis.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return basis.monomial(a)[0] < basis.monomial(b)[0];
    });
    const auto nb = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd span(nb, nb);
    for (Eigen::Index c = 0; c < nb; ++c) {
      const auto& m = basis.monomial(order[static_cast<std::size_t>(c)]);
      span.col(c) = expand_product(forms, m, n);
      raw.emplace_back(ell - m[0]);
    }
    auto onb = std::make_shared<const OrthonormalBasis>(
        orthonormalize_spanning(data->gram, span, "gram-schmidt(vanishing-order filtration)"));
    auto cfg = make_configuration(model, data, onb, raw);
    cfg.flags.push_back("filtration fallback");
    seq.configs.push_back(std::move(cfg));
  }
  return seq;
}

ConfigSequence gen_automorphism_sequence(SectionCache& cache, const std::vector<long long>& a,
                                         const std::vector<int>& ells) {
  const auto& model = cache.model();
  const int n = model.dimension();
  if (static_cast<int>(a.size()) != n + 1)
    throw ConfigError("automorphism weight vector must have n+1 entries");
  check_exponents(ells);
  ConfigSequence seq;
  seq.generator = "automorphism";
  seq.params = {{"weights", a}};
  for (int ell : ells) {
    auto data = cache.get(ell);
    if (!data->onb.monomial_aligned())
      throw ConfigError("automorphism weights need a monomial-aligned orthonormal basis");
    const auto& basis = data->onb.basis;
    std::vector<Rational> raw(basis.size());
    for (std::size_t al = 0; al < basis.size(); ++al) {
      const auto& m = basis.monomial(data->onb.aligned[al]);
      long long dot = 0;
      for (int k = 0; k <= n; ++k) dot += m[k] * a[k];
      raw[al] = Rational(-dot);
    }
    seq.configs.push_back(make_configuration(model, data, canonical_basis(data), raw));
  }
  return seq;
}

ConfigSequence gen_random_sequence(SectionCache& cache, const std::vector<int>& ells,
                                   std::uint64_t seed, int range) {
  check_exponents(ells);
  if (range < 1) throw ConfigError("random weight range must be >= 1");
  ConfigSequence seq;
  seq.generator = "random";
  seq.params = {{"seed", seed}, {"range", range}};
  std::mt19937_64 rng(seed);
  for (int ell : ells) {
    auto data = cache.get(ell);
    std::vector<Rational> raw(data->onb.size());
    for (auto& x : raw) x = Rational(uniform_integer(rng, -range, range));
    seq.configs.push_back(make_configuration(cache.model(), data, canonical_basis(data), raw));
  }
  return seq;
}

ConfigSequence gen_trivial_sequence(SectionCache& cache, const std::vector<int>& ells) {
  check_exponents(ells);
  ConfigSequence seq;
  seq.generator = "trivial";
  for (int ell : ells) {
    auto data = cache.get(ell);
    std::vector<Rational> raw(data->onb.size(), Rational(0));
    seq.configs.push_back(make_configuration(cache.model(), data, canonical_basis(data), raw));
  }
  return seq;
}

ConfigSequence gen_explicit_sequence(SectionCache& cache, const std::vector<int>& ells,
                                     const std::vector<std::vector<Rational>>& raw) {
  check_exponents(ells);
  if (raw.size() != ells.size())
    throw ConfigError("explicit weights must list one vector per exponent");
  ConfigSequence seq;
  seq.generator = "explicit";
  nlohmann::json w = nlohmann::json::array();
  for (const auto& r : raw) w.push_back(to_strings(r));
  seq.params = {{"weights", w}};
  for (std::size_t i = 0; i < ells.size(); ++i) {
    auto data = cache.get(ells[i]);
    seq.configs.push_back(make_configuration(cache.model(), data, canonical_basis(data), raw[i]));
  }
  return seq;
}

namespace {

Rational rational_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw ConfigError("weights must be integers or \"p/q\" strings");
}

Complex complex_from_json(const nlohmann::json& v) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  throw ConfigError("point coordinates must be numbers or [re, im] pairs");
}

}  // namespace

ConfigSequence sequence_from_json(SectionCache& cache, const nlohmann::json& spec,
                                  std::uint64_t seed) {
  if (!spec.is_object()) throw ConfigError("sequence spec must be an object");
  const std::string gen = spec.value("generator", "");
  std::vector<int> ells;
  try {
    ells = spec.at("exponents").get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("sequence spec needs an integer array 'exponents'");
  }
  if (gen == "vanishing-order") {
    if (!spec.contains("point") || !spec["point"].is_array())
      throw ConfigError("vanishing-order generator needs 'point'");
    std::vector<Complex> p;
    for (const auto& c : spec["point"]) p.push_back(complex_from_json(c));
    return gen_vanishing_order_sequence(cache, p, ells);
  }
  if (gen == "automorphism") {
    if (!spec.contains("weights") || !spec["weights"].is_array())
      throw ConfigError("automorphism generator needs integer 'weights'");
    std::vector<long long> a;
    for (const auto& x : spec["weights"]) {
      if (!x.is_number_integer()) throw ConfigError("automorphism weights must be integers");
      a.push_back(x.get<long long>());
    }
    return gen_automorphism_sequence(cache, a, ells);
  }
  if (gen == "random") {
    std::uint64_t s = seed;
    if (spec.contains("seed")) {
      if (!spec["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
      s = spec["seed"].get<std::uint64_t>();
    }
    return gen_random_sequence(cache, ells, s, spec.value("range", 5));
  }
  if (gen == "trivial") return gen_trivial_sequence(cache, ells);
  if (gen == "explicit") {
    if (!spec.contains("weights") || !spec["weights"].is_array())
      throw ConfigError("explicit generator needs 'weights'");
    std::vector<std::vector<Rational>> raw;
    for (const auto& row : spec["weights"]) {
      if (!row.is_array()) throw ConfigError("explicit weights must be arrays");
      std::vector<Rational> r;
      for (const auto& x : row) r.push_back(rational_from_json(x));
      raw.push_back(std::move(r));
    }
    return gen_explicit_sequence(cache, ells, raw);
  }
  throw ConfigError("unknown sequence generator '" + gen + "'");
}

}  // namespace dflab
