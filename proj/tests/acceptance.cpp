// Acceptance harness: one PASS/FAIL line per criterion.
// Usage: dflab_acceptance [criterion...]   (default: all)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dflab/chowslope.hpp"
#include "dflab/commands.hpp"
#include "dflab/dfalgebraic.hpp"
#include "dflab/parallel.hpp"
#include "dflab/report_io.hpp"
#include "dflab/sections.hpp"
#include "dflab/testconfig.hpp"
#include "support.hpp"

using namespace dflab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Accumulates named measurements against pinned tolerances.
class Ledger {
 public:
  void at_most(const std::string& what, double measured, double tol) {
    const bool ok = measured <= tol;
    pass_ = pass_ && ok;
    entries_ << (entries_.tellp() > 0 ? "; " : "") << what << '=' << format_double(measured)
             << (ok ? " <= " : " > ") << format_double(tol);
  }
  void require(const std::string& what, bool ok) {
    pass_ = pass_ && ok;
    entries_ << (entries_.tellp() > 0 ? "; " : "") << what << '=' << (ok ? "yes" : "no");
  }
  Outcome outcome() const { return {pass_, entries_.str()}; }

 private:
  bool pass_ = true;
  std::ostringstream entries_;
};

std::shared_ptr<const OrthonormalBasis> canonical(const std::shared_ptr<const SectionData>& d) {
  return {d, &d->onb};
}

QuadratureOptions resolution(int r, bool reduced = false) {
  QuadratureOptions o;
  o.resolution = r;
  o.torus_reduced = reduced;
  return o;
}

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i <= b; ++i) v.push_back(i);
  return v;
}

Rational factorial(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// 1. Gram matrices of P^1 FS against a!(ell-a)!/(ell+1)!.
Outcome gram_oracle() {
  const auto model = PolarizedManifoldModel::fubini_study(1);
  double err = 0.0;
  for (int ell = 1; ell <= 8; ++ell) {
    const auto d = build_section_data(model, ell, {});
    for (int a = 0; a <= ell; ++a)
      for (int b = 0; b <= ell; ++b) {
        const double want = a == b ? to_double(factorial(a) * factorial(ell - a) / factorial(ell + 1)) : 0.0;
        err = std::max(err, std::abs(d->gram.entries(a, b) - want));
      }
  }
  Ledger l;
  l.at_most("max_entry_error", err, 1e-9);
  return l.outcome();
}

// 2. Bergman kernel constancy and the two-term expansion on FS.
Outcome bergman_constancy() {
  Ledger l;
  const auto p1 = PolarizedManifoldModel::fubini_study(1);
  const auto r1 = bergman_expansion_check(p1, range(1, 32), resolution(40));
  double dev1 = 0.0;
  bool predicted = true;
  const Rational s1 = scalar_curvature(p1);
  for (const auto& lv : r1.levels) {
    const double N = lv.ell + 1.0;
    dev1 = std::max({dev1, std::abs(lv.kernel_max - N), std::abs(lv.kernel_min - N)});
    predicted = predicted && Rational(lv.ell + 1) == (Rational(lv.ell) + s1 / 2) / factorial(1);
  }
  l.at_most("P1_max_|B-(ell+1)|", dev1, 1e-7);
  l.require("P1_ell+1_equals_(ell+S/2)/n!_exactly", predicted && s1 == 2);

  const auto p2 = PolarizedManifoldModel::fubini_study(2);
  const auto r2 = bergman_expansion_check(p2, range(1, 8), resolution(32));
  double dev2 = 0.0;
  for (const auto& lv : r2.levels) {
    const double N = (lv.ell + 1.0) * (lv.ell + 2.0) / 2.0;
    dev2 = std::max({dev2, std::abs(lv.kernel_max - N), std::abs(lv.kernel_min - N)});
  }
  l.at_most("P2_max_|B-C(ell+2,2)|", dev2, 1e-7);
  const Rational predicted_sub = scalar_curvature(p2) / 2 / factorial(2);
  l.require("P2_S/(2 n!)_equals_3/2_exactly", predicted_sub == Rational(3, 2));
  l.at_most("P2_fitted_subleading_error", std::abs(r2.subleading_coefficient - 1.5), 1e-6);
  return l.outcome();
}

// 3. Integral of B equals N for FS and perturbed metrics.
Outcome normalization() {
  Ledger l;
  double err1 = 0.0, err2 = 0.0;
  for (double eps : {0.0, 0.05, 0.1}) {
    const auto m1 = eps == 0.0 ? PolarizedManifoldModel::fubini_study(1)
                               : PolarizedManifoldModel::perturbed(1, eps, Potential::U);
    for (const auto& lv : bergman_expansion_check(m1, range(1, 16), resolution(32)).levels)
      err1 = std::max(err1, std::abs(lv.kernel_integral - static_cast<double>(lv.dimension)));
    const auto m2 = eps == 0.0 ? PolarizedManifoldModel::fubini_study(2)
                               : PolarizedManifoldModel::perturbed(2, eps, Potential::U);
    for (const auto& lv : bergman_expansion_check(m2, {1, 2, 4, 8, 16}, resolution(24)).levels)
      err2 = std::max(err2, std::abs(lv.kernel_integral - static_cast<double>(lv.dimension)));
  }
  l.at_most("P1_max_|int B - N|", err1, 1e-8);
  l.at_most("P2_max_|int B - N|", err2, 1e-8);
  return l.outcome();
}

// 4. Pullback density on FS, and stability of the fitted constants on a
//    perturbed metric under resolution doubling.
Outcome pullback_estimates() {
  Ledger l;
  const auto fs = PolarizedManifoldModel::fubini_study(1);
  std::mt19937_64 rng(2024);
  double dev = 0.0;
  for (int ell : {2, 4, 8, 16}) {
    const auto d = build_section_data(fs, ell, {});
    for (int i = 0; i < 100; ++i) {
      const auto& node = d->rule.nodes[uniform_integer(rng, 0, static_cast<long long>(d->rule.nodes.size()) - 1)];
      dev = std::max(dev, std::abs(fs_pullback_density(d->onb, fs, {}, node.point) - ell));
    }
  }
  l.at_most("FS_max_|pullback/omega - ell|", dev, 1e-9);
  const auto fsr = bergman_expansion_check(fs, {2, 4, 8, 16}, resolution(32));
  double scaled = 0.0;
  for (const auto& lv : fsr.levels) scaled = std::max(scaled, lv.pullback_scaled);
  l.at_most("FS_max_ell^2*sup|lambda-ell|", scaled, 1e-6);

  const auto pert = PolarizedManifoldModel::perturbed(1, 0.1, Potential::U);
  const auto a = bergman_expansion_check(pert, {2, 4, 8, 16}, resolution(32));
  const auto b = bergman_expansion_check(pert, {2, 4, 8, 16}, resolution(64));
  l.at_most("perturbed_C1_relative_change", std::abs(b.fitted_c1 / a.fitted_c1 - 1.0), 0.2);
  l.at_most("perturbed_C2_relative_change", std::abs(b.fitted_c2 / a.fitted_c2 - 1.0), 0.2);
  return l.outcome();
}

// 5. The slope at s = 0 and both parts of its decomposition vanish on FS.
Outcome slope_at_zero() {
  Ledger l;
  std::mt19937_64 rng(5);
  double f = 0.0, r1 = 0.0, r2 = 0.0;
  for (int n = 1; n <= 2; ++n) {
    SectionCache cache(PolarizedManifoldModel::fubini_study(n), {});
    for (int ell : {2, 4, 8}) {
      const auto d = cache.get(ell);
      for (int t = 0; t < 10; ++t) {
        const auto c = make_configuration(cache.model(), d, canonical(d), testsupport::random_weights(rng, d->onb.size()));
        const auto dec = slope_zero_decomposition(c, cache.model());
        f = std::max({f, std::abs(fdot(c, cache.model(), 0.0)), std::abs(dec.fdot0)});
        r1 = std::max(r1, std::abs(dec.r1));
        r2 = std::max(r2, std::abs(dec.r2));
      }
    }
  }
  l.at_most("max_|fdot(0)|", f, 1e-8);
  l.at_most("max_|R1|", r1, 1e-8);
  l.at_most("max_|R2|", r2, 1e-8);
  return l.outcome();
}

// 6. Convexity, scaling invariance, antisymmetry; product configurations on FS.
Outcome convexity_structure() {
  Ledger l;
  const auto grid = default_s_grid();
  double second = 0.0, scaling = 0.0, anti = 0.0, product = 0.0;
  for (double eps : {0.0, 0.1}) {
    SectionCache cache(eps == 0.0 ? PolarizedManifoldModel::fubini_study(1)
                                  : PolarizedManifoldModel::perturbed(1, eps, Potential::U),
                       {});
    const std::vector<int> ells{2, 4, 8, 16};
    std::vector<ConfigSequence> seqs{
        gen_vanishing_order_sequence(cache, {Complex(1.0), Complex(0.0)}, ells),
        gen_automorphism_sequence(cache, {1, -1}, ells), gen_random_sequence(cache, ells, 6)};
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      for (const auto& c : seqs[k].configs) {
        std::vector<Rational> raw2, rawm;
        for (const auto& b : c.weights.b) {
          raw2.push_back(2 * b);
          rawm.push_back(-b);
        }
        const auto c2 = make_configuration(cache.model(), c.sections, c.onb, raw2);
        const auto cm = make_configuration(cache.model(), c.sections, c.onb, rawm);
        const auto prof = slope_profile(c, cache.model(), grid);
        second = std::min(second, prof.second_difference_min);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          scaling = std::max(scaling, std::abs(fdot(c2, cache.model(), grid[i]) - prof.fdot[i]));
          anti = std::max(anti, std::abs(fdot(cm, cache.model(), -grid[i]) + prof.fdot[i]));
          if (eps == 0.0 && k < 2) product = std::max(product, std::abs(prof.fdot[i]));
        }
      }
    }
  }
  l.at_most("-min_second_difference", -second, 1e-7);
  l.at_most("max_scaling_defect", scaling, 1e-10);
  l.at_most("max_antisymmetry_defect", anti, 1e-9);
  l.at_most("FS_product_max_|fdot|", product, 1e-7);
  return l.outcome();
}

// 7. Uniform bound of fdot_j(0) on a perturbed metric, and the decomposition.
Outcome uniform_bound() {
  Ledger l;
  const auto model = PolarizedManifoldModel::perturbed(1, 0.1, Potential::U);
  const std::vector<int> ells{2, 4, 8, 16, 32};
  double sups[2];
  double split = 0.0;
  const int res[2] = {40, 80};
  for (int k = 0; k < 2; ++k) {
    SectionCache cache(model, resolution(res[k]));
    const auto seq = gen_vanishing_order_sequence(cache, {Complex(1.0), Complex(1.0)}, ells);
    sups[k] = -INFINITY;
    for (const auto& c : seq.configs) {
      const auto dec = slope_zero_decomposition(c, model);
      sups[k] = std::max(sups[k], dec.fdot0);
      split = std::max(split, std::abs(dec.fdot0 - (dec.r1 + dec.r2)));
    }
  }
  l.require("sup_finite", std::isfinite(sups[0]) && std::isfinite(sups[1]));
  l.at_most("sup_relative_change", std::abs(sups[1] - sups[0]) / std::abs(sups[0]), 0.1);
  l.at_most("max_|fdot(0)-(R1+R2)|", split, 1e-9);
  return l.outcome();
}

// 8. F1 <= 0 at desk scale on FS.
Outcome theorem_desk_scale() {
  Ledger l;
  const std::vector<int> ells{2, 4, 8, 16, 32};
  double worst = -INFINITY, fitted_c = 0.0;
  bool below = true;
  int count = 0;
  for (int n = 1; n <= 2; ++n) {
    SectionCache cache(PolarizedManifoldModel::fubini_study(n), resolution(40, n == 2));
    std::vector<Complex> p(n + 1, Complex(0.0));
    p[0] = 1.0;
    std::vector<long long> a(n + 1, 0);
    a[0] = 1;
    a[n] = -1;
    std::vector<ConfigSequence> seqs{gen_vanishing_order_sequence(cache, p, ells),
                                     gen_automorphism_sequence(cache, a, ells)};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) seqs.push_back(gen_random_sequence(cache, ells, seed));
    for (const auto& seq : seqs) {
      const auto rep = f1_estimate(seq, cache.model(), default_s_grid(), 0);
      worst = std::max(worst, rep.estimate);
      below = below && rep.estimate <= rep.l_at_zero && rep.included.size() == ells.size();
      fitted_c = std::max(fitted_c, rep.zero_slope_scaled);
      ++count;
    }
  }
  l.require("sequences=" + std::to_string(count) + "_all_estimates<=L(0)_exactly", below);
  l.at_most("max_F1_estimate", worst, 1e-6);
  l.at_most("fitted_C_in_|fdot(0)|<=C/ell", fitted_c, 1e-6);
  return l.outcome();
}

// 9. Exact algebraic DF.
Outcome algebraic_df() {
  Ledger l;
  SectionCache cache(PolarizedManifoldModel::fubini_study(1), {});
  const auto van = compute_df(samples_from_sequence(gen_vanishing_order_sequence(cache, {Complex(1.0), Complex(0.0)}, {1, 2, 3, 4})), 1);
  const auto aut = compute_df(samples_from_sequence(gen_automorphism_sequence(cache, {2, -1}, {1, 2, 3, 4})), 1);
  l.require("product_P1_F1==0", van.f1 == 0 && aut.f1 == 0);
  WeightSamples s;
  for (long long ell : {1, 2, 3, 4, 7}) s.push_back({ell, Rational(ell + 1), Rational(ell * ell)});
  const auto syn = compute_df(s, 1);
  l.require("w=ell^2,N=ell+1_F1==-1", syn.f1 == -1);
  auto shifted = s;
  for (auto& x : shifted) x.total += Rational(5, 7) * x.ell * x.dimension;
  l.require("centering_shift_keeps_F1", compute_df(shifted, 1).f1 == syn.f1);
  return l.outcome();
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

// 10. Byte-identical outputs for different thread counts.
Outcome reproducibility() {
  Ledger l;
  const auto root = fs::temp_directory_path() / "dflab_acceptance_repro";
  const std::vector<std::pair<std::string, nlohmann::json>> runs{
      {"gram", {{"model", {{"n", 2}}}, {"exponents", {2, 4}}, {"output", {{"rule_csv", true}}}}},
      {"bergman", {{"model", {{"metric", {{"type", "perturbed"}, {"eps", 0.1}}}}}, {"exponents", {1, 2, 4, 8}}}},
      {"fdot", {{"model", {{"n", 2}}}, {"sequence", {{"generator", "random"}, {"exponents", {2, 4}}}}}},
      {"f1", {{"model", {{"metric", {{"type", "perturbed"}, {"eps", 0.1}}}}},
              {"sequence", {{"generator", "random"}, {"exponents", {2, 4, 8}}}}}},
      {"df", {{"sequence", {{"generator", "random"}, {"exponents", {1, 2, 3}}}}, {"df", {{"compare", false}}}}},
  };
  const int saved = thread_count();
  bool all_same = true;
  std::size_t compared = 0;
  for (const auto& [cmd, cfg] : runs) {
    const auto dir = root / cmd;
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << cfg.dump();
    CliOverrides ov;
    ov.out = (dir / "out").string();
    std::map<std::string, std::string> first;
    for (int threads : {1, 4}) {
      set_thread_count(threads);
      fs::remove_all(dir / "out");
      std::ostringstream out, err;
      const int code = run_command(cmd, dir / "config.json", ov, out, err);
      if (code != kExitOk && code != kExitCheckFailed) {
        all_same = false;
        std::cerr << cmd << ": " << err.str();
      }
      auto files = read_tree(dir / "out");
      if (threads == 1) {
        first = std::move(files);
      } else {
        all_same = all_same && files == first && !files.empty();
        compared += files.size();
      }
    }
  }
  set_thread_count(saved);
  l.require("commands=5_files=" + std::to_string(compared) + "_byte_identical_for_1_and_4_threads", all_same);
  return l.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gram closed form", gram_oracle},
      {"Bergman constancy and expansion", bergman_constancy},
      {"kernel normalization", normalization},
      {"pullback estimates", pullback_estimates},
      {"slope at zero", slope_at_zero},
      {"convexity and structure of the slope", convexity_structure},
      {"uniform slope bound", uniform_bound},
      {"F1 at desk scale", theorem_desk_scale},
      {"algebraic DF", algebraic_df},
      {"reproducibility", reproducibility},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  bool all = true;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "no criterion " << k << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = criteria[k - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << k << " (" << criteria[k - 1].first << "): " << (o.pass ? "PASS" : "FAIL")
              << "  " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
