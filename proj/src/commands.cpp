#include "dflab/commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dflab/chowslope.hpp"
#include "dflab/dfalgebraic.hpp"
#include "dflab/error.hpp"
#include "dflab/report_io.hpp"
#include "dflab/schema.hpp"
#include "dflab/sections.hpp"
#include "dflab/testconfig.hpp"

namespace dflab {

nlohmann::json Check::to_json() const {
  nlohmann::json j = {{"name", name},
                      {"status", status},
                      {"measured", json_number(measured)},
                      {"tolerance", json_number(tolerance)},
                      {"relation", relation}};
  if (!note.empty()) j["note"] = note;
  return j;
}

bool RunReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const Check& c) { return c.status == "fail"; });
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) checks_json.push_back(c.to_json());
  return {{"command", command},
          {"config", config},
          {"versions",
           {{"dflab", DFLAB_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", BOOST_LIB_VERSION}}},
          {"checks", checks_json},
          {"passed", passed()},
          {"results", results},
          {"files", files}};
}

nlohmann::json prepare_config(const nlohmann::json& raw, const CliOverrides& overrides) {
  if (!raw.is_object()) throw ConfigError("config must be a JSON object");
  nlohmann::json cfg = raw;
  if (overrides.out) cfg["output"]["directory"] = *overrides.out;
  if (overrides.resolution) cfg["quadrature"]["resolution"] = *overrides.resolution;
  if (overrides.seed) {
    cfg["seed"] = *overrides.seed;
    if (cfg.contains("sequence") && cfg["sequence"].is_object()) cfg["sequence"].erase("seed");
  }
  return load_experiment_config(cfg);
}

namespace {

/// measured <= tolerance
Check at_most(std::string name, double measured, double tolerance) {
  Check c{std::move(name), "", measured, tolerance, "<=", ""};
  c.status = measured <= tolerance ? "pass" : "fail";
  return c;
}

Check skipped(std::string name, double tolerance, std::string note) {
  return {std::move(name), "skipped", NAN, tolerance, "<=", std::move(note)};
}

std::filesystem::path out_dir(const nlohmann::json& cfg) {
  return cfg["output"]["directory"].get<std::string>();
}

QuadratureOptions quadrature_options(const nlohmann::json& cfg) {
  QuadratureOptions q;
  q.resolution = cfg["quadrature"]["resolution"].get<int>();
  q.angular = cfg["quadrature"]["angular"].get<int>();
  q.torus_reduced = cfg["quadrature"]["torus_reduced"].get<bool>();
  return q;
}

SlopeOptions slope_options(const nlohmann::json& cfg) {
  SlopeOptions s;
  s.mass_tolerance = cfg["tolerances"]["mass"].get<double>();
  s.orbit.order = cfg["orbit"]["order"].get<int>();
  s.orbit.newton_tolerance = cfg["tolerances"]["newton"].get<double>();
  return s;
}

double tol(const nlohmann::json& cfg, const char* name) {
  return cfg["tolerances"][name].get<double>();
}

bool is_cscK(const PolarizedManifoldModel& model) {
  try {
    scalar_curvature(model);
    return true;
  } catch (const Unsupported&) {
    return false;
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<double> s_grid(const nlohmann::json& cfg) {
  auto g = cfg["s_grid"].get<std::vector<double>>();
  validate_s_grid(g);
  return g;
}

ConfigSequence load_sequence(SectionCache& cache, const nlohmann::json& cfg) {
  return sequence_from_json(cache, cfg["sequence"], cfg["seed"].get<std::uint64_t>());
}

void finish(RunReport& rep, const nlohmann::json& cfg) {
  rep.config = cfg;
  write_json(out_dir(cfg), "report.json", rep.to_json());
}

std::string sparse_csv(const Eigen::MatrixXcd& m) {
  std::ostringstream os;
  os << "row,col,re,im\n";
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != Complex(0.0))
        os << r << ',' << c << ',' << format_double(m(r, c).real()) << ','
           << format_double(m(r, c).imag()) << '\n';
  return os.str();
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

}  // namespace

RunReport cmd_gram(const nlohmann::json& cfg) {
  RunReport rep;
  rep.command = "gram";
  const auto model = PolarizedManifoldModel::from_json(cfg["model"]);
  const auto qopts = quadrature_options(cfg);
  const auto dir = out_dir(cfg);
  const int n = model.dimension();
  const bool fs = model.is_fubini_study();
  double closed_form_err = 0.0, normalization_err = 0.0;
  nlohmann::json levels = nlohmann::json::array();
  for (int ell : cfg["exponents"].get<std::vector<int>>()) {
    const auto data = build_section_data(model, ell, qopts);
    const auto& g = data->gram;
    const std::string tag = "ell" + std::to_string(ell);
    rep.files.push_back(write_text(dir, "gram_" + tag + ".csv", sparse_csv(g.entries)));
    rep.files.push_back(write_text(dir, "onb_" + tag + ".csv", sparse_csv(data->onb.coeffs)));
    if (cfg["output"]["rule_csv"].get<bool>()) {
      std::ostringstream os;
      write_rule_csv(data->rule, os);
      rep.files.push_back(write_text(dir, "rule_" + tag + ".csv", os.str()));
    }
    if (fs) {
      const double total = std::tgamma(ell + n + 1.0);
      for (std::size_t a = 0; a < g.basis.size(); ++a) {
        double expect = factorial(n);
        for (int m : g.basis.monomial(a)) expect *= std::tgamma(m + 1.0);
        expect /= total;
        for (std::size_t b = 0; b < g.basis.size(); ++b) {
          const double want = a == b ? expect : 0.0;
          closed_form_err = std::max(closed_form_err, std::abs(g.entries(a, b) - want));
        }
      }
    }
    const double mass = integrate_nodes(data->rule, [&](const QuadratureNode& node) {
      return bergman_kernel(data->onb, model, node.point);
    });
    normalization_err =
        std::max(normalization_err, std::abs(mass - static_cast<double>(g.basis.size())));
    levels.push_back({{"ell", ell},
                      {"dimension", g.basis.size()},
                      {"diagonal_only", g.diagonal},
                      {"min_eigenvalue", json_number(g.min_eigenvalue)},
                      {"condition_number", json_number(data->onb.condition_number)},
                      {"provenance", data->onb.provenance},
                      {"warnings", data->onb.warnings},
                      {"rule", {{"nodes", data->rule.nodes.size()},
                                {"exactness_degree", data->rule.exactness_degree},
                                {"description", data->rule.description}}},
                      {"kernel_integral", json_number(mass)}});
  }
  if (fs)
    rep.checks.push_back(at_most("gram_closed_form", closed_form_err, tol(cfg, "gram_closed_form")));
  else
    rep.checks.push_back(skipped("gram_closed_form", tol(cfg, "gram_closed_form"),
                                 "closed form holds for the Fubini-Study metric only"));
  rep.checks.push_back(at_most("normalization", normalization_err, tol(cfg, "normalization")));
  rep.results = {{"model", model.to_json()}, {"levels", levels}};
  rep.files.push_back(write_json(dir, "gram.json", rep.results));
  finish(rep, cfg);
  return rep;
}

RunReport cmd_bergman(const nlohmann::json& cfg) {
  RunReport rep;
  rep.command = "bergman";
  const auto model = PolarizedManifoldModel::from_json(cfg["model"]);
  const auto dir = out_dir(cfg);
  const int n = model.dimension();
  const auto br = bergman_expansion_check(model, cfg["exponents"].get<std::vector<int>>(),
                                          quadrature_options(cfg));
  rep.files.push_back(write_json(dir, "bergman.json", br.to_json()));
  rep.files.push_back(write_text(dir, "bergman_curves.csv", br.curves_csv()));

  double norm_err = 0.0, const_err = 0.0;
  for (const auto& lv : br.levels) {
    const double N = static_cast<double>(lv.dimension);
    norm_err = std::max(norm_err, std::abs(lv.kernel_integral - N));
    const_err = std::max({const_err, std::abs(lv.kernel_max - N), std::abs(lv.kernel_min - N)});
  }
  rep.checks.push_back(at_most("normalization", norm_err, tol(cfg, "normalization")));
  if (model.is_fubini_study())
    rep.checks.push_back(at_most("bergman_constancy", const_err, tol(cfg, "bergman_constancy")));
  else
    rep.checks.push_back(skipped("bergman_constancy", tol(cfg, "bergman_constancy"),
                                 "B is constant for balanced metrics only"));
  if (br.cscK && std::isfinite(br.leading_coefficient)) {
    const double nf = factorial(n);
    const double err = std::max(std::abs(br.leading_coefficient - 1.0 / nf),
                                std::abs(br.subleading_coefficient - br.scalar_curvature / (2.0 * nf)));
    rep.checks.push_back(at_most("expansion_coefficients", err, tol(cfg, "expansion_coefficients")));
  } else {
    rep.checks.push_back(skipped("expansion_coefficients", tol(cfg, "expansion_coefficients"),
                                 "needs a cscK metric and at least n + 1 exponents"));
  }
  rep.results = {{"fitted_c1", json_number(br.fitted_c1)},
                 {"fitted_c2", json_number(br.fitted_c2)},
                 {"leading_coefficient", json_number(br.leading_coefficient)},
                 {"subleading_coefficient", json_number(br.subleading_coefficient)}};
  finish(rep, cfg);
  return rep;
}

RunReport cmd_fdot(const nlohmann::json& cfg) {
  RunReport rep;
  rep.command = "fdot";
  const auto model = PolarizedManifoldModel::from_json(cfg["model"]);
  const auto dir = out_dir(cfg);
  SectionCache cache(model, quadrature_options(cfg));
  const auto seq = load_sequence(cache, cfg);
  const auto grid = s_grid(cfg);
  const auto sopts = slope_options(cfg);

  std::string csv = "j,ell,s,fdot,f\n";
  nlohmann::json per = nlohmann::json::array();
  double zero_max = 0.0, decomposition_err = 0.0, second_min = INFINITY;
  std::vector<std::string> flags = seq.flags;
  std::size_t profiles = 0;
  for (std::size_t j = 0; j < seq.configs.size(); ++j) {
    const auto& c = seq.configs[j];
    const auto dec = slope_zero_decomposition(c, model);
    decomposition_err = std::max(decomposition_err, std::abs(dec.fdot0 - (dec.r1 + dec.r2)));
    SlopeProfile prof;
    try {
      prof = slope_profile(c, model, grid, sopts);
    } catch (const NumericalError& e) {
      flags.push_back("configuration " + std::to_string(j) + " (ell = " + std::to_string(c.ell) +
                      ") has no profile: " + e.what());
      per.push_back({{"j", j}, {"ell", c.ell}, {"decomposition", dec.to_json()}});
      continue;
    }
    ++profiles;
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv += csv_row({std::to_string(j), std::to_string(c.ell), format_double(grid[i]),
                      format_double(prof.fdot[i]), format_double(prof.f[i])});
    zero_max = std::max(zero_max, std::abs(prof.fdot.back()));
    second_min = std::min(second_min, prof.second_difference_min);
    per.push_back({{"j", j},
                   {"ell", c.ell},
                   {"decomposition", dec.to_json()},
                   {"monotonicity_defect", json_number(prof.monotonicity_defect)},
                   {"second_difference_min", json_number(prof.second_difference_min)}});
  }
  if (profiles == 0) throw NumericalError("no slope profile could be computed");
  rep.files.push_back(write_text(dir, "slopes.csv", csv));
  if (is_cscK(model))
    rep.checks.push_back(at_most("slope_zero", zero_max, tol(cfg, "slope_zero")));
  else
    rep.checks.push_back(skipped("slope_zero", tol(cfg, "slope_zero"),
                                 "the slope at s = 0 vanishes for balanced metrics only"));
  rep.checks.push_back(at_most("decomposition", decomposition_err, tol(cfg, "decomposition")));
  rep.checks.push_back(at_most("convexity", -second_min, tol(cfg, "convexity")));
  rep.results = {{"sequence", seq.to_json()}, {"configurations", per}, {"flags", flags}};
  rep.files.push_back(write_json(dir, "fdot.json", rep.results));
  finish(rep, cfg);
  return rep;
}

RunReport cmd_f1(const nlohmann::json& cfg) {
  RunReport rep;
  rep.command = "f1";
  const auto model = PolarizedManifoldModel::from_json(cfg["model"]);
  const auto dir = out_dir(cfg);
  SectionCache cache(model, quadrature_options(cfg));
  const auto seq = load_sequence(cache, cfg);
  const auto f1 = f1_estimate(seq, model, s_grid(cfg), cfg["tail_start"].get<std::size_t>(),
                              slope_options(cfg));
  rep.files.push_back(write_json(dir, "f1.json", f1.to_json()));
  rep.files.push_back(write_text(dir, "slopes.csv", f1.slopes_csv()));
  rep.files.push_back(write_text(dir, "plot.dat", f1.plot_data()));

  if (is_cscK(model))
    rep.checks.push_back(at_most("f1_upper", f1.estimate, tol(cfg, "f1_upper")));
  else
    rep.checks.push_back(skipped("f1_upper", tol(cfg, "f1_upper"),
                                 "F1 <= 0 is asserted for cscK metrics only"));
  rep.checks.push_back(at_most("estimate_below_zero_slope", f1.estimate - f1.l_at_zero, 0.0));
  double second_min = INFINITY;
  for (const auto& p : f1.profiles) second_min = std::min(second_min, p.second_difference_min);
  rep.checks.push_back(at_most("convexity", -second_min, tol(cfg, "convexity")));
  rep.results = {{"estimate", json_number(f1.estimate)},
                 {"l_at_zero", json_number(f1.l_at_zero)},
                 {"flags", f1.flags}};
  finish(rep, cfg);
  return rep;
}

RunReport cmd_df(const nlohmann::json& cfg) {
  RunReport rep;
  rep.command = "df";
  const auto dir = out_dir(cfg);
  const auto& dcfg = cfg["df"];
  const auto model = PolarizedManifoldModel::from_json(cfg["model"]);
  nlohmann::json results;

  DFResult df;
  int n = model.dimension();
  if (dcfg.contains("samples")) {
    if (dcfg.contains("dimension")) n = dcfg["dimension"].get<int>();
    if (dcfg["compare"].get<bool>())
      throw ConfigError("comparison needs a generated sequence, not explicit samples");
    df = compute_df(samples_from_json(dcfg["samples"]), n);
    results["source"] = "samples";
  } else {
    SectionCache cache(model, quadrature_options(cfg));
    const auto seq = load_sequence(cache, cfg);
    df = compute_df(samples_from_sequence(seq), n);
    results["source"] = "sequence";
    results["sequence"] = seq.to_json();
    if (dcfg["compare"].get<bool>()) {
      const auto f1 = f1_estimate(seq, model, s_grid(cfg), cfg["tail_start"].get<std::size_t>(),
                                  slope_options(cfg));
      const double lambda =
          dcfg.contains("lambda") ? dcfg["lambda"].get<double>() : default_lambda(n);
      const double beta =
          dcfg.contains("beta") ? dcfg["beta"].get<double>() : beta_from_sequence(seq, n);
      if (beta > 0.0) {
        results["comparison"] =
            fact_compare(f1.estimate, df, beta, lambda, tol(cfg, "fact_zero")).to_json();
      } else {
        results["comparison"] = {
            {"f1_sequence", json_number(f1.estimate)},
            {"note", "beta is 0 for this sequence; set df.beta to compare"}};
      }
    }
  }
  results["df"] = df.to_json();
  rep.results = results;
  rep.files.push_back(write_json(dir, "df.json", results));
  finish(rep, cfg);
  return rep;
}

int run_command(const std::string& command, const std::filesystem::path& config_path,
                const CliOverrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    nlohmann::json raw;
    {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path.string());
      try {
        raw = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    const auto cfg = prepare_config(raw, overrides);
    RunReport rep;
    if (command == "gram") rep = cmd_gram(cfg);
    else if (command == "bergman") rep = cmd_bergman(cfg);
    else if (command == "fdot") rep = cmd_fdot(cfg);
    else if (command == "f1") rep = cmd_f1(cfg);
    else if (command == "df") rep = cmd_df(cfg);
    else throw ConfigError("unknown command '" + command + "'");
    for (const auto& c : rep.checks)
      out << c.status << ' ' << c.name << " measured=" << format_double(c.measured) << ' '
          << c.relation << ' ' << format_double(c.tolerance) << '\n';
    return rep.passed() ? kExitOk : kExitCheckFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Unsupported& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ExactnessError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace dflab
