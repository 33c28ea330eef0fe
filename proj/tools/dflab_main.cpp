#include <CLI11.hpp>
#include <iostream>

#include "dflab/commands.hpp"
#include "dflab/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dflab: Bergman kernels, Chow-norm slopes and Donaldson-Futaki invariants on P^n"};
  app.require_subcommand(1);

  std::string config;
  dflab::CliOverrides ov;
  std::string out;
  int resolution = 0;
  std::uint64_t seed = 0;

  const char* names[][2] = {{"gram", "Gram matrices and orthonormal bases"},
                            {"bergman", "Bergman kernel expansion check"},
                            {"fdot", "Chow-norm slope profiles of a configuration sequence"},
                            {"f1", "Sequence Donaldson-Futaki estimate"},
                            {"df", "Algebraic Donaldson-Futaki invariant from weight data"}};
  for (auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output.directory)");
    sub->add_option("--resolution", resolution, "quadrature resolution")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for random generators");
  }
  app.footer("Thread count: DFLAB_THREADS. Exit codes: 0 ok, 1 check failed, 2 config, 3 numerical.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dflab::kExitConfig;
  }
  auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) ov.out = out;
  if (sub->count("--resolution")) ov.resolution = resolution;
  if (sub->count("--seed")) ov.seed = seed;
  return dflab::run_command(sub->get_name(), config, ov, std::cout, std::cerr);
}
