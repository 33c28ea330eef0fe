#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace dflab {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

struct CliOverrides {
  std::optional<std::string> out;
  std::optional<int> resolution;
  std::optional<std::uint64_t> seed;
};

struct Check {
  std::string name;
  std::string status;  // "pass", "fail" or "skipped"
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation;  // how measured is compared with tolerance
  std::string note;

  nlohmann::json to_json() const;
};

struct RunReport {
  std::string command;
  nlohmann::json config;
  std::vector<Check> checks;
  nlohmann::json results;
  std::vector<std::string> files;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Applies CLI overrides and validates against the schema (throws ConfigError).
nlohmann::json prepare_config(const nlohmann::json& raw, const CliOverrides& overrides);

/// Runs one subcommand on a validated config, writing every output file and
/// report.json into the configured directory.
RunReport cmd_gram(const nlohmann::json& config);
RunReport cmd_bergman(const nlohmann::json& config);
RunReport cmd_fdot(const nlohmann::json& config);
RunReport cmd_f1(const nlohmann::json& config);
RunReport cmd_df(const nlohmann::json& config);

/// Full pipeline used by the executable: parse, validate, run, and map
/// failures to exit codes. One line per check goes to `out`, diagnostics to `err`.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const CliOverrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace dflab
