#pragma once

#include "gapcert/model_io.hpp"
#include "gapcert/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gapcert {

/// Exit-code contract shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInvalid = 2;

/// Resolved run: config file values with command-line overrides applied.
struct RunConfig {
  std::string command;
  std::filesystem::path model_path;
  std::optional<Real> lambda0;
  std::size_t joint_cap = kJointCap;
  std::size_t product_cap = kProductCap;
  Real tol_eq = kEqTol;
  Real tol_ineq = kIneqTol;
  std::vector<Real> t_grid = {0.5, 1.0, 2.0, 4.0};
  std::vector<Real> lambda_grid = {-3, -2, -1, -0.5, 0.5, 1, 2, 3};
  std::vector<Real> tilt_lambdas = {-0.5, 0.25, 0.75};
  std::uint64_t seed = 1;
  int replicas = 2000;
  std::filesystem::path out_dir;  // resolved via flag > config > env > default
  std::optional<Real> K;          // transport constant override
  std::optional<Real> K0;         // single-site transport constant for phi4 reports
  std::optional<std::pair<int, Real>> nvector;      // (p, gamma) for `bounds`
  std::vector<std::vector<int>> blocks;             // jump families for `ips`
  bool export_trajectory = false;

  struct Observable {
    std::string type = "coordinate";  // coordinate | table | random
    int site = 0;
    std::vector<Real> values;  // for type = table
  } observable;
  std::vector<Real> site_observable;  // per-point observable for the CLT check

  /// Flag-style overrides collected by the command line.
  struct Overrides {
    std::optional<std::string> model;
    std::optional<std::string> out_dir;
    std::optional<Real> lambda0;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicas;
  };
};

/// Loads a JSON run config (strict schema, unknown fields rejected) and
/// applies overrides. `command` may come from the config file or the caller.
RunConfig load_run_config(const std::filesystem::path& path, const std::string& command,
                          const RunConfig::Overrides& overrides);

/// Builds a config without a file, from the command and overrides alone.
RunConfig config_from_overrides(const std::string& command, const RunConfig::Overrides& overrides);

int cmd_certify(const RunConfig& config, std::ostream& out);
int cmd_spectrum(const RunConfig& config, std::ostream& out);
int cmd_contract(const RunConfig& config, std::ostream& out);
int cmd_ips(const RunConfig& config, std::ostream& out);
int cmd_transport(const RunConfig& config, std::ostream& out);
int cmd_bounds(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);

/// Dispatch by config.command; maps exceptions to kExitInvalid with a
/// message on `err`.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace gapcert
