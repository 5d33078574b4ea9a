#pragma once

// Batch front end: simulate, optimize, estimate and sweep.
//
// Exit codes: 0 success (including soft optimizer non-convergence), 2 bad
// configuration, 3 numerical failure. Errors are reported as one JSON object
// on standard error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "squeeze_forge/protocols.hpp"

namespace sqf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string command;  // simulate | optimize | estimate | sweep
  std::filesystem::path out = ".";

  // Protocol source for simulate: exactly one of these.
  std::optional<nlohmann::json> protocol_inline;
  std::optional<std::filesystem::path> protocol_file;
  std::optional<std::string> preset;  // ja | sinusoid | ramp | constant (simulate), x2 | x1.3 (optimize)

  double omega0 = 1.0;
  double omega1 = 2.0;
  int cycles = 3;
  std::optional<double> tau;
  std::optional<double> periods;
  std::size_t grid = 2000;

  // optimize
  std::optional<std::size_t> switches;
  std::optional<double> horizon;
  std::string init = "all";
  std::string mode = "fixed";

  // estimate
  std::optional<double> r;
  std::optional<std::filesystem::path> populations_file;
  std::optional<std::size_t> shots;
  std::uint64_t seed = 0;

  // sweep: nested run configurations
  std::vector<nlohmann::json> runs;

  // Throws ConfigError.
  void check() const;
};

// Fields not present keep their defaults. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j);

FrequencyProtocol resolve_protocol(const RunConfig& config);

// Each returns an exit code and never throws.
int run_simulate(const RunConfig& config);
int run_optimize(const RunConfig& config);
int run_estimate(const RunConfig& config);
int run_sweep(const RunConfig& config);
int run_command(const RunConfig& config);

// Full command line (args[0] is the program name).
int run_cli(const std::vector<std::string>& args);

}  // namespace sqf::cli
