#include "squeeze_forge/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "squeeze_forge/dynamics.hpp"
#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/io.hpp"
#include "squeeze_forge/optimize.hpp"
#include "squeeze_forge/squeezing.hpp"
#include "squeeze_forge/thermo.hpp"

namespace sqf::cli {

namespace fs = std::filesystem;

namespace {

std::mutex stderr_mutex;

void report_error(const char* category, const std::string& type, const std::string& message) {
  const json err = {{"error", category}, {"type", type}, {"message", message}};
  std::lock_guard<std::mutex> lock(stderr_mutex);
  std::cerr << err.dump() << '\n';
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    report_error("config", "ConfigError", e.what());
  } catch (const ConstructionError& e) {
    report_error("config", "ConstructionError", e.what());
  } catch (const ContractError& e) {
    report_error("config", "ContractError", e.what());
  } catch (const DomainError& e) {
    report_error("config", "DomainError", e.what());
  } catch (const NumericalError& e) {
    report_error("numerical", "NumericalError", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    report_error("numerical", "Exception", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}

template <typename T>
std::optional<T> opt_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

double ja_duration(double omega0, double omega1, int cycles) {
  return build_janszky_adam(omega0, omega1, cycles).duration();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t sweep_threads(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SQUEEZE_FORGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

}  // namespace

void RunConfig::check() const {
  static const std::vector<std::string> commands{"simulate", "optimize", "estimate", "sweep"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  if (grid < 2) throw ConfigError("grid resolution must be at least 2 points");
  if (command == "simulate") {
    const int sources = int(protocol_inline.has_value()) + int(protocol_file.has_value()) + int(preset.has_value());
    if (sources != 1) throw ConfigError("simulate needs exactly one protocol source (protocol, protocol_file or preset)");
  }
  if (command == "estimate" && r.has_value() == populations_file.has_value()) {
    throw ConfigError("estimate needs exactly one of r or a populations file");
  }
  if (init != "all" && init != "uniform" && init != "random" && init != "ja") {
    throw ConfigError("init must be all, uniform, random or ja");
  }
  if (mode != "fixed" && mode != "free") throw ConfigError("mode must be fixed or free");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  if (auto v = opt_field<std::string>(j, "command")) c.command = *v;
  if (auto v = opt_field<std::string>(j, "out")) c.out = *v;
  if (j.contains("protocol")) c.protocol_inline = j.at("protocol");
  if (auto v = opt_field<std::string>(j, "protocol_file")) c.protocol_file = *v;
  if (auto v = opt_field<std::string>(j, "preset")) c.preset = *v;
  if (auto v = opt_field<double>(j, "omega0")) c.omega0 = *v;
  if (auto v = opt_field<double>(j, "omega1")) c.omega1 = *v;
  if (auto v = opt_field<int>(j, "cycles")) c.cycles = *v;
  c.tau = opt_field<double>(j, "tau");
  c.periods = opt_field<double>(j, "periods");
  if (auto v = opt_field<std::size_t>(j, "grid")) c.grid = *v;
  c.switches = opt_field<std::size_t>(j, "switches");
  c.horizon = opt_field<double>(j, "horizon");
  if (auto v = opt_field<std::string>(j, "init")) c.init = *v;
  if (auto v = opt_field<std::string>(j, "mode")) c.mode = *v;
  c.r = opt_field<double>(j, "r");
  if (auto v = opt_field<std::string>(j, "populations_file")) c.populations_file = *v;
  c.shots = opt_field<std::size_t>(j, "shots");
  if (auto v = opt_field<std::uint64_t>(j, "seed")) c.seed = *v;
  if (j.contains("runs")) {
    if (!j.at("runs").is_array()) throw ConfigError("'runs' must be an array");
    for (const auto& r : j.at("runs")) c.runs.push_back(r);
  }
  return c;
}

FrequencyProtocol resolve_protocol(const RunConfig& c) {
  if (c.protocol_inline) {
    auto p = protocol_from_json(*c.protocol_inline);
    require_valid(p);
    return p;
  }
  if (c.protocol_file) {
    auto p = protocol_from_json(read_json_file(*c.protocol_file));
    require_valid(p);
    return p;
  }
  if (!c.preset) throw ConfigError("no protocol source given");
  const std::string& name = *c.preset;
  if (name == "ja") return build_janszky_adam(c.omega0, c.omega1, c.cycles);
  if (name == "sinusoid") {
    if (c.periods) return build_sinusoidal(c.omega0, c.omega1, *c.periods);
    const double duration = c.tau.value_or(ja_duration(c.omega0, c.omega1, c.cycles));
    return build_sinusoidal(c.omega0, c.omega1, duration * c.omega0 / std::numbers::pi);
  }
  if (name == "ramp") return build_linear_ramp(c.omega0, c.omega1, c.tau.value_or(10.0));
  if (name == "constant") return build_constant(c.omega0, c.tau.value_or(ja_duration(c.omega0, c.omega1, c.cycles)));
  throw ConfigError("unknown protocol preset '" + name + "' (expected ja, sinusoid, ramp or constant)");
}

int run_simulate(const RunConfig& config) {
  return guarded([&] {
    config.check();
    const auto protocol = resolve_protocol(config);
    const auto grid = uniform_grid(protocol.duration(), config.grid);
    const auto states = propagate(protocol, grid);
    const auto thermo = thermo_trajectory(protocol, states);
    const std::string traj = trajectory_csv(protocol, states);
    const std::string th = thermo_csv(thermo);
    const std::string sq = squeezing_csv(protocol, states);
    ensure_dir(config.out);
    write_text_file(config.out / "trajectory.csv", traj);
    write_text_file(config.out / "thermo.csv", th);
    write_text_file(config.out / "squeezing.csv", sq);
    write_text_file(config.out / "protocol.json", protocol_to_json(protocol).dump(2) + "\n");
    return kExitOk;
  });
}

int run_optimize(const RunConfig& config) {
  return guarded([&] {
    config.check();
    ControlProblem problem;
    if (config.preset) {
      problem = ControlProblem::preset(*config.preset, config.cycles);
    } else {
      problem.omega_low = config.omega0;
      problem.omega_high = config.omega1;
      problem.horizon = ja_duration(config.omega0, config.omega1, config.cycles);
    }
    if (config.horizon) problem.horizon = *config.horizon;
    problem.mode = config.mode == "free" ? HorizonMode::Free : HorizonMode::Fixed;
    problem.check();

    std::size_t switches = config.switches.value_or(static_cast<std::size_t>(std::max(config.cycles, 1)));
    if (switches % 2 == 0) throw ConfigError("switch count must be odd so the protocol ends at omega_high");

    SolverOptions opts;
    opts.seed = config.seed;
    if (config.init == "uniform") opts.init = InitStrategy::Uniform;
    if (config.init == "random") opts.init = InitStrategy::Random;
    if (config.init == "ja") opts.init = InitStrategy::JanszkyAdam;
    const auto result = solve_bangbang(problem, switches, opts);

    ensure_dir(config.out);
    write_text_file(config.out / "result.json", optimization_to_json(result, problem).dump(2) + "\n");
    write_text_file(config.out / "protocol.json", protocol_to_json(result.protocol).dump(2) + "\n");
    write_text_file(config.out / "convergence.csv", convergence_csv(result.history));
    return kExitOk;
  });
}

int run_estimate(const RunConfig& config) {
  return guarded([&] {
    config.check();
    FockDistribution dist;
    if (config.r) {
      dist = fock_populations(*config.r, std::nullopt, config.omega0);
    } else {
      dist = populations_from_csv(read_text(*config.populations_file), config.omega0);
    }
    if (config.shots && *config.shots > 0) dist = sample_populations(dist, *config.shots, config.seed);
    const auto est = estimate_r(dist);
    ensure_dir(config.out);
    write_text_file(config.out / "populations.csv", populations_csv(dist));
    write_text_file(config.out / "estimate.json", estimate_to_json(est).dump(2) + "\n");
    return kExitOk;
  });
}

int run_sweep(const RunConfig& config) {
  return guarded([&] {
    std::vector<RunConfig> runs;
    if (!config.runs.empty()) {
      for (const auto& j : config.runs) runs.push_back(config_from_json(j));
    } else {
      if (!config.preset) throw ConfigError("sweep needs either 'runs' or a protocol preset");
      for (int n = 1; n <= config.cycles; ++n) {
        RunConfig c = config;
        c.command = "simulate";
        c.cycles = n;
        c.runs.clear();
        runs.push_back(c);
      }
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "run_%03zu", i);
      runs[i].out = config.out / name;
      if (runs[i].command == "sweep") throw ConfigError("nested sweeps are not supported");
      runs[i].check();
    }
    ensure_dir(config.out);

    std::vector<int> codes(runs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < runs.size(); i = next++) codes[i] = run_command(runs[i]);
    };
    std::vector<std::thread> pool;
    const std::size_t threads = sweep_threads(runs.size());
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::string summary = "run,command,exit_code\n";
    int worst = kExitOk;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      summary += runs[i].out.filename().string() + "," + runs[i].command + "," + std::to_string(codes[i]) + "\n";
      worst = std::max(worst, codes[i]);
    }
    write_text_file(config.out / "summary.csv", summary);
    return worst;
  });
}

int run_command(const RunConfig& config) {
  if (config.command == "simulate") return run_simulate(config);
  if (config.command == "optimize") return run_optimize(config);
  if (config.command == "estimate") return run_estimate(config);
  if (config.command == "sweep") return run_sweep(config);
  report_error("config", "ConfigError", "unknown command '" + config.command + "'");
  return kExitConfig;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Squeezing simulator and bang-bang optimizer for the frequency-modulated oscillator",
               "squeeze_forge"};
  app.require_subcommand(1);

  std::string config_path, out, preset, init, mode, protocol_file, populations;
  double omega0 = 0, omega1 = 0, tau = 0, periods = 0, horizon = 0, r = 0;
  int cycles = 0;
  std::size_t grid = 0, shots = 0, switches = 0;
  std::uint64_t seed = 0;

  struct Bound {
    CLI::App* sub;
    std::vector<std::pair<std::string, CLI::Option*>> opts;
  };
  std::vector<Bound> subs;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "Propagate a protocol and write trajectory, thermo and squeezing CSVs"},
      {"optimize", "Optimize bang-bang switch times for maximal terminal squeezing"},
      {"estimate", "Estimate squeezing from Fock populations without fitting"},
      {"sweep", "Run several simulate/optimize/estimate jobs in parallel"}};
  for (const auto& [name, help] : commands) {
    Bound b{app.add_subcommand(name, help), {}};
    auto add = [&](const std::string& key, auto& var, const std::string& desc) {
      b.opts.emplace_back(key, b.sub->add_option("--" + key, var, desc));
    };
    add("config", config_path, "JSON configuration file");
    add("out", out, "Output directory");
    add("preset", preset, "Protocol preset ja|sinusoid|ramp|constant, or optimizer preset x2|x1.3");
    add("protocol", protocol_file, "Protocol JSON file");
    add("omega0", omega0, "Initial (lower) frequency");
    add("omega1", omega1, "Final (upper) frequency");
    add("cycles", cycles, "Number of Janszky-Adam jumps");
    add("tau", tau, "Protocol duration for ramp/constant/sinusoid presets");
    add("periods", periods, "Sinusoid periods of the 2*omega0 drive");
    add("grid", grid, "Output grid points");
    add("seed", seed, "Random seed");
    add("shots", shots, "Measurement shots for estimate (0: exact populations)");
    add("switches", switches, "Number of switches (odd)");
    add("horizon", horizon, "Optimization horizon");
    add("init", init, "Optimizer start: all|uniform|random|ja");
    add("mode", mode, "Horizon mode: fixed|free");
    add("r", r, "Squeezing parameter for synthetic populations");
    add("populations", populations, "Populations CSV (n,P)");
    subs.push_back(std::move(b));
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config", "ParseError", e.what());
    return kExitConfig;
  }

  return guarded([&] {
    const Bound* chosen = nullptr;
    for (const auto& b : subs) {
      if (b.sub->parsed()) chosen = &b;
    }
    auto given = [&](const std::string& key) {
      for (const auto& [k, o] : chosen->opts) {
        if (k == key) return o->count() > 0;
      }
      return false;
    };

    RunConfig c;
    if (given("config")) c = config_from_json(read_json_file(config_path));
    c.command = chosen->sub->get_name();
    if (given("out")) c.out = out;
    if (given("preset")) {
      c.preset = preset;
      c.protocol_inline.reset();
      c.protocol_file.reset();
    }
    if (given("protocol")) {
      c.protocol_file = protocol_file;
      c.protocol_inline.reset();
      c.preset.reset();
    }
    if (given("omega0")) c.omega0 = omega0;
    if (given("omega1")) c.omega1 = omega1;
    if (given("cycles")) c.cycles = cycles;
    if (given("tau")) c.tau = tau;
    if (given("periods")) c.periods = periods;
    if (given("grid")) c.grid = grid;
    if (given("seed")) c.seed = seed;
    if (given("shots")) c.shots = shots;
    if (given("switches")) c.switches = switches;
    if (given("horizon")) c.horizon = horizon;
    if (given("init")) c.init = init;
    if (given("mode")) c.mode = mode;
    if (given("r")) {
      c.r = r;
      c.populations_file.reset();
    }
    if (given("populations")) {
      c.populations_file = populations;
      c.r.reset();
    }
    return run_command(c);
  });
}

}  // namespace sqf::cli
