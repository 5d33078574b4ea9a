#pragma once

// Bang-bang optimal control of terminal squeezing.
//
// The control is u = omega^2 in the box [omega_low^2, omega_high^2], acting on
// z = (X, X', Y, Y') through z' = (X', -u X, Y', -u Y). The figure of merit is
// the terminal Q*(tau); since omega(tau) = omega_high is fixed, maximizing Q*
// is the same as minimizing 1 / <H(tau)> = 2 / (omega_high Q*).
//
// With costate p and control Hamiltonian
//   H_c = p_X X' - u p_X' X + p_Y Y' - u p_Y' Y,
// the switching function sigma = -(p_X' X + p_Y' Y) is the coefficient of u.
// Pontryagin's principle selects u = omega_high^2 where sigma > 0 and
// u = omega_low^2 where sigma < 0, and the derivative of the objective with
// respect to a switch time t_k is H_c(t_k-) - H_c(t_k+) = (u_before - u_after) sigma(t_k).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "squeeze_forge/dynamics.hpp"
#include "squeeze_forge/protocols.hpp"

namespace sqf {

enum class HorizonMode {
  Fixed,  // all switches inside (0, horizon)
  Free,   // horizon = last switch + a quarter period at omega_high
};

struct ControlProblem {
  double omega_low = 1.0;
  double omega_high = 2.0;
  double horizon = 1.0;
  HorizonMode mode = HorizonMode::Fixed;

  // Throws ConstructionError unless 0 < omega_low <= omega_high and horizon > 0.
  void check() const;

  // Named configurations: "x2" (1 -> 2) and "x1.3" (1 -> 1.3), with the
  // horizon set to the duration of a `jumps`-jump Janszky-Adam protocol.
  static ControlProblem preset(std::string_view name, int jumps = 3);
};

struct CostateState {
  double t = 0.0;
  double px = 0.0;
  double pdx = 0.0;
  double py = 0.0;
  double pdy = 0.0;
};

// Terminal Q*(tau), with omega0 = omega(0) and omega = omega(tau).
double objective(const FrequencyProtocol& protocol, const IntegratorOptions& options = {});

// Gradient of Q* with respect to (X, X', Y, Y').
CostateState terminal_costate(const FundamentalState& end, double omega0, double omega_final);

// Backward integration of the adjoint system from p(tau) = grad Q*(tau) to
// every trajectory time. Constant segments use the transposed transfer
// matrix; other segments are integrated backwards with Dormand-Prince 5(4).
// The trajectory must be sorted, lie in [0, tau] and end at tau.
std::vector<CostateState> costate_propagate(const FrequencyProtocol& protocol,
                                            std::span<const FundamentalState> trajectory,
                                            const IntegratorOptions& options = {});

double control_hamiltonian(const FundamentalState& z, const CostateState& p, double omega);

double switching_value(const FundamentalState& z, const CostateState& p);

std::vector<double> switching_function(std::span<const FundamentalState> trajectory,
                                       std::span<const CostateState> costates);

struct SwitchGradient {
  double objective = 1.0;
  std::vector<double> switch_times;
  std::vector<double> gradient;  // dQ*/dt_k
};

// dQ*/dt_k at every frequency jump of an arbitrary protocol, through
// propagate + costate_propagate.
SwitchGradient switching_time_gradient(const FrequencyProtocol& protocol, const IntegratorOptions& options = {});

// Bang-bang protocol starting at omega_low; an odd number of switches ends at omega_high.
FrequencyProtocol bang_bang_protocol(const ControlProblem& problem, std::span<const double> switch_times);
double protocol_horizon(const ControlProblem& problem, std::span<const double> switch_times);

// Objective and gradient for two-level protocols via exact transfer matrices.
SwitchGradient evaluate_switches(const ControlProblem& problem, std::span<const double> switch_times);

// Janszky-Adam switch times: quarter-period holds alternating from omega_low.
// In fixed-horizon mode they are compressed to fit inside the horizon if needed.
std::vector<double> janszky_adam_switch_times(const ControlProblem& problem, std::size_t n_switches);

enum class InitStrategy { Uniform, Random, JanszkyAdam, All };

struct SolverOptions {
  InitStrategy init = InitStrategy::All;
  std::uint64_t seed = 0;
  // Overrides `init` when set.
  std::optional<std::vector<double>> initial_switch_times;
  std::size_t max_iterations = 400;
  // Converged when max_k |dQ*/dt_k| < tolerance * Q*.
  double tolerance = 1e-8;
  bool parallel_starts = true;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  double residual = 0.0;
};

struct OptimizationResult {
  FrequencyProtocol protocol;
  std::vector<double> switch_times;
  double horizon = 0.0;
  double achieved_qstar = 1.0;
  double achieved_r = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double first_order_residual = 0.0;  // max_k |dQ*/dt_k| / Q*
  std::string start;                  // "uniform", "random", "ja" or "custom"
  std::vector<IterationRecord> history;
};

// Maximizes Q*(tau) over the switch times of an n_switches bang-bang protocol
// by BFGS ascent with a backtracking line search, falling back to Nelder-Mead
// when the line search stalls. n_switches must be odd.
OptimizationResult solve_bangbang(const ControlProblem& problem, std::size_t n_switches,
                                  const SolverOptions& options = {});

struct IntervalCheck {
  double start = 0.0;
  double end = 0.0;
  double omega = 0.0;
  int active_sign = 0;  // +1 at omega_high, -1 at omega_low
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool consistent = true;
};

struct SwitchCheck {
  double time = 0.0;
  double gradient = 0.0;
  double crossing_distance = 0.0;  // to the nearest zero of sigma
};

struct StationarityReport {
  std::vector<IntervalCheck> intervals;
  std::vector<SwitchCheck> switches;
  double objective = 1.0;
  double max_gradient = 0.0;
  double relative_residual = 0.0;
  double max_crossing_distance = 0.0;
  bool singular_arc = false;
  bool sign_consistent = true;
  bool stationary = true;
};

// Pontryagin check of a two-level piecewise-constant protocol. Throws
// ContractError if the protocol is not bang-bang between the problem's levels.
StationarityReport verify_stationarity(const FrequencyProtocol& protocol, const ControlProblem& problem,
                                       std::size_t samples = 4001);

}  // namespace sqf
