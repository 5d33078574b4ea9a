#include "squeeze_forge/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <boost/numeric/odeint.hpp>

#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/squeezing.hpp"
#include "squeeze_forge/thermo.hpp"

namespace sqf {

namespace odeint = boost::numeric::odeint;

namespace {

using Vec = std::vector<double>;

double quarter_period(double omega) { return std::numbers::pi / (2.0 * omega); }

// p(a) = M^T p(b) for a constant-frequency piece of length dt.
void pull_back(CostateState& p, double omega, double dt) {
  const Transfer m = segment_transfer(omega, dt);
  const double px = m[0][0] * p.px + m[1][0] * p.pdx;
  const double pdx = m[0][1] * p.px + m[1][1] * p.pdx;
  const double py = m[0][0] * p.py + m[1][0] * p.pdy;
  const double pdy = m[0][1] * p.py + m[1][1] * p.pdy;
  p.px = px;
  p.pdx = pdx;
  p.py = py;
  p.pdy = pdy;
}

// Backward adjoint integration over local times [a, b] of a non-constant segment.
void pull_back_ode(CostateState& p, const Segment& seg, std::size_t index, double a, double b,
                   const IntegratorOptions& options) {
  using State = std::array<double, 4>;
  auto rhs = [&seg](const State& q, State& dq, double s) {
    const double w = seg.omega_at(s);
    const double u = w * w;
    dq[0] = u * q[1];
    dq[1] = -q[0];
    dq[2] = u * q[3];
    dq[3] = -q[2];
  };
  State q{p.px, p.pdx, p.py, p.pdy};
  auto stepper = odeint::make_controlled(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());
  const double w = std::max(seg.omega_at(b), 1e-300);
  const double dt0 = -std::min(b - a, 0.01 / w);
  try {
    odeint::integrate_adaptive(stepper, rhs, q, b, a, dt0);
  } catch (const std::exception& e) {
    throw PropagationError(index, std::string("adjoint integrator failed: ") + e.what());
  }
  p.px = q[0];
  p.pdx = q[1];
  p.py = q[2];
  p.pdy = q[3];
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

}  // namespace

void ControlProblem::check() const {
  if (!(omega_low > 0.0) || !(omega_high >= omega_low)) {
    throw ConstructionError("control problem needs 0 < omega_low <= omega_high");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConstructionError("control problem needs horizon > 0");
}

ControlProblem ControlProblem::preset(std::string_view name, int jumps) {
  ControlProblem p;
  p.omega_low = 1.0;
  if (name == "x2") {
    p.omega_high = 2.0;
  } else if (name == "x1.3") {
    p.omega_high = 1.3;
  } else {
    throw ConstructionError("unknown control preset '" + std::string(name) + "' (expected x2 or x1.3)");
  }
  p.horizon = build_janszky_adam(p.omega_low, p.omega_high, jumps).duration();
  return p;
}

double objective(const FrequencyProtocol& protocol, const IntegratorOptions& options) {
  const auto end = propagate_to_end(protocol, options);
  return qstar_husimi(end, protocol.omega_at(0.0), protocol.omega_at(protocol.duration()));
}

CostateState terminal_costate(const FundamentalState& z, double omega0, double omega_final) {
  return {z.t, omega0 * omega_final * z.x, omega0 * z.dx / omega_final, omega_final * z.y / omega0,
          z.dy / (omega0 * omega_final)};
}

std::vector<CostateState> costate_propagate(const FrequencyProtocol& protocol,
                                            std::span<const FundamentalState> trajectory,
                                            const IntegratorOptions& options) {
  if (trajectory.empty()) throw ContractError("costate propagation needs a non-empty trajectory");
  const double tau = protocol.duration();
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double t = trajectory[i].t;
    if (t < 0.0 || t > tau) throw ContractError("trajectory time outside the protocol range");
    if (i > 0 && t < trajectory[i - 1].t) throw ContractError("trajectory times must be sorted");
  }
  if (std::abs(trajectory.back().t - tau) > 1e-12 * std::max(1.0, tau)) {
    throw ContractError("trajectory must end at the protocol's final time");
  }

  std::vector<CostateState> out(trajectory.size());
  CostateState p = terminal_costate(trajectory.back(), protocol.omega_at(0.0), protocol.omega_at(tau));
  p.t = trajectory.back().t;
  out.back() = p;

  const auto& segs = protocol.segments();
  for (std::size_t i = trajectory.size() - 1; i-- > 0;) {
    const double lo = trajectory[i].t;
    const double hi = trajectory[i + 1].t;
    if (hi > lo) {
      const std::size_t k_hi = protocol.segment_index(hi);
      const std::size_t k_lo = protocol.segment_index(lo);
      for (std::size_t k = k_hi + 1; k-- > k_lo;) {
        const double s0 = protocol.segment_start(k);
        const double a = std::max(lo, s0);
        const double b = std::min(hi, protocol.segment_end(k));
        if (!(b > a)) continue;
        const auto& seg = segs[k];
        if (seg.is_constant()) {
          pull_back(p, std::get<Constant>(seg.shape).omega, b - a);
        } else {
          pull_back_ode(p, seg, k, std::clamp(a - s0, 0.0, seg.duration), std::clamp(b - s0, 0.0, seg.duration),
                        options);
        }
      }
    }
    p.t = lo;
    out[i] = p;
  }
  return out;
}

double control_hamiltonian(const FundamentalState& z, const CostateState& p, double omega) {
  const double u = omega * omega;
  return p.px * z.dx - u * p.pdx * z.x + p.py * z.dy - u * p.pdy * z.y;
}

double switching_value(const FundamentalState& z, const CostateState& p) { return -(p.pdx * z.x + p.pdy * z.y); }

std::vector<double> switching_function(std::span<const FundamentalState> trajectory,
                                       std::span<const CostateState> costates) {
  if (trajectory.size() != costates.size()) throw ContractError("trajectory and costates are not aligned");
  std::vector<double> sigma(trajectory.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = switching_value(trajectory[i], costates[i]);
  return sigma;
}

SwitchGradient switching_time_gradient(const FrequencyProtocol& protocol, const IntegratorOptions& options) {
  SwitchGradient out;
  out.switch_times = protocol.jump_times();
  std::vector<double> grid = out.switch_times;
  grid.push_back(protocol.duration());
  const auto traj = propagate(protocol, grid, options);
  const auto costates = costate_propagate(protocol, traj, options);
  out.objective = qstar_husimi(traj.back(), protocol.omega_at(0.0), protocol.omega_at(protocol.duration()));
  for (std::size_t k = 0; k < out.switch_times.size(); ++k) {
    const double t = out.switch_times[k];
    const std::size_t seg = protocol.segment_index(t);
    const auto& before = protocol.segments()[seg - 1];
    const double w_before = before.omega_at(before.duration);
    const double w_after = protocol.segments()[seg].omega_at(0.0);
    out.gradient.push_back((w_before * w_before - w_after * w_after) * switching_value(traj[k], costates[k]));
  }
  return out;
}

double protocol_horizon(const ControlProblem& problem, std::span<const double> switch_times) {
  if (problem.mode == HorizonMode::Free && !switch_times.empty()) {
    const double last_level = switch_times.size() % 2 == 1 ? problem.omega_high : problem.omega_low;
    return switch_times.back() + quarter_period(last_level);
  }
  return problem.horizon;
}

FrequencyProtocol bang_bang_protocol(const ControlProblem& problem, std::span<const double> switch_times) {
  const Vec times(switch_times.begin(), switch_times.end());
  return build_bang_bang(problem.omega_low, problem.omega_high, times, protocol_horizon(problem, switch_times));
}

SwitchGradient evaluate_switches(const ControlProblem& problem, std::span<const double> switch_times) {
  const std::size_t n = switch_times.size();
  const double tau = protocol_horizon(problem, switch_times);
  std::vector<double> bounds(n + 2);
  bounds[0] = 0.0;
  std::copy(switch_times.begin(), switch_times.end(), bounds.begin() + 1);
  bounds[n + 1] = tau;
  auto level = [&](std::size_t j) { return j % 2 == 0 ? problem.omega_low : problem.omega_high; };

  // Forward: states at each boundary.
  std::vector<FundamentalState> z(n + 2);
  z[0] = initial_state();
  for (std::size_t j = 0; j <= n; ++j) {
    const Transfer m = segment_transfer(level(j), bounds[j + 1] - bounds[j]);
    const auto& s = z[j];
    z[j + 1] = {bounds[j + 1], m[0][0] * s.x + m[0][1] * s.dx, m[1][0] * s.x + m[1][1] * s.dx,
                m[0][0] * s.y + m[0][1] * s.dy, m[1][0] * s.y + m[1][1] * s.dy};
  }

  SwitchGradient out;
  out.switch_times.assign(switch_times.begin(), switch_times.end());
  out.objective = qstar_husimi(z[n + 1], problem.omega_low, level(n));
  out.gradient.assign(n, 0.0);

  // Backward: costates at each boundary.
  CostateState p = terminal_costate(z[n + 1], problem.omega_low, level(n));
  for (std::size_t j = n + 1; j-- > 1;) {
    pull_back(p, level(j), bounds[j + 1] - bounds[j]);
    const double u_before = level(j - 1) * level(j - 1);
    const double u_after = level(j) * level(j);
    out.gradient[j - 1] = (u_before - u_after) * switching_value(z[j], p);
  }
  return out;
}

std::vector<double> janszky_adam_switch_times(const ControlProblem& problem, std::size_t n_switches) {
  std::vector<double> t(n_switches);
  double acc = 0.0;
  for (std::size_t k = 0; k < n_switches; ++k) {
    acc += quarter_period(k % 2 == 0 ? problem.omega_low : problem.omega_high);
    t[k] = acc;
  }
  if (problem.mode == HorizonMode::Fixed && n_switches > 0 && t.back() >= problem.horizon) {
    const double scale = problem.horizon * static_cast<double>(n_switches) /
                         (static_cast<double>(n_switches + 1) * t.back());
    for (auto& v : t) v *= scale;
  }
  return t;
}

namespace {

class SwitchOptimizer {
 public:
  SwitchOptimizer(const ControlProblem& problem, const SolverOptions& options)
      : problem_(problem), options_(options) {}

  OptimizationResult run(Vec x, std::string start) {
    dimension_ = x.size();
    std::vector<IterationRecord> history;
    auto e = evaluate_switches(problem_, x);
    std::size_t iterations = 0;
    history.push_back({0, e.objective, residual(e)});

    bool converged = residual(e) < options_.tolerance;
    for (int round = 0; round < 4 && !converged && iterations < options_.max_iterations; ++round) {
      const bool stalled = bfgs(x, e, iterations, history);
      converged = residual(e) < options_.tolerance;
      if (converged || !stalled) break;
      nelder_mead(x, e);
      ++iterations;
      history.push_back({iterations, e.objective, residual(e)});
      converged = residual(e) < options_.tolerance;
    }

    const double tau = protocol_horizon(problem_, x);
    OptimizationResult result{bang_bang_protocol(problem_, x), x, tau, e.objective, r_from_qstar(e.objective),
                              iterations, converged, residual(e), std::move(start), std::move(history)};
    return result;
  }

 private:
  double residual(const SwitchGradient& e) const {
    return e.gradient.empty() ? 0.0 : max_abs(e.gradient) / std::max(e.objective, 1e-300);
  }

  bool feasible(const Vec& x) const {
    double prev = 0.0;
    for (double t : x) {
      if (!(t > prev) || !std::isfinite(t)) return false;
      prev = t;
    }
    return problem_.mode == HorizonMode::Free || x.empty() || x.back() < problem_.horizon;
  }

  double scale() const { return problem_.horizon / static_cast<double>(dimension_ + 1); }

  // Returns true when the line search stalled before convergence.
  bool bfgs(Vec& x, SwitchGradient& e, std::size_t& iterations, std::vector<IterationRecord>& history) {
    const std::size_t n = x.size();
    std::vector<Vec> h;
    auto reset = [&]() {
      const double g = std::max(max_abs(e.gradient), 1e-300);
      const double h0 = 0.1 * scale() / g;
      h.assign(n, Vec(n, 0.0));
      for (std::size_t i = 0; i < n; ++i) h[i][i] = h0;
    };
    reset();

    while (iterations < options_.max_iterations) {
      if (residual(e) < options_.tolerance) return false;
      Vec d(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) d[i] = dot(h[i], e.gradient);
      double slope = dot(e.gradient, d);
      if (!(slope > 0.0)) {
        reset();
        for (std::size_t i = 0; i < n; ++i) d[i] = dot(h[i], e.gradient);
        slope = dot(e.gradient, d);
      }
      double alpha = 1.0;
      const double cap = 0.5 * scale();
      if (max_abs(d) > cap) alpha = cap / max_abs(d);

      bool accepted = false;
      Vec xn(n);
      SwitchGradient en;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + alpha * d[i];
        if (feasible(xn)) {
          en = evaluate_switches(problem_, xn);
          if (en.objective >= e.objective + 1e-4 * alpha * slope) {
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) return true;

      Vec s(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = xn[i] - x[i];
        y[i] = -(en.gradient[i] - e.gradient[i]);
      }
      const double sy = dot(s, y);
      if (sy > 1e-14 * std::sqrt(dot(s, s) * dot(y, y))) {
        // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
        const double rho = 1.0 / sy;
        Vec hy(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) hy[i] = dot(h[i], y);
        const double yhy = dot(y, hy);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
          }
        }
      }
      x = xn;
      e = std::move(en);
      ++iterations;
      history.push_back({iterations, e.objective, residual(e)});
    }
    return false;
  }

  void nelder_mead(Vec& x, SwitchGradient& e) {
    const std::size_t n = x.size();
    auto cost = [&](const Vec& v) {
      return feasible(v) ? -evaluate_switches(problem_, v).objective : std::numeric_limits<double>::infinity();
    };
    std::vector<Vec> pts(n + 1, x);
    const double step = 0.05 * scale();
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1][i] += (i + 1 < n || problem_.mode == HorizonMode::Free) ? step : -step;
    }
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = cost(pts[i]);

    const std::size_t max_evals = 400 * (n + 1);
    std::size_t evals = n + 1;
    std::vector<std::size_t> order(n + 1);
    while (evals < max_evals) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[n - 1];
      if (std::abs(f[worst] - f[best]) <= 1e-15 * std::abs(f[best])) break;

      Vec centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
      }
      auto blend = [&](double c) {
        Vec v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = centroid[j] + c * (pts[worst][j] - centroid[j]);
        return v;
      };
      const Vec xr = blend(-1.0);
      const double fr = cost(xr);
      ++evals;
      if (fr < f[best]) {
        const Vec xe = blend(-2.0);
        const double fe = cost(xe);
        ++evals;
        if (fe < fr) {
          pts[worst] = xe;
          f[worst] = fe;
        } else {
          pts[worst] = xr;
          f[worst] = fr;
        }
      } else if (fr < f[second]) {
        pts[worst] = xr;
        f[worst] = fr;
      } else {
        const Vec xc = blend(0.5);
        const double fc = cost(xc);
        ++evals;
        if (fc < f[worst]) {
          pts[worst] = xc;
          f[worst] = fc;
        } else {
          for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
            f[i] = cost(pts[i]);
            ++evals;
          }
        }
      }
    }
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    if (f[best] < -e.objective) {
      x = pts[best];
      e = evaluate_switches(problem_, x);
    }
  }

  ControlProblem problem_;
  SolverOptions options_;
  std::size_t dimension_ = 0;
};

Vec uniform_switch_times(const ControlProblem& problem, std::size_t n) {
  Vec t(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = problem.horizon * static_cast<double>(k + 1) / static_cast<double>(n + 1);
  }
  return t;
}

Vec random_switch_times(const ControlProblem& problem, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vec t;
  while (t.size() < n) {
    t.clear();
    for (std::size_t k = 0; k < n; ++k) {
      const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      t.push_back(u * problem.horizon);
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  return t;
}

// Ties in Q* are common: a hold at omega_high after the last switch does not
// change Q*, so whole families of switch times share the optimum. Among tied
// results prefer one whose switching function has the Pontryagin signs, then
// the lexicographically smallest switch times.
bool better(const OptimizationResult& a, bool a_consistent, const OptimizationResult& b, bool b_consistent) {
  const double tol = 1e-12 * std::max(a.achieved_qstar, b.achieved_qstar);
  if (std::abs(a.achieved_qstar - b.achieved_qstar) > tol) return a.achieved_qstar > b.achieved_qstar;
  if (a_consistent != b_consistent) return a_consistent;
  return std::lexicographical_compare(a.switch_times.begin(), a.switch_times.end(), b.switch_times.begin(),
                                      b.switch_times.end());
}

}  // namespace

OptimizationResult solve_bangbang(const ControlProblem& problem, std::size_t n_switches,
                                  const SolverOptions& options) {
  problem.check();
  if (n_switches == 0 || n_switches % 2 == 0) {
    throw ConstructionError("n_switches must be odd so that the protocol ends at omega_high");
  }

  std::vector<std::pair<std::string, Vec>> starts;
  if (options.initial_switch_times) {
    if (options.initial_switch_times->size() != n_switches) {
      throw ConstructionError("initial switch times do not match n_switches");
    }
    starts.emplace_back("custom", *options.initial_switch_times);
  } else {
    const auto want = [&](InitStrategy s) { return options.init == s || options.init == InitStrategy::All; };
    if (want(InitStrategy::Uniform)) starts.emplace_back("uniform", uniform_switch_times(problem, n_switches));
    if (want(InitStrategy::Random)) {
      starts.emplace_back("random", random_switch_times(problem, n_switches, options.seed));
    }
    if (want(InitStrategy::JanszkyAdam)) starts.emplace_back("ja", janszky_adam_switch_times(problem, n_switches));
  }

  auto run_one = [&](const std::pair<std::string, Vec>& s) {
    SwitchOptimizer opt(problem, options);
    return opt.run(s.second, s.first);
  };

  std::vector<OptimizationResult> results;
  if (options.parallel_starts && starts.size() > 1) {
    std::vector<std::future<OptimizationResult>> jobs;
    for (const auto& s : starts) jobs.push_back(std::async(std::launch::async, run_one, std::cref(s)));
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (const auto& s : starts) results.push_back(run_one(s));
  }

  std::vector<bool> consistent(results.size(), false);
  for (std::size_t i = 0; i < results.size(); ++i) {
    consistent[i] = verify_stationarity(results[i].protocol, problem).sign_consistent;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (better(results[i], consistent[i], results[best], consistent[best])) best = i;
  }
  return std::move(results[best]);
}

StationarityReport verify_stationarity(const FrequencyProtocol& protocol, const ControlProblem& problem,
                                       std::size_t samples) {
  problem.check();
  if (!protocol.piecewise_constant()) throw ContractError("stationarity check needs a piecewise-constant protocol");
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };

  // Merge adjacent segments at the same level.
  struct Piece {
    double start, end, omega;
  };
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < protocol.size(); ++k) {
    const double w = std::get<Constant>(protocol.segments()[k].shape).omega;
    if (!near(w, problem.omega_low) && !near(w, problem.omega_high)) {
      throw ContractError("protocol level is neither omega_low nor omega_high");
    }
    if (!pieces.empty() && pieces.back().omega == w) {
      pieces.back().end = protocol.segment_end(k);
    } else {
      pieces.push_back({protocol.segment_start(k), protocol.segment_end(k), w});
    }
  }

  StationarityReport report;
  report.objective = objective(protocol);
  if (problem.omega_low == problem.omega_high) return report;

  const double tau = protocol.duration();
  std::vector<double> grid = uniform_grid(tau, std::max<std::size_t>(samples, 2));
  for (const auto& p : pieces) grid.push_back(p.start);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto traj = propagate(protocol, grid);
  const auto costates = costate_propagate(protocol, traj);
  const auto sigma = switching_function(traj, costates);
  double sigma_scale = 0.0;
  for (double s : sigma) sigma_scale = std::max(sigma_scale, std::abs(s));
  const double sign_tol = 1e-8 * sigma_scale;
  const double edge = 1e-9 * tau;

  for (const auto& p : pieces) {
    IntervalCheck check;
    check.start = p.start;
    check.end = p.end;
    check.omega = p.omega;
    check.active_sign = near(p.omega, problem.omega_high) ? 1 : -1;
    check.sigma_min = std::numeric_limits<double>::infinity();
    check.sigma_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] <= p.start + edge || grid[i] >= p.end - edge) continue;
      check.sigma_min = std::min(check.sigma_min, sigma[i]);
      check.sigma_max = std::max(check.sigma_max, sigma[i]);
      if (check.active_sign * sigma[i] < -sign_tol) check.consistent = false;
    }
    report.sign_consistent = report.sign_consistent && check.consistent;
    report.intervals.push_back(check);
  }

  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = sigma[i];
    const double b = sigma[i + 1];
    if (a == 0.0) {
      crossings.push_back(grid[i]);
    } else if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      crossings.push_back(grid[i] + (grid[i + 1] - grid[i]) * a / (a - b));
    }
  }
  if (!sigma.empty() && sigma.back() == 0.0) crossings.push_back(grid.back());

  for (std::size_t k = 1; k < pieces.size(); ++k) {
    SwitchCheck sw;
    sw.time = pieces[k].start;
    const auto it = std::lower_bound(grid.begin(), grid.end(), sw.time);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double u_before = pieces[k - 1].omega * pieces[k - 1].omega;
    const double u_after = pieces[k].omega * pieces[k].omega;
    sw.gradient = (u_before - u_after) * sigma[i];
    sw.crossing_distance = std::numeric_limits<double>::infinity();
    for (double c : crossings) sw.crossing_distance = std::min(sw.crossing_distance, std::abs(c - sw.time));
    report.max_gradient = std::max(report.max_gradient, std::abs(sw.gradient));
    report.max_crossing_distance = std::max(report.max_crossing_distance, sw.crossing_distance);
    report.switches.push_back(sw);
  }
  report.relative_residual = report.max_gradient / report.objective;

  // Singular arc: |sigma| <= 1e-10 on three or more consecutive samples.
  std::size_t run = 0;
  for (double s : sigma) {
    run = std::abs(s) <= 1e-10 ? run + 1 : 0;
    if (run >= 3) report.singular_arc = true;
  }

  report.stationary = report.sign_consistent && report.max_crossing_distance <= 1e-3 * tau &&
                      report.relative_residual < 1e-6;
  return report;
}

}  // namespace sqf
