#include "squeeze_forge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <boost/numeric/odeint.hpp>

#include "squeeze_forge/errors.hpp"

namespace sqf {

namespace odeint = boost::numeric::odeint;

namespace {

using Vec4 = std::array<double, 4>;

Vec4 to_vec(const FundamentalState& s) { return {s.x, s.dx, s.y, s.dy}; }

FundamentalState from_vec(double t, const Vec4& v) { return {t, v[0], v[1], v[2], v[3]}; }

FundamentalState apply(const Transfer& m, const FundamentalState& s, double t) {
  return {t, m[0][0] * s.x + m[0][1] * s.dx, m[1][0] * s.x + m[1][1] * s.dx, m[0][0] * s.y + m[0][1] * s.dy,
          m[1][0] * s.y + m[1][1] * s.dy};
}

// Integrates one non-constant segment from `start` (local time 0) and records
// the state at each local time in `samples` (ascending, within [0, duration]).
// Returns the state at the segment end.
FundamentalState integrate_segment(const Segment& seg, std::size_t index, double t0, const FundamentalState& start,
                                   std::span<const double> samples, std::vector<FundamentalState>& out,
                                   const IntegratorOptions& options) {
  auto rhs = [&seg](const Vec4& z, Vec4& dz, double s) {
    const double w = seg.omega_at(s);
    const double u = w * w;
    dz[0] = z[1];
    dz[1] = -u * z[0];
    dz[2] = z[3];
    dz[3] = -u * z[2];
  };

  std::vector<double> times;
  times.reserve(samples.size() + 2);
  times.push_back(0.0);
  for (double s : samples) {
    if (s > times.back()) times.push_back(s);
  }
  if (seg.duration > times.back()) times.push_back(seg.duration);

  std::vector<FundamentalState> recorded;
  recorded.reserve(times.size());
  Vec4 z = to_vec(start);
  auto stepper = odeint::make_dense_output(options.atol, options.rtol, odeint::runge_kutta_dopri5<Vec4>());
  const double w0 = seg.omega_at(0.0);
  const double dt0 = std::min(seg.duration, 0.01 / std::max(w0, 1e-300));
  try {
    odeint::integrate_times(stepper, rhs, z, times.begin(), times.end(), dt0,
                            [&](const Vec4& v, double s) { recorded.push_back(from_vec(t0 + s, v)); },
                            odeint::max_step_checker(static_cast<int>(std::min<std::size_t>(
                                options.max_steps, static_cast<std::size_t>(std::numeric_limits<int>::max())))));
  } catch (const std::exception& e) {
    throw PropagationError(index, std::string("integrator failed: ") + e.what());
  }
  for (const auto& r : recorded) {
    if (!std::isfinite(r.x) || !std::isfinite(r.dx) || !std::isfinite(r.y) || !std::isfinite(r.dy)) {
      throw PropagationError(index, "integrator produced a non-finite state");
    }
  }

  // Match recorded states back to the requested samples (duplicates share a state).
  std::size_t j = 0;
  for (double s : samples) {
    while (j + 1 < times.size() && times[j] < s) ++j;
    FundamentalState st = recorded[j];
    st.t = t0 + s;
    out.push_back(st);
  }
  FundamentalState end = recorded.back();
  end.t = t0 + seg.duration;
  return end;
}

}  // namespace

Transfer segment_transfer(double omega, double dt) {
  const double phase = omega * dt;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  return {{{c, s / omega}, {-omega * s, c}}};
}

double determinant(const Transfer& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

FundamentalState initial_state() { return {}; }

std::vector<double> uniform_grid(double tau, std::size_t points) {
  if (points < 2) throw DomainError("grid needs at least two points");
  std::vector<double> grid(points);
  const double n = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = tau * (static_cast<double>(i) / n);
  grid.back() = tau;
  return grid;
}

std::vector<FundamentalState> propagate(const FrequencyProtocol& protocol, std::span<const double> grid,
                                        const IntegratorOptions& options) {
  const double tau = protocol.duration();
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("output grid must be sorted");
  if (!grid.empty() && (grid.front() < 0.0 || grid.back() > tau)) {
    throw DomainError("output grid must lie within [0, tau]");
  }

  std::vector<FundamentalState> out;
  out.reserve(grid.size());
  FundamentalState start = initial_state();
  std::size_t g = 0;
  const auto& segs = protocol.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto& seg = segs[k];
    const double t0 = protocol.segment_start(k);
    const double t1 = protocol.segment_end(k);
    const bool last = k + 1 == segs.size();
    // Grid points owned by this segment: [t0, t1), plus t1 itself for the last one.
    std::size_t g_end = g;
    while (g_end < grid.size() && (grid[g_end] < t1 || (last && grid[g_end] <= t1))) ++g_end;

    if (seg.is_constant()) {
      const double w = std::get<Constant>(seg.shape).omega;
      for (; g < g_end; ++g) {
        const double local = std::clamp(grid[g] - t0, 0.0, seg.duration);
        out.push_back(apply(segment_transfer(w, local), start, grid[g]));
      }
      start = apply(segment_transfer(w, seg.duration), start, t1);
    } else {
      std::vector<double> local;
      local.reserve(g_end - g);
      for (std::size_t i = g; i < g_end; ++i) local.push_back(std::clamp(grid[i] - t0, 0.0, seg.duration));
      start = integrate_segment(seg, k, t0, start, local, out, options);
      for (std::size_t i = g; i < g_end; ++i) out[i].t = grid[i];
      g = g_end;
    }
    start.t = t1;
  }
  return out;
}

FundamentalState propagate_to_end(const FrequencyProtocol& protocol, const IntegratorOptions& options) {
  const double tau = protocol.duration();
  const std::array<double, 1> grid{tau};
  return propagate(protocol, grid, options).front();
}

CovarianceTriple covariance(const FundamentalState& s, double omega0) {
  return {s.y * s.y / (2.0 * omega0) + omega0 * s.x * s.x / 2.0,
          s.dy * s.dy / (2.0 * omega0) + omega0 * s.dx * s.dx / 2.0,
          s.y * s.dy / (2.0 * omega0) + omega0 * s.x * s.dx / 2.0};
}

double wronskian(const FundamentalState& s) { return s.y * s.dx - s.x * s.dy; }

double purity(const CovarianceTriple& c) { return c.q2 * c.p2 - c.qp * c.qp; }

}  // namespace sqf
