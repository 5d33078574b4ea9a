#pragma once

// Classical fundamental solutions of the Hill equation x'' + omega(t)^2 x = 0
// and the covariances of the evolved oscillator vacuum (hbar = m = 1).
//
// q(t) = q(0) Y(t) + p(0) X(t), with X(0) = 0, X'(0) = 1, Y(0) = 1, Y'(0) = 0.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "squeeze_forge/protocols.hpp"

namespace sqf {

struct FundamentalState {
  double t = 0.0;
  double x = 0.0;
  double dx = 1.0;
  double y = 1.0;
  double dy = 0.0;
};

// Symmetrized covariances of the evolved vacuum: <q^2>, <p^2>, <qp + pq>/2.
struct CovarianceTriple {
  double q2 = 0.0;
  double p2 = 0.0;
  double qp = 0.0;
};

// Acts on (value, derivative) column vectors.
using Transfer = std::array<std::array<double, 2>, 2>;

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  // Upper bound on steps per segment before reporting a propagation failure.
  std::size_t max_steps = 5'000'000;
};

Transfer segment_transfer(double omega, double dt);
double determinant(const Transfer& m);

FundamentalState initial_state();

// Sorted output times in [0, tau]. Constant segments are propagated with the
// closed-form transfer matrix from the segment start; other segments with an
// adaptive Dormand-Prince 5(4) integrator whose dense output samples the grid,
// so the step sequence does not depend on the grid.
std::vector<FundamentalState> propagate(const FrequencyProtocol& protocol, std::span<const double> grid,
                                        const IntegratorOptions& options = {});

// State at tau only.
FundamentalState propagate_to_end(const FrequencyProtocol& protocol, const IntegratorOptions& options = {});

// `points` evenly spaced times from 0 to tau inclusive, last exactly tau.
std::vector<double> uniform_grid(double tau, std::size_t points);

CovarianceTriple covariance(const FundamentalState& state, double omega0);

// Y X' - X Y'; equals 1 for an exact propagation.
double wronskian(const FundamentalState& state);

// q2 p2 - qp^2; equals 1/4 for a pure Gaussian state.
double purity(const CovarianceTriple& cov);

}  // namespace sqf
