#pragma once

// Squeezed-vacuum parameterization (r, theta) of a pure Gaussian state, the
// relations Q* = cosh 2r and W_irr = omega sinh^2 r, and the fit-free
// population-based estimator of r.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "squeeze_forge/dynamics.hpp"

namespace sqf {

struct SqueezingDecomposition {
  double r = 0.0;      // >= 0
  double theta = 0.0;  // (-pi/2, pi/2]; 0 when r = 0
};

struct FockDistribution {
  double omega = 1.0;
  std::vector<double> populations;  // P_0 .. P_nmax
  double truncation_budget = 1e-10;

  std::size_t nmax() const { return populations.empty() ? 0 : populations.size() - 1; }
  double total() const;
  double deficit() const { return 1.0 - total(); }
};

struct SqueezingEstimate {
  double energy = 0.0;
  double qstar = 1.0;
  double r = 0.0;
  double beta = 1.0;  // exp(2r)
  bool clamped = false;
};

inline constexpr double kPurityTolerance = 1e-6;
inline constexpr double kDefaultTruncationBudget = 1e-10;
inline constexpr std::size_t kMaxFockCutoff = 4096;

// Throws NotPureError when |q2 p2 - qp^2 - 1/4| > kPurityTolerance, and
// InconsistencyError when cosh 2r falls below 1 by more than 1e-12.
SqueezingDecomposition decompose(const CovarianceTriple& cov, double omega);

CovarianceTriple reconstruct(const SqueezingDecomposition& dec, double omega);

double qstar_from_r(double r);
// Throws DomainError for qstar < 1 (beyond 1e-12 slack).
double r_from_qstar(double qstar);

double wirr_from_r(double r, double omega_final);

// Squeezed-vacuum photon-number law
//   P_2m = (2m)! / (2^2m (m!)^2) tanh^2m(r) / cosh r,  P_odd = 0.
// Without nmax the cutoff is the smallest even n whose tail mass is below the
// budget (capped at kMaxFockCutoff). Throws TruncationError if the deficit at
// the chosen cutoff exceeds the budget.
FockDistribution fock_populations(double r, std::optional<std::size_t> nmax = std::nullopt, double omega = 1.0,
                                  double budget = kDefaultTruncationBudget);

// omega * sum (n + 1/2) P_n.
double energy_from_populations(const FockDistribution& dist);

// Q* = 2 <H> / omega, r = arccosh(Q*)/2; Q* < 1 is clamped to 1 and flagged.
SqueezingEstimate estimate_r(const FockDistribution& dist);

// Multinomial draw of `shots` Fock-number outcomes, returned as frequencies.
FockDistribution sample_populations(const FockDistribution& dist, std::size_t shots, std::mt19937_64& rng);
FockDistribution sample_populations(const FockDistribution& dist, std::size_t shots, std::uint64_t seed);

}  // namespace sqf
