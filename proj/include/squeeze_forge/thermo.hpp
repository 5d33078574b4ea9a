#pragma once

// Nonadiabaticity parameter Q*, mean energy and work bookkeeping for an
// oscillator that starts in the ground state of omega0.

#include <span>
#include <vector>

#include "squeeze_forge/dynamics.hpp"
#include "squeeze_forge/protocols.hpp"

namespace sqf {

struct ThermoRecord {
  double t = 0.0;
  double omega = 0.0;
  double qstar = 1.0;
  double energy = 0.0;
  double total_work = 0.0;
  double delta_F = 0.0;
  double irr_work = 0.0;
};

struct WorkQuantities {
  double total_work = 0.0;
  double delta_F = 0.0;
  double irr_work = 0.0;
};

// (p2 + omega^2 q2) / omega.
double qstar_from_cov(const CovarianceTriple& cov, double omega);

// Husimi's form in terms of the fundamental solutions.
double qstar_husimi(const FundamentalState& state, double omega0, double omega);

// <H> = omega Q* / 2.
double mean_energy(double qstar, double omega);

// Zero-temperature work split for a final frequency omega1:
// W = omega1 Q*/2 - omega0/2, dF = (omega1 - omega0)/2, W_irr = omega1 (Q* - 1)/2.
// Throws DomainError for qstar < 1.
WorkQuantities work_quantities(double qstar_final, double omega0, double omega1);

ThermoRecord thermo_record(const FundamentalState& state, double omega0, double omega);

// One record per state; omega from protocol.omega_at (right limit at jumps).
std::vector<ThermoRecord> thermo_trajectory(const FrequencyProtocol& protocol,
                                            std::span<const FundamentalState> states);

}  // namespace sqf
