#include "squeeze_forge/thermo.hpp"

#include <algorithm>
#include <string>

#include "squeeze_forge/errors.hpp"

namespace sqf {

namespace {
constexpr double kQstarSlack = 1e-12;
}

double qstar_from_cov(const CovarianceTriple& cov, double omega) { return (cov.p2 + omega * omega * cov.q2) / omega; }

double qstar_husimi(const FundamentalState& s, double omega0, double omega) {
  const double w2 = omega * omega;
  return (omega0 * omega0 * (w2 * s.x * s.x + s.dx * s.dx) + w2 * s.y * s.y + s.dy * s.dy) / (2.0 * omega0 * omega);
}

double mean_energy(double qstar, double omega) { return omega * qstar / 2.0; }

WorkQuantities work_quantities(double qstar_final, double omega0, double omega1) {
  if (!(qstar_final >= 1.0 - kQstarSlack)) {
    throw DomainError("Q* must be >= 1, got " + std::to_string(qstar_final));
  }
  if (!(omega0 > 0.0) || !(omega1 > 0.0)) throw DomainError("frequencies must be positive");
  WorkQuantities w;
  w.total_work = omega1 * qstar_final / 2.0 - omega0 / 2.0;
  w.delta_F = (omega1 - omega0) / 2.0;
  w.irr_work = omega1 * (qstar_final - 1.0) / 2.0;
  return w;
}

ThermoRecord thermo_record(const FundamentalState& state, double omega0, double omega) {
  ThermoRecord rec;
  rec.t = state.t;
  rec.omega = omega;
  rec.qstar = qstar_from_cov(covariance(state, omega0), omega);
  rec.energy = mean_energy(rec.qstar, omega);
  // Rounding can leave Q* a hair below 1 on adiabatic stretches.
  const auto w = work_quantities(std::max(rec.qstar, 1.0), omega0, omega);
  rec.total_work = rec.energy - omega0 / 2.0;
  rec.delta_F = w.delta_F;
  rec.irr_work = rec.qstar >= 1.0 ? w.irr_work : 0.0;
  return rec;
}

std::vector<ThermoRecord> thermo_trajectory(const FrequencyProtocol& protocol,
                                            std::span<const FundamentalState> states) {
  std::vector<ThermoRecord> out;
  out.reserve(states.size());
  const double w0 = protocol.omega_at(0.0);
  for (const auto& s : states) out.push_back(thermo_record(s, w0, protocol.omega_at(s.t)));
  return out;
}

}  // namespace sqf
