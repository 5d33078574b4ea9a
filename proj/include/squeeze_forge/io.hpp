#pragma once

// File formats: protocol JSON, trajectory/thermo/squeezing/population CSVs and
// the JSON reports. Doubles are written with 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"
#include "squeeze_forge/dynamics.hpp"
#include "squeeze_forge/optimize.hpp"
#include "squeeze_forge/protocols.hpp"
#include "squeeze_forge/squeezing.hpp"
#include "squeeze_forge/thermo.hpp"

namespace sqf {

using json = nlohmann::json;

std::string format_double(double v);

// {"omega0", "omega1", "segments": [{"kind", "duration", ...}], optional "tau",
// optional "units"}. Segment kinds and fields:
//   constant: omega
//   ramp:     omega_start, omega_end
//   sinusoid: omega_base, amplitude, drive_frequency, phase
//   sampled:  points [[t, omega], ...] (local times), interpolation "linear"
// Frequencies are in units of omega0 by default. With "units": "absolute" they
// are divided by omega0 and durations multiplied by it on load.
// Throws ConfigError on malformed input; does not validate positivity.
FrequencyProtocol protocol_from_json(const json& j);
json protocol_to_json(const FrequencyProtocol& protocol);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

// header t,omega,X,dX,Y,dY,q2,p2,qp
std::string trajectory_csv(const FrequencyProtocol& protocol, std::span<const FundamentalState> states);
// header t,omega,qstar,energy,total_work,delta_F,irr_work
std::string thermo_csv(std::span<const ThermoRecord> records);
// header t,omega,r,theta,qstar,irr_work
std::string squeezing_csv(const FrequencyProtocol& protocol, std::span<const FundamentalState> states);
// header n,P
std::string populations_csv(const FockDistribution& dist);
FockDistribution populations_from_csv(const std::string& text, double omega);
// header iteration,objective,residual
std::string convergence_csv(std::span<const IterationRecord> history);

json estimate_to_json(const SqueezingEstimate& est);
json optimization_to_json(const OptimizationResult& result, const ControlProblem& problem);

}  // namespace sqf
