#pragma once

// Frequency protocols omega(t) on [0, tau].
//
// A protocol is an ordered list of segments. Adjacent segments may disagree at
// their common boundary, which models a sudden frequency jump; no separate jump
// object exists. Protocols are immutable once built.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sqf {

struct Constant {
  double omega;
};

struct LinearRamp {
  double omega_start;
  double omega_end;
};

// omega(s) = base + amplitude * sin(drive_frequency * s + phase), s local time.
struct Sinusoid {
  double base;
  double amplitude;
  double drive_frequency;
  double phase;
};

// Piecewise-linear interpolation of omega (not omega^2) between samples.
// Times are local to the segment: first is 0, last equals the duration.
struct Sampled {
  std::vector<double> times;
  std::vector<double> omegas;
};

using SegmentShape = std::variant<Constant, LinearRamp, Sinusoid, Sampled>;

struct Segment {
  double duration = 0.0;
  SegmentShape shape;

  // local_t in [0, duration]; no range check.
  double omega_at(double local_t) const;
  // Exact minimum of omega over [0, duration].
  double min_omega() const;
  bool is_constant() const { return std::holds_alternative<Constant>(shape); }
};

class FrequencyProtocol {
 public:
  // Declared endpoints default to the actual omega(0) and omega(tau).
  explicit FrequencyProtocol(std::vector<Segment> segments);
  FrequencyProtocol(std::vector<Segment> segments, double omega0, double omega1,
                    std::optional<double> declared_duration = std::nullopt);

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }

  // Compensated sum of the segment durations.
  double duration() const { return duration_; }
  double segment_start(std::size_t k) const { return starts_[k]; }
  double segment_end(std::size_t k) const;

  double omega0() const { return omega0_; }
  double omega1() const { return omega1_; }
  std::optional<double> declared_duration() const { return declared_duration_; }

  // Segment that owns time t: the later segment at an interior boundary, the
  // last segment at t = tau. Throws DomainError outside [0, tau].
  std::size_t segment_index(double t) const;

  // Right limit at interior jumps, left limit at tau.
  double omega_at(double t) const;

  // Interior boundaries where omega is discontinuous.
  std::vector<double> jump_times() const;

  bool piecewise_constant() const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double duration_ = 0.0;
  double omega0_ = 0.0;
  double omega1_ = 0.0;
  std::optional<double> declared_duration_;
};

enum class IssueKind { Structure, Positivity, Duration, Endpoint };

struct ValidationIssue {
  IssueKind kind;
  std::optional<std::size_t> segment;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(IssueKind kind) const;
  std::string summary() const;
};

ValidationReport validate(const FrequencyProtocol& protocol);

// Throws ConstructionError carrying the report summary when validation fails.
void require_valid(const FrequencyProtocol& protocol);

FrequencyProtocol build_constant(double omega, double duration);

// n sudden jumps alternating omega0 -> omega1 -> omega0 ..., each preceded by a
// quarter-period hold pi / (2 omega) at the current frequency, followed by a
// final quarter-period hold. The terminal frequency is omega1 for odd n and
// omega0 for even n. Each jump multiplies exp(2r) by omega1 / omega0.
FrequencyProtocol build_janszky_adam(double omega0, double omega1, int n);

// omega(t) = omega0 + (omega1 - omega0) sin(2 omega0 t) / 2 over `periods`
// periods pi / omega0 of the drive. `periods` may be fractional.
FrequencyProtocol build_sinusoidal(double omega0, double omega1, double periods);

FrequencyProtocol build_linear_ramp(double omega0, double omega1, double duration);

// Two-level piecewise-constant protocol: starts at `first`, toggles to `second`
// at each switch time, and so on. Switch times must lie strictly inside
// (0, horizon) and increase strictly.
FrequencyProtocol build_bang_bang(double first, double second, const std::vector<double>& switch_times,
                                  double horizon);

// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& values);

}  // namespace sqf
