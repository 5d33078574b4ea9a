#include "squeeze_forge/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "squeeze_forge/errors.hpp"

namespace sqf {

namespace {

constexpr double kRelativeSlack = 1e-12;

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

struct NeumaierSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

double sampled_omega(const Sampled& s, double local_t) {
  const auto& ts = s.times;
  if (ts.size() == 1) return s.omegas.front();
  if (local_t <= ts.front()) return s.omegas.front();
  if (local_t >= ts.back()) return s.omegas.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), local_t);
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double w = (local_t - ts[lo]) / (ts[hi] - ts[lo]);
  return s.omegas[lo] + w * (s.omegas[hi] - s.omegas[lo]);
}

// Minimum of base + amplitude sin(k s + phase) over s in [0, duration].
double sinusoid_min(const Sinusoid& s, double duration) {
  auto f = [&](double t) { return s.base + s.amplitude * std::sin(s.drive_frequency * t + s.phase); };
  double lo = std::min(f(0.0), f(duration));
  if (s.amplitude == 0.0 || s.drive_frequency == 0.0) return lo;
  // sin(x) reaches -sign(amplitude) at x = target + 2 pi m.
  const double target = s.amplitude > 0.0 ? -std::numbers::pi / 2 : std::numbers::pi / 2;
  double x0 = s.phase;
  double x1 = s.drive_frequency * duration + s.phase;
  if (x0 > x1) std::swap(x0, x1);
  const double m = std::ceil((x0 - target) / (2 * std::numbers::pi));
  if (target + 2 * std::numbers::pi * m <= x1) lo = std::min(lo, s.base - std::abs(s.amplitude));
  return lo;
}

}  // namespace

double compensated_sum(const std::vector<double>& values) {
  NeumaierSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double Segment::omega_at(double local_t) const {
  return std::visit(
      [&](const auto& shape) -> double {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return shape.omega;
        } else if constexpr (std::is_same_v<T, LinearRamp>) {
          if (duration <= 0.0) return shape.omega_start;
          const double w = local_t / duration;
          return shape.omega_start + w * (shape.omega_end - shape.omega_start);
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          return shape.base + shape.amplitude * std::sin(shape.drive_frequency * local_t + shape.phase);
        } else {
          return sampled_omega(shape, local_t);
        }
      },
      shape);
}

double Segment::min_omega() const {
  return std::visit(
      [&](const auto& shape) -> double {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return shape.omega;
        } else if constexpr (std::is_same_v<T, LinearRamp>) {
          return std::min(shape.omega_start, shape.omega_end);
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          return sinusoid_min(shape, duration);
        } else {
          if (shape.omegas.empty()) return std::nan("");
          return *std::min_element(shape.omegas.begin(), shape.omegas.end());
        }
      },
      shape);
}

FrequencyProtocol::FrequencyProtocol(std::vector<Segment> segments)
    : FrequencyProtocol(segments, segments.empty() ? 0.0 : segments.front().omega_at(0.0),
                        segments.empty() ? 0.0 : segments.back().omega_at(segments.back().duration)) {}

FrequencyProtocol::FrequencyProtocol(std::vector<Segment> segments, double omega0, double omega1,
                                     std::optional<double> declared_duration)
    : segments_(std::move(segments)), omega0_(omega0), omega1_(omega1), declared_duration_(declared_duration) {
  if (segments_.empty()) throw ConstructionError("protocol needs at least one segment");
  NeumaierSum acc;
  starts_.reserve(segments_.size());
  for (const auto& seg : segments_) {
    starts_.push_back(acc.value());
    acc.add(seg.duration);
  }
  duration_ = acc.value();
}

double FrequencyProtocol::segment_end(std::size_t k) const {
  return k + 1 < starts_.size() ? starts_[k + 1] : duration_;
}

std::size_t FrequencyProtocol::segment_index(double t) const {
  if (!(t >= 0.0 && t <= duration_)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "time " << t << " outside protocol range [0, " << duration_ << "]";
    throw DomainError(msg.str());
  }
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - starts_.begin()) - 1;
  return std::min(k, segments_.size() - 1);
}

double FrequencyProtocol::omega_at(double t) const {
  const std::size_t k = segment_index(t);
  const auto& seg = segments_[k];
  const double local = std::clamp(t - starts_[k], 0.0, seg.duration);
  return seg.omega_at(local);
}

std::vector<double> FrequencyProtocol::jump_times() const {
  std::vector<double> out;
  for (std::size_t k = 1; k < segments_.size(); ++k) {
    const auto& prev = segments_[k - 1];
    if (prev.omega_at(prev.duration) != segments_[k].omega_at(0.0)) out.push_back(starts_[k]);
  }
  return out;
}

bool FrequencyProtocol::piecewise_constant() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.is_constant(); });
}

bool ValidationReport::has(IssueKind kind) const {
  return std::any_of(issues.begin(), issues.end(), [&](const ValidationIssue& i) { return i.kind == kind; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    if (issues[i].segment) out << "segment " << *issues[i].segment << ": ";
    out << issues[i].message;
  }
  return out.str();
}

ValidationReport validate(const FrequencyProtocol& protocol) {
  ValidationReport report;
  const auto& segs = protocol.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto& seg = segs[k];
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
      report.issues.push_back({IssueKind::Duration, k, "segment duration must be positive and finite"});
    }
    if (const auto* s = std::get_if<Sampled>(&seg.shape)) {
      bool good = s->times.size() >= 2 && s->times.size() == s->omegas.size();
      if (good) {
        good = s->times.front() == 0.0 && close_rel(s->times.back(), seg.duration, kRelativeSlack);
        for (std::size_t i = 1; good && i < s->times.size(); ++i) good = s->times[i] > s->times[i - 1];
      }
      if (!good) {
        report.issues.push_back({IssueKind::Structure, k,
                                 "sampled grid must hold >= 2 strictly increasing times from 0 to the duration"});
        continue;
      }
    }
    const double lo = seg.min_omega();
    if (!(lo > 0.0) || !std::isfinite(lo)) {
      std::ostringstream msg;
      msg << "omega must stay positive (minimum " << lo << ")";
      report.issues.push_back({IssueKind::Positivity, k, msg.str()});
    }
  }
  if (const auto declared = protocol.declared_duration()) {
    if (!close_rel(*declared, protocol.duration(), kRelativeSlack)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "declared duration " << *declared << " differs from segment total " << protocol.duration();
      report.issues.push_back({IssueKind::Duration, std::nullopt, msg.str()});
    }
  }
  const double w_start = segs.front().omega_at(0.0);
  const double w_end = segs.back().omega_at(segs.back().duration);
  if (!close_rel(protocol.omega0(), w_start, kRelativeSlack)) {
    report.issues.push_back({IssueKind::Endpoint, std::nullopt, "declared omega0 does not match omega(0)"});
  }
  if (!close_rel(protocol.omega1(), w_end, kRelativeSlack)) {
    report.issues.push_back({IssueKind::Endpoint, std::nullopt, "declared omega1 does not match omega(tau)"});
  }
  return report;
}

void require_valid(const FrequencyProtocol& protocol) {
  const auto report = validate(protocol);
  if (!report.ok()) throw ConstructionError("invalid protocol: " + report.summary());
}

FrequencyProtocol build_constant(double omega, double duration) {
  if (!(omega > 0.0) || !(duration > 0.0)) throw ConstructionError("constant protocol needs omega > 0 and duration > 0");
  FrequencyProtocol p({Segment{duration, Constant{omega}}});
  require_valid(p);
  return p;
}

FrequencyProtocol build_janszky_adam(double omega0, double omega1, int n) {
  if (!(omega0 > 0.0) || !(omega1 > 0.0)) throw ConstructionError("Janszky-Adam protocol needs positive frequencies");
  if (n < 1) throw ConstructionError("Janszky-Adam protocol needs at least one jump");
  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double w = (k % 2 == 0) ? omega0 : omega1;
    segs.push_back(Segment{std::numbers::pi / (2.0 * w), Constant{w}});
  }
  const double w_end = (n % 2 == 0) ? omega0 : omega1;
  FrequencyProtocol p(std::move(segs), omega0, w_end);
  require_valid(p);
  return p;
}

FrequencyProtocol build_sinusoidal(double omega0, double omega1, double periods) {
  if (!(omega0 > 0.0)) throw ConstructionError("sinusoidal protocol needs omega0 > 0");
  if (!(periods > 0.0) || !std::isfinite(periods)) throw ConstructionError("sinusoidal protocol needs periods > 0");
  const double amplitude = (omega1 - omega0) / 2.0;
  if (!(omega0 - std::abs(amplitude) > 0.0)) {
    throw ConstructionError("sinusoidal protocol: omega(t) reaches " + std::to_string(omega0 - std::abs(amplitude)) +
                            " <= 0");
  }
  const double duration = periods * std::numbers::pi / omega0;
  Segment seg{duration, Constant{omega0}};
  if (amplitude != 0.0) seg.shape = Sinusoid{omega0, amplitude, 2.0 * omega0, 0.0};
  FrequencyProtocol p({seg});
  require_valid(p);
  return p;
}

FrequencyProtocol build_linear_ramp(double omega0, double omega1, double duration) {
  if (!(omega0 > 0.0) || !(omega1 > 0.0) || !(duration > 0.0)) {
    throw ConstructionError("linear ramp needs positive frequencies and duration");
  }
  Segment seg{duration, Constant{omega0}};
  if (omega0 != omega1) seg.shape = LinearRamp{omega0, omega1};
  FrequencyProtocol p({seg});
  require_valid(p);
  return p;
}

FrequencyProtocol build_bang_bang(double first, double second, const std::vector<double>& switch_times,
                                  double horizon) {
  if (!(first > 0.0) || !(second > 0.0) || !(horizon > 0.0)) {
    throw ConstructionError("bang-bang protocol needs positive levels and horizon");
  }
  std::vector<Segment> segs;
  segs.reserve(switch_times.size() + 1);
  double prev = 0.0;
  for (std::size_t k = 0; k <= switch_times.size(); ++k) {
    const double t = k < switch_times.size() ? switch_times[k] : horizon;
    if (!(t > prev)) throw ConstructionError("switch times must increase strictly inside (0, horizon)");
    segs.push_back(Segment{t - prev, Constant{k % 2 == 0 ? first : second}});
    prev = t;
  }
  FrequencyProtocol p(std::move(segs));
  require_valid(p);
  return p;
}

}  // namespace sqf
