#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "squeeze_forge/protocols.hpp"

namespace sqf::testing {

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Random mix of constant, ramp and sinusoid segments with omega in [lo, hi].
inline FrequencyProtocol random_piecewise(std::mt19937_64& rng, double lo = 0.6, double hi = 2.2,
                                          std::size_t max_segments = 6) {
  std::uniform_real_distribution<double> freq(lo, hi);
  std::uniform_real_distribution<double> dur(0.2, 2.0);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<std::size_t> count(1, max_segments);
  std::vector<Segment> segs;
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    Segment s;
    s.duration = dur(rng);
    switch (kind(rng)) {
      case 0:
        s.shape = Constant{freq(rng)};
        break;
      case 1:
        s.shape = LinearRamp{freq(rng), freq(rng)};
        break;
      default: {
        const double base = freq(rng);
        const double amp = std::uniform_real_distribution<double>(-0.3, 0.3)(rng) * base;
        s.shape = Sinusoid{base, amp, 2.0 * base, std::uniform_real_distribution<double>(0.0, 6.0)(rng)};
      }
    }
    segs.push_back(s);
  }
  FrequencyProtocol p(std::move(segs));
  require_valid(p);
  return p;
}

// Random two-level protocol with an odd number of switches.
inline std::vector<double> random_switches(std::mt19937_64& rng, std::size_t n, double horizon) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::vector<double> t;
  while (true) {
    t.clear();
    for (std::size_t i = 0; i < n; ++i) t.push_back(u(rng) * horizon);
    std::sort(t.begin(), t.end());
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) ok = ok && t[i] - t[i - 1] > 0.02 * horizon;
    if (ok) return t;
  }
}

}  // namespace sqf::testing
