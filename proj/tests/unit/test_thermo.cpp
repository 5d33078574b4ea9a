#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "squeeze_forge/dynamics.hpp"
#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/protocols.hpp"
#include "squeeze_forge/thermo.hpp"
#include "support.hpp"

using namespace sqf;

TEST_SUITE("thermo") {
  TEST_CASE("sudden jump 1 -> 2: Q* = 5/4 and W_irr = 1/4") {
    const auto p = build_janszky_adam(1.0, 2.0, 1);
    const auto end = propagate_to_end(p);
    const double q = qstar_from_cov(covariance(end, 1.0), 2.0);
    CHECK(std::abs(q - 1.25) < 1e-12);
    const auto w = work_quantities(q, 1.0, 2.0);
    CHECK(std::abs(w.irr_work - 0.25) < 1e-12);
    CHECK(std::abs(w.delta_F - 0.5) < 1e-15);
    CHECK(std::abs(w.total_work - 0.75) < 1e-12);
  }

  TEST_CASE("covariance and Husimi forms of Q* agree") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
      const auto p = testing::random_piecewise(rng);
      const double w0 = p.omega_at(0.0);
      for (const auto& s : propagate(p, uniform_grid(p.duration(), 25))) {
        const double w = p.omega_at(s.t);
        const double a = qstar_from_cov(covariance(s, w0), w);
        const double b = qstar_husimi(s, w0, w);
        CHECK(std::abs(a - b) <= 1e-12 * a);
        CHECK(a >= 1.0 - 1e-10);
      }
    }
  }

  TEST_CASE("Q* is conserved on constant segments") {
    const auto p = build_janszky_adam(1.0, 2.0, 3);
    const auto states = propagate(p, uniform_grid(p.duration(), 401));
    const auto rec = thermo_trajectory(p, states);
    // Last hold at omega1 starts at the third jump.
    const double last_jump = p.jump_times().back();
    for (const auto& r : rec) {
      if (r.t > last_jump) CHECK(std::abs(r.qstar - 4.0625) < 1e-12);
    }
  }

  TEST_CASE("thermo records are consistent") {
    const auto p = build_linear_ramp(1.0, 2.0, 4.0);
    const auto states = propagate(p, uniform_grid(4.0, 41));
    const auto rec = thermo_trajectory(p, states);
    for (const auto& r : rec) {
      CHECK(std::abs(r.energy - r.omega * r.qstar / 2.0) < 1e-14);
      CHECK(std::abs(r.total_work - (r.energy - 0.5)) < 1e-14);
      CHECK(std::abs(r.delta_F - (r.omega - 1.0) / 2.0) < 1e-14);
      CHECK(std::abs(r.irr_work - (r.total_work - r.delta_F)) < 1e-13);
      CHECK(r.irr_work >= -1e-12);
    }
    CHECK(rec.front().qstar == 1.0);
    CHECK(rec.front().total_work == 0.0);
  }

  TEST_CASE("work quantities reject Q* below 1") {
    CHECK_THROWS_AS(work_quantities(0.99, 1.0, 2.0), DomainError);
    CHECK_NOTHROW(work_quantities(1.0 - 1e-14, 1.0, 2.0));
  }

  TEST_CASE("adiabatic ramp: nonadiabaticity decreases with duration") {
    double previous = 1e9;
    for (double tau : {10.0, 100.0, 1000.0}) {
      const auto p = build_linear_ramp(1.0, 2.0, tau);
      const double q = qstar_from_cov(covariance(propagate_to_end(p), 1.0), 2.0);
      CHECK(q - 1.0 < previous);
      previous = q - 1.0;
    }
    CHECK(previous < 1e-4);
  }

  TEST_CASE("the 2 omega0 drive falls behind Janszky-Adam at long durations") {
    for (double w1 : {1.3, 2.0}) {
      for (int n : {5, 7, 9}) {
        const auto ja = build_janszky_adam(1.0, w1, n);
        const auto sine = build_sinusoidal(1.0, w1, ja.duration() / std::numbers::pi);
        const auto end_ja = propagate_to_end(ja);
        const auto end_sine = propagate_to_end(sine);
        const double q_ja = qstar_from_cov(covariance(end_ja, 1.0), ja.omega_at(ja.duration()));
        const double q_sine = qstar_from_cov(covariance(end_sine, 1.0), sine.omega_at(sine.duration()));
        CHECK(q_ja > q_sine);
        CHECK(q_sine > 1.0);
      }
    }
  }

  TEST_CASE("the 2 omega0 drive leads over the first three jumps") {
    // Janszky-Adam spends its first quarter period idle in the initial ground state.
    const auto ja = build_janszky_adam(1.0, 2.0, 3);
    const auto sine = build_sinusoidal(1.0, 2.0, 1.5);
    const double q_ja = qstar_from_cov(covariance(propagate_to_end(ja), 1.0), 2.0);
    const double q_sine = qstar_from_cov(covariance(propagate_to_end(sine), 1.0), 1.0);
    CHECK(std::abs(q_ja - 4.0625) < 1e-12);
    CHECK(q_sine > q_ja);
  }
}
