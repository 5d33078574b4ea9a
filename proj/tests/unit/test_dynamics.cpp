#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "squeeze_forge/dynamics.hpp"
#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/protocols.hpp"
#include "support.hpp"

using namespace sqf;
using std::numbers::pi;

namespace {

// Fixed-step classical RK4 on (X, X', Y, Y'); independent of the library integrator.
FundamentalState rk4_reference(const FrequencyProtocol& p, double t_end, std::size_t steps_per_unit = 4000) {
  auto w2 = [&](double t) {
    const double w = p.omega_at(std::min(t, p.duration()));
    return w * w;
  };
  double x = 0, dx = 1, y = 1, dy = 0;
  // Step through each segment separately so jumps land on step boundaries.
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double a = p.segment_start(k);
    const double b = std::min(p.segment_end(k), t_end);
    if (b <= a) break;
    const auto steps = std::max<std::size_t>(10, static_cast<std::size_t>((b - a) * steps_per_unit));
    const double h = (b - a) / static_cast<double>(steps);
    // Evaluate inside the segment so the right/left limit choice at jumps does not matter.
    auto f = [&](double t) { return w2(std::clamp(t, a + 1e-15, b - 1e-15)); };
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = a + h * static_cast<double>(i);
      const double u1 = f(t), u2 = f(t + h / 2), u3 = u2, u4 = f(t + h);
      const double k1x = dx, k1dx = -u1 * x, k1y = dy, k1dy = -u1 * y;
      const double k2x = dx + h / 2 * k1dx, k2dx = -u2 * (x + h / 2 * k1x);
      const double k2y = dy + h / 2 * k1dy, k2dy = -u2 * (y + h / 2 * k1y);
      const double k3x = dx + h / 2 * k2dx, k3dx = -u3 * (x + h / 2 * k2x);
      const double k3y = dy + h / 2 * k2dy, k3dy = -u3 * (y + h / 2 * k2y);
      const double k4x = dx + h * k3dx, k4dx = -u4 * (x + h * k3x);
      const double k4y = dy + h * k3dy, k4dy = -u4 * (y + h * k3y);
      x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      dx += h / 6 * (k1dx + 2 * k2dx + 2 * k3dx + k4dx);
      y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
      dy += h / 6 * (k1dy + 2 * k2dy + 2 * k3dy + k4dy);
    }
  }
  return {t_end, x, dx, y, dy};
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("transfer matrix of a constant segment") {
    const auto m = segment_transfer(2.0, 0.3);
    CHECK(m[0][0] == doctest::Approx(std::cos(0.6)));
    CHECK(m[0][1] == doctest::Approx(std::sin(0.6) / 2.0));
    CHECK(m[1][0] == doctest::Approx(-2.0 * std::sin(0.6)));
    CHECK(std::abs(determinant(m) - 1.0) < 1e-15);
  }

  TEST_CASE("constant protocol: closed-form solutions and stationary vacuum") {
    const double w = 1.7;
    const auto p = build_constant(w, 5.0);
    const auto grid = uniform_grid(5.0, 101);
    const auto states = propagate(p, grid);
    REQUIRE(states.size() == 101);
    for (const auto& s : states) {
      CHECK(std::abs(s.x - std::sin(w * s.t) / w) < 1e-13);
      CHECK(std::abs(s.y - std::cos(w * s.t)) < 1e-13);
      const auto c = covariance(s, w);
      CHECK(std::abs(c.q2 - 1.0 / (2 * w)) < 1e-13);
      CHECK(std::abs(c.p2 - w / 2) < 1e-13);
      CHECK(std::abs(c.qp) < 1e-13);
    }
  }

  TEST_CASE("uniform grid ends exactly at tau") {
    const auto g = uniform_grid(3.0 * pi / 4.0, 7);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 3.0 * pi / 4.0);
    CHECK_THROWS_AS(uniform_grid(1.0, 1), DomainError);
  }

  TEST_CASE("grid must be sorted and inside [0, tau]") {
    const auto p = build_constant(1.0, 1.0);
    const std::vector<double> bad{0.0, 0.5, 0.4};
    CHECK_THROWS(propagate(p, bad));
    const std::vector<double> outside{0.0, 1.5};
    CHECK_THROWS(propagate(p, outside));
  }

  TEST_CASE("initial state and initial covariances") {
    const auto s = initial_state();
    CHECK(wronskian(s) == 1.0);
    const auto c = covariance(s, 2.0);
    CHECK(c.q2 == 0.25);
    CHECK(c.p2 == 1.0);
    CHECK(c.qp == 0.0);
    CHECK(purity(c) == 0.25);
  }

  TEST_CASE("ramp matches an independent fixed-step RK4") {
    const auto p = build_linear_ramp(1.0, 2.0, 3.0);
    const auto end = propagate_to_end(p);
    const auto ref = rk4_reference(p, 3.0);
    CHECK(std::abs(end.x - ref.x) < 1e-8);
    CHECK(std::abs(end.dx - ref.dx) < 1e-8);
    CHECK(std::abs(end.y - ref.y) < 1e-8);
    CHECK(std::abs(end.dy - ref.dy) < 1e-8);
  }

  TEST_CASE("mixed protocol matches RK4 at interior times") {
    FrequencyProtocol p({Segment{0.7, Constant{1.0}}, Segment{1.1, LinearRamp{1.4, 0.8}},
                         Segment{2.0, Sinusoid{1.2, 0.3, 2.4, 0.5}}, Segment{0.4, Constant{2.0}}});
    const std::vector<double> grid{0.0, 0.35, 0.7, 1.3, 1.8, 2.5, 3.8, 4.2};
    const auto states = propagate(p, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto ref = rk4_reference(p, grid[i]);
      CHECK(std::abs(states[i].x - ref.x) < 1e-8);
      CHECK(std::abs(states[i].y - ref.y) < 1e-8);
      CHECK(std::abs(states[i].dx - ref.dx) < 1e-8);
      CHECK(std::abs(states[i].dy - ref.dy) < 1e-8);
    }
  }

  TEST_CASE("output grid does not change the trajectory") {
    const auto p = build_sinusoidal(1.0, 1.5, 6.0);
    const auto coarse = propagate(p, uniform_grid(p.duration(), 7));
    const auto fine = propagate(p, uniform_grid(p.duration(), 6001));
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      const auto& f = fine[i * 1000];
      CHECK(f.t == coarse[i].t);
      CHECK(std::abs(f.x - coarse[i].x) < 1e-12);
      CHECK(std::abs(f.dy - coarse[i].dy) < 1e-12);
    }
  }

  TEST_CASE("purity tracks the Wronskian") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = testing::random_piecewise(rng);
      const auto states = propagate(p, uniform_grid(p.duration(), 50));
      for (const auto& s : states) {
        const double w = wronskian(s);
        CHECK(std::abs(purity(covariance(s, p.omega_at(0.0))) - w * w / 4.0) < 1e-12);
      }
    }
  }

  TEST_CASE("property: Wronskian stays at 1 on random protocols") {
    std::mt19937_64 rng(1234);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      const auto p = testing::random_piecewise(rng);
      for (const auto& s : propagate(p, uniform_grid(p.duration(), 200))) {
        worst = std::max(worst, std::abs(wronskian(s) - 1.0));
      }
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("Wronskian over a long weakly driven sinusoid") {
    const auto p = build_sinusoidal(1.0, 1.1, 50.0);
    double worst = 0.0;
    for (const auto& s : propagate(p, uniform_grid(p.duration(), 2000))) {
      worst = std::max(worst, std::abs(wronskian(s) - 1.0));
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("integrator agrees with the exact transfer on a flat ramp") {
    // A ramp with equal end points is not a Constant, so it goes through the integrator.
    FrequencyProtocol flat({Segment{7.0, LinearRamp{1.3, 1.3}}});
    const auto end = propagate_to_end(flat);
    const auto m = segment_transfer(1.3, 7.0);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    CHECK(rel(end.x, m[0][1]) < 1e-8);
    CHECK(rel(end.dx, m[1][1]) < 1e-8);
    CHECK(rel(end.y, m[0][0]) < 1e-8);
    CHECK(rel(end.dy, m[1][0]) < 1e-8);
  }
}
