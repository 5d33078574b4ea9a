#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/protocols.hpp"
#include "support.hpp"

using namespace sqf;
using std::numbers::pi;

TEST_SUITE("protocols") {
  TEST_CASE("omega_at on a constant protocol") {
    const auto p = build_constant(1.0, 2.0);
    CHECK(p.omega_at(0.5) == 1.0);
    CHECK(p.omega_at(0.0) == 1.0);
    CHECK(p.omega_at(2.0) == 1.0);
  }

  TEST_CASE("omega_at rejects times outside [0, tau]") {
    const auto p = build_constant(1.0, 2.0);
    CHECK_THROWS_AS(p.omega_at(-1e-9), DomainError);
    CHECK_THROWS_AS(p.omega_at(2.0 + 1e-9), DomainError);
    CHECK_THROWS_AS(p.omega_at(std::nan("")), DomainError);
  }

  TEST_CASE("Janszky-Adam segment table, one jump") {
    const auto p = build_janszky_adam(1.0, 2.0, 1);
    REQUIRE(p.size() == 2);
    CHECK(std::get<Constant>(p.segments()[0].shape).omega == 1.0);
    CHECK(p.segments()[0].duration == pi / 2);
    CHECK(std::get<Constant>(p.segments()[1].shape).omega == 2.0);
    CHECK(p.segments()[1].duration == pi / 4);
    CHECK(p.omega0() == 1.0);
    CHECK(p.omega1() == 2.0);
    CHECK(p.duration() == doctest::Approx(3 * pi / 4).epsilon(1e-15));
  }

  TEST_CASE("jumps take the right limit, the final time the left limit") {
    const auto p = build_janszky_adam(1.0, 2.0, 1);
    CHECK(p.omega_at(pi / 2) == 2.0);
    CHECK(p.omega_at(std::nextafter(pi / 2, 10.0)) == 2.0);
    CHECK(p.omega_at(std::nextafter(pi / 2, 0.0)) == 1.0);
    CHECK(p.omega_at(p.duration()) == 2.0);

    const auto q = build_janszky_adam(1.0, 2.0, 2);
    CHECK(q.omega_at(q.duration()) == 1.0);
    const auto jumps = q.jump_times();
    REQUIRE(jumps.size() == 2);
    CHECK(jumps[0] == doctest::Approx(pi / 2));
    CHECK(jumps[1] == doctest::Approx(3 * pi / 4));
  }

  TEST_CASE("Janszky-Adam holds are exact quarter periods") {
    for (double w1 : {1.3, 2.0, 0.7}) {
      for (int n = 1; n <= 7; ++n) {
        const auto p = build_janszky_adam(1.0, w1, n);
        REQUIRE(p.size() == static_cast<std::size_t>(n) + 1);
        for (std::size_t k = 0; k < p.size(); ++k) {
          const double w = std::get<Constant>(p.segments()[k].shape).omega;
          CHECK(w == (k % 2 == 0 ? 1.0 : w1));
          CHECK(p.segments()[k].duration == pi / (2.0 * w));
        }
      }
    }
  }

  TEST_CASE("Janszky-Adam with equal frequencies is constant") {
    const auto p = build_janszky_adam(1.0, 1.0, 3);
    for (int i = 0; i <= 100; ++i) CHECK(p.omega_at(p.duration() * i / 100.0) == 1.0);
    CHECK(p.jump_times().empty());
  }

  TEST_CASE("Janszky-Adam construction errors") {
    CHECK_THROWS_AS(build_janszky_adam(0.0, 2.0, 1), ConstructionError);
    CHECK_THROWS_AS(build_janszky_adam(1.0, -2.0, 1), ConstructionError);
    CHECK_THROWS_AS(build_janszky_adam(1.0, 2.0, 0), ConstructionError);
  }

  TEST_CASE("sinusoidal drive at twice the base frequency") {
    const auto p = build_sinusoidal(1.0, 2.0, 1.0);
    CHECK(p.duration() == doctest::Approx(pi).epsilon(1e-15));
    CHECK(p.omega_at(pi / 4) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(p.omega_at(3 * pi / 4) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.omega_at(0.3) == doctest::Approx(1.0 + 0.5 * std::sin(0.6)).epsilon(1e-15));
  }

  TEST_CASE("zero-amplitude sinusoid equals the constant protocol pointwise") {
    const auto s = build_sinusoidal(1.0, 1.0, 5.0);
    const auto c = build_constant(1.0, 5.0 * pi);
    CHECK(s.segments().front().is_constant());
    for (int i = 0; i <= 200; ++i) {
      const double t = s.duration() * i / 200.0;
      CHECK(s.omega_at(t) == c.omega_at(std::min(t, c.duration())));
    }
  }

  TEST_CASE("sinusoid that would reach nonpositive omega is rejected") {
    CHECK_THROWS_AS(build_sinusoidal(1.0, 4.0, 1.0), ConstructionError);
    CHECK_THROWS_AS(build_sinusoidal(1.0, 3.0, 1.0), ConstructionError);
    CHECK_NOTHROW(build_sinusoidal(1.0, 2.9, 1.0));
  }

  TEST_CASE("linear ramp") {
    const auto p = build_linear_ramp(1.0, 2.0, 10.0);
    CHECK(p.omega_at(5.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(p.omega_at(10.0) == 2.0);
    const auto c = build_linear_ramp(1.0, 1.0, 10.0);
    CHECK(c.segments().front().is_constant());
    CHECK_THROWS_AS(build_linear_ramp(1.0, 2.0, 0.0), ConstructionError);
  }

  TEST_CASE("validate: good protocol") {
    CHECK(validate(build_janszky_adam(1.0, 2.0, 3)).ok());
  }

  TEST_CASE("validate: ramp down to zero fails positivity") {
    FrequencyProtocol p({Segment{1.0, LinearRamp{1.0, 0.0}}});
    const auto report = validate(p);
    CHECK_FALSE(report.ok());
    CHECK(report.has(IssueKind::Positivity));
    CHECK_THROWS_AS(require_valid(p), ConstructionError);
  }

  TEST_CASE("validate: sinusoid dipping below zero between endpoints") {
    // Endpoints positive, minimum inside the segment.
    FrequencyProtocol p({Segment{2 * pi, Sinusoid{1.0, 1.5, 1.0, 0.0}}});
    CHECK(p.segments().front().omega_at(0.0) > 0.0);
    CHECK(p.segments().front().omega_at(2 * pi) > 0.0);
    CHECK(validate(p).has(IssueKind::Positivity));
    // Short segment that never reaches the trough.
    FrequencyProtocol q({Segment{1.0, Sinusoid{1.0, 1.5, 1.0, 0.0}}});
    CHECK(validate(q).ok());
  }

  TEST_CASE("validate: mismatched declared duration") {
    FrequencyProtocol p({Segment{1.0, Constant{1.0}}, Segment{2.0, Constant{2.0}}}, 1.0, 2.0, 3.1);
    const auto report = validate(p);
    CHECK(report.has(IssueKind::Duration));
    CHECK_FALSE(report.has(IssueKind::Positivity));
  }

  TEST_CASE("validate: endpoint and structure failures") {
    FrequencyProtocol p({Segment{1.0, Constant{1.0}}}, 1.0, 2.0);
    CHECK(validate(p).has(IssueKind::Endpoint));
    FrequencyProtocol z({Segment{0.0, Constant{1.0}}});
    CHECK(validate(z).has(IssueKind::Duration));
    FrequencyProtocol s({Segment{1.0, Sampled{{0.0, 0.5}, {1.0, 2.0}}}});
    CHECK(validate(s).has(IssueKind::Structure));
    CHECK_THROWS_AS(FrequencyProtocol(std::vector<Segment>{}), ConstructionError);
  }

  TEST_CASE("sampled segments interpolate omega linearly") {
    FrequencyProtocol p({Segment{2.0, Sampled{{0.0, 1.0, 2.0}, {1.0, 3.0, 2.0}}}});
    CHECK(validate(p).ok());
    CHECK(p.omega_at(0.5) == doctest::Approx(2.0));
    CHECK(p.omega_at(1.5) == doctest::Approx(2.5));
    CHECK(p.segments().front().min_omega() == 1.0);
  }

  TEST_CASE("duration is the compensated sum of many segments") {
    std::vector<Segment> segs;
    std::vector<double> durations;
    for (int i = 0; i < 10000; ++i) {
      const double d = 0.1 + 1e-7 * i;
      segs.push_back(Segment{d, Constant{1.0 + (i % 2)}});
      durations.push_back(d);
    }
    // Exact value of sum_i (0.1 + 1e-7 i) = 1000 + 1e-7 * 49995000.
    const double exact = 1000.0 + 4.9995;
    FrequencyProtocol p(std::move(segs));
    CHECK(std::abs(p.duration() - exact) / exact < 1e-12);
    CHECK(p.duration() == compensated_sum(durations));
  }

  TEST_CASE("property: built protocols stay positive at sampled times") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = testing::random_piecewise(rng);
      for (int i = 0; i <= 500; ++i) CHECK(p.omega_at(p.duration() * i / 500.0) > 0.0);
    }
  }
}
