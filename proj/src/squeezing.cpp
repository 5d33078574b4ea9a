#include "squeeze_forge/squeezing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "squeeze_forge/errors.hpp"

namespace sqf {

namespace {

constexpr double kCoshSlack = 1e-12;

double neumaier_total(const std::vector<double>& v) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : v) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace

double FockDistribution::total() const { return neumaier_total(populations); }

SqueezingDecomposition decompose(const CovarianceTriple& cov, double omega) {
  const double impurity = purity(cov) - 0.25;
  if (!(std::abs(impurity) <= kPurityTolerance)) {
    throw NotPureError("covariances are not those of a pure state (q2 p2 - qp^2 - 1/4 = " +
                       std::to_string(impurity) + ")");
  }
  const double wq = omega * cov.q2;
  const double pw = cov.p2 / omega;
  const double cosh2r = wq + pw;
  if (cosh2r < 1.0) {
    if (cosh2r < 1.0 - kCoshSlack) {
      throw InconsistencyError("cosh 2r = " + std::to_string(cosh2r) + " < 1");
    }
    return {0.0, 0.0};
  }
  const double r = std::acosh(cosh2r) / 2.0;
  if (r == 0.0) return {0.0, 0.0};
  double theta = std::atan2(2.0 * cov.qp, pw - wq) / 2.0;
  if (theta <= -std::numbers::pi / 2) theta += std::numbers::pi;
  return {r, theta};
}

CovarianceTriple reconstruct(const SqueezingDecomposition& dec, double omega) {
  const double em = std::exp(-2.0 * dec.r);
  const double ep = std::exp(2.0 * dec.r);
  const double c = std::cos(dec.theta);
  const double s = std::sin(dec.theta);
  return {(em * c * c + ep * s * s) / (2.0 * omega), omega * (em * s * s + ep * c * c) / 2.0,
          std::sinh(2.0 * dec.r) * s * c};
}

double qstar_from_r(double r) { return std::cosh(2.0 * r); }

double r_from_qstar(double qstar) {
  if (!(qstar >= 1.0 - kCoshSlack)) throw DomainError("Q* must be >= 1, got " + std::to_string(qstar));
  return qstar <= 1.0 ? 0.0 : std::acosh(qstar) / 2.0;
}

double wirr_from_r(double r, double omega_final) {
  const double s = std::sinh(r);
  return omega_final * s * s;
}

FockDistribution fock_populations(double r, std::optional<std::size_t> nmax, double omega, double budget) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("squeezing parameter must be finite and >= 0");
  FockDistribution dist;
  dist.omega = omega;
  dist.truncation_budget = budget;

  const double t2 = std::tanh(r) * std::tanh(r);
  double term = 1.0 / std::cosh(r);
  double sum = 0.0;
  double carry = 0.0;
  auto accumulate = [&](double x) {
    const double s = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
    sum = s;
  };

  const std::size_t limit = nmax.value_or(kMaxFockCutoff);
  for (std::size_t n = 0; n <= limit; ++n) {
    if (n % 2 == 1) {
      dist.populations.push_back(0.0);
      continue;
    }
    if (n > 0) {
      const double m = static_cast<double>(n / 2);
      term *= (2.0 * m - 1.0) / (2.0 * m) * t2;
    }
    dist.populations.push_back(term);
    accumulate(term);
    if (!nmax && 1.0 - (sum + carry) < budget) break;
  }

  const double deficit = 1.0 - (sum + carry);
  if (deficit > budget) {
    throw TruncationError("Fock truncation at n = " + std::to_string(dist.nmax()) + " leaves tail mass " +
                          std::to_string(deficit) + " above budget " + std::to_string(budget) +
                          "; use a larger nmax");
  }
  return dist;
}

double energy_from_populations(const FockDistribution& dist) {
  std::vector<double> terms(dist.populations.size());
  for (std::size_t n = 0; n < terms.size(); ++n) terms[n] = (static_cast<double>(n) + 0.5) * dist.populations[n];
  return dist.omega * neumaier_total(terms);
}

SqueezingEstimate estimate_r(const FockDistribution& dist) {
  if (dist.populations.empty()) throw DomainError("empty population distribution");
  if (!(dist.omega > 0.0)) throw DomainError("trap frequency must be positive");
  SqueezingEstimate est;
  est.energy = energy_from_populations(dist);
  est.qstar = 2.0 * est.energy / dist.omega;
  if (est.qstar < 1.0) {
    est.qstar = 1.0;
    est.clamped = true;
  }
  est.r = r_from_qstar(est.qstar);
  est.beta = std::exp(2.0 * est.r);
  return est;
}

FockDistribution sample_populations(const FockDistribution& dist, std::size_t shots, std::mt19937_64& rng) {
  if (dist.populations.empty()) throw DomainError("empty population distribution");
  if (shots == 0) throw DomainError("need at least one shot");
  std::vector<double> cdf(dist.populations.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < cdf.size(); ++n) {
    acc += std::max(dist.populations[n], 0.0);
    cdf[n] = acc;
  }
  if (!(acc > 0.0)) throw DomainError("populations carry no probability mass");

  std::vector<std::size_t> counts(cdf.size(), 0);
  for (std::size_t i = 0; i < shots; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }

  FockDistribution out;
  out.omega = dist.omega;
  out.truncation_budget = dist.truncation_budget;
  out.populations.resize(counts.size());
  for (std::size_t n = 0; n < counts.size(); ++n) {
    out.populations[n] = static_cast<double>(counts[n]) / static_cast<double>(shots);
  }
  return out;
}

FockDistribution sample_populations(const FockDistribution& dist, std::size_t shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_populations(dist, shots, rng);
}

}  // namespace sqf
