#pragma once

// Test-only statistics shared by unit and acceptance suites.

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "parid/power_law.hpp"
#include "parid/rng.hpp"

namespace parid::testing {

struct ChiSquare {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double critical = 0.0; // upper quantile at the requested significance
  bool passes = false;
  std::vector<std::uint64_t> counts; // counts[i - 1] for i < tail_start, last entry = tail bin
};

/// Pearson chi-square of n draws against an exact pmf, binning values 1..tail_start-1
/// individually and everything >= tail_start together.
inline ChiSquare chi_square_power_law(const PowerLawSampler &sampler, std::uint64_t n,
                                      std::uint64_t tail_start, std::uint64_t seed,
                                      double significance) {
  const auto &spec = sampler.spec();
  if (spec.cap && *spec.cap + 1 < tail_start)
    tail_start = *spec.cap + 1;
  ChiSquare result;
  result.counts.assign(tail_start, 0);
  Rng rng(seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t x = sampler(uniform01(rng));
    ++result.counts[std::min(x, tail_start) - 1];
  }
  double below = 0.0;
  std::size_t bins = 0;
  for (std::uint64_t i = 1; i <= tail_start; ++i) {
    double p;
    if (i < tail_start) {
      p = spec.pmf(i);
      below += p;
    } else {
      p = 1.0 - below;
    }
    if (p <= 0.0)
      continue;
    const double expected = p * static_cast<double>(n);
    const double diff = static_cast<double>(result.counts[i - 1]) - expected;
    result.statistic += diff * diff / expected;
    ++bins;
  }
  result.degrees_of_freedom = static_cast<double>(bins - 1);
  const boost::math::chi_squared dist(result.degrees_of_freedom);
  result.critical = boost::math::quantile(boost::math::complement(dist, significance));
  result.passes = result.statistic <= result.critical;
  return result;
}

/// |observed - n p| <= sigmas * sqrt(n p (1 - p)).
inline bool within_binomial(std::uint64_t observed, std::uint64_t n, double p, double sigmas) {
  const double nn = static_cast<double>(n);
  const double sd = std::sqrt(nn * p * (1.0 - p));
  return std::abs(static_cast<double>(observed) - nn * p) <= sigmas * sd;
}

} // namespace parid::testing
