#include "parid/zeta.hpp"

#include <array>
#include <cmath>
#include <string>

#include "parid/error.hpp"

namespace parid {

namespace {

constexpr double kSwitchPoint = 1.0e4;

// B_{2j} / (2j)! for j = 1..5
constexpr std::array<double, 5> kBernoulliOverFactorial = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
};

// sum_{n>=0} (N+n)^-alpha for N >= kSwitchPoint.
double euler_maclaurin_tail(double alpha, double n) {
  const double log_n = std::log(n);
  double sum = std::exp((1.0 - alpha) * log_n) / (alpha - 1.0);
  const double term0 = std::exp(-alpha * log_n);
  sum += 0.5 * term0;

  // f^{(2j-1)}(N) = -alpha (alpha+1) ... (alpha+2j-2) N^{-alpha-2j+1}
  double rising = alpha;     // alpha (alpha+1) ... (alpha+2j-2)
  double power = term0 / n;  // N^{-alpha-2j+1}
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    sum += kBernoulliOverFactorial[j] * rising * power;
    rising *= (alpha + 2.0 * j + 1.0) * (alpha + 2.0 * j + 2.0);
    power /= n * n;
  }
  return sum;
}

} // namespace

double hurwitz_zeta(double alpha, double q) {
  if (!(alpha > 1.0))
    throw DomainError("zeta: series diverges for alpha <= 1 (alpha = " + std::to_string(alpha) +
                      ")");
  if (!(q >= 1.0) || !std::isfinite(q))
    throw DomainError("zeta: start point must be a finite value >= 1");

  if (q >= kSwitchPoint)
    return euler_maclaurin_tail(alpha, q);

  const auto explicit_terms = static_cast<long>(std::ceil(kSwitchPoint - q));
  const double switch_at = q + static_cast<double>(explicit_terms);
  double sum = euler_maclaurin_tail(alpha, switch_at);
  for (long n = explicit_terms - 1; n >= 0; --n)
    sum += std::pow(q + static_cast<double>(n), -alpha);
  return sum;
}

double zeta_tail(double alpha, std::uint64_t k) {
  if (k == 0)
    throw DomainError("zeta_tail: k must be positive");
  return hurwitz_zeta(alpha, static_cast<double>(k));
}

} // namespace parid
