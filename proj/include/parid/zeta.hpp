#pragma once

#include <cstdint>

namespace parid {

/// Hurwitz zeta sum_{n>=0} (q+n)^-alpha for alpha > 1 and real q >= 1.
///
/// Terms below the switch point max(q, 1e4) are summed explicitly (smallest
/// first); the remainder uses Euler-Maclaurin with Bernoulli corrections up
/// to B_10, which keeps the relative error below 1e-14 there. For integer q
/// this is the power-law tail sum_{i>=q} i^-alpha. Large q (up to ~1e300) is
/// accepted so tails beyond the 64-bit range stay computable.
double hurwitz_zeta(double alpha, double q);

/// sum_{i>=k} i^-alpha. Throws DomainError for alpha <= 1 or k == 0.
double zeta_tail(double alpha, std::uint64_t k);

} // namespace parid
