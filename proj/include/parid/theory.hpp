#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parid/process.hpp"

namespace parid {

/// Limit proportion of degree-k vertices at alpha = 2, delta = 0:
/// 2 beta(2) / (k (k+1) (k+2)) * sum_{i<=k} (1 + 1/i).
double b_k(std::uint64_t k);

/// Finite-t counterpart of b_k built on the alpha = 2 law truncated at
/// ceil(t ln ln t): beta'' replaces beta(2) and the inner sum stops at the cap.
/// b'_0 = 0.
class FiniteLimitLaw {
public:
  explicit FiniteLimitLaw(double t);

  double t() const { return t_; }
  std::uint64_t cap() const { return spec_.cap.value(); }
  double beta_truncated() const { return spec_.normalizer; }
  const PowerLawSpec &spec() const { return spec_; }

  double operator()(std::uint64_t k) const;
  /// b'_k - [ (k-1)/2 b'_{k-1} - k/2 b'_k + P(Z = k) ].
  double residual(std::uint64_t k) const;
  /// sum_{k>=1} b'_k: explicit up to the cap plus the closed-form tail
  /// sum_{k>M} 1/(k(k+1)(k+2)) = 1/(2(M+1)(M+2)).
  double total() const;

private:
  double harmonic_plus_count(std::uint64_t k) const; // sum_{i<=min(k,cap)} (1 + 1/i)

  double t_;
  PowerLawSpec spec_;
};

double b_k_prime(std::uint64_t k, double t);

struct TheoryTable {
  double alpha = 2.0;
  std::uint64_t k_first = 1;
  std::uint64_t k_last = 0;
  std::optional<double> t;         // set when b'_k columns are present
  std::vector<double> b;           // b_k, k = k_first..k_last
  std::vector<double> b_prime;     // b'_k(t), empty without t
  std::vector<double> residual;    // recursion residual of b'_k, empty without t
  double tail_remainder = 0.0;     // 1 - sum of b_k over the range
};

TheoryTable make_theory_table(std::uint64_t k_max, std::optional<double> t = std::nullopt);

struct MeanFieldResult {
  std::uint64_t t = 0;
  std::vector<double> expected; // E[R_k(t)], k = 1..k_max
  double overflow = 0.0;        // expected count of degrees > k_max
  double max_conservation_error = 0.0; // max_tau |sum_k E[R_k(tau)] - (tau + 1)|
};

/// Forward iteration of the expected degree-count update
///   E_k(tau+1) = E_k(tau) + (k-1)/2 E_{k-1}(tau)/tau - k/2 E_k(tau)/tau + P(Z = k)
/// from E_k(1) = 2 P(Z = k). The per-step outflow fraction k/(2 tau) is capped at 1
/// (only reachable for k > 2 tau), and degrees above k_max collect in an overflow
/// bucket, so sum_k E_k(tau) = tau + 1 is preserved. Error terms are dropped: this
/// is a mean-field approximation, exact when every vertex brings one edge.
MeanFieldResult mean_field_expectation(std::span<const double> source_pmf, std::uint64_t t,
                                       std::uint64_t k_max);
/// alpha = 2, delta = 0, law truncated at ceil(t ln ln t).
MeanFieldResult mean_field_expectation(std::uint64_t t, std::uint64_t k_max);

/// Distribution over final degree multisets (sorted descending).
using DegreeLaw = std::map<std::vector<std::uint64_t>, double>;

struct ExactEnumeration {
  DegreeLaw law;
  std::uint64_t paths = 0;
  double total_mass() const;
};

/// Exhaustive expansion over every initial-degree sequence and every per-step
/// target assignment (merged by exchangeability into degree multisets).
/// pmf[i - 1] = P(X = i) on at most 3 values. Refuses with ResourceGuardError
/// once more than `path_budget` branches would be expanded.
ExactEnumeration enumerate_exact(std::span<const double> pmf, double delta, std::uint64_t t,
                                 std::uint64_t path_budget = 10'000'000);

/// Empirical law of the final degree multiset over n independent runs.
DegreeLaw sample_degree_law(const ParidModel &model, std::uint64_t t, std::uint64_t n,
                            std::uint64_t seed);

double total_variation(const DegreeLaw &a, const DegreeLaw &b);

/// E[R_k(t)] for k = 1..k_max under an exact law.
std::vector<double> expected_counts(const DegreeLaw &law, std::uint64_t k_max);

enum class LemmaId { L31, L32, edge_conc, inv_moment, product };

std::string to_string(LemmaId id);

struct BoundVerdict {
  LemmaId lemma = LemmaId::L31;
  std::vector<std::pair<std::string, double>> parameters;
  double bound_value = 0.0;
  double observed_value = 0.0;
  double margin = 0.0;
  bool holds = false;
};

/// Monte Carlo check of P(sum_{i<=t} X_i < z C t^(1/(alpha-1))) > 7/8 - 1/z on
/// untruncated draws; holds when estimate - 3 sigma >= 7/8 - 1/z. All z share
/// the same samples. Deterministic in (seed) for any thread count.
std::vector<BoundVerdict> check_lemma31(double alpha, std::uint64_t t, std::span<const double> zs,
                                        std::uint64_t n_samples, std::uint64_t seed,
                                        unsigned threads = 1);
BoundVerdict check_lemma31(double alpha, std::uint64_t t, double z, std::uint64_t n_samples,
                           std::uint64_t seed, unsigned threads = 1);

/// Exact check of P(X >= gamma C t^(1/(alpha-1))) >= beta (2 gamma C)^(1-alpha) / ((alpha-1) t).
BoundVerdict check_lemma32(double alpha, double t, double gamma);

/// prod xi - prod zeta <= prod xi * sum |1 - zeta_j / xi_j|, given prod xi >= prod zeta.
/// A relative slack of 1e-12 absorbs rounding in the equality cases.
bool check_product_inequality(std::span<const double> xi, std::span<const double> zeta);

struct ProductSweep {
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  double worst_relative_gap = 0.0; // max (lhs - rhs) / prod xi
};

/// Random vectors of length 1..20 with entries in (0, 10), swapped so prod xi >= prod zeta.
ProductSweep sweep_product_inequality(std::uint64_t cases, std::uint64_t seed);
BoundVerdict product_verdict(const ProductSweep &sweep, std::uint64_t seed);

/// Monte Carlo check of E[(sum_{j<=s} Z_j)^-ell] <= 1.1 / (beta'' s ln t)^ell with Z
/// the alpha = 2 law truncated at ceil(t ln ln t); observed_value is the ratio
/// estimate * (beta'' s ln t)^ell.
BoundVerdict check_inverse_moments(std::uint64_t t, std::uint64_t s, int ell,
                                   std::uint64_t n_samples, std::uint64_t seed,
                                   unsigned threads = 1);

inline constexpr double kInverseMomentSlack = 1.1;

} // namespace parid
