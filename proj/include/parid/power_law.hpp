#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace parid {

/// Discrete power law P(X = i) = normalizer * i^-alpha on {1, 2, ...}, optionally
/// conditioned on X <= cap.
struct PowerLawSpec {
  enum class Kind { untruncated, truncated };

  double alpha = 2.0;
  double normalizer = 0.0;
  std::optional<std::uint64_t> cap;
  Kind kind = Kind::untruncated;

  static PowerLawSpec untruncated(double alpha);
  /// Support {1, ..., cap}; normalizer = beta(alpha) / P(X <= cap).
  static PowerLawSpec truncated(double alpha, std::uint64_t cap);

  double pmf(std::uint64_t i) const;
  /// P(X <= k) under this spec.
  double cdf(std::uint64_t k) const;
  bool is_truncated() const { return kind == Kind::truncated; }
};

/// 1 / zeta(alpha).
double beta_normalizer(double alpha);

/// P(X >= q) for the untruncated law; q may exceed the 64-bit range.
double power_law_tail(double alpha, double q);

/// Constants of the non-concentration regime 1 < alpha < 2.
struct PaperConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double c = 0.0;      // ((alpha-1) / (8 beta))^(1/(1-alpha))
  double C_inf = 0.0;  // (2c)^(2-alpha) beta / (2-alpha)
  double t = 0.0;      // step count C_of_t was evaluated at
  double C_of_t = 0.0; // C(alpha, t)

  /// beta (2c)^(2-alpha) / ((2-alpha) P(X < c t^(1/(alpha-1)) + 1)); decreasing in t.
  double C(double t) const;
};

PaperConstants paper_constants(double alpha, double t);

/// Real threshold M with the truncated support being {i : i < M}:
/// c t^(1/(alpha-1)) + 1 for 1 < alpha < 2, t ln(ln t) + 1 for alpha = 2.
double truncation_threshold(double alpha, double t);

/// Largest integer strictly below truncation_threshold(alpha, t).
std::uint64_t truncation_point(double alpha, double t);

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
};

/// Exact first and second moments. Infinite moments of an untruncated law are
/// reported as DomainError when the mean diverges and as +inf for the second moment.
Moments truncated_moments(const PowerLawSpec &spec);

/// sum_{i=a}^{b} i^-s for s >= 0 (explicit below 2^22 terms, Euler-Maclaurin above).
double power_sum(double s, std::uint64_t a, std::uint64_t b);

/// Inverse-CDF sampler. Dense CDF table up to min(cap, 2^20) with a guide table
/// for O(1) expected lookup; zeta-tail bisection beyond the table.
class PowerLawSampler {
public:
  static constexpr std::uint64_t kTableSize = std::uint64_t{1} << 20;
  /// Draws that would exceed this value are reported as this value.
  static constexpr std::uint64_t kSaturation = std::uint64_t{1} << 62;

  explicit PowerLawSampler(PowerLawSpec spec);

  /// Smallest k with CDF(k) >= u, for u in [0, 1).
  std::uint64_t operator()(double u) const;

  const PowerLawSpec &spec() const { return spec_; }
  double cdf(std::uint64_t k) const;

private:
  std::uint64_t search_tail(double u) const;

  PowerLawSpec spec_;
  double base_beta_;     // beta(alpha) of the untruncated law
  double kept_mass_;     // P(X <= cap), 1 when untruncated
  std::uint64_t table_last_;
  std::vector<double> cdf_;           // cdf_[k-1] = CDF(k), k = 1..table_last_
  std::vector<std::uint32_t> guide_;  // guide_[j] = first index with cdf >= j / guide size
};

} // namespace parid
