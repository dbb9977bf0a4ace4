#include "parid/power_law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "parid/error.hpp"
#include "parid/zeta.hpp"

namespace parid {

namespace {

constexpr std::size_t kGuideSize = std::size_t{1} << 18;
constexpr std::uint64_t kExplicitSumLimit = std::uint64_t{1} << 22;

void require_alpha(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw DomainError("power law requires alpha > 1 (alpha = " + std::to_string(alpha) + ")");
}

// sum_{i=a}^{b} i^-s by Euler-Maclaurin over the whole range [a, b].
double euler_maclaurin_range(double s, double a, double b) {
  static constexpr std::array<double, 5> bernoulli = {
      1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0};
  double integral;
  if (s == 1.0)
    integral = std::log(b / a);
  else
    integral = (std::pow(b, 1.0 - s) - std::pow(a, 1.0 - s)) / (1.0 - s);

  double sum = integral + 0.5 * (std::pow(a, -s) + std::pow(b, -s));
  double rising = s;
  double pa = std::pow(a, -s - 1.0);
  double pb = std::pow(b, -s - 1.0);
  for (std::size_t j = 0; j < bernoulli.size(); ++j) {
    sum += bernoulli[j] * rising * (pa - pb);
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    pa /= a * a;
    pb /= b * b;
  }
  return sum;
}

} // namespace

double beta_normalizer(double alpha) {
  require_alpha(alpha);
  return 1.0 / hurwitz_zeta(alpha, 1.0);
}

double power_law_tail(double alpha, double q) {
  require_alpha(alpha);
  if (q <= 1.0)
    return 1.0;
  return beta_normalizer(alpha) * hurwitz_zeta(alpha, std::ceil(q));
}

PowerLawSpec PowerLawSpec::untruncated(double alpha) {
  PowerLawSpec spec;
  spec.alpha = alpha;
  spec.normalizer = beta_normalizer(alpha);
  spec.kind = Kind::untruncated;
  return spec;
}

PowerLawSpec PowerLawSpec::truncated(double alpha, std::uint64_t cap) {
  require_alpha(alpha);
  if (cap == 0)
    throw DomainError("truncated power law needs cap >= 1");
  PowerLawSpec spec;
  spec.alpha = alpha;
  spec.cap = cap;
  spec.kind = Kind::truncated;
  const double kept = 1.0 - power_law_tail(alpha, static_cast<double>(cap) + 1.0);
  spec.normalizer = beta_normalizer(alpha) / kept;
  return spec;
}

double PowerLawSpec::pmf(std::uint64_t i) const {
  if (i == 0 || (cap && i > *cap))
    return 0.0;
  return normalizer * std::pow(static_cast<double>(i), -alpha);
}

double PowerLawSpec::cdf(std::uint64_t k) const {
  if (k == 0)
    return 0.0;
  if (cap && k >= *cap)
    return 1.0;
  const double below = 1.0 - power_law_tail(alpha, static_cast<double>(k) + 1.0);
  if (!cap)
    return below;
  return below / (1.0 - power_law_tail(alpha, static_cast<double>(*cap) + 1.0));
}

double PaperConstants::C(double steps) const {
  const double threshold = c * std::pow(steps, 1.0 / (alpha - 1.0)) + 1.0;
  if (std::isinf(threshold))
    return C_inf; // tail beyond an unrepresentable threshold is 0
  const double below = 1.0 - power_law_tail(alpha, threshold);
  return C_inf / below;
}

PaperConstants paper_constants(double alpha, double t) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw DomainError("normalising constants are defined for 1 < alpha < 2 only");
  if (!(t >= 1.0))
    throw DomainError("normalising constants need t >= 1");
  PaperConstants k;
  k.alpha = alpha;
  k.beta = beta_normalizer(alpha);
  k.c = std::pow((alpha - 1.0) / (8.0 * k.beta), 1.0 / (1.0 - alpha));
  k.C_inf = std::pow(2.0 * k.c, 2.0 - alpha) * k.beta / (2.0 - alpha);
  k.t = t;
  k.C_of_t = k.C(t);
  return k;
}

double truncation_threshold(double alpha, double t) {
  if (alpha == 2.0) {
    if (!(t >= 3.0))
      throw DomainError("alpha = 2 truncation needs t >= 3");
    return t * std::log(std::log(t)) + 1.0;
  }
  if (alpha > 1.0 && alpha < 2.0) {
    const auto k = paper_constants(alpha, 1.0);
    if (!(t >= std::pow(k.c, 1.0 - alpha)))
      throw DomainError("alpha < 2 truncation needs t >= c^(1-alpha)");
    return k.c * std::pow(t, 1.0 / (alpha - 1.0)) + 1.0;
  }
  throw DomainError("no truncation scheme for alpha = " + std::to_string(alpha));
}

std::uint64_t truncation_point(double alpha, double t) {
  const double threshold = truncation_threshold(alpha, t);
  if (threshold > static_cast<double>(PowerLawSampler::kSaturation))
    throw DomainError("truncation point exceeds the 64-bit degree range");
  return static_cast<std::uint64_t>(std::ceil(threshold)) - 1;
}

double power_sum(double s, std::uint64_t a, std::uint64_t b) {
  if (a == 0)
    throw DomainError("power_sum starts at 1");
  if (b < a)
    return 0.0;
  if (s == 0.0)
    return static_cast<double>(b - a + 1);

  std::uint64_t explicit_end = b;
  double sum = 0.0;
  if (b - a >= kExplicitSumLimit) {
    explicit_end = a + 9999;
    sum = euler_maclaurin_range(s, static_cast<double>(explicit_end + 1), static_cast<double>(b));
  }
  double compensation = 0.0;
  for (std::uint64_t i = explicit_end;; --i) {
    const double y = std::pow(static_cast<double>(i), -s) - compensation;
    const double next = sum + y;
    compensation = (next - sum) - y;
    sum = next;
    if (i == a)
      break;
  }
  return sum;
}

Moments truncated_moments(const PowerLawSpec &spec) {
  if (spec.cap) {
    return {spec.normalizer * power_sum(spec.alpha - 1.0, 1, *spec.cap),
            spec.normalizer * power_sum(spec.alpha - 2.0, 1, *spec.cap)};
  }
  if (spec.alpha <= 2.0)
    throw DomainError("untruncated power law with alpha <= 2 has infinite mean");
  Moments m;
  m.mean = spec.normalizer * hurwitz_zeta(spec.alpha - 1.0, 1.0);
  m.second_moment = spec.alpha > 3.0 ? spec.normalizer * hurwitz_zeta(spec.alpha - 2.0, 1.0)
                                     : std::numeric_limits<double>::infinity();
  return m;
}

PowerLawSampler::PowerLawSampler(PowerLawSpec spec)
    : spec_(spec), base_beta_(beta_normalizer(spec.alpha)), kept_mass_(1.0) {
  table_last_ = spec_.cap ? std::min(*spec_.cap, kTableSize) : kTableSize;
  if (spec_.cap)
    kept_mass_ = 1.0 - power_law_tail(spec_.alpha, static_cast<double>(*spec_.cap) + 1.0);

  // tail(k) = sum_{i>=k} i^-alpha, accumulated downward from the table end.
  cdf_.resize(table_last_);
  double tail = hurwitz_zeta(spec_.alpha, static_cast<double>(table_last_) + 1.0);
  for (std::uint64_t k = table_last_; k >= 1; --k) {
    cdf_[k - 1] = std::min(1.0, (1.0 - base_beta_ * tail) / kept_mass_);
    tail += std::pow(static_cast<double>(k), -spec_.alpha);
  }
  if (spec_.cap && *spec_.cap == table_last_)
    cdf_.back() = 1.0;

  guide_.resize(kGuideSize + 1);
  std::size_t idx = 0;
  for (std::size_t j = 0; j <= kGuideSize; ++j) {
    const double level = static_cast<double>(j) / static_cast<double>(kGuideSize);
    while (idx < cdf_.size() && cdf_[idx] < level)
      ++idx;
    guide_[j] = static_cast<std::uint32_t>(idx);
  }
}

double PowerLawSampler::cdf(std::uint64_t k) const {
  if (k == 0)
    return 0.0;
  if (k <= table_last_)
    return cdf_[k - 1];
  return spec_.cdf(k);
}

std::uint64_t PowerLawSampler::operator()(double u) const {
  const auto j = static_cast<std::size_t>(u * static_cast<double>(kGuideSize));
  const std::size_t first = guide_[j];
  if (first < cdf_.size()) {
    const std::size_t last = std::min<std::size_t>(guide_[j + 1] + 1, cdf_.size());
    const auto it = std::lower_bound(cdf_.begin() + static_cast<std::ptrdiff_t>(first),
                                     cdf_.begin() + static_cast<std::ptrdiff_t>(last), u);
    if (it != cdf_.end())
      return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
  }
  return search_tail(u);
}

std::uint64_t PowerLawSampler::search_tail(double u) const {
  // CDF(k) >= u  <=>  sum_{i>k} i^-alpha <= (1 - u * kept) / beta
  const double target = (1.0 - u * kept_mass_) / base_beta_;
  const auto accepts = [&](std::uint64_t k) {
    return hurwitz_zeta(spec_.alpha, static_cast<double>(k) + 1.0) <= target;
  };
  const std::uint64_t limit = spec_.cap ? *spec_.cap : kSaturation;

  std::uint64_t lo = table_last_;
  std::uint64_t step = std::max<std::uint64_t>(table_last_, 1);
  std::uint64_t hi = std::min(lo + step, limit);
  while (hi < limit && !accepts(hi)) {
    lo = hi;
    step = step > limit ? limit : step * 2;
    hi = limit - lo > step ? lo + step : limit;
  }
  if (hi == limit && !spec_.cap && !accepts(hi))
    return kSaturation;
  if (hi == limit && spec_.cap && !accepts(hi))
    return limit;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (accepts(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

} // namespace parid
