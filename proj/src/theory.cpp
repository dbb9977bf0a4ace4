#include "parid/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "parid/error.hpp"
#include "parid/parallel.hpp"

namespace parid {

namespace {

constexpr double kBeta2 = 6.0 / (std::numbers::pi * std::numbers::pi);
constexpr std::uint64_t kHarmonicTable = std::uint64_t{1} << 16;
constexpr std::uint64_t kChunks = 64;

double harmonic(std::uint64_t n) {
  static const std::vector<double> table = [] {
    std::vector<double> h(kHarmonicTable + 1, 0.0);
    for (std::uint64_t i = 1; i <= kHarmonicTable; ++i)
      h[i] = h[i - 1] + 1.0 / static_cast<double>(i);
    return h;
  }();
  if (n <= kHarmonicTable)
    return table[n];
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + std::numbers::egamma + 0.5 / x -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double cubic_weight(std::uint64_t k) {
  const auto x = static_cast<double>(k);
  return 2.0 / (x * (x + 1.0) * (x + 2.0));
}

// Splits n samples into kChunks seeded chunks and sums per-chunk results.
template <class Chunk>
void for_chunks(std::uint64_t n, std::uint64_t seed, unsigned threads, Chunk &&chunk) {
  parallel_for(kChunks, threads, [&](std::size_t c) {
    const std::uint64_t begin = n * c / kChunks;
    const std::uint64_t end = n * (c + 1) / kChunks;
    Rng rng(derive_seed(seed, c));
    chunk(c, end - begin, rng);
  });
}

} // namespace

double b_k(std::uint64_t k) {
  if (k == 0)
    return 0.0;
  return kBeta2 * cubic_weight(k) * (static_cast<double>(k) + harmonic(k));
}

FiniteLimitLaw::FiniteLimitLaw(double t)
    : t_(t), spec_(PowerLawSpec::truncated(2.0, truncation_point(2.0, t))) {}

double FiniteLimitLaw::harmonic_plus_count(std::uint64_t k) const {
  const std::uint64_t m = std::min(k, cap());
  return static_cast<double>(m) + harmonic(m);
}

double FiniteLimitLaw::operator()(std::uint64_t k) const {
  if (k == 0)
    return 0.0;
  return beta_truncated() * cubic_weight(k) * harmonic_plus_count(k);
}

double FiniteLimitLaw::residual(std::uint64_t k) const {
  const double kk = static_cast<double>(k);
  const double bk = (*this)(k);
  const double rhs = 0.5 * (kk - 1.0) * (*this)(k - 1) - 0.5 * kk * bk + spec_.pmf(k);
  return bk - rhs;
}

double FiniteLimitLaw::total() const {
  const std::uint64_t m = cap();
  double sum = 0.0;
  double compensation = 0.0;
  for (std::uint64_t k = m; k >= 1; --k) {
    const double y = (*this)(k) - compensation;
    const double next = sum + y;
    compensation = (next - sum) - y;
    sum = next;
  }
  const double x = static_cast<double>(m);
  const double tail = beta_truncated() * harmonic_plus_count(m) / ((x + 1.0) * (x + 2.0));
  return sum + tail;
}

double b_k_prime(std::uint64_t k, double t) { return FiniteLimitLaw(t)(k); }

TheoryTable make_theory_table(std::uint64_t k_max, std::optional<double> t) {
  TheoryTable table;
  table.k_last = k_max;
  table.t = t;
  table.b.reserve(k_max);
  double sum = 0.0;
  double compensation = 0.0;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    table.b.push_back(b_k(k));
    const double y = table.b.back() - compensation;
    const double next = sum + y;
    compensation = (next - sum) - y;
    sum = next;
  }
  table.tail_remainder = 1.0 - sum;
  if (t) {
    const FiniteLimitLaw law(*t);
    table.b_prime.reserve(k_max);
    table.residual.reserve(k_max);
    for (std::uint64_t k = 1; k <= k_max; ++k) {
      table.b_prime.push_back(law(k));
      table.residual.push_back(law.residual(k));
    }
  }
  return table;
}

namespace {

MeanFieldResult iterate_mean_field(const std::vector<double> &source, double source_overflow,
                                   std::uint64_t t) {
  const std::size_t k_max = source.size();
  MeanFieldResult result;
  result.t = t;
  std::vector<double> e(k_max);
  for (std::size_t i = 0; i < k_max; ++i)
    e[i] = 2.0 * source[i];
  double overflow = 2.0 * source_overflow;

  const auto conservation = [&](std::uint64_t tau) {
    double total = overflow;
    for (double v : e)
      total += v;
    result.max_conservation_error =
        std::max(result.max_conservation_error, std::abs(total - static_cast<double>(tau + 1)));
  };
  conservation(1);

  for (std::uint64_t tau = 1; tau < t; ++tau) {
    const double inv = 1.0 / static_cast<double>(tau);
    double inflow = 0.0;
    for (std::size_t i = 0; i < k_max; ++i) {
      const double rate = std::min(0.5 * static_cast<double>(i + 1) * inv, 1.0);
      const double outflow = rate * e[i];
      e[i] += inflow - outflow + source[i];
      inflow = outflow;
    }
    overflow += inflow + source_overflow;
    conservation(tau + 1);
  }
  result.expected = std::move(e);
  result.overflow = overflow;
  return result;
}

} // namespace

MeanFieldResult mean_field_expectation(std::span<const double> source_pmf, std::uint64_t t,
                                       std::uint64_t k_max) {
  if (t == 0 || k_max == 0)
    throw DomainError("mean field needs t >= 1 and k_max >= 1");
  std::vector<double> source(k_max, 0.0);
  double overflow = 0.0;
  for (std::size_t i = 0; i < source_pmf.size(); ++i) {
    if (i < k_max)
      source[i] = source_pmf[i];
    else
      overflow += source_pmf[i];
  }
  return iterate_mean_field(source, overflow, t);
}

MeanFieldResult mean_field_expectation(std::uint64_t t, std::uint64_t k_max) {
  if (k_max == 0)
    throw DomainError("mean field needs k_max >= 1");
  const auto spec = PowerLawSpec::truncated(2.0, truncation_point(2.0, static_cast<double>(t)));
  std::vector<double> source(k_max);
  for (std::uint64_t k = 1; k <= k_max; ++k)
    source[k - 1] = spec.pmf(k);
  double overflow = 0.0;
  if (k_max < *spec.cap) {
    // P(k_max < Z <= cap), summed from the small end of the tail
    double compensation = 0.0;
    for (std::uint64_t k = *spec.cap; k > k_max; --k) {
      const double y = spec.pmf(k) - compensation;
      const double next = overflow + y;
      compensation = (next - overflow) - y;
      overflow = next;
    }
  }
  return iterate_mean_field(source, overflow, t);
}

double ExactEnumeration::total_mass() const {
  double total = 0.0;
  for (const auto &[degrees, p] : law)
    total += p;
  return total;
}

ExactEnumeration enumerate_exact(std::span<const double> pmf, double delta, std::uint64_t t,
                                 std::uint64_t path_budget) {
  if (pmf.empty() || pmf.size() > 3)
    throw DomainError("exact enumeration supports initial degrees in {1, 2, 3}");
  if (t == 0)
    throw DomainError("exact enumeration needs t >= 1");
  double mass = 0.0;
  std::uint64_t min_support = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (!(pmf[i] >= 0.0))
      throw DomainError("pmf entries must be nonnegative");
    if (pmf[i] > 0.0 && min_support == 0)
      min_support = i + 1;
    mass += pmf[i];
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw DomainError("pmf must sum to 1");
  if (!(delta + static_cast<double>(min_support) > 0.0))
    throw DomainError("delta + minimum initial degree must be positive");

  ExactEnumeration out;
  const auto count_path = [&] {
    if (++out.paths > path_budget)
      throw ResourceGuardError("exact enumeration exceeds " + std::to_string(path_budget) +
                               " paths");
  };

  DegreeLaw states;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] == 0.0)
      continue;
    count_path();
    states[{i + 1, i + 1}] += pmf[i];
  }

  std::vector<std::uint64_t> hits;
  for (std::uint64_t tau = 2; tau <= t; ++tau) {
    DegreeLaw next;
    for (const auto &[degrees, p_state] : states) {
      const std::size_t n = degrees.size();
      std::vector<double> share(n);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        total += static_cast<double>(degrees[i]) + delta;
      for (std::size_t i = 0; i < n; ++i)
        share[i] = (static_cast<double>(degrees[i]) + delta) / total;

      for (std::size_t xi = 0; xi < pmf.size(); ++xi) {
        if (pmf[xi] == 0.0)
          continue;
        const std::uint64_t x = xi + 1;
        hits.assign(n, 0);
        // Enumerate compositions of x into n labelled parts; weight is the multinomial pmf.
        std::function<void(std::size_t, std::uint64_t, double)> expand =
            [&](std::size_t i, std::uint64_t left, double weight) {
              if (i + 1 == n) {
                hits[i] = left;
                weight *= std::pow(share[i], static_cast<double>(left)) /
                          std::tgamma(static_cast<double>(left) + 1.0);
                count_path();
                std::vector<std::uint64_t> after(degrees);
                for (std::size_t j = 0; j < n; ++j)
                  after[j] += hits[j];
                after.push_back(x);
                std::sort(after.begin(), after.end(), std::greater<>());
                next[after] += p_state * pmf[xi] * std::tgamma(static_cast<double>(x) + 1.0) *
                               weight;
                return;
              }
              for (std::uint64_t c = 0; c <= left; ++c) {
                hits[i] = c;
                expand(i + 1, left - c,
                       weight * std::pow(share[i], static_cast<double>(c)) /
                           std::tgamma(static_cast<double>(c) + 1.0));
              }
            };
        expand(0, x, 1.0);
      }
    }
    states = std::move(next);
  }
  out.law = std::move(states);
  return out;
}

DegreeLaw sample_degree_law(const ParidModel &model, std::uint64_t t, std::uint64_t n,
                            std::uint64_t seed) {
  std::map<std::vector<std::uint64_t>, std::uint64_t> counts;
  Rng rng(seed);
  for (std::uint64_t run = 0; run < n; ++run) {
    auto state = init(model, rng);
    while (state.step_index < t)
      step(state, rng);
    std::sort(state.degrees.begin(), state.degrees.end(), std::greater<>());
    ++counts[state.degrees];
  }
  DegreeLaw law;
  for (const auto &[degrees, c] : counts)
    law[degrees] = static_cast<double>(c) / static_cast<double>(n);
  return law;
}

double total_variation(const DegreeLaw &a, const DegreeLaw &b) {
  double sum = 0.0;
  for (const auto &[key, p] : a) {
    const auto it = b.find(key);
    sum += std::abs(p - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto &[key, p] : b)
    if (!a.contains(key))
      sum += p;
  return 0.5 * sum;
}

std::vector<double> expected_counts(const DegreeLaw &law, std::uint64_t k_max) {
  std::vector<double> e(k_max, 0.0);
  for (const auto &[degrees, p] : law)
    for (auto d : degrees)
      if (d >= 1 && d <= k_max)
        e[d - 1] += p;
  return e;
}

std::string to_string(LemmaId id) {
  switch (id) {
  case LemmaId::L31:
    return "L31";
  case LemmaId::L32:
    return "L32";
  case LemmaId::edge_conc:
    return "edge_conc";
  case LemmaId::inv_moment:
    return "inv_moment";
  case LemmaId::product:
    return "product";
  }
  return "unknown";
}

std::vector<BoundVerdict> check_lemma31(double alpha, std::uint64_t t, std::span<const double> zs,
                                        std::uint64_t n_samples, std::uint64_t seed,
                                        unsigned threads) {
  const auto k = paper_constants(alpha, static_cast<double>(t));
  if (static_cast<double>(t) < std::pow(k.c, 1.0 - alpha))
    throw DomainError("lemma 3.1 needs t >= c^(1-alpha)");
  if (n_samples == 0)
    throw DomainError("lemma 3.1 needs at least one sample");
  std::vector<double> thresholds;
  for (double z : zs) {
    if (!(z > 0.0))
      throw DomainError("lemma 3.1 needs z > 0");
    thresholds.push_back(z * k.C_of_t * std::pow(static_cast<double>(t), 1.0 / (alpha - 1.0)));
  }

  const PowerLawSampler sampler(PowerLawSpec::untruncated(alpha));
  std::vector<std::vector<std::uint64_t>> below(kChunks, std::vector<std::uint64_t>(zs.size(), 0));
  for_chunks(n_samples, seed, threads, [&](std::size_t c, std::uint64_t count, Rng &rng) {
    for (std::uint64_t s = 0; s < count; ++s) {
      double sum = 0.0;
      for (std::uint64_t i = 0; i < t; ++i)
        sum += static_cast<double>(sampler(uniform01(rng)));
      for (std::size_t j = 0; j < zs.size(); ++j)
        if (sum < thresholds[j])
          ++below[c][j];
    }
  });

  std::vector<BoundVerdict> verdicts;
  for (std::size_t j = 0; j < zs.size(); ++j) {
    std::uint64_t hits = 0;
    for (const auto &chunk : below)
      hits += chunk[j];
    const double n = static_cast<double>(n_samples);
    const double p = static_cast<double>(hits) / n;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    BoundVerdict v;
    v.lemma = LemmaId::L31;
    v.parameters = {{"alpha", alpha},           {"t", static_cast<double>(t)},
                    {"z", zs[j]},               {"n_samples", n},
                    {"C", k.C_of_t},            {"threshold", thresholds[j]},
                    {"sigma", sigma}};
    v.bound_value = 7.0 / 8.0 - 1.0 / zs[j];
    v.observed_value = p;
    v.margin = p - 3.0 * sigma - v.bound_value;
    v.holds = v.margin >= 0.0;
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

BoundVerdict check_lemma31(double alpha, std::uint64_t t, double z, std::uint64_t n_samples,
                           std::uint64_t seed, unsigned threads) {
  const double zs[] = {z};
  return check_lemma31(alpha, t, zs, n_samples, seed, threads).front();
}

BoundVerdict check_lemma32(double alpha, double t, double gamma) {
  const auto k = paper_constants(alpha, t);
  const double point = gamma * k.C_of_t * std::pow(t, 1.0 / (alpha - 1.0));
  if (!(gamma > 0.0) || !(point > 1.0))
    throw DomainError("lemma 3.2 needs gamma C t^(1/(alpha-1)) > 1");
  BoundVerdict v;
  v.lemma = LemmaId::L32;
  v.parameters = {{"alpha", alpha}, {"t", t}, {"gamma", gamma}, {"C", k.C_of_t}, {"point", point}};
  v.observed_value = power_law_tail(alpha, point);
  v.bound_value = k.beta * std::pow(2.0 * gamma * k.C_of_t, 1.0 - alpha) / ((alpha - 1.0) * t);
  v.margin = v.observed_value - v.bound_value;
  v.holds = v.observed_value >= v.bound_value;
  return v;
}

namespace {

struct ProductSides {
  double lhs;
  double rhs;
  double scale;
};

ProductSides product_sides(std::span<const double> xi, std::span<const double> zeta) {
  if (xi.size() != zeta.size() || xi.empty())
    throw DomainError("product inequality needs two nonempty vectors of equal length");
  double px = 1.0;
  double pz = 1.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    if (!(xi[j] > 0.0) || !(zeta[j] > 0.0))
      throw DomainError("product inequality needs positive entries");
    px *= xi[j];
    pz *= zeta[j];
    sum += std::abs(1.0 - zeta[j] / xi[j]);
  }
  if (px < pz)
    throw DomainError("product inequality needs prod xi >= prod zeta");
  return {px - pz, px * sum, px};
}

} // namespace

bool check_product_inequality(std::span<const double> xi, std::span<const double> zeta) {
  const auto s = product_sides(xi, zeta);
  return s.lhs <= s.rhs + 1e-12 * s.scale;
}

ProductSweep sweep_product_inequality(std::uint64_t cases, std::uint64_t seed) {
  ProductSweep sweep;
  sweep.cases = cases;
  sweep.worst_relative_gap = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  std::vector<double> xi;
  std::vector<double> zeta;
  for (std::uint64_t c = 0; c < cases; ++c) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 20);
    xi.resize(n);
    zeta.resize(n);
    double px = 1.0;
    double pz = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      // (0, 10): nudge away from zero
      xi[j] = 10.0 * (uniform01(rng) + 0x1.0p-54);
      zeta[j] = 10.0 * (uniform01(rng) + 0x1.0p-54);
      px *= xi[j];
      pz *= zeta[j];
    }
    if (px < pz)
      std::swap(xi, zeta);
    const auto s = product_sides(xi, zeta);
    sweep.worst_relative_gap = std::max(sweep.worst_relative_gap, (s.lhs - s.rhs) / s.scale);
    if (!(s.lhs <= s.rhs + 1e-12 * s.scale))
      ++sweep.violations;
  }
  return sweep;
}

BoundVerdict product_verdict(const ProductSweep &sweep, std::uint64_t seed) {
  BoundVerdict v;
  v.lemma = LemmaId::product;
  v.parameters = {{"cases", static_cast<double>(sweep.cases)},
                  {"seed", static_cast<double>(seed)},
                  {"violations", static_cast<double>(sweep.violations)}};
  v.bound_value = 0.0;
  v.observed_value = sweep.worst_relative_gap;
  v.margin = -sweep.worst_relative_gap;
  v.holds = sweep.violations == 0;
  return v;
}

BoundVerdict check_inverse_moments(std::uint64_t t, std::uint64_t s, int ell,
                                   std::uint64_t n_samples, std::uint64_t seed,
                                   unsigned threads) {
  if (ell != 1 && ell != 2)
    throw DomainError("inverse moment order must be 1 or 2");
  const double tt = static_cast<double>(t);
  if (t < 3)
    throw DomainError("inverse moments need t >= 3");
  const double lower = tt / std::log(std::log(tt));
  if (static_cast<double>(s) < lower || s > t)
    throw DomainError("inverse moments need t / ln ln t <= s <= t");
  if (n_samples == 0)
    throw DomainError("inverse moments need at least one sample");

  const PowerLawSampler sampler(PowerLawSpec::truncated(2.0, truncation_point(2.0, tt)));
  const double beta2 = sampler.spec().normalizer;
  std::vector<double> partial(kChunks, 0.0);
  for_chunks(n_samples, seed, threads, [&](std::size_t c, std::uint64_t count, Rng &rng) {
    double acc = 0.0;
    for (std::uint64_t r = 0; r < count; ++r) {
      std::uint64_t sum = 0;
      for (std::uint64_t j = 0; j < s; ++j)
        sum += sampler(uniform01(rng));
      acc += std::pow(static_cast<double>(sum), -static_cast<double>(ell));
    }
    partial[c] = acc;
  });
  double total = 0.0;
  for (double p : partial)
    total += p;
  const double estimate = total / static_cast<double>(n_samples);
  const double scale = std::pow(beta2 * static_cast<double>(s) * std::log(tt), ell);

  BoundVerdict v;
  v.lemma = LemmaId::inv_moment;
  v.parameters = {{"t", tt},
                  {"s", static_cast<double>(s)},
                  {"ell", static_cast<double>(ell)},
                  {"n_samples", static_cast<double>(n_samples)},
                  {"beta_truncated", beta2},
                  {"estimate", estimate},
                  {"slack", kInverseMomentSlack}};
  v.observed_value = estimate * scale;
  v.bound_value = kInverseMomentSlack;
  v.margin = v.bound_value - v.observed_value;
  v.holds = v.observed_value < v.bound_value;
  return v;
}

} // namespace parid
