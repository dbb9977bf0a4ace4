#include "parid/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <boost/random/binomial_distribution.hpp>

#include "parid/error.hpp"

namespace parid {

namespace {

// Rebuild the Fenwick tree from exact weights after this many updates.
constexpr std::uint64_t kRebuildInterval = std::uint64_t{1} << 20;

// A step whose edge count reaches this fraction of the vertex count is drawn as
// one multinomial over all vertices instead of edge by edge.
constexpr std::uint64_t kMultinomialRatio = 8;

std::vector<double> weights_of(const ParidState &state) {
  std::vector<double> w(state.degrees.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = static_cast<double>(state.degrees[i]) + state.model.delta;
  return w;
}

// Binomial(n, w / (w + rest)) for n up to 2^62, with the success and failure
// masses passed separately so neither probability loses precision near 1.
// Small means use inversion from P(0) = exp(n log1p(-p)); larger means use BTRD.
long long binomial(Rng &rng, long long n, double w, double rest) {
  if (n <= 0 || !(w > 0.0))
    return 0;
  if (!(rest > 0.0))
    return n;
  if (w > rest)
    return n - binomial(rng, n, rest, w);
  const double p = w / (w + rest);
  const double nn = static_cast<double>(n);
  if (nn * p < 16.0) {
    const double odds = w / rest;
    double pk = std::exp(nn * std::log1p(-p));
    double u = uniform01(rng);
    long long k = 0;
    while (u >= pk && k < n && pk > 0.0) {
      u -= pk;
      pk *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
      ++k;
    }
    return k;
  }
  return boost::random::binomial_distribution<long long, double>(n, p)(rng);
}

void check_lambda(std::uint64_t lambda, std::uint64_t x, std::uint64_t tau) {
  if (x > kMaxLambda || lambda > kMaxLambda - x)
    throw EdgeOverflowError(tau, "edge counter overflow at step " + std::to_string(tau) +
                                     ": 2*Lambda would exceed 2^63-1");
}

} // namespace

InitialDegreeLaw InitialDegreeLaw::power_law(const PowerLawSpec &spec) {
  return InitialDegreeLaw(PowerLawSampler(spec));
}

InitialDegreeLaw InitialDegreeLaw::finite(std::vector<double> pmf) {
  if (pmf.empty())
    throw DomainError("finite pmf is empty");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0))
      throw DomainError("finite pmf has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError("finite pmf sums to " + std::to_string(total) + ", not 1");
  while (pmf.back() == 0.0)
    pmf.pop_back();
  Finite f{std::move(pmf), {}};
  f.cdf.resize(f.pmf.size());
  std::partial_sum(f.pmf.begin(), f.pmf.end(), f.cdf.begin());
  f.cdf.back() = 1.0;
  return InitialDegreeLaw(std::move(f));
}

std::uint64_t InitialDegreeLaw::sample(double u) const {
  if (const auto *s = std::get_if<PowerLawSampler>(&law_))
    return (*s)(u);
  const auto &f = std::get<Finite>(law_);
  // first index with cdf >= u, skipping zero-mass values at u = 0
  auto it = std::lower_bound(f.cdf.begin(), f.cdf.end(), u);
  while (f.pmf[static_cast<std::size_t>(it - f.cdf.begin())] == 0.0)
    ++it;
  return static_cast<std::uint64_t>(it - f.cdf.begin()) + 1;
}

std::uint64_t InitialDegreeLaw::min_support() const {
  if (std::holds_alternative<PowerLawSampler>(law_))
    return 1;
  const auto &pmf = std::get<Finite>(law_).pmf;
  const auto it = std::find_if(pmf.begin(), pmf.end(), [](double p) { return p > 0.0; });
  return static_cast<std::uint64_t>(it - pmf.begin()) + 1;
}

std::optional<std::vector<double>> InitialDegreeLaw::finite_pmf(std::uint64_t max_support) const {
  if (const auto *f = std::get_if<Finite>(&law_)) {
    if (f->pmf.size() <= max_support)
      return f->pmf;
    return std::nullopt;
  }
  const auto &spec = std::get<PowerLawSampler>(law_).spec();
  if (!spec.cap || *spec.cap > max_support)
    return std::nullopt;
  std::vector<double> pmf(*spec.cap);
  for (std::uint64_t i = 1; i <= *spec.cap; ++i)
    pmf[i - 1] = spec.pmf(i);
  return pmf;
}

ParidModel resolve_model(const ParidConfig &config) {
  if (config.steps == 0)
    throw DomainError("steps must be positive");
  if (config.steps >= (std::uint64_t{1} << 32))
    throw DomainError("steps must be below 2^32");
  if (!std::is_sorted(config.checkpoints.begin(), config.checkpoints.end()))
    throw DomainError("checkpoints must be sorted");
  for (auto c : config.checkpoints)
    if (c < 1 || c > config.steps)
      throw DomainError("checkpoint " + std::to_string(c) + " outside [1, steps]");
  if (config.k_max_tracked == 0)
    throw DomainError("k_max_tracked must be positive");

  ParidModel model;
  model.delta = config.delta;
  if (config.custom_pmf) {
    model.law = std::make_shared<InitialDegreeLaw>(InitialDegreeLaw::finite(*config.custom_pmf));
  } else {
    if (!(config.alpha > 1.0))
      throw DomainError("alpha must exceed 1 (alpha = " + std::to_string(config.alpha) + ")");
    auto kind = config.truncation.kind;
    if (kind == Truncation::Kind::automatic) {
      if (config.alpha < 2.0)
        kind = Truncation::Kind::paper_alpha_lt2;
      else if (config.alpha == 2.0)
        kind = Truncation::Kind::paper_alpha_eq2;
      else
        kind = Truncation::Kind::none;
    }
    const auto t = static_cast<double>(config.steps);
    switch (kind) {
    case Truncation::Kind::none:
      if (config.alpha < 2.0) {
        const double endpoints = paper_constants(config.alpha, t).C_inf *
                                 std::pow(t, 1.0 / (config.alpha - 1.0));
        if (endpoints > config.endpoint_budget)
          throw ResourceGuardError("expected endpoint count " + std::to_string(endpoints) +
                                   " exceeds the budget " +
                                   std::to_string(config.endpoint_budget));
      }
      break;
    case Truncation::Kind::paper_alpha_lt2:
      if (!(config.alpha < 2.0))
        throw DomainError("alpha < 2 truncation requested with alpha >= 2");
      model.cap = truncation_point(config.alpha, t);
      break;
    case Truncation::Kind::paper_alpha_eq2:
      if (config.alpha != 2.0)
        throw DomainError("alpha = 2 truncation requested with alpha != 2");
      model.cap = truncation_point(config.alpha, t);
      break;
    case Truncation::Kind::explicit_cap:
      if (config.truncation.cap == 0)
        throw DomainError("explicit truncation cap must be positive");
      model.cap = config.truncation.cap;
      break;
    case Truncation::Kind::automatic:
      break;
    }
    const auto spec = model.cap ? PowerLawSpec::truncated(config.alpha, *model.cap)
                                : PowerLawSpec::untruncated(config.alpha);
    model.law = std::make_shared<InitialDegreeLaw>(InitialDegreeLaw::power_law(spec));
  }
  if (!(config.delta + static_cast<double>(model.law->min_support()) > 0.0))
    throw DomainError("delta + minimum initial degree must be positive");
  return model;
}

ParidState init_with(const ParidModel &model, std::uint64_t x1) {
  check_lambda(0, x1, 1);
  ParidState state;
  state.model = model;
  state.step_index = 1;
  state.degrees = {x1, x1};
  state.lambda = x1;
  state.initial_degrees = {x1, x1};
  state.weight_index.rebuild(weights_of(state));
  return state;
}

ParidState init(const ParidModel &model, Rng &rng) {
  return init_with(model, model.law->sample(rng));
}

void step(ParidState &state, Rng &rng) {
  const std::uint64_t x = state.model.law->sample(rng);
  step_with(state, x, rng);
}

void step_with(ParidState &state, std::uint64_t x, Rng &rng) {
  const std::uint64_t tau = state.step_index + 1;
  check_lambda(state.lambda, x, tau);
  const std::uint64_t existing = state.degrees.size();
  const double delta = state.model.delta;
  auto &index = state.weight_index;

  if (x >= existing / kMultinomialRatio + 1) {
    // One multinomial draw over all existing vertices via conditional binomials.
    // The mass of the vertices after i is kept as an exact degree count plus a delta term.
    std::uint64_t degrees_after = 2 * state.lambda;
    auto remaining = static_cast<long long>(x);
    for (std::uint64_t i = 0; i < existing && remaining > 0; ++i) {
      const std::uint64_t d = state.degrees[i];
      degrees_after -= d;
      long long hits = remaining;
      if (i + 1 < existing) {
        const double rest = static_cast<double>(degrees_after) +
                            static_cast<double>(existing - 1 - i) * delta;
        hits = binomial(rng, remaining, static_cast<double>(d) + delta, rest);
      }
      remaining -= hits;
      if (hits > 0) {
        state.degrees[i] += static_cast<std::uint64_t>(hits);
        index.add(i, static_cast<double>(hits));
      }
    }
  } else {
    const double total = index.total();
    state.pending.clear();
    for (std::uint64_t e = 0; e < x; ++e)
      state.pending.push_back(static_cast<std::uint32_t>(index.select(uniform01(rng) * total)));
    for (auto target : state.pending) {
      ++state.degrees[target];
      index.add(target, 1.0);
    }
  }

  state.degrees.push_back(x);
  state.initial_degrees.push_back(x);
  state.lambda += x;
  state.step_index = tau;
  if (index.updates_since_rebuild() >= kRebuildInterval)
    index.rebuild(weights_of(state));
  else
    index.push_back(static_cast<double>(x) + delta);
}

std::uint64_t DegreeSequence::Q(std::uint64_t k) const {
  if (k == 0)
    return 0;
  if (k > k_max)
    return vertices();
  return cumulative[k - 1];
}

std::uint64_t DegreeSequence::degree_sum() const {
  std::uint64_t sum = overflow_degree_sum;
  for (std::uint64_t k = 1; k <= k_max; ++k)
    sum += k * counts[k - 1];
  return sum;
}

DegreeSequence degree_sequence(const ParidState &state, std::uint64_t k_max) {
  DegreeSequence seq;
  seq.t = state.step_index;
  seq.k_max = k_max;
  seq.counts.assign(k_max, 0);
  for (auto d : state.degrees) {
    if (d >= 1 && d <= k_max) {
      ++seq.counts[d - 1];
    } else {
      ++seq.overflow;
      seq.overflow_degree_sum += d;
    }
  }
  const auto n = static_cast<double>(seq.vertices());
  seq.proportions.resize(k_max);
  seq.cumulative.resize(k_max);
  std::uint64_t running = 0;
  for (std::uint64_t k = 0; k < k_max; ++k) {
    seq.proportions[k] = static_cast<double>(seq.counts[k]) / n;
    running += seq.counts[k];
    seq.cumulative[k] = running;
  }
  return seq;
}

RunResult run(const ParidConfig &config) { return run(config, resolve_model(config)); }

RunResult run(const ParidConfig &config, const ParidModel &model) {
  RunResult result;
  result.cap = model.cap;
  Rng rng(config.seed);
  auto state = init(model, rng);

  auto next_checkpoint = config.checkpoints.begin();
  const auto record = [&] {
    const std::uint64_t tau = state.step_index;
    bool at_checkpoint = false;
    while (next_checkpoint != config.checkpoints.end() && *next_checkpoint == tau) {
      at_checkpoint = true;
      ++next_checkpoint;
    }
    if (at_checkpoint)
      result.checkpoint_sequences.push_back(degree_sequence(state, config.k_max_tracked));
    const bool strided = config.edge_trace_stride > 0 && tau % config.edge_trace_stride == 0;
    if (at_checkpoint || strided || tau == config.steps)
      result.edge_trace.push_back({tau, state.lambda});
  };

  record();
  while (state.step_index < config.steps) {
    step(state, rng);
    record();
  }
  result.final_sequence = degree_sequence(state, config.k_max_tracked);
  return result;
}

} // namespace parid
