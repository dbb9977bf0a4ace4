#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "parid/error.hpp"
#include "parid/process.hpp"
#include "support.hpp"

using namespace parid;

namespace {

ParidModel constant_model(std::uint64_t x, double delta = 0.0) {
  ParidConfig config;
  std::vector<double> pmf(x, 0.0);
  pmf[x - 1] = 1.0;
  config.custom_pmf = pmf;
  config.delta = delta;
  return resolve_model(config);
}

// Grows a graph with forced edge counts.
ParidState grow(const ParidModel &model, const std::vector<std::uint64_t> &xs, std::uint64_t seed) {
  Rng rng(seed);
  auto state = init_with(model, xs.front());
  for (std::size_t i = 1; i < xs.size(); ++i)
    step_with(state, xs[i], rng);
  return state;
}

void expect_invariants(const ParidState &s) {
  ASSERT_EQ(s.vertex_count(), s.step_index + 1);
  const auto degree_total = std::accumulate(s.degrees.begin(), s.degrees.end(), std::uint64_t{0});
  ASSERT_EQ(degree_total, 2 * s.lambda);
  const auto x_total =
      std::accumulate(s.initial_degrees.begin(), s.initial_degrees.end(), std::uint64_t{0});
  ASSERT_EQ(x_total - s.initial_degrees.front(), s.lambda);
  for (std::size_t i = 0; i < s.degrees.size(); ++i)
    ASSERT_GE(s.degrees[i], s.initial_degrees[i]);
  ASSERT_EQ(s.weight_index.size(), s.degrees.size());
  std::vector<double> w(s.degrees.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = static_cast<double>(s.degrees[i]) + s.model.delta;
  ASSERT_NEAR(s.weight_index.total(), std::accumulate(w.begin(), w.end(), 0.0),
              1e-9 * s.weight_index.total());
}

} // namespace

TEST(Init, ForcedFirstStep) {
  const auto state = init_with(constant_model(3), 3);
  EXPECT_EQ(state.degrees, (std::vector<std::uint64_t>{3, 3}));
  EXPECT_EQ(state.lambda, 3u);
  EXPECT_EQ(state.step_index, 1u);
}

TEST(Init, SymmetricForAnySeed) {
  ParidConfig config;
  config.alpha = 2.0;
  config.steps = 1000;
  const auto model = resolve_model(config);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto s = init(model, rng);
    EXPECT_EQ(s.degrees[0], s.degrees[1]);
    EXPECT_EQ(s.lambda, s.degrees[0]);
  }
}

TEST(Step, InvariantsHoldAlongRandomRuns) {
  for (double alpha : {1.5, 2.0, 2.5}) {
    for (double delta : {-0.5, 0.0, 3.0}) {
      ParidConfig config;
      config.alpha = alpha;
      config.delta = delta;
      config.steps = 3000;
      const auto model = resolve_model(config);
      Rng rng(static_cast<std::uint64_t>(alpha * 100 + delta * 10 + 7));
      auto state = init(model, rng);
      while (state.step_index < config.steps) {
        step(state, rng);
        if (state.step_index % 97 == 0)
          expect_invariants(state);
      }
      expect_invariants(state);
    }
  }
}

TEST(Step, ConstantOneEdgeAtTwoIsForced) {
  const auto model = constant_model(1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = grow(model, {1, 1}, seed);
    const auto seq = degree_sequence(s, 5);
    EXPECT_EQ(seq.R(1), 2u);
    EXPECT_EQ(seq.R(2), 1u);
    EXPECT_DOUBLE_EQ(seq.r(1), 2.0 / 3.0);
  }
}

TEST(Step, ConstantOneEdgeAtThreeHasMeanTwoAndAHalf) {
  const auto model = constant_model(1);
  const std::uint64_t n = 200'000;
  std::uint64_t three_leaves = 0;
  Rng rng(21);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto s = init_with(model, 1);
    step_with(s, 1, rng);
    step_with(s, 1, rng);
    three_leaves += degree_sequence(s, 4).R(1) == 3;
  }
  // E[R_1(3)] = 3 p + 2 (1 - p) = 2.5 with p = 1/2
  EXPECT_TRUE(parid::testing::within_binomial(three_leaves, n, 0.5, 4.0)) << three_leaves;
}

TEST(Step, BothEdgesOfATwoEdgeVertexUseFrozenProbabilities) {
  // degrees (2, 2): each of the two new edges lands on v0 with probability 1/2
  const auto model = constant_model(2);
  const std::uint64_t n = 1'000'000;
  std::uint64_t both_on_v0 = 0;
  Rng rng(3);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto s = init_with(model, 2);
    step_with(s, 2, rng);
    both_on_v0 += s.degrees[0] == 4;
  }
  EXPECT_TRUE(parid::testing::within_binomial(both_on_v0, n, 0.25, 4.0)) << both_on_v0;
}

TEST(Step, PerEdgeRouteFreezesProbabilities) {
  // 17 vertices, two new edges: the per-edge route applies; repeated hits on v0
  // must occur with probability p0^2, not p0 (d0 + 1) / (2 Lambda + 1)
  const auto model = constant_model(1);
  std::vector<std::uint64_t> xs(16, 1);
  auto s = grow(model, xs, 1234);
  ASSERT_EQ(s.vertex_count(), 17u);
  const double total = 2.0 * static_cast<double>(s.lambda);
  const double p0 = static_cast<double>(s.degrees[0]) / total;
  const std::uint64_t n = 400'000;
  std::uint64_t both = 0;
  Rng rng(8);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto copy = s;
    step_with(copy, 2, rng);
    both += copy.degrees[0] == s.degrees[0] + 2;
  }
  EXPECT_TRUE(parid::testing::within_binomial(both, n, p0 * p0, 4.0))
      << both << " vs " << p0 * p0 * static_cast<double>(n);
}

TEST(Step, MultinomialRouteMatchesAttachmentLaw) {
  // three edges on 17 vertices take the multinomial route
  const auto model = constant_model(1);
  auto s = grow(model, std::vector<std::uint64_t>(16, 1), 77);
  const double total = 2.0 * static_cast<double>(s.lambda);
  std::vector<double> p(s.degrees.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = static_cast<double>(s.degrees[i]) / total;

  const std::uint64_t n = 300'000;
  std::uint64_t all_on_v0 = 0;
  std::vector<std::uint64_t> hits(p.size(), 0);
  Rng rng(15);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto copy = s;
    step_with(copy, 3, rng);
    all_on_v0 += copy.degrees[0] == s.degrees[0] + 3;
    for (std::size_t v = 0; v < p.size(); ++v)
      hits[v] += copy.degrees[v] - s.degrees[v];
    ASSERT_EQ(copy.degrees.back(), 3u);
  }
  EXPECT_TRUE(parid::testing::within_binomial(all_on_v0, n, p[0] * p[0] * p[0], 4.0));
  for (std::size_t v = 0; v < p.size(); ++v) {
    // hits[v] is a sum of n Binomial(3, p_v) draws
    const double mean = 3.0 * static_cast<double>(n) * p[v];
    const double sd = std::sqrt(3.0 * static_cast<double>(n) * p[v] * (1.0 - p[v]));
    EXPECT_NEAR(static_cast<double>(hits[v]), mean, 4.0 * sd) << v;
  }
}

TEST(Step, HugeStepsReachLightVertices) {
  // Lambda near 2^60: a degree-1 vertex has attachment probability near 2^-61,
  // below the resolution of 1 - p in double precision
  const auto model = constant_model(1);
  auto base = init_with(model, std::uint64_t{1} << 60);
  Rng rng(6);
  step_with(base, 1, rng);
  const std::size_t light = base.degrees[0] == 1 ? 0 : base.degrees[1] == 1 ? 1 : 2;
  ASSERT_EQ(base.degrees[light], 1u);
  const double x = static_cast<double>(std::uint64_t{1} << 59);
  const double p = 1.0 / (2.0 * static_cast<double>(base.lambda));
  const std::uint64_t n = 40'000;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto copy = base;
    step_with(copy, std::uint64_t{1} << 59, rng);
    hits += copy.degrees[light] - 1;
    ASSERT_EQ(copy.lambda, base.lambda + (std::uint64_t{1} << 59));
  }
  // Poisson(x p) per trial, mean about 1/4
  const double mean = static_cast<double>(n) * x * p;
  EXPECT_NEAR(static_cast<double>(hits), mean, 4.0 * std::sqrt(mean));
}

TEST(Step, NegativeDeltaShiftsAttachment) {
  // degrees (2,1,1), delta = -1/2: weights 1.5, 0.5, 0.5 over 2 Lambda + tau delta = 2.5
  const auto model = constant_model(1, -0.5);
  const std::uint64_t n = 200'000;
  std::uint64_t hub = 0;
  Rng rng(4);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto s = init_with(model, 1);
    step_with(s, 1, rng);
    step_with(s, 1, rng);
    hub += *std::max_element(s.degrees.begin(), s.degrees.end()) == 3;
  }
  // first step: the degree-1 vertices have weight 0.5 each, so v0 or v1 ends at degree 2
  EXPECT_TRUE(parid::testing::within_binomial(hub, n, 0.6, 4.0)) << hub;
}

TEST(Step, EdgeCounterOverflowReportsStep) {
  const auto model = constant_model(1);
  EXPECT_THROW(init_with(model, kMaxLambda + 1), EdgeOverflowError);
  auto s = init_with(model, 1);
  Rng rng(1);
  step_with(s, 1, rng);
  try {
    step_with(s, kMaxLambda, rng);
    FAIL() << "expected overflow";
  } catch (const EdgeOverflowError &e) {
    EXPECT_EQ(e.tau(), 3u);
  }
}

TEST(Step, RebuildKeepsTheIndexExact) {
  ParidConfig config;
  config.alpha = 2.0;
  config.steps = 400'000;
  config.delta = 0.25;
  const auto model = resolve_model(config);
  Rng rng(2);
  auto s = init(model, rng);
  while (s.step_index < config.steps)
    step(s, rng);
  expect_invariants(s);
}

TEST(DegreeSequence, Examples) {
  const auto model = constant_model(3);
  const auto s = init_with(model, 3);
  const auto seq = degree_sequence(s, 5);
  EXPECT_EQ(seq.R(3), 2u);
  EXPECT_EQ(seq.Q(2), 0u);
  EXPECT_EQ(seq.Q(3), 2u);
  EXPECT_EQ(seq.degree_sum(), 6u);

  ParidState custom;
  custom.step_index = 3;
  custom.degrees = {2, 2, 1, 1};
  const auto seq2 = degree_sequence(custom, 3);
  EXPECT_DOUBLE_EQ(seq2.r(1), 0.5);
  EXPECT_DOUBLE_EQ(seq2.r(2), 0.5);
  EXPECT_EQ(seq2.Q(1), 2u);
  EXPECT_EQ(seq2.Q(2), 4u);
}

TEST(DegreeSequence, OverflowBucket) {
  ParidState s;
  s.step_index = 4;
  s.degrees = {1, 2, 7, 9, 2};
  const auto seq = degree_sequence(s, 3);
  EXPECT_EQ(seq.overflow, 2u);
  EXPECT_EQ(seq.overflow_degree_sum, 16u);
  EXPECT_EQ(seq.degree_sum(), 21u);
  EXPECT_EQ(seq.Q(3), 3u);
  EXPECT_EQ(seq.Q(100), 5u);
}

TEST(Run, DeterministicInSeed) {
  ParidConfig config;
  config.alpha = 2.0;
  config.steps = 20'000;
  config.seed = 42;
  config.checkpoints = {100, 1000, 20'000};
  config.edge_trace_stride = 500;
  const auto a = run(config);
  const auto b = run(config);
  EXPECT_EQ(a.final_sequence.counts, b.final_sequence.counts);
  EXPECT_EQ(a.edge_trace, b.edge_trace);
  ASSERT_EQ(a.checkpoint_sequences.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(a.checkpoint_sequences[i].counts, b.checkpoint_sequences[i].counts);

  config.seed = 43;
  const auto c = run(config);
  EXPECT_NE(a.edge_trace, c.edge_trace);
}

TEST(Run, TraceHoldsCheckpointsStrideAndFinalStep) {
  ParidConfig config;
  config.alpha = 2.0;
  config.steps = 1050;
  config.checkpoints = {1, 7, 1050};
  config.edge_trace_stride = 250;
  const auto r = run(config);
  std::vector<std::uint64_t> taus;
  for (const auto &p : r.edge_trace)
    taus.push_back(p.tau);
  EXPECT_EQ(taus, (std::vector<std::uint64_t>{1, 7, 250, 500, 750, 1000, 1050}));
  ASSERT_EQ(r.checkpoint_sequences.size(), 3u);
  EXPECT_EQ(r.checkpoint_sequences[0].t, 1u);
  EXPECT_EQ(r.checkpoint_sequences[0].R(r.edge_trace[0].lambda), 2u);
  EXPECT_EQ(r.final_sequence.t, 1050u);
  EXPECT_TRUE(std::is_sorted(r.edge_trace.begin(), r.edge_trace.end(),
                             [](auto x, auto y) { return x.lambda < y.lambda; }));
  ASSERT_TRUE(r.cap.has_value());
  EXPECT_EQ(*r.cap, truncation_point(2.0, 1050.0));
}

TEST(ResolveModel, Validation) {
  ParidConfig config;
  config.steps = 10;
  config.alpha = 0.9;
  EXPECT_THROW(resolve_model(config), DomainError);
  config.alpha = 2.0;
  config.delta = -1.0;
  EXPECT_THROW(resolve_model(config), DomainError);
  config.delta = -0.99;
  EXPECT_NO_THROW(resolve_model(config));
  config.delta = 0.0;
  config.steps = 0;
  EXPECT_THROW(resolve_model(config), DomainError);
  config.steps = 10;
  config.checkpoints = {11};
  EXPECT_THROW(resolve_model(config), DomainError);
  config.checkpoints = {5, 3};
  EXPECT_THROW(resolve_model(config), DomainError);
  config.checkpoints = {};
  config.custom_pmf = std::vector<double>{0.5, 0.4};
  EXPECT_THROW(resolve_model(config), DomainError);
  config.custom_pmf = std::vector<double>{0.0, 1.0};
  config.delta = -1.5;
  EXPECT_NO_THROW(resolve_model(config)); // minimum support 2
}

TEST(ResolveModel, TruncationModes) {
  ParidConfig config;
  config.steps = 10'000;
  config.alpha = 2.0;
  EXPECT_EQ(resolve_model(config).cap, truncation_point(2.0, 1e4));
  config.alpha = 1.5;
  EXPECT_EQ(resolve_model(config).cap, truncation_point(1.5, 1e4));
  config.alpha = 2.5;
  EXPECT_FALSE(resolve_model(config).cap.has_value());
  config.truncation = Truncation::explicit_at(5);
  EXPECT_EQ(resolve_model(config).cap, 5u);
  config.truncation = {Truncation::Kind::paper_alpha_eq2, 0};
  EXPECT_THROW(resolve_model(config), DomainError);
}

TEST(ResolveModel, EndpointGuard) {
  ParidConfig config;
  config.alpha = 1.5;
  config.truncation = Truncation::none();
  config.steps = 2000; // about 2.7e7 expected endpoints
  EXPECT_NO_THROW(resolve_model(config));
  config.steps = 10'000;
  EXPECT_THROW(resolve_model(config), ResourceGuardError);
  config.endpoint_budget = 1e12;
  EXPECT_NO_THROW(resolve_model(config));
}

TEST(InitialDegreeLaw, FiniteSampling) {
  const auto law = InitialDegreeLaw::finite({0.0, 0.25, 0.75});
  EXPECT_EQ(law.min_support(), 2u);
  EXPECT_EQ(law.sample(0.0), 2u);
  EXPECT_EQ(law.sample(0.25), 2u);
  EXPECT_EQ(law.sample(0.2500001), 3u);
  EXPECT_EQ(law.sample(1.0), 3u);
  ASSERT_TRUE(law.finite_pmf(3).has_value());
  EXPECT_FALSE(law.finite_pmf(2).has_value());
  EXPECT_THROW(InitialDegreeLaw::finite({0.5, -0.1, 0.6}), DomainError);
}
