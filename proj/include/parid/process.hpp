#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "parid/power_law.hpp"
#include "parid/rng.hpp"
#include "parid/weight_index.hpp"

namespace parid {

/// Law of the number of edges X brought by each new vertex: a power law
/// (optionally truncated) or an explicit finite pmf on {1, ..., m}.
class InitialDegreeLaw {
public:
  static InitialDegreeLaw power_law(const PowerLawSpec &spec);
  /// pmf[i - 1] = P(X = i); must be nonnegative and sum to 1 within 1e-9.
  static InitialDegreeLaw finite(std::vector<double> pmf);

  std::uint64_t sample(double u) const;
  std::uint64_t sample(Rng &rng) const { return sample(uniform01(rng)); }
  std::uint64_t min_support() const;
  /// Finite pmf if the law has bounded support of at most `max_support` points.
  std::optional<std::vector<double>> finite_pmf(std::uint64_t max_support) const;

private:
  struct Finite {
    std::vector<double> pmf;
    std::vector<double> cdf;
  };
  explicit InitialDegreeLaw(std::variant<PowerLawSampler, Finite> law) : law_(std::move(law)) {}

  std::variant<PowerLawSampler, Finite> law_;
};

struct Truncation {
  enum class Kind { none, automatic, paper_alpha_lt2, paper_alpha_eq2, explicit_cap };
  Kind kind = Kind::automatic;
  std::uint64_t cap = 0; // explicit_cap only

  static Truncation none() { return {Kind::none, 0}; }
  static Truncation automatic() { return {Kind::automatic, 0}; }
  static Truncation explicit_at(std::uint64_t cap) { return {Kind::explicit_cap, cap}; }
};

struct ParidConfig {
  double alpha = 2.0;
  double delta = 0.0;
  std::uint64_t steps = 1;
  std::uint64_t seed = 0;
  Truncation truncation;
  std::vector<std::uint64_t> checkpoints; // sorted, within [1, steps]
  std::uint64_t k_max_tracked = 1000;
  /// Record L(tau) every `edge_trace_stride` steps in addition to checkpoints
  /// (0: checkpoints only).
  std::uint64_t edge_trace_stride = 0;
  /// Replaces the power law when set; pmf[i - 1] = P(X = i).
  std::optional<std::vector<double>> custom_pmf;
  /// Untruncated 1 < alpha < 2 runs whose expected endpoint count C_inf t^(1/(alpha-1))
  /// exceeds this budget are refused.
  double endpoint_budget = 1e8;
};

/// Initial-degree law and delta after resolving truncation and validating a config.
struct ParidModel {
  double delta = 0.0;
  std::shared_ptr<const InitialDegreeLaw> law;
  std::optional<std::uint64_t> cap; // resolved power-law truncation cap
};

/// Throws DomainError for invalid parameters, ResourceGuardError when the endpoint budget trips.
ParidModel resolve_model(const ParidConfig &config);

struct ParidState {
  ParidModel model;
  std::uint64_t step_index = 0;
  std::vector<std::uint64_t> degrees;
  std::uint64_t lambda = 0;
  WeightIndex weight_index;
  std::vector<std::uint64_t> initial_degrees;
  std::vector<std::uint32_t> pending; // targets of the step in progress

  std::uint64_t vertex_count() const { return degrees.size(); }
};

/// Largest admissible Lambda: 2 Lambda must stay within 2^63 - 1.
inline constexpr std::uint64_t kMaxLambda = (std::uint64_t{1} << 62) - 1;

/// State after step 1: v0 and v1 joined by X_1 parallel edges.
ParidState init(const ParidModel &model, Rng &rng);
/// Same, with X_1 forced.
ParidState init_with(const ParidModel &model, std::uint64_t x1);

/// Step tau = step_index + 1: new vertex v_tau brings X_tau edges, each
/// attaching independently to v_i with probability (d_i + delta) / (2 Lambda + tau delta)
/// computed from the degrees before the step.
void step(ParidState &state, Rng &rng);
void step_with(ParidState &state, std::uint64_t x, Rng &rng);

struct DegreeSequence {
  std::uint64_t t = 0;
  std::uint64_t k_max = 0;
  std::vector<std::uint64_t> counts; // counts[k - 1] = R_k(t), k = 1..k_max
  std::vector<double> proportions;   // r_k(t) = R_k(t) / (t + 1)
  std::vector<std::uint64_t> cumulative; // Q_k(t)
  std::uint64_t overflow = 0;            // vertices with degree > k_max
  std::uint64_t overflow_degree_sum = 0;

  std::uint64_t vertices() const { return t + 1; }
  std::uint64_t R(std::uint64_t k) const { return k >= 1 && k <= k_max ? counts[k - 1] : 0; }
  double r(std::uint64_t k) const { return k >= 1 && k <= k_max ? proportions[k - 1] : 0.0; }
  std::uint64_t Q(std::uint64_t k) const;
  /// sum_k k R_k(t), including the overflow bucket.
  std::uint64_t degree_sum() const;
};

DegreeSequence degree_sequence(const ParidState &state, std::uint64_t k_max);

struct EdgeTracePoint {
  std::uint64_t tau = 0;
  std::uint64_t lambda = 0;
  bool operator==(const EdgeTracePoint &) const = default;
};

struct RunResult {
  DegreeSequence final_sequence;
  std::vector<DegreeSequence> checkpoint_sequences;
  std::vector<EdgeTracePoint> edge_trace;
  std::optional<std::uint64_t> cap;
};

/// Deterministic in (config, seed).
RunResult run(const ParidConfig &config);
RunResult run(const ParidConfig &config, const ParidModel &model);

} // namespace parid
