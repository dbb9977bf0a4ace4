#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parid/process.hpp"
#include "parid/theory.hpp"

namespace parid {

/// std_ratio below `concentrating` reads as concentration, above `non_concentrating`
/// as its absence; in between is inconclusive.
struct DichotomyThresholds {
  double concentrating = 0.5;
  double non_concentrating = 0.7;
};

struct EnsembleConfig {
  ParidConfig base; // seed and checkpoints are replaced per replica
  std::uint64_t replicas = 1;
  std::uint64_t master_seed = 0;
  unsigned parallelism = 1;
  std::vector<std::uint64_t> tracked_k = {1, 2, 3};
  std::vector<std::uint64_t> checkpoints;
  DichotomyThresholds thresholds;
};

struct CheckpointRecord {
  std::uint64_t tau = 0;
  std::uint64_t lambda = 0;
  std::vector<double> r; // r_k(tau) for each tracked k
};

struct ReplicaRecord {
  std::uint64_t replica = 0;
  std::uint64_t seed = 0;
  std::vector<CheckpointRecord> checkpoints;
  std::vector<EdgeTracePoint> edge_trace;
};

struct SampleStats {
  double mean = 0.0;
  double std = 0.0; // unbiased; 0 for a single replica
  double min = 0.0;
  double q5 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};

/// Linear-interpolation quantiles (R type 7) and unbiased standard deviation.
SampleStats describe(std::vector<double> values);

struct RkStats {
  std::uint64_t tau = 0;
  std::uint64_t k = 0;
  SampleStats stats;
};

struct EdgeRatioStats {
  std::uint64_t tau = 0;
  double mean = 0.0; // of L(tau) / tau
  double std = 0.0;
};

struct EnsembleSummary {
  std::uint64_t replicas = 0;
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::uint64_t> tracked_k;
  std::vector<RkStats> rk;           // checkpoint-major, tracked_k order within
  std::vector<EdgeRatioStats> edges; // one per checkpoint

  const SampleStats &at(std::uint64_t tau, std::uint64_t k) const;
};

struct EnsembleResult {
  EnsembleSummary summary;
  std::vector<ReplicaRecord> records; // ordered by replica index
  std::optional<std::uint64_t> cap;
};

/// Raised when replicas fail; carries which replicas completed.
class EnsembleFailure : public std::runtime_error {
public:
  EnsembleFailure(std::vector<std::uint64_t> completed,
                  std::vector<std::pair<std::uint64_t, std::string>> failures);

  const std::vector<std::uint64_t> &completed() const { return completed_; }
  const std::vector<std::pair<std::uint64_t, std::string>> &failures() const { return failures_; }

private:
  std::vector<std::uint64_t> completed_;
  std::vector<std::pair<std::uint64_t, std::string>> failures_;
};

/// Replica i runs with seed derive_seed(master_seed, i); the result does not
/// depend on `parallelism`.
EnsembleResult run_ensemble(const EnsembleConfig &config);

EnsembleSummary summarize(const std::vector<ReplicaRecord> &records,
                          const std::vector<std::uint64_t> &checkpoints,
                          const std::vector<std::uint64_t> &tracked_k);

enum class Dichotomy { concentrating, non_concentrating, inconclusive, degenerate };

std::string to_string(Dichotomy d);

struct ConcentrationEntry {
  std::uint64_t k = 0;
  double std_early = 0.0;
  double std_late = 0.0;
  std::optional<double> std_ratio; // empty when std_early == 0
  Dichotomy verdict = Dichotomy::degenerate;
};

struct ConcentrationReport {
  std::uint64_t tau_early = 0;
  std::uint64_t tau_late = 0;
  DichotomyThresholds thresholds;
  std::vector<ConcentrationEntry> entries;
};

/// std_ratio(k) = std(r_k(tau_late)) / std(r_k(tau_early)).
ConcentrationReport concentration_diagnostic(const EnsembleSummary &summary,
                                             std::uint64_t tau_early, std::uint64_t tau_late,
                                             const DichotomyThresholds &thresholds = {});

struct EdgeTraceReport {
  std::uint64_t t = 0;
  double beta_truncated = 0.0;
  double mean_z = 0.0;             // exact E[Z], so E[L(tau)] = tau E[Z]
  double deviation_limit = 0.0;    // t (ln t)^(2/3)
  std::vector<std::pair<std::uint64_t, double>> ratios; // tau, mean L(tau) / (tau beta'' ln t)
  double fraction_within = 0.0;    // replicas with max |L - E[L]| <= deviation_limit
  BoundVerdict verdict;
};

/// Ratio band |ratio - 1| < 0.25 on ensemble means at every checkpoint tau >= t / ln ln t
/// and at tau = t, and the fraction of replicas whose traced L(tau) never leaves
/// E[L(tau)] +- t (ln t)^(2/3) must be at least 0.95. Needs alpha = 2 with the law
/// truncated at ceil(t ln ln t); the run must end at t.
EdgeTraceReport edge_trace_check(const EnsembleResult &result, double alpha, std::uint64_t t);

inline constexpr double kEdgeRatioBand = 0.25;
inline constexpr double kEdgeEventFraction = 0.95;

} // namespace parid
