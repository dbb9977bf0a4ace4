#include "parid/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "parid/error.hpp"
#include "parid/parallel.hpp"

namespace parid {

namespace {

std::string failure_message(const std::vector<std::pair<std::uint64_t, std::string>> &failures) {
  std::string msg = "ensemble aborted: " + std::to_string(failures.size()) + " replica(s) failed";
  if (!failures.empty())
    msg += " (first: replica " + std::to_string(failures.front().first) + ": " +
           failures.front().second + ")";
  return msg;
}

double quantile_sorted(const std::vector<double> &sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

EnsembleFailure::EnsembleFailure(std::vector<std::uint64_t> completed,
                                 std::vector<std::pair<std::uint64_t, std::string>> failures)
    : std::runtime_error(failure_message(failures)), completed_(std::move(completed)),
      failures_(std::move(failures)) {}

SampleStats describe(std::vector<double> values) {
  SampleStats s;
  if (values.empty())
    return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values)
    sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.front() == values.back()) {
    s.mean = values.front(); // exact for constant samples; std stays 0
  } else {
    double ss = 0.0;
    for (double v : values)
      ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  s.min = values.front();
  s.max = values.back();
  s.q5 = quantile_sorted(values, 0.05);
  s.median = quantile_sorted(values, 0.5);
  s.q95 = quantile_sorted(values, 0.95);
  return s;
}

const SampleStats &EnsembleSummary::at(std::uint64_t tau, std::uint64_t k) const {
  for (const auto &entry : rk)
    if (entry.tau == tau && entry.k == k)
      return entry.stats;
  throw DomainError("no summary for tau = " + std::to_string(tau) + ", k = " + std::to_string(k));
}

EnsembleSummary summarize(const std::vector<ReplicaRecord> &records,
                          const std::vector<std::uint64_t> &checkpoints,
                          const std::vector<std::uint64_t> &tracked_k) {
  EnsembleSummary summary;
  summary.replicas = records.size();
  summary.checkpoints = checkpoints;
  summary.tracked_k = tracked_k;
  std::vector<double> values(records.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (std::size_t j = 0; j < tracked_k.size(); ++j) {
      for (std::size_t i = 0; i < records.size(); ++i)
        values[i] = records[i].checkpoints.at(c).r.at(j);
      summary.rk.push_back({checkpoints[c], tracked_k[j], describe(values)});
    }
    for (std::size_t i = 0; i < records.size(); ++i)
      values[i] = static_cast<double>(records[i].checkpoints.at(c).lambda) /
                  static_cast<double>(checkpoints[c]);
    const auto s = describe(values);
    summary.edges.push_back({checkpoints[c], s.mean, s.std});
  }
  return summary;
}

EnsembleResult run_ensemble(const EnsembleConfig &config) {
  if (config.replicas == 0)
    throw DomainError("ensemble needs at least one replica");
  if (config.tracked_k.empty())
    throw DomainError("ensemble needs at least one tracked k");
  for (auto k : config.tracked_k)
    if (k == 0)
      throw DomainError("tracked k must be positive");

  std::vector<std::uint64_t> tracked = config.tracked_k;
  std::sort(tracked.begin(), tracked.end());
  tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());

  ParidConfig base = config.base;
  base.checkpoints = config.checkpoints;
  std::sort(base.checkpoints.begin(), base.checkpoints.end());
  base.checkpoints.erase(std::unique(base.checkpoints.begin(), base.checkpoints.end()),
                         base.checkpoints.end());
  base.k_max_tracked = tracked.back();
  const ParidModel model = resolve_model(base);

  std::vector<ReplicaRecord> records(config.replicas);
  std::vector<std::optional<std::string>> errors(config.replicas);
  parallel_for(config.replicas, config.parallelism, [&](std::size_t i) {
    try {
      ParidConfig replica = base;
      replica.seed = derive_seed(config.master_seed, i);
      const RunResult run_result = run(replica, model);
      ReplicaRecord &rec = records[i];
      rec.replica = i;
      rec.seed = replica.seed;
      rec.edge_trace = run_result.edge_trace;
      for (const auto &seq : run_result.checkpoint_sequences) {
        CheckpointRecord cp;
        cp.tau = seq.t;
        const auto it = std::find_if(run_result.edge_trace.begin(), run_result.edge_trace.end(),
                                     [&](const EdgeTracePoint &p) { return p.tau == seq.t; });
        cp.lambda = it->lambda;
        for (auto k : tracked)
          cp.r.push_back(seq.r(k));
        rec.checkpoints.push_back(std::move(cp));
      }
    } catch (const std::exception &e) {
      errors[i] = e.what();
    }
  });

  std::vector<std::uint64_t> completed;
  std::vector<std::pair<std::uint64_t, std::string>> failures;
  for (std::uint64_t i = 0; i < config.replicas; ++i) {
    if (errors[i])
      failures.emplace_back(i, *errors[i]);
    else
      completed.push_back(i);
  }
  if (!failures.empty())
    throw EnsembleFailure(std::move(completed), std::move(failures));

  EnsembleResult result;
  result.cap = model.cap;
  result.summary = summarize(records, base.checkpoints, tracked);
  result.records = std::move(records);
  return result;
}

std::string to_string(Dichotomy d) {
  switch (d) {
  case Dichotomy::concentrating:
    return "concentrating";
  case Dichotomy::non_concentrating:
    return "non-concentrating";
  case Dichotomy::inconclusive:
    return "inconclusive";
  case Dichotomy::degenerate:
    return "degenerate";
  }
  return "unknown";
}

ConcentrationReport concentration_diagnostic(const EnsembleSummary &summary,
                                             std::uint64_t tau_early, std::uint64_t tau_late,
                                             const DichotomyThresholds &thresholds) {
  ConcentrationReport report;
  report.tau_early = tau_early;
  report.tau_late = tau_late;
  report.thresholds = thresholds;
  for (auto k : summary.tracked_k) {
    ConcentrationEntry entry;
    entry.k = k;
    entry.std_early = summary.at(tau_early, k).std;
    entry.std_late = summary.at(tau_late, k).std;
    if (entry.std_early > 0.0) {
      entry.std_ratio = entry.std_late / entry.std_early;
      if (*entry.std_ratio < thresholds.concentrating)
        entry.verdict = Dichotomy::concentrating;
      else if (*entry.std_ratio > thresholds.non_concentrating)
        entry.verdict = Dichotomy::non_concentrating;
      else
        entry.verdict = Dichotomy::inconclusive;
    }
    report.entries.push_back(entry);
  }
  return report;
}

EdgeTraceReport edge_trace_check(const EnsembleResult &result, double alpha, std::uint64_t t) {
  if (alpha != 2.0)
    throw DomainError("edge trace check applies to alpha = 2 only");
  const double tt = static_cast<double>(t);
  const std::uint64_t cap = truncation_point(2.0, tt);
  if (result.cap != cap)
    throw DomainError("edge trace check needs the law truncated at ceil(t ln ln t)");

  EdgeTraceReport report;
  report.t = t;
  const auto spec = PowerLawSpec::truncated(2.0, cap);
  report.beta_truncated = spec.normalizer;
  report.mean_z = truncated_moments(spec).mean;
  report.deviation_limit = tt * std::pow(std::log(tt), 2.0 / 3.0);
  const double t0 = tt / std::log(std::log(tt));
  const double scale = report.beta_truncated * std::log(tt);

  std::uint64_t within = 0;
  for (const auto &rec : result.records) {
    double worst = 0.0;
    for (const auto &p : rec.edge_trace)
      worst = std::max(worst, std::abs(static_cast<double>(p.lambda) -
                                       static_cast<double>(p.tau) * report.mean_z));
    if (worst <= report.deviation_limit)
      ++within;
  }
  report.fraction_within = result.records.empty()
                               ? 0.0
                               : static_cast<double>(within) /
                                     static_cast<double>(result.records.size());

  // ratios at the checkpoints past t / ln ln t, plus the final step
  double worst_ratio_gap = 0.0;
  if (!result.records.empty()) {
    const auto &checkpoints = result.summary.checkpoints;
    const auto n = static_cast<double>(result.records.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      if (static_cast<double>(checkpoints[c]) < t0)
        continue;
      double sum = 0.0;
      for (const auto &rec : result.records)
        sum += static_cast<double>(rec.checkpoints.at(c).lambda);
      const double tau = static_cast<double>(checkpoints[c]);
      report.ratios.emplace_back(checkpoints[c], sum / n / (tau * scale));
    }
    const auto &last = result.records.front().edge_trace;
    if (!last.empty() && last.back().tau == t &&
        (checkpoints.empty() || checkpoints.back() != t)) {
      double sum = 0.0;
      for (const auto &rec : result.records)
        sum += static_cast<double>(rec.edge_trace.back().lambda);
      report.ratios.emplace_back(t, sum / n / (tt * scale));
    }
    for (const auto &[tau, ratio] : report.ratios)
      worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 1.0));
  }

  auto &v = report.verdict;
  v.lemma = LemmaId::edge_conc;
  v.parameters = {{"alpha", alpha},
                  {"t", tt},
                  {"replicas", static_cast<double>(result.records.size())},
                  {"checked_points", static_cast<double>(report.ratios.size())},
                  {"worst_ratio_gap", worst_ratio_gap},
                  {"ratio_band", kEdgeRatioBand},
                  {"deviation_limit", report.deviation_limit}};
  v.bound_value = kEdgeEventFraction;
  v.observed_value = report.fraction_within;
  v.margin = std::min(report.fraction_within - kEdgeEventFraction,
                      kEdgeRatioBand - worst_ratio_gap);
  v.holds = !report.ratios.empty() && worst_ratio_gap < kEdgeRatioBand &&
            report.fraction_within >= kEdgeEventFraction;
  return report;
}

} // namespace parid
