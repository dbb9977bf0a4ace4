#include "parid/io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

namespace parid::io {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_degree_sequence_csv(std::ostream &out, const DegreeSequence &seq) {
  out << "k,R_k,r_k,Q_k\n";
  for (std::uint64_t k = 1; k <= seq.k_max; ++k)
    out << k << ',' << seq.R(k) << ',' << format_real(seq.r(k)) << ',' << seq.Q(k) << '\n';
  const double overflow_share =
      static_cast<double>(seq.overflow) / static_cast<double>(seq.vertices());
  out << "-1," << seq.overflow << ',' << format_real(overflow_share) << ',' << seq.vertices()
      << '\n';
}

void write_edge_trace_csv(std::ostream &out, const std::vector<EdgeTracePoint> &trace) {
  out << "tau,L_tau\n";
  for (const auto &p : trace)
    out << p.tau << ',' << p.lambda << '\n';
}

void write_theory_table_csv(std::ostream &out, const TheoryTable &table) {
  out << "k,b_k,b_k_prime,residual\n";
  for (std::uint64_t k = table.k_first; k <= table.k_last; ++k) {
    const std::size_t i = k - table.k_first;
    out << k << ',' << format_real(table.b[i]) << ',';
    if (table.t)
      out << format_real(table.b_prime[i]) << ',' << format_real(table.residual[i]);
    else
      out << ',';
    out << '\n';
  }
}

void write_summary_csv(std::ostream &out, const EnsembleSummary &summary) {
  out << "tau,k,mean,std,min,q5,median,q95,max\n";
  for (const auto &e : summary.rk) {
    const auto &s = e.stats;
    out << e.tau << ',' << e.k << ',' << format_real(s.mean) << ',' << format_real(s.std) << ','
        << format_real(s.min) << ',' << format_real(s.q5) << ',' << format_real(s.median) << ','
        << format_real(s.q95) << ',' << format_real(s.max) << '\n';
  }
}

nlohmann::ordered_json to_json(const BoundVerdict &verdict) {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto &[key, value] : verdict.parameters)
    params[key] = value;
  return {{"lemma_id", to_string(verdict.lemma)},
          {"parameters", params},
          {"bound_value", verdict.bound_value},
          {"observed_value", verdict.observed_value},
          {"margin", verdict.margin},
          {"holds", verdict.holds}};
}

nlohmann::ordered_json to_json(const ConcentrationReport &report) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto &e : report.entries) {
    entries.push_back({{"k", e.k},
                       {"std_early", e.std_early},
                       {"std_late", e.std_late},
                       {"std_ratio", e.std_ratio ? nlohmann::ordered_json(*e.std_ratio)
                                                 : nlohmann::ordered_json(nullptr)},
                       {"verdict", to_string(e.verdict)}});
  }
  return {{"tau_early", report.tau_early},
          {"tau_late", report.tau_late},
          {"theta_conc", report.thresholds.concentrating},
          {"theta_nonc", report.thresholds.non_concentrating},
          {"entries", entries}};
}

nlohmann::ordered_json to_json(const EdgeTraceReport &report) {
  nlohmann::ordered_json ratios = nlohmann::ordered_json::array();
  for (const auto &[tau, ratio] : report.ratios)
    ratios.push_back({{"tau", tau}, {"ratio", ratio}});
  return {{"t", report.t},
          {"beta_truncated", report.beta_truncated},
          {"mean_z", report.mean_z},
          {"deviation_limit", report.deviation_limit},
          {"fraction_within", report.fraction_within},
          {"ratios", ratios},
          {"verdict", to_json(report.verdict)}};
}

nlohmann::ordered_json to_json(const PaperConstants &k) {
  return {{"alpha", k.alpha}, {"beta", k.beta}, {"c", k.c},
          {"t", k.t},         {"C_t", k.C_of_t}, {"C_inf", k.C_inf}};
}

void write_raw_jsonl(std::ostream &out, const EnsembleResult &result) {
  const auto &tracked = result.summary.tracked_k;
  for (const auto &rec : result.records) {
    for (const auto &cp : rec.checkpoints) {
      for (std::size_t j = 0; j < tracked.size(); ++j) {
        nlohmann::ordered_json line = {
            {"replica", rec.replica}, {"tau", cp.tau}, {"k", tracked[j]}, {"r_k", cp.r[j]}};
        out << line.dump() << '\n';
      }
    }
    for (const auto &p : rec.edge_trace) {
      nlohmann::ordered_json line = {{"replica", rec.replica}, {"tau", p.tau}, {"L", p.lambda}};
      out << line.dump() << '\n';
    }
  }
}

RawRecords read_raw_jsonl(std::istream &in) {
  std::map<std::uint64_t, std::map<std::uint64_t, std::map<std::uint64_t, double>>> rk;
  std::map<std::uint64_t, std::vector<EdgeTracePoint>> traces;
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("replica"))
      continue;
    const auto replica = j.at("replica").get<std::uint64_t>();
    const auto tau = j.at("tau").get<std::uint64_t>();
    if (j.contains("r_k"))
      rk[replica][tau][j.at("k").get<std::uint64_t>()] = j.at("r_k").get<double>();
    else
      traces[replica].push_back({tau, j.at("L").get<std::uint64_t>()});
  }

  RawRecords raw;
  if (!rk.empty()) {
    for (const auto &[tau, ks] : rk.begin()->second)
      raw.checkpoints.push_back(tau);
    for (const auto &[k, r] : rk.begin()->second.begin()->second)
      raw.tracked_k.push_back(k);
  }
  for (const auto &[replica, by_tau] : rk) {
    ReplicaRecord rec;
    rec.replica = replica;
    rec.edge_trace = traces[replica];
    for (const auto &[tau, ks] : by_tau) {
      CheckpointRecord cp;
      cp.tau = tau;
      const auto &trace = rec.edge_trace;
      const auto it = std::find_if(trace.begin(), trace.end(),
                                   [&](const EdgeTracePoint &p) { return p.tau == tau; });
      cp.lambda = it == trace.end() ? 0 : it->lambda;
      for (const auto &[k, r] : ks)
        cp.r.push_back(r);
      rec.checkpoints.push_back(std::move(cp));
    }
    raw.records.push_back(std::move(rec));
  }
  return raw;
}

} // namespace parid::io
