#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "parid/ensemble.hpp"
#include "parid/process.hpp"
#include "parid/theory.hpp"

namespace parid::io {

/// 17 significant digits, '.' decimal point.
std::string format_real(double value);

/// `k,R_k,r_k,Q_k`; the overflow bucket is the row with k = -1.
void write_degree_sequence_csv(std::ostream &out, const DegreeSequence &seq);
/// `tau,L_tau`
void write_edge_trace_csv(std::ostream &out, const std::vector<EdgeTracePoint> &trace);
/// `k,b_k,b_k_prime,residual`; the last two columns are empty without t.
void write_theory_table_csv(std::ostream &out, const TheoryTable &table);
/// `tau,k,mean,std,min,q5,median,q95,max`
void write_summary_csv(std::ostream &out, const EnsembleSummary &summary);

nlohmann::ordered_json to_json(const BoundVerdict &verdict);
nlohmann::ordered_json to_json(const ConcentrationReport &report);
nlohmann::ordered_json to_json(const EdgeTraceReport &report);
nlohmann::ordered_json to_json(const PaperConstants &constants);

/// One object per line: `replica, tau, k, r_k` for every tracked k at each
/// checkpoint, then `replica, tau, L` for every traced step.
void write_raw_jsonl(std::ostream &out, const EnsembleResult &result);

struct RawRecords {
  std::vector<ReplicaRecord> records;
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::uint64_t> tracked_k;
};

/// Inverse of write_raw_jsonl; lines that do not parse as JSON objects (such
/// as a leading header line with a `tool` key) are skipped.
RawRecords read_raw_jsonl(std::istream &in);

} // namespace parid::io
