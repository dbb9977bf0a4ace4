// parid: simulate the random-initial-degree preferential attachment process,
// run replica ensembles, tabulate limit laws and check the supporting bounds.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "parid/ensemble.hpp"
#include "parid/error.hpp"
#include "parid/io.hpp"
#include "parid/parallel.hpp"
#include "parid/process.hpp"
#include "parid/theory.hpp"
#include "parid/version.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

enum Exit : int { kOk = 0, kVerdictFailed = 1, kUsage = 2, kResource = 3 };

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    parts.push_back(trim(item));
  return parts;
}

double parse_real(const std::string &text, const std::string &what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw UsageError(what + ": '" + text + "' is not a number");
  return v;
}

// Accepts 100000 as well as 1e5.
std::uint64_t parse_count(const std::string &text, const std::string &what) {
  const double v = parse_real(text, what);
  if (v < 0.0 || v != std::floor(v) || v >= 0x1.0p64)
    throw UsageError(what + ": '" + text + "' is not a nonnegative integer");
  if (text.find_first_not_of("0123456789") == std::string::npos)
    return std::stoull(text);
  return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_counts(const std::string &text, const std::string &what) {
  std::vector<std::uint64_t> out;
  for (const auto &part : split(text, ','))
    if (!part.empty())
      out.push_back(parse_count(part, what));
  return out;
}

std::vector<double> parse_reals(const std::string &text, const std::string &what) {
  std::vector<double> out;
  for (const auto &part : split(text, ','))
    if (!part.empty())
      out.push_back(parse_real(part, what));
  if (out.empty())
    throw UsageError(what + ": empty list");
  return out;
}

// "1:0.7,2:0.3" -> {0.7, 0.3}; validation of the total happens in the library.
std::vector<double> parse_pmf(const std::string &text) {
  std::vector<double> pmf;
  for (const auto &part : split(text, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos)
      throw UsageError("--pmf: expected value:probability, got '" + part + "'");
    const auto value = parse_count(trim(part.substr(0, colon)), "--pmf value");
    const double p = parse_real(trim(part.substr(colon + 1)), "--pmf probability");
    if (value == 0 || value > 1'000'000)
      throw UsageError("--pmf: values must lie in 1..1000000");
    if (pmf.size() < value)
      pmf.resize(value, 0.0);
    if (pmf[value - 1] != 0.0)
      throw UsageError("--pmf: value " + std::to_string(value) + " listed twice");
    pmf[value - 1] = p;
  }
  if (pmf.empty())
    throw UsageError("--pmf: empty");
  return pmf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Every output file opens with one JSON line describing how it was produced.
class Output {
public:
  Output(fs::path dir, std::string command, Json config, Json seeds)
      : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)),
        seeds_(std::move(seeds)) {}

  std::ofstream open(const std::string &name) {
    const fs::path path = dir_ / name;
    std::error_code ec;
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path(), ec);
    if (ec)
      throw UsageError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw UsageError("cannot write " + path.string());
    Json header = {{"tool", "parid"},     {"version", parid::kVersion}, {"command", command_},
                   {"file", name},        {"config", config_},         {"seeds", seeds_},
                   {"timestamp", utc_timestamp()}};
    out << header.dump() << '\n';
    written_.push_back(path.string());
    return out;
  }

  const std::vector<std::string> &written() const { return written_; }

private:
  fs::path dir_;
  std::string command_;
  Json config_;
  Json seeds_;
  std::vector<std::string> written_;
};

void report_written(const Output &out) {
  for (const auto &path : out.written())
    std::cout << "  wrote " << path << '\n';
}

// Flags shared by simulate and ensemble.
struct ModelFlags {
  double alpha = 2.0;
  double delta = 0.0;
  std::string steps;
  std::string truncate = "auto";
  std::string cap;
  std::string pmf;
  bool allow_large = false;
  std::string k_max = "1000";
  std::string trace_stride;

  void add(CLI::App *app, bool with_k_max) {
    app->add_option("--alpha", alpha, "power-law exponent of the initial degrees (> 1)");
    app->add_option("--delta", delta, "additive attachment shift");
    app->add_option("--steps", steps, "number of steps t")->required();
    app->add_option("--truncate", truncate, "auto | paper | none | cap")
        ->check(CLI::IsMember({"auto", "paper", "none", "cap"}));
    app->add_option("--cap", cap, "explicit truncation cap (with --truncate cap)");
    app->add_option("--pmf", pmf, "explicit initial-degree law, e.g. \"1:0.7,2:0.3\"");
    app->add_flag("--allow-large", allow_large, "lift the endpoint budget for untruncated runs");
    if (with_k_max)
      app->add_option("--k-max", k_max, "largest degree reported individually");
    app->add_option("--trace-stride", trace_stride,
                    "record L(tau) every this many steps (default: steps / 1000)");
  }

  parid::ParidConfig config() const {
    parid::ParidConfig c;
    c.alpha = alpha;
    c.delta = delta;
    c.steps = parse_count(steps, "--steps");
    c.k_max_tracked = parse_count(k_max, "--k-max");
    c.edge_trace_stride = trace_stride.empty() ? std::max<std::uint64_t>(1, c.steps / 1000)
                                               : parse_count(trace_stride, "--trace-stride");
    if (truncate == "auto") {
      c.truncation = parid::Truncation::automatic();
    } else if (truncate == "none") {
      c.truncation = parid::Truncation::none();
    } else if (truncate == "paper") {
      if (alpha < 2.0)
        c.truncation = {parid::Truncation::Kind::paper_alpha_lt2, 0};
      else if (alpha == 2.0)
        c.truncation = {parid::Truncation::Kind::paper_alpha_eq2, 0};
      else
        throw UsageError("--truncate paper needs alpha <= 2");
    } else {
      if (cap.empty())
        throw UsageError("--truncate cap needs --cap");
      c.truncation = parid::Truncation::explicit_at(parse_count(cap, "--cap"));
    }
    if (!cap.empty() && truncate != "cap")
      throw UsageError("--cap needs --truncate cap");
    if (!pmf.empty())
      c.custom_pmf = parse_pmf(pmf);
    if (allow_large)
      c.endpoint_budget = std::numeric_limits<double>::infinity();
    return c;
  }
};

Json model_json(const parid::ParidConfig &c, const parid::ParidModel &m, const ModelFlags &f) {
  Json j = {{"alpha", c.custom_pmf ? Json(nullptr) : Json(c.alpha)},
            {"delta", c.delta},
            {"steps", c.steps},
            {"truncate", f.truncate},
            {"cap", m.cap ? Json(*m.cap) : Json(nullptr)},
            {"pmf", c.custom_pmf ? Json(*c.custom_pmf) : Json(nullptr)},
            {"allow_large", f.allow_large},
            {"trace_stride", c.edge_trace_stride}};
  return j;
}

// simulate ------------------------------------------------------------------

struct SimulateFlags {
  ModelFlags model;
  std::uint64_t seed = 0;
  std::string checkpoints;
  std::string out = "parid-out";
};

int run_simulate(const SimulateFlags &f) {
  auto config = f.model.config();
  config.seed = f.seed;
  config.checkpoints = f.checkpoints.empty() ? std::vector<std::uint64_t>{config.steps}
                                             : parse_counts(f.checkpoints, "--checkpoints");
  std::sort(config.checkpoints.begin(), config.checkpoints.end());
  config.checkpoints.erase(std::unique(config.checkpoints.begin(), config.checkpoints.end()),
                           config.checkpoints.end());
  const auto model = parid::resolve_model(config);

  Json cfg = model_json(config, model, f.model);
  cfg["checkpoints"] = config.checkpoints;
  cfg["k_max"] = config.k_max_tracked;
  Output out(f.out, "simulate", cfg, {{"seed", config.seed}});

  std::cout << "simulate: t = " << config.steps << ", seed = " << config.seed;
  if (model.cap)
    std::cout << ", cap = " << *model.cap;
  std::cout << '\n';
  const auto start = std::chrono::steady_clock::now();
  const auto result = parid::run(config, model);
  std::cout << "  L(t) = " << result.edge_trace.back().lambda << " after "
            << seconds_since(start) << " s\n";

  for (const auto &seq : result.checkpoint_sequences) {
    auto file = out.open("degrees_t" + std::to_string(seq.t) + ".csv");
    parid::io::write_degree_sequence_csv(file, seq);
  }
  auto trace = out.open("edge_trace.csv");
  parid::io::write_edge_trace_csv(trace, result.edge_trace);
  report_written(out);
  return kOk;
}

// ensemble ------------------------------------------------------------------

struct EnsembleFlags {
  ModelFlags model;
  std::uint64_t replicas = 0;
  std::uint64_t master_seed = 0;
  unsigned threads = parid::default_threads();
  std::string checkpoints;
  std::string tracked_k = "1,2,3";
  double theta_conc = 0.5;
  double theta_nonc = 0.7;
  std::string out = "parid-out";
};

Json limit_comparison(const parid::EnsembleResult &result, const parid::ParidConfig &config,
                      const parid::ParidModel &model) {
  Json rows = Json::array();
  const auto &summary = result.summary;
  const std::uint64_t t = summary.checkpoints.back();
  const bool paper_alpha2 = !config.custom_pmf && config.alpha == 2.0 && model.cap &&
                            *model.cap == parid::truncation_point(2.0, static_cast<double>(t));
  if (config.delta != 0.0 || (!paper_alpha2 && !config.custom_pmf) || t != config.steps)
    return rows;

  const std::uint64_t k_max = summary.tracked_k.back();
  const auto mf = paper_alpha2 ? parid::mean_field_expectation(t, k_max)
                               : parid::mean_field_expectation(*config.custom_pmf, t, k_max);
  const double n = static_cast<double>(t + 1);
  const double m = static_cast<double>(summary.replicas);
  for (auto k : summary.tracked_k) {
    const auto &s = summary.at(t, k);
    const double expected = mf.expected[k - 1] / n;
    const double se = s.std / std::sqrt(m);
    Json row = {{"tau", t},
                {"k", k},
                {"mean", s.mean},
                {"std_error", se},
                {"mean_field", expected},
                {"z", se > 0.0 ? Json((s.mean - expected) / se) : Json(nullptr)}};
    if (paper_alpha2) {
      row["b_k"] = parid::b_k(k);
      row["b_k_prime"] = parid::b_k_prime(k, static_cast<double>(t));
    }
    rows.push_back(row);
  }
  return rows;
}

int run_ensemble_command(const EnsembleFlags &f) {
  parid::EnsembleConfig config;
  config.base = f.model.config();
  config.replicas = f.replicas;
  config.master_seed = f.master_seed;
  config.parallelism = f.threads;
  config.tracked_k = parse_counts(f.tracked_k, "--tracked-k");
  const std::uint64_t t = config.base.steps;
  config.checkpoints = f.checkpoints.empty()
                           ? std::vector<std::uint64_t>{std::max<std::uint64_t>(1, t / 100), t}
                           : parse_counts(f.checkpoints, "--checkpoints");
  std::sort(config.checkpoints.begin(), config.checkpoints.end());
  config.checkpoints.erase(std::unique(config.checkpoints.begin(), config.checkpoints.end()),
                           config.checkpoints.end());
  config.thresholds = {f.theta_conc, f.theta_nonc};
  if (config.replicas == 0)
    throw UsageError("--replicas must be positive");
  if (config.tracked_k.empty())
    throw UsageError("--tracked-k must name at least one degree");

  auto resolved = config.base;
  resolved.checkpoints = config.checkpoints;
  const auto model = parid::resolve_model(resolved);

  Json cfg = model_json(config.base, model, f.model);
  cfg["replicas"] = config.replicas;
  cfg["checkpoints"] = config.checkpoints;
  cfg["tracked_k"] = config.tracked_k;
  cfg["theta_conc"] = f.theta_conc;
  cfg["theta_nonc"] = f.theta_nonc;
  Json replica_seeds = Json::array();
  for (std::uint64_t i = 0; i < config.replicas; ++i)
    replica_seeds.push_back(parid::derive_seed(config.master_seed, i));
  Json seeds = {{"master_seed", config.master_seed},
                {"derivation", "splitmix64(master_seed + i * 0x9e3779b97f4a7c15)"},
                {"replica_seeds", replica_seeds}};
  Output out(f.out, "ensemble", cfg, seeds);

  std::cout << "ensemble: " << config.replicas << " replicas, t = " << t << ", "
            << config.parallelism << " thread(s)\n";
  const auto start = std::chrono::steady_clock::now();
  parid::EnsembleResult result;
  try {
    result = parid::run_ensemble(config);
  } catch (const parid::EnsembleFailure &e) {
    auto manifest = out.open("failure.json");
    Json failures = Json::array();
    for (const auto &[replica, what] : e.failures())
      failures.push_back({{"replica", replica}, {"error", what}});
    manifest << Json{{"completed", e.completed()}, {"failures", failures}}.dump() << '\n';
    report_written(out);
    throw;
  }
  std::cout << "  finished in " << seconds_since(start) << " s\n";

  {
    auto raw = out.open("raw.jsonl");
    parid::io::write_raw_jsonl(raw, result);
  }
  {
    auto summary = out.open("summary.csv");
    parid::io::write_summary_csv(summary, result.summary);
  }

  Json report = Json::object();
  const auto &cps = result.summary.checkpoints;
  if (cps.size() >= 2) {
    const auto diag =
        parid::concentration_diagnostic(result.summary, cps.front(), cps.back(), config.thresholds);
    report["concentration"] = parid::io::to_json(diag);
    for (const auto &e : diag.entries)
      std::cout << "  k = " << e.k << ": std_ratio = "
                << (e.std_ratio ? parid::io::format_real(*e.std_ratio) : std::string("n/a"))
                << " (" << parid::to_string(e.verdict) << ")\n";
  } else {
    report["concentration"] = nullptr;
  }
  report["limit_comparison"] = limit_comparison(result, config.base, model);
  if (!config.base.custom_pmf && config.base.alpha == 2.0 && model.cap &&
      *model.cap == parid::truncation_point(2.0, static_cast<double>(t)))
    report["edges"] = parid::io::to_json(parid::edge_trace_check(result, 2.0, t));
  Json edges = Json::array();
  for (const auto &e : result.summary.edges)
    edges.push_back({{"tau", e.tau}, {"mean_L_over_tau", e.mean}, {"std_L_over_tau", e.std}});
  report["edge_means"] = edges;
  {
    auto file = out.open("report.json");
    file << report.dump() << '\n';
  }
  report_written(out);
  return kOk;
}

// theory --------------------------------------------------------------------

int run_theory_bk(std::uint64_t k_max, const std::string &dir) {
  if (k_max == 0)
    throw UsageError("--k-max must be positive");
  const auto table = parid::make_theory_table(k_max);
  Output out(dir, "theory bk", {{"k_max", k_max}}, Json::object());
  auto file = out.open("theory_bk.csv");
  parid::io::write_theory_table_csv(file, table);
  for (std::uint64_t k = 1; k <= std::min<std::uint64_t>(k_max, 5); ++k)
    std::cout << "b_" << k << " = " << parid::io::format_real(table.b[k - 1]) << '\n';
  std::cout << "1 - sum b_k = " << parid::io::format_real(table.tail_remainder) << '\n';
  report_written(out);
  return kOk;
}

int run_theory_bkprime(const std::string &t_text, std::uint64_t k_max, const std::string &dir) {
  if (k_max == 0)
    throw UsageError("--k-max must be positive");
  const double t = static_cast<double>(parse_count(t_text, "--t"));
  const auto table = parid::make_theory_table(k_max, t);
  const parid::FiniteLimitLaw law(t);
  Json cfg = {{"t", t}, {"k_max", k_max}, {"cap", law.cap()},
              {"beta_truncated", law.beta_truncated()}};
  Output out(dir, "theory bkprime", cfg, Json::object());
  auto file = out.open("theory_bkprime.csv");
  parid::io::write_theory_table_csv(file, table);
  double worst = 0.0;
  for (double r : table.residual)
    worst = std::max(worst, std::abs(r));
  std::cout << "cap = " << law.cap()
            << ", beta'' = " << parid::io::format_real(law.beta_truncated())
            << ", max |residual| = " << parid::io::format_real(worst)
            << ", sum b'_k = " << parid::io::format_real(law.total()) << '\n';
  report_written(out);
  return kOk;
}

int run_theory_constants(double alpha, const std::string &t_text, const std::string &dir) {
  const double t = parse_real(t_text, "--t");
  const auto k = parid::paper_constants(alpha, t);
  Json j = parid::io::to_json(k);
  try {
    j["cap"] = parid::truncation_point(alpha, t);
  } catch (const parid::DomainError &) {
    j["cap"] = nullptr; // t below the truncation threshold's domain
  }
  Output out(dir, "theory constants", {{"alpha", alpha}, {"t", t}}, Json::object());
  auto file = out.open("constants.json");
  file << j.dump() << '\n';
  std::cout << j.dump(2) << '\n';
  report_written(out);
  return kOk;
}

// verify --------------------------------------------------------------------

struct VerifyFlags {
  std::string alpha = "1.5";
  std::string t = "1000";
  std::string z = "8";
  std::string gamma = "1";
  std::string samples = "100000";
  std::string s;
  std::string ell = "1,2";
  std::string cases = "100000";
  std::string replicas = "50";
  std::string checkpoints;
  std::uint64_t seed = 0;
  unsigned threads = parid::default_threads();
  std::string out = "parid-out";
};

int write_verdicts(const std::string &name, const Json &config, const Json &seeds,
                   const std::vector<parid::BoundVerdict> &verdicts, const std::string &dir,
                   std::size_t skipped) {
  Json cfg = config;
  cfg["skipped_points"] = skipped;
  Output out(dir, "verify " + name, cfg, seeds);
  auto file = out.open("verify_" + name + ".jsonl");
  bool all = !verdicts.empty();
  for (const auto &v : verdicts) {
    file << parid::io::to_json(v).dump() << '\n';
    all = all && v.holds;
    std::cout << "  " << (v.holds ? "holds " : "FAILS ");
    for (const auto &[key, value] : v.parameters)
      std::cout << key << '=' << value << ' ';
    std::cout << "observed=" << v.observed_value << " bound=" << v.bound_value << '\n';
  }
  report_written(out);
  std::cout << name << ": " << verdicts.size() << " verdict(s), "
            << (all ? "all hold" : "violations found") << '\n';
  return all ? kOk : kVerdictFailed;
}

void warn_skip(const std::string &point, const std::exception &e) {
  std::cerr << "warning: skipping " << point << ": " << e.what() << '\n';
}

int run_verify_lemma31(const VerifyFlags &f) {
  const auto alphas = parse_reals(f.alpha, "--alpha");
  const auto ts = parse_counts(f.t, "--t");
  const auto zs = parse_reals(f.z, "--z");
  const auto n = parse_count(f.samples, "--samples");
  std::vector<parid::BoundVerdict> verdicts;
  std::size_t skipped = 0;
  std::uint64_t point = 0;
  for (double alpha : alphas)
    for (auto t : ts) {
      const auto seed = parid::derive_seed(f.seed, point++);
      try {
        auto vs = parid::check_lemma31(alpha, t, zs, n, seed, f.threads);
        verdicts.insert(verdicts.end(), vs.begin(), vs.end());
      } catch (const parid::DomainError &e) {
        warn_skip("alpha=" + std::to_string(alpha) + " t=" + std::to_string(t), e);
        ++skipped;
      }
    }
  return write_verdicts("lemma31",
                        {{"alpha", alphas}, {"t", ts}, {"z", zs}, {"samples", n}},
                        {{"seed", f.seed},
                         {"derivation", "point seed = splitmix64(seed + i * 0x9e3779b97f4a7c15)"}},
                        verdicts, f.out, skipped);
}

int run_verify_lemma32(const VerifyFlags &f) {
  const auto alphas = parse_reals(f.alpha, "--alpha");
  const auto ts = parse_reals(f.t, "--t");
  const auto gammas = parse_reals(f.gamma, "--gamma");
  std::vector<parid::BoundVerdict> verdicts;
  std::size_t skipped = 0;
  for (double alpha : alphas)
    for (double t : ts)
      for (double gamma : gammas) {
        try {
          verdicts.push_back(parid::check_lemma32(alpha, t, gamma));
        } catch (const parid::DomainError &e) {
          warn_skip("alpha=" + std::to_string(alpha) + " t=" + std::to_string(t) +
                        " gamma=" + std::to_string(gamma),
                    e);
          ++skipped;
        }
      }
  return write_verdicts("lemma32", {{"alpha", alphas}, {"t", ts}, {"gamma", gammas}},
                        Json::object(), verdicts, f.out, skipped);
}

int run_verify_product(const VerifyFlags &f) {
  const auto cases = parse_count(f.cases, "--cases");
  const auto sweep = parid::sweep_product_inequality(cases, f.seed);
  return write_verdicts("product", {{"cases", cases}}, {{"seed", f.seed}},
                        {parid::product_verdict(sweep, f.seed)}, f.out, 0);
}

int run_verify_invmoments(const VerifyFlags &f) {
  const auto t = parse_count(f.t, "--t");
  const auto s = f.s.empty() ? t : parse_count(f.s, "--s");
  const auto n = parse_count(f.samples, "--samples");
  const auto ells = parse_counts(f.ell, "--ell");
  std::vector<parid::BoundVerdict> verdicts;
  std::size_t skipped = 0;
  for (auto ell : ells) {
    try {
      verdicts.push_back(parid::check_inverse_moments(t, s, static_cast<int>(ell), n,
                                                      parid::derive_seed(f.seed, ell), f.threads));
    } catch (const parid::DomainError &e) {
      warn_skip("ell=" + std::to_string(ell), e);
      ++skipped;
    }
  }
  return write_verdicts("invmoments", {{"t", t}, {"s", s}, {"ell", ells}, {"samples", n}},
                        {{"seed", f.seed},
                         {"derivation", "splitmix64(seed + ell * 0x9e3779b97f4a7c15)"}},
                        verdicts, f.out, skipped);
}

int run_verify_edges(const VerifyFlags &f) {
  parid::EnsembleConfig config;
  config.base.alpha = 2.0;
  config.base.steps = parse_count(f.t, "--t");
  config.base.truncation = {parid::Truncation::Kind::paper_alpha_eq2, 0};
  config.base.edge_trace_stride = 1; // event C concerns every partial count
  config.replicas = parse_count(f.replicas, "--replicas");
  config.master_seed = f.seed;
  config.parallelism = f.threads;
  config.tracked_k = {1};
  const std::uint64_t t = config.base.steps;
  if (f.checkpoints.empty()) {
    for (std::uint64_t i = 1; i <= 10; ++i)
      config.checkpoints.push_back(std::max<std::uint64_t>(1, t * i / 10));
  } else {
    config.checkpoints = parse_counts(f.checkpoints, "--checkpoints");
  }
  std::sort(config.checkpoints.begin(), config.checkpoints.end());
  config.checkpoints.erase(std::unique(config.checkpoints.begin(), config.checkpoints.end()),
                           config.checkpoints.end());
  if (config.replicas == 0)
    throw UsageError("--replicas must be positive");

  std::cout << "edges: " << config.replicas << " replicas, t = " << t << '\n';
  const auto result = parid::run_ensemble(config);
  const auto report = parid::edge_trace_check(result, 2.0, t);
  std::cout << "  fraction within t (ln t)^(2/3): " << report.fraction_within << '\n';
  for (const auto &[tau, ratio] : report.ratios)
    std::cout << "  tau = " << tau << ": mean L / (tau beta'' ln t) = " << ratio << '\n';
  Json seeds = {{"master_seed", f.seed},
                {"derivation", "splitmix64(master_seed + i * 0x9e3779b97f4a7c15)"}};
  return write_verdicts("edges",
                        {{"alpha", 2.0},
                         {"t", t},
                         {"cap", *result.cap},
                         {"replicas", config.replicas},
                         {"checkpoints", config.checkpoints},
                         {"ratios", parid::io::to_json(report)["ratios"]}},
                        seeds, {report.verdict}, f.out, 0);
}

// oracle --------------------------------------------------------------------

struct OracleFlags {
  std::string t;
  std::string pmf;
  double delta = 0.0;
  std::string compare_samples = "0";
  std::uint64_t seed = 0;
  std::string path_budget = "1e7";
  std::string out = "parid-out";
};

std::string multiset_text(const std::vector<std::uint64_t> &degrees) {
  std::string s;
  for (auto d : degrees) {
    if (!s.empty())
      s += ' ';
    s += std::to_string(d);
  }
  return s;
}

int run_oracle(const OracleFlags &f) {
  const auto t = parse_count(f.t, "--t");
  const auto pmf = parse_pmf(f.pmf);
  const auto n = parse_count(f.compare_samples, "--compare-samples");
  const auto budget = parse_count(f.path_budget, "--path-budget");
  const auto exact = parid::enumerate_exact(pmf, f.delta, t, budget);

  Json cfg = {{"t", t}, {"pmf", pmf}, {"delta", f.delta}, {"compare_samples", n},
              {"path_budget", budget}};
  Output out(f.out, "oracle", cfg, {{"seed", f.seed}});
  {
    auto file = out.open("oracle.csv");
    file << "degrees,probability\n";
    for (const auto &[degrees, p] : exact.law)
      file << multiset_text(degrees) << ',' << parid::io::format_real(p) << '\n';
  }
  for (const auto &[degrees, p] : exact.law)
    std::cout << "{" << multiset_text(degrees) << "}: " << p << '\n';
  std::cout << exact.law.size() << " multisets, " << exact.paths << " paths, mass "
            << parid::io::format_real(exact.total_mass()) << '\n';

  if (n > 0) {
    parid::ParidConfig config;
    config.custom_pmf = pmf;
    config.delta = f.delta;
    config.steps = std::max<std::uint64_t>(t, 1);
    const auto model = parid::resolve_model(config);
    const auto sampled = parid::sample_degree_law(model, t, n, f.seed);
    const double tv = parid::total_variation(exact.law, sampled);
    auto file = out.open("oracle_compare.json");
    file << Json{{"samples", n}, {"total_variation", tv}}.dump() << '\n';
    std::cout << "total variation vs " << n << " samples: " << tv << '\n';
  }
  report_written(out);
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Preferential attachment with random initial degrees"};
  app.set_version_flag("--version", std::string("parid ") + parid::kVersion);
  app.require_subcommand(1);

  SimulateFlags sim;
  auto *simulate = app.add_subcommand("simulate", "run one realisation of the process");
  sim.model.add(simulate, true);
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--checkpoints", sim.checkpoints, "comma-separated steps to snapshot");
  simulate->add_option("--out", sim.out, "output directory");

  EnsembleFlags ens;
  auto *ensemble = app.add_subcommand("ensemble", "run independent replicas and summarise");
  ens.model.add(ensemble, false);
  ensemble->add_option("--replicas", ens.replicas, "number of replicas")->required();
  ensemble->add_option("--master-seed", ens.master_seed, "seed replica seeds derive from");
  ensemble->add_option("--threads", ens.threads, "worker threads")->check(CLI::PositiveNumber);
  ensemble->add_option("--checkpoints", ens.checkpoints,
                       "comma-separated steps (default: t/100, t)");
  ensemble->add_option("--tracked-k", ens.tracked_k, "degrees whose proportions are recorded");
  ensemble->add_option("--theta-conc", ens.theta_conc, "std ratio below which k concentrates");
  ensemble->add_option("--theta-nonc", ens.theta_nonc, "std ratio above which k does not");
  ensemble->add_option("--out", ens.out, "output directory");

  auto *theory = app.add_subcommand("theory", "limit-law tables and constants");
  theory->require_subcommand(1);
  std::uint64_t bk_k_max = 0;
  std::string theory_out = "parid-out";
  auto *bk = theory->add_subcommand("bk", "limit proportions b_k");
  bk->add_option("--k-max", bk_k_max, "largest k")->required();
  bk->add_option("--out", theory_out, "output directory");
  std::string bkp_t;
  std::uint64_t bkp_k_max = 0;
  auto *bkprime = theory->add_subcommand("bkprime", "finite-t proportions b'_k");
  bkprime->add_option("--t", bkp_t, "horizon t")->required();
  bkprime->add_option("--k-max", bkp_k_max, "largest k")->required();
  bkprime->add_option("--out", theory_out, "output directory");
  double const_alpha = 0.0;
  std::string const_t;
  auto *constants = theory->add_subcommand("constants", "normalising constants for 1 < alpha < 2");
  constants->add_option("--alpha", const_alpha, "exponent")->required();
  constants->add_option("--t", const_t, "horizon t")->required();
  constants->add_option("--out", theory_out, "output directory");

  VerifyFlags ver;
  auto *verify = app.add_subcommand("verify", "check the supporting inequalities");
  verify->require_subcommand(1);
  auto *lemma31 = verify->add_subcommand("lemma31", "Monte Carlo lower bound on sums of X");
  lemma31->add_option("--alpha", ver.alpha, "comma-separated exponents in (1, 2)");
  lemma31->add_option("--t", ver.t, "comma-separated horizons");
  lemma31->add_option("--z", ver.z, "comma-separated multipliers");
  lemma31->add_option("--samples", ver.samples, "Monte Carlo sums per point");
  auto *lemma32 = verify->add_subcommand("lemma32", "exact tail lower bound");
  lemma32->add_option("--alpha", ver.alpha, "comma-separated exponents in (1, 2)");
  lemma32->add_option("--t", ver.t, "comma-separated horizons");
  lemma32->add_option("--gamma", ver.gamma, "comma-separated multipliers");
  auto *edges = verify->add_subcommand("edges", "edge-count law at alpha = 2");
  edges->add_option("--t", ver.t, "horizon t");
  edges->add_option("--replicas", ver.replicas, "number of replicas");
  edges->add_option("--checkpoints", ver.checkpoints, "comma-separated steps (default: t/10 grid)");
  auto *invmoments = verify->add_subcommand("invmoments", "inverse moments of sums of Z");
  invmoments->add_option("--t", ver.t, "horizon t");
  invmoments->add_option("--s", ver.s, "number of summands (default: t)");
  invmoments->add_option("--ell", ver.ell, "comma-separated orders (1, 2)");
  invmoments->add_option("--samples", ver.samples, "Monte Carlo sums");
  auto *product = verify->add_subcommand("product", "randomised product inequality");
  product->add_option("--cases", ver.cases, "random vector pairs");
  for (auto *sub : {lemma31, lemma32, edges, invmoments, product}) {
    sub->add_option("--seed", ver.seed, "random seed");
    sub->add_option("--threads", ver.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", ver.out, "output directory");
  }

  OracleFlags orc;
  auto *oracle = app.add_subcommand("oracle", "exact degree law for tiny instances");
  oracle->add_option("--t", orc.t, "horizon t")->required();
  oracle->add_option("--pmf", orc.pmf, "initial-degree law, e.g. \"1:0.7,2:0.3\"")->required();
  oracle->add_option("--delta", orc.delta, "additive attachment shift");
  oracle->add_option("--compare-samples", orc.compare_samples, "Monte Carlo runs to compare");
  oracle->add_option("--seed", orc.seed, "random seed for the comparison");
  oracle->add_option("--path-budget", orc.path_budget, "refuse beyond this many branches");
  oracle->add_option("--out", orc.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate)
      return run_simulate(sim);
    if (*ensemble)
      return run_ensemble_command(ens);
    if (*bk)
      return run_theory_bk(bk_k_max, theory_out);
    if (*bkprime)
      return run_theory_bkprime(bkp_t, bkp_k_max, theory_out);
    if (*constants)
      return run_theory_constants(const_alpha, const_t, theory_out);
    if (*lemma31)
      return run_verify_lemma31(ver);
    if (*lemma32)
      return run_verify_lemma32(ver);
    if (*edges) {
      if (ver.t == "1000" && !edges->count("--t"))
        ver.t = "10000";
      return run_verify_edges(ver);
    }
    if (*invmoments) {
      if (!invmoments->count("--t"))
        ver.t = "10000";
      if (!invmoments->count("--samples"))
        ver.samples = "10000";
      return run_verify_invmoments(ver);
    }
    if (*product)
      return run_verify_product(ver);
    if (*oracle)
      return run_oracle(orc);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const parid::DomainError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const parid::ResourceGuardError &e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kResource;
  } catch (const parid::EdgeOverflowError &e) {
    std::cerr << "aborted at step " << e.tau() << ": " << e.what() << '\n';
    return kResource;
  } catch (const parid::EnsembleFailure &e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kResource;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResource;
  }
  return kUsage;
}
