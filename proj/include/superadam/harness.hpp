#ifndef SUPERADAM_HARNESS_HPP
#define SUPERADAM_HARNESS_HPP

#include "superadam/core.hpp"
#include "superadam/metrics.hpp"
#include "superadam/superadam.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace superadam {

enum class LemmaCheckMode { Off, DeterministicOnly, MonteCarlo };

// One experiment: a problem, a list of optimizer specs, an iteration
// budget, and the seeds to replicate over. Parsed from a single JSON
// document; parse errors list every violated field.
struct ExperimentConfig {
  nlohmann::json problem;
  std::vector<nlohmann::json> optimizers;
  // Applies to every optimizer unless an optimizer spec overrides it.
  nlohmann::json feasible_set;
  long T = 1000;
  std::vector<std::uint64_t> seeds;
  long record_every = 1;
  LemmaCheckMode lemma_checks = LemmaCheckMode::Off;
  long mc_resamples = 10000;
  long mc_max_states = 50;
  std::string out_dir = "results";
  int workers = 1;

  static ExperimentConfig from_json(const nlohmann::json& j, std::vector<std::string>& errors);
};

// Fixed CSV schema; header always present, floats at 17 significant digits.
extern const char* const kCsvHeader;
std::string csv_row(const RunRecord& r);
void write_csv(const std::vector<RunRecord>& records, const std::string& path);

struct CellResult {
  std::string label;
  std::uint64_t seed = 0;
  std::string csv_path;
  RunStatus status = RunStatus::Completed;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  double avg_Mt = 0.0;  // mean over recorded rows
  long rows = 0;
  long grad_calls_total = 0;
  long grad_calls_estimator = 0;  // superadam only
  long grad_calls_matrix = 0;     // superadam only
  long chain_violations = 0;      // gradmap_norm > Mt beyond fp slack
  long b1_checked = 0, b1_violations = 0;
  double b1_min_slack = std::numeric_limits<double>::infinity();
  long mc_checked = 0, mc_failures = 0;
  std::vector<std::pair<double, double>> mt_series;  // (T, prefix-avg Mt)
  std::vector<std::string> warnings;
  std::vector<RunRecord> records;  // kept only when requested
};

struct ExperimentResult {
  nlohmann::json summary;
  std::vector<CellResult> cells;
  int exit_code = 0;  // 0 ok, 2 numeric abort in some cell
};

// Deep validation: instantiates the problem and every optimizer spec, and
// returns every violation found (empty = runnable).
std::vector<std::string> validate_experiment(const ExperimentConfig& cfg);

// Executes the optimizer x seed grid (optionally in parallel), writes one
// CSV per cell plus summary.json into cfg.out_dir, and returns the
// aggregate. File contents are deterministic given (config, seeds)
// regardless of worker scheduling. keep_records retains every row of every
// cell in memory (for tests).
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool keep_records = false);

// Aligned comparison table (markdown and CSV) of final f, avg Mt, slope and
// gradient-call counts per optimizer. All summaries must describe the same
// problem spec; mismatches are refused.
struct CompareReport {
  std::string markdown;
  std::string csv;
};
CompareReport compare_report(const std::vector<nlohmann::json>& summaries);

}  // namespace superadam

#endif  // SUPERADAM_HARNESS_HPP
