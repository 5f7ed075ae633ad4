#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rissec/ao.hpp"

namespace rissec {

enum class SweepKind { None, NRis, DacBits, Power };

std::string to_string(SweepKind k);
/// Accepts "none", "n_ris", "dac_bits", "power".
SweepKind parse_sweep(const std::string& name);

struct ExperimentConfig {
  SystemConfig base{};
  SweepKind sweep = SweepKind::None;
  std::vector<double> sweep_values;  // ignored when sweep == None
  int n_trials = 100;
  std::vector<SchemeKind> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::string output_path = "results.csv";
  std::uint64_t master_seed = 1;
  AOSettings ao{};

  /// The values actually iterated over; {NaN} when there is no sweep.
  std::vector<double> points() const;
  /// Copy of `base` with sweep point `value` applied.
  SystemConfig config_at(double value) const;
};

/// Throws std::invalid_argument listing every problem with `exp`.
void validate_experiment(const ExperimentConfig& exp);

void from_json(const nlohmann::json& j, ExperimentConfig& exp);
void to_json(nlohmann::json& j, const ExperimentConfig& exp);
ExperimentConfig load_experiment(const std::string& path);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  SchemeKind scheme = SchemeKind::Proposed;
  double sweep_value = 0.0;
  double secrecy = 0.0;
  double user = 0.0;
  double eve = 0.0;
  int iterations = 0;
  bool converged = false;
  int warnings = 0;
  double wall_ms = 0.0;
  std::string error;  // non-empty when the trial threw
};

/// splitmix64 output for stream position `trial + 1` of the generator seeded
/// with `master`. Depends on nothing else, so every scheme and sweep point of a
/// campaign sees the same channel draw for a given trial.
std::uint64_t trial_seed(std::uint64_t master, int trial);

/// Runs one (scheme, trial) work item. Exceptions are caught and recorded.
TrialRecord run_trial(const ExperimentConfig& exp, double sweep_value, SchemeKind scheme, int trial);

struct RunOptions {
  int threads = 1;
};

/// Every sweep point x scheme x trial, ordered by (sweep, scheme, trial)
/// regardless of the thread count.
std::vector<TrialRecord> run_monte_carlo(const ExperimentConfig& exp, const RunOptions& opts = {});

struct CsvOptions {
  bool timing = false;  // append the non-reproducible wall_ms column
};

/// CSV text for `records`. Throws std::invalid_argument("no records") when
/// empty. R and R_e are written with 10 significant digits; the secrecy column
/// is max(0, R - R_e) of those written values, in shortest round-trip form.
std::string format_csv(const std::vector<TrialRecord>& records, const CsvOptions& opts = {});
void emit_csv(const std::vector<TrialRecord>& records, const std::string& path, const CsvOptions& opts = {});
std::vector<TrialRecord> parse_csv(const std::string& text);

/// Run metadata written next to the CSV (trial count, seed scheme, config).
nlohmann::json campaign_metadata(const ExperimentConfig& exp);

/// iteration,secrecy_rate rows, starting with iteration 0 (the initial point).
std::string format_convergence_trace(const AOResult& result);
void emit_convergence_trace(const AOResult& result, const std::string& path);

// BCD against brute force on small surfaces.

struct OracleRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double bcd = 0.0;         // secrecy rate after bcd_sweep
  double exhaustive = 0.0;  // best secrecy rate over all L^n configurations
  double bcd_ms = 0.0;
  double exhaustive_ms = 0.0;
};

/// Draws channels with `seed`, fixes the precoder to MRT at random initial
/// phases and compares a BCD pass started from those phases with exhaustive
/// search.
OracleRecord run_oracle_trial(const SystemConfig& cfg, std::uint64_t seed, int trial);
std::vector<OracleRecord> run_oracle(const SystemConfig& cfg, int n_trials, std::uint64_t master_seed);
std::string format_oracle_csv(const std::vector<OracleRecord>& records, const CsvOptions& opts = {});

/// Writes `text` to `path`, throwing std::runtime_error with the OS message.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rissec
