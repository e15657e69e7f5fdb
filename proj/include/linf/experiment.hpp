#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "linf/gamp.hpp"
#include "linf/lp_estimators.hpp"
#include "linf/prior.hpp"

namespace linf {

enum class ExperimentKind { ScalarMixture, ScalarSparse, Lms, PoptSweep, EvtCheck };

std::string kind_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ScalarSparse;
  PriorSpec prior;
  ChannelSpec channel;
  std::optional<double> snr_db;           // derives the Gaussian noise variance
  std::vector<Eigen::Index> n_values;
  double measurement_ratio = 0.3;         // lms pipelines
  std::vector<double> p_values;
  std::vector<std::string> estimator_names;
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  std::string pipeline = "scalar";        // popt-sweep: "scalar" or "lms"
  GampConfig gamp;
  bool gamp_trace = false;

  bool uses_lms_pipeline() const;
};

// Strict parser: unknown keys anywhere in the document are ConfigErrors, as
// are unsupported prior/channel/estimator combinations. Validation happens
// before any trial runs.
ExperimentConfig parse_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

// One CSV row. `seconds` is measured wall-clock time and is the only
// nondeterministic field; everything else is a pure function of the config
// and master seed.
struct TrialRecord {
  std::string experiment;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::optional<double> p;
  double linf = 0.0;
  double l2 = 0.0;
  double seconds = 0.0;
};

struct EstimatorSummary {
  std::string label;
  std::optional<double> p;
  double mean_linf = 0.0;
  double stderr_linf = 0.0;
  int trials = 0;
};

struct SweepEntry {
  Eigen::Index n = 0;
  std::vector<EstimatorSummary> estimators;
  std::optional<double> p_opt;  // argmin mean linf over the swept p values
  bool tie_flag = false;        // winner within 1 combined SE of the runner-up
};

struct SweepResult {
  std::vector<SweepEntry> per_n;
};

struct RunOutputs {
  std::vector<TrialRecord> records;
  SweepResult sweep;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
};

// Runs the configured Monte Carlo experiment: trials execute concurrently on
// per-trial RNG streams, rows are appended to records.csv in deterministic
// order, and the sweep summary lands in summary.json. evt-check configs write
// evt.csv instead.
RunOutputs run_experiment(const ExperimentConfig& config, int threads = 0);

// Mean and standard error of per-trial linf differences (a - b) at one n;
// shared trial randomness makes this the right scale for ordering claims.
struct PairedGap {
  double mean = 0.0;
  double stderr_mean = 0.0;
  int trials = 0;
};

PairedGap paired_linf_gap(const std::vector<TrialRecord>& records, Eigen::Index n,
                          const std::string& label_a, std::optional<double> p_a,
                          const std::string& label_b, std::optional<double> p_b);

double mean_linf(const std::vector<TrialRecord>& records, Eigen::Index n,
                 const std::string& label, std::optional<double> p);

// CSV I/O for the TrialRecord schema (header
// experiment,N,M,trial,seed,estimator,p,linf,l2,seconds). Parse failures
// report the offending line.
std::vector<TrialRecord> parse_records_csv(const std::filesystem::path& path);
std::string format_record_row(const TrialRecord& record);
extern const char* const kRecordsCsvHeader;

SweepResult aggregate_sweep(const std::vector<TrialRecord>& records,
                            const std::vector<EstimatorSpec>& variants);

// The estimator list with "lp" expanded over the swept p values.
std::vector<EstimatorSpec> estimator_variants(const ExperimentConfig& config);

}  // namespace linf
