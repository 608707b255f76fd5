#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adacubic/core.hpp"
#include "adacubic/driver.hpp"
#include "adacubic/oracle.hpp"

namespace adacubic {

// ---------------------------------------------------------------------------
// Key-value config files
//
//   # comment
//   [section]            or  [section.label]
//   key = value          lists are comma separated; values may be quoted
// ---------------------------------------------------------------------------

struct ConfigSection {
  std::string name;   // "run", "problem", ...
  std::string label;  // text after the first '.', empty if none
  std::vector<std::pair<std::string, std::string>> entries;
  int line = 0;
};

/// Throws ConfigError with the line number on malformed input.
std::vector<ConfigSection> parse_config_text(std::string_view text);

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view key);
std::uint64_t parse_uint(std::string_view text, std::string_view key);

/// Assigns one AdaCubicConfig field by name. Returns false for unknown keys.
bool set_adacubic_field(AdaCubicConfig& cfg, std::string_view key, std::string_view value);
/// All fields as "key = value" lines, parseable by parse_adacubic_config.
std::string format_adacubic_config(const AdaCubicConfig& cfg);
/// Reads the entries of a single section (or a whole file with one [adacubic] section
/// or no section header at all). Unknown keys raise ConfigError naming the key.
AdaCubicConfig parse_adacubic_config(std::string_view text);

// ---------------------------------------------------------------------------
// Experiment grid
// ---------------------------------------------------------------------------

struct ProblemSpec {
  std::string label;
  std::string type;  // quadratic | rosenbrock | saddle | logistic
  std::map<std::string, std::string> params;
};

enum class OptimizerKind { AdaCubic, Sgd, Adam };

struct OptimizerSpec {
  std::string label;
  OptimizerKind kind = OptimizerKind::AdaCubic;
  AdaCubicConfig adacubic;
  SgdOptions sgd;
  AdamOptions adam;
};

struct DeviationSettings {
  std::size_t trials = 1000;
  std::vector<std::size_t> batch_sizes{16, 64};
  std::vector<int> samples{1, 4, 16};
};

struct ExperimentConfig {
  std::vector<ProblemSpec> problems;
  std::vector<OptimizerSpec> optimizers;
  std::vector<std::uint64_t> seeds;
  std::size_t max_iters = 500;
  std::optional<std::size_t> batch_size;
  std::optional<double> stop_grad_norm;
  /// A run succeeds when its final full-batch gradient norm is at or below this.
  double success_grad_norm = 1e-6;
  /// Loss level for iterations-to-threshold; empty leaves that column blank.
  /// A problem section may set its own `loss_threshold`.
  std::optional<double> loss_threshold;
  std::string output = "results";
  DeviationSettings deviation;

  /// Throws ConfigError when a list is empty or labels collide.
  void validate() const;
};

ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Keeps only the named entries; throws ConfigError for names that do not exist.
void select_problems(ExperimentConfig& cfg, const std::vector<std::string>& labels);
void select_optimizers(ExperimentConfig& cfg, const std::vector<std::string>& labels);

struct ProblemInstance {
  std::string label;
  ObjectivePtr objective;
  Vector x0;
  /// Per-problem override of ExperimentConfig::loss_threshold.
  std::optional<double> loss_threshold;
};

/// Builds the objective and starting point. Relative data paths resolve against `base_dir`.
ProblemInstance build_problem(const ProblemSpec& spec, const std::string& base_dir = "");

struct RunResult {
  std::string problem;
  std::string optimizer;
  std::uint64_t seed = 0;
  Trajectory trajectory;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  std::optional<std::size_t> iters_to_threshold;
  bool success = false;
  std::string error;  // non-empty when the run aborted
};

struct SummaryRow {
  std::string problem;
  std::string optimizer;
  std::size_t runs = 0;
  double mean_final_loss = 0.0;
  double std_final_loss = 0.0;  // sample standard deviation, 0 for one run
  /// Mean over runs that reached the threshold; NaN when none did.
  double mean_iters_to_threshold = 0.0;
  double success_rate = 0.0;
};

struct ExperimentResult {
  std::vector<RunResult> runs;  // ordered by (problem, optimizer, seed) as configured
  std::vector<SummaryRow> summary;
};

/// Number of iterations after which the current loss first sits at or below
/// `threshold` (0 when the starting loss already does).
std::optional<std::size_t> iterations_to_threshold(const Trajectory& traj, double threshold);

RunResult run_single(const ProblemInstance& problem, const OptimizerSpec& optimizer, std::uint64_t seed,
                     const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& base_dir = "");

std::vector<SummaryRow> summarize(const std::vector<RunResult>& runs);

inline constexpr std::string_view kTrajectoryHeader =
    "iter,loss_before,loss_after,grad_norm,rho,nu,xi,step_norm,status,subproblem_status,accepted";

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::vector<StepRecord> read_trajectory_csv(std::istream& in);
void write_runs_csv(std::ostream& out, const std::vector<RunResult>& runs);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// traj_<problem>_<optimizer>_<seed>.csv
std::string trajectory_file_name(const RunResult& run);

/// Writes one trajectory file per run plus runs.csv and summary.csv into `dir`.
void write_experiment_outputs(const ExperimentResult& result, const std::string& dir);

// ---------------------------------------------------------------------------
// Subsampling deviation
// ---------------------------------------------------------------------------

struct DeviationSamples {
  std::vector<double> grad;  // ||g_batch - g_full||_2
  std::vector<double> diag;  // ||b_batch - diag_full||_inf
};

/// Over `trials` seeded draws, compares the batch gradient and S-probe Hutchinson
/// diagonal against full-batch references. The diagonal reference is the exact
/// Hessian diagonal when the objective provides one, else the exhaustive average.
/// Throws ConfigError for deterministic objectives.
DeviationSamples measure_subsample_deviation(const Objective& obj, const Vector& x, std::size_t batch_size,
                                             std::size_t trials, int samples, std::uint64_t seed);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace adacubic
