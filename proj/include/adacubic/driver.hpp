#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adacubic/core.hpp"
#include "adacubic/errors.hpp"
#include "adacubic/oracle.hpp"
#include "adacubic/random.hpp"
#include "adacubic/subproblem.hpp"

namespace adacubic {

/// One row of run telemetry. Baseline optimizers leave the trust-region
/// fields (rho, nu, xi, status) empty or NaN.
struct StepRecord {
  std::size_t iteration = 0;
  double loss_before = 0.0;
  double loss_after = 0.0;
  double grad_norm = 0.0;
  double rho = 0.0;
  double nu = 0.0;
  double xi = 0.0;
  double step_norm = 0.0;
  std::optional<IterationClass> status;
  std::optional<SubproblemStatus> subproblem_status;
  bool accepted = false;

  /// Loss at the iterate this step leaves behind.
  double current_loss() const { return accepted ? loss_after : loss_before; }
};

struct Trajectory {
  std::vector<StepRecord> records;
  Vector final_x;
  std::uint64_t seed = 0;
};

/// Run with the trajectory accumulated before an oracle or solver failure.
class RunError : public Error {
 public:
  RunError(const std::string& what, Trajectory partial) : Error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

struct RunOptions {
  std::size_t max_iters = 500;
  std::optional<std::size_t> batch_size;  // empty: full batch
  /// Stop once the full-batch gradient norm is at or below this; empty disables
  /// the test (a first-order test would halt at a saddle).
  std::optional<double> stop_grad_norm;
};

/// True when the predicted drop is too small to divide by: non-positive,
/// subnormal, or below the rounding level of the loss itself.
bool is_degenerate_model_drop(double model_value_drop, double loss_before);

/// (loss_before - loss_after) / model_value_drop; empty when the drop is degenerate.
std::optional<double> reduction_ratio(double loss_before, double loss_after, double model_value_drop);

struct StepOutcome {
  Vector x;
  TrustRegionState state;
  StepRecord record;
  /// Zero model drop on the full batch: nothing left to do.
  bool terminal = false;
};

/// One outer iteration: batch draw, loss/gradient/Hutchinson diagonal on that
/// batch, subproblem solve, ratio on the same batch, acceptance and xi update.
StepOutcome adacubic_step(const Objective& obj, const Vector& x, const TrustRegionState& state,
                          const AdaCubicConfig& cfg, Rng& rng, std::optional<std::size_t> batch_size);

/// Iterates adacubic_step from x0 with a generator seeded by cfg.rng_seed.
/// Throws ConfigError for max_iters == 0 and RunError on step failures.
Trajectory run(const Objective& obj, const Vector& x0, const AdaCubicConfig& cfg, const RunOptions& opts);

struct SgdState {
  Vector velocity;
};

struct AdamMoments {
  Vector m;
  Vector v;
  int t = 0;
};

struct SgdOptions {
  double lr = 0.1;
  double momentum = 0.0;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// velocity <- momentum * velocity + g; x <- x - lr * velocity.
Vector sgd_step(const Objective& obj, const Vector& x, SgdState& state, double lr, double momentum,
                const Batch& batch);

/// Bias-corrected Adam update.
Vector adam_step(const Objective& obj, const Vector& x, AdamMoments& moments, double lr, double beta1,
                 double beta2, double eps, const Batch& batch);

Trajectory run_sgd(const Objective& obj, const Vector& x0, const SgdOptions& sgd, const RunOptions& opts,
                   std::uint64_t seed);
Trajectory run_adam(const Objective& obj, const Vector& x0, const AdamOptions& adam, const RunOptions& opts,
                    std::uint64_t seed);

}  // namespace adacubic
