#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace adacubic {

/// Hyperparameters of the outer trust loop and the inner dual solver.
/// Defaults are the universal settings; nothing here is meant to be tuned.
struct AdaCubicConfig {
  double eta1 = 0.05;   // acceptance threshold on rho
  double eta2 = 0.75;   // very-successful threshold on rho
  double alpha1 = 2.5;  // xi expansion on very successful iterations
  double alpha2 = 0.25; // xi shrink on unsuccessful iterations
  double kappa_easy = 0.01;
  double eps_m = 1e-6;  // floor for xi
  int hutchinson_samples = 1;
  int max_newton_iters = 100;
  double kkt_tol = 1e-10;
  std::uint64_t rng_seed = 0;
  double xi_init = 1.0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  bool operator==(const AdaCubicConfig&) const = default;
};

enum class IterationClass { VerySuccessful, Successful, Unsuccessful };

std::string_view to_string(IterationClass c);

/// xi is the cube of the trust radius.
struct TrustRegionState {
  double xi = 1.0;
  std::size_t iteration = 0;
  std::optional<double> last_rho;
  std::optional<double> last_step_norm_cubed;

  static TrustRegionState initial(const AdaCubicConfig& cfg) { return {cfg.xi_init, 0, {}, {}}; }
};

/// rho >= eta2 -> VerySuccessful, eta1 <= rho < eta2 -> Successful, else Unsuccessful.
/// Throws ModelDegeneracyError on NaN.
IterationClass classify_iteration(double rho, const AdaCubicConfig& cfg);

bool accept_step(double rho, const AdaCubicConfig& cfg);

/// New xi after an iteration with ratio `rho` and step length cubed `step_norm_cubed`.
double update_xi(const TrustRegionState& state, double rho, double step_norm_cubed,
                 const AdaCubicConfig& cfg);

}  // namespace adacubic
