#include "adacubic/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adacubic/errors.hpp"

namespace adacubic {

void AdaCubicConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid AdaCubic config: " + what); };
  if (!(eta1 > 0.0 && eta1 < 1.0)) fail("eta1 must lie in (0,1)");
  if (!(eta2 >= eta1 && eta2 < 1.0)) fail("eta2 must lie in [eta1,1)");
  if (!(alpha1 >= 1.0) || !std::isfinite(alpha1)) fail("alpha1 must be >= 1");
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) fail("alpha2 must lie in (0,1)");
  if (!(kappa_easy > 0.0 && kappa_easy < 1.0)) fail("kappa_easy must lie in (0,1)");
  if (!(eps_m > 0.0) || !std::isfinite(eps_m)) fail("eps_m must be > 0");
  if (hutchinson_samples < 1) fail("hutchinson_samples must be >= 1");
  if (max_newton_iters < 1) fail("max_newton_iters must be >= 1");
  if (!(kkt_tol >= 0.0)) fail("kkt_tol must be >= 0");
  if (!(xi_init >= eps_m) || !std::isfinite(xi_init)) fail("xi_init must be finite and >= eps_m");
}

std::string_view to_string(IterationClass c) {
  switch (c) {
    case IterationClass::VerySuccessful: return "very_successful";
    case IterationClass::Successful: return "successful";
    case IterationClass::Unsuccessful: return "unsuccessful";
  }
  return "unknown";
}

IterationClass classify_iteration(double rho, const AdaCubicConfig& cfg) {
  if (std::isnan(rho)) throw ModelDegeneracyError("classify_iteration: rho is NaN");
  if (rho >= cfg.eta2) return IterationClass::VerySuccessful;
  // rho == eta1 counts as successful: accepted and xi kept.
  if (rho >= cfg.eta1) return IterationClass::Successful;
  return IterationClass::Unsuccessful;
}

bool accept_step(double rho, const AdaCubicConfig& cfg) { return rho >= cfg.eta1; }

double update_xi(const TrustRegionState& state, double rho, double step_norm_cubed,
                 const AdaCubicConfig& cfg) {
  switch (classify_iteration(rho, cfg)) {
    case IterationClass::VerySuccessful: return std::max(cfg.alpha1 * step_norm_cubed, state.xi);
    case IterationClass::Successful: return state.xi;
    case IterationClass::Unsuccessful: return std::max(cfg.alpha2 * step_norm_cubed, cfg.eps_m);
  }
  throw InvariantViolation("update_xi: unreachable");
}

}  // namespace adacubic
