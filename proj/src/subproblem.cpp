#include "adacubic/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace adacubic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Index argmin_first(const Vector& b) {
  Eigen::Index j = 0;
  for (Eigen::Index i = 1; i < b.size(); ++i)
    if (b[i] < b[j]) j = i;
  return j;
}

void check_inputs(const Vector& b, const Vector& g, const char* who) {
  if (b.size() == 0 || b.size() != g.size())
    throw ConfigError(std::string(who) + ": b and g must be non-empty and of equal size");
}

SubproblemSolution finish(const Vector& b, const Vector& g, Vector s, double nu,
                          SubproblemStatus status, int iters, double shift, double secular_nu) {
  SubproblemSolution sol;
  sol.model_decrease = -cubic_model(b, g, nu, s);
  sol.s = std::move(s);
  sol.nu = nu;
  sol.status = status;
  sol.newton_iters = iters;
  sol.shift = shift;
  sol.secular_nu = secular_nu;
  return sol;
}

}  // namespace

std::string_view to_string(SubproblemStatus status) {
  switch (status) {
    case SubproblemStatus::Interior: return "interior";
    case SubproblemStatus::Boundary: return "boundary";
    case SubproblemStatus::HardCase: return "hard_case";
  }
  return "unknown";
}

Vector solve_shifted(const Vector& b, const Vector& g, double nu, double r) {
  check_inputs(b, g, "solve_shifted");
  const double shift = 0.5 * nu * r;
  Vector s(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double denom = b[i] + shift;
    if (!(denom > 0.0))
      throw ShiftNotPositiveDefinite("solve_shifted: b_" + std::to_string(i) + " + nu r/2 <= 0");
    s[i] = -g[i] / denom;
  }
  return s;
}

double phi(const Vector& b, const Vector& g, double nu, double r, double xi) {
  const double ns = solve_shifted(b, g, nu, r).norm();
  if (ns == 0.0) throw ZeroStepError("phi: zero step (g = 0)");
  return 1.0 / ns - 1.0 / std::cbrt(xi);
}

double dphi_dnu(const Vector& b, const Vector& g, double nu, double r) {
  const Vector s = solve_shifted(b, g, nu, r);
  const double ns = s.norm();
  if (ns == 0.0) throw ZeroStepError("dphi_dnu: zero step (g = 0)");
  const double shift = 0.5 * nu * r;
  double weighted = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) weighted += s[i] * s[i] / (b[i] + shift);
  return 0.5 * r * weighted / (ns * ns * ns);
}

HardCaseStep hard_case_step(const Vector& b, const Vector& g, const Vector& s_reg, double xi) {
  check_inputs(b, g, "hard_case_step");
  if (s_reg.size() != b.size()) throw ConfigError("hard_case_step: s_reg size mismatch");
  const Eigen::Index j = argmin_first(b);
  const double r = std::cbrt(xi);
  // alpha^2 + 2 s_j alpha + (||s_reg||^2 - r^2) = 0
  const double sj = s_reg[j];
  const double c = s_reg.squaredNorm() - r * r;
  const double disc = sj * sj - c;
  if (!(disc >= 0.0) || c > 0.0)
    throw InvariantViolation("hard_case_step: s_reg lies outside the constraint ball");
  const double root = std::sqrt(disc);
  const double q = sj > 0.0 ? -(sj + root) : -(sj - root);
  double alpha_hi = q;
  double alpha_lo = q == 0.0 ? 0.0 : c / q;
  if (alpha_lo > alpha_hi) std::swap(alpha_lo, alpha_hi);
  // The two candidates differ only in coordinate j, where (s_j + alpha)^2 is the
  // same for both roots; the model gap is g_j (alpha_hi - alpha_lo).
  const double alpha = g[j] > 0.0 ? alpha_lo : alpha_hi;
  Vector s = s_reg;
  s[j] += alpha;
  return {std::move(s), alpha};
}

double cubic_model(const Vector& b, const Vector& g, double weight, const Vector& s) {
  const double ns = s.norm();
  return g.dot(s) + 0.5 * s.dot(b.cwiseProduct(s)) + weight / 6.0 * ns * ns * ns;
}

SubproblemSolution root_finder(const Vector& b, const Vector& g, double xi, const AdaCubicConfig& cfg,
                               std::vector<NewtonIterate>* trace) {
  check_inputs(b, g, "root_finder");
  if (!b.allFinite() || !g.allFinite()) throw ConfigError("root_finder: non-finite b or g");
  if (!(xi >= cfg.eps_m) || !std::isfinite(xi)) throw ConfigError("root_finder: xi must be finite and >= eps_m");

  const double r = std::cbrt(xi);
  const Eigen::Index j = argmin_first(b);
  const double lambda_d = b[j];
  const bool positive_definite = lambda_d > 0.0;

  if (lambda_d >= 0.0 && (g.array() == 0.0).all())
    return finish(b, g, Vector::Zero(b.size()), 0.0, SubproblemStatus::Interior, 0, 0.0, 0.0);

  double nu = 0.0;
  if (!positive_definite) {
    const double margin = std::max(1e-8, 1e-8 * std::abs(lambda_d));
    nu = -2.0 * (lambda_d - margin) / r;
  }
  Vector s = solve_shifted(b, g, nu, r);
  double ns = s.norm();
  if (trace) trace->push_back({nu, ns > 0.0 ? 1.0 / ns - 1.0 / r : -kInf, ns});

  if (ns * ns * ns <= xi) {
    if (positive_definite)
      return finish(b, g, std::move(s), 0.0, SubproblemStatus::Interior, 0, 0.0, 0.0);
    const double shift = 0.5 * nu * r;
    if (std::abs(ns * ns * ns - xi) <= 1e-12 * std::max(1.0, xi))
      return finish(b, g, std::move(s), 2.0 * shift / ns, SubproblemStatus::Boundary, 0, shift, nu);
    // Hard case: the multiplier uses the exact curvature minimum, so the
    // shifted matrix is PSD with a zero in direction e_j.
    HardCaseStep step = hard_case_step(b, g, s, xi);
    return finish(b, g, std::move(step.s), -2.0 * lambda_d / r, SubproblemStatus::HardCase, 0,
                  -lambda_d, nu);
  }

  // ||s|| > r here, so phi(nu) < 0 and nu is a lower bracket.
  const double band = cfg.kappa_easy * r;
  double lo = nu;
  double hi = kInf;
  int iters = 0;
  Vector best_s = s;
  double best_nu = nu;
  double best_gap = std::abs(ns - r);

  auto evaluate = [&](double next) {
    nu = next;
    s = solve_shifted(b, g, nu, r);
    ns = s.norm();
    const double f = 1.0 / ns - 1.0 / r;
    if (f < 0.0) lo = std::max(lo, nu);
    if (f > 0.0) hi = std::min(hi, nu);
    if (trace) trace->push_back({nu, f, ns});
    if (std::abs(ns - r) < best_gap) {
      best_gap = std::abs(ns - r);
      best_s = s;
      best_nu = nu;
    }
  };
  auto converged = [&] { return std::abs(ns - r) <= band; };
  auto bisect_or_grow = [&] { return std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(2.0 * lo, lo + 1.0 / r); };

  while (!converged() && iters < cfg.max_newton_iters) {
    const double f = 1.0 / ns - 1.0 / r;
    const double df = dphi_dnu(b, g, nu, r);
    double next = nu - f / df;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = bisect_or_grow();
    evaluate(next);
    ++iters;
  }

  // Fallback: bracket the root, then bisect.
  for (int k = 0; !converged() && k < 4000; ++k) {
    evaluate(bisect_or_grow());
    ++iters;
  }

  if (!converged()) {
    const double shift = 0.5 * best_nu * r;
    const double bn = best_s.norm();
    throw SolverStall("root_finder: secular iteration did not reach the kappa_easy band",
                      finish(b, g, best_s, 2.0 * shift / bn, SubproblemStatus::Boundary, iters, shift, best_nu));
  }
  const double shift = 0.5 * nu * r;
  return finish(b, g, std::move(s), 2.0 * shift / ns, SubproblemStatus::Boundary, iters, shift, nu);
}

KktResidual kkt_residual(const Vector& b, const Vector& g, const SubproblemSolution& sol, double xi) {
  const double ns = sol.s.norm();
  const double shift = 0.5 * sol.nu * ns;
  const Vector residual = (b.array() + shift).matrix().cwiseProduct(sol.s) + g;
  return {residual.cwiseAbs().maxCoeff(), b.minCoeff() + shift, sol.nu * (ns * ns * ns - xi)};
}

}  // namespace adacubic
