#pragma once

#include <string_view>
#include <vector>

#include "adacubic/core.hpp"
#include "adacubic/errors.hpp"
#include "adacubic/types.hpp"

namespace adacubic {

// Minimize g^T s + 1/2 s^T Diag(b) s subject to ||s||^3 <= xi. With r = xi^{1/3},
// the boundary solution is s(nu) = -(Diag(b) + (nu r / 2) I)^{-1} g where nu solves
// the secular equation phi(nu) = 1/||s(nu)|| - 1/r = 0.

enum class SubproblemStatus { Interior, Boundary, HardCase };

std::string_view to_string(SubproblemStatus status);

struct SubproblemSolution {
  Vector s;
  /// Multiplier in the form (Diag(b) + (nu/2)||s|| I) s = -g. Equal to the
  /// secular iterate rescaled by r/||s||, so the stationarity condition holds
  /// at the returned step rather than at the nominal radius.
  double nu = 0.0;
  SubproblemStatus status = SubproblemStatus::Interior;
  int newton_iters = 0;
  /// -(g^T s + 1/2 s^T B s + (nu/6)||s||^3), the drop of the cubic model.
  double model_decrease = 0.0;
  /// Diagonal shift sigma applied to b when computing s.
  double shift = 0.0;
  /// Last secular iterate (shift = secular_nu * r / 2).
  double secular_nu = 0.0;
};

/// One point visited by the secular Newton iteration (the initial guess included).
struct NewtonIterate {
  double nu;
  double phi;
  double step_norm;
};

struct KktResidual {
  double stationarity;           // ||(Diag(b) + (nu/2)||s|| I) s + g||_inf
  double min_shifted_curvature;  // min_i b_i + (nu/2)||s||
  double slackness;              // nu (||s||^3 - xi)
};

/// Raised when neither Newton nor the bisection fallback land inside the
/// kappa_easy band; carries the iterate closest to the boundary.
class SolverStall : public Error {
 public:
  SolverStall(const std::string& what, SubproblemSolution best)
      : Error(what), best_(std::move(best)) {}
  const SubproblemSolution& best() const { return best_; }

 private:
  SubproblemSolution best_;
};

/// s_i = -g_i / (b_i + nu r / 2). Throws ShiftNotPositiveDefinite when a denominator is <= 0.
Vector solve_shifted(const Vector& b, const Vector& g, double nu, double r);

/// 1/||s(nu, r)|| - 1/cbrt(xi). Throws ZeroStepError when s(nu, r) = 0.
double phi(const Vector& b, const Vector& g, double nu, double r, double xi);

/// d phi / d nu = (r/2) [sum_i s_i^2 / (b_i + nu r/2)] / ||s||^3 > 0.
double dphi_dnu(const Vector& b, const Vector& g, double nu, double r);

struct HardCaseStep {
  Vector s;
  double alpha;
};

/// Moves `s_reg` along e_j, j = first argmin of b, onto the sphere ||s|| = cbrt(xi),
/// picking the root with the smaller model value (ties go to alpha > 0).
HardCaseStep hard_case_step(const Vector& b, const Vector& g, const Vector& s_reg, double xi);

/// Model minimizer inside the cubic constraint for diagonal curvature.
/// `trace`, when given, receives every secular iterate in order.
SubproblemSolution root_finder(const Vector& b, const Vector& g, double xi, const AdaCubicConfig& cfg,
                               std::vector<NewtonIterate>* trace = nullptr);

KktResidual kkt_residual(const Vector& b, const Vector& g, const SubproblemSolution& sol, double xi);

/// g^T s + 1/2 s^T Diag(b) s + (weight/6)||s||^3 (the model without its constant term).
double cubic_model(const Vector& b, const Vector& g, double weight, const Vector& s);

}  // namespace adacubic
