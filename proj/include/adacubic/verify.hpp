#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "adacubic/types.hpp"

namespace adacubic {

// The property suite behind `adacubic verify` and the acceptance binary.
// Each check returns deterministic detail lines; wall-clock measurements are
// kept apart so the printed report is reproducible byte for byte.

struct TimedSection {
  std::string label;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  bool within_limit() const { return seconds < limit_seconds; }
};

struct CheckResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::vector<std::string> details;
  std::vector<TimedSection> timings;
};

struct SubproblemInstance {
  Vector b;
  Vector g;
  double xi = 1.0;
};

/// Seeded random instances: b in [-2, 2], g in [-1, 1], xi log-uniform in
/// [1e-4, 10], dimension uniform in [1, max_dim]. Every tenth instance zeroes
/// the gradient along the most negative curvature to exercise the hard case.
std::vector<SubproblemInstance> random_subproblem_instances(std::size_t count, std::size_t max_dim,
                                                            std::uint64_t seed);

CheckResult check_kkt();
CheckResult check_duality();
CheckResult check_secular_calculus();
CheckResult check_hutchinson();
CheckResult check_model_decrease();
CheckResult check_convergence();
CheckResult check_rate_trend();
CheckResult check_determinism();
CheckResult check_baseline();

using Check = std::function<CheckResult()>;
std::vector<Check> all_checks();

/// Report for one check: a PASS/FAIL headline followed by indented details.
void print_check(std::ostream& out, const CheckResult& r);

/// Runs every check, prints the report, returns true when all passed.
bool run_verify_suite(std::ostream& out);

}  // namespace adacubic
