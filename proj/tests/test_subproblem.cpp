#include <doctest.h>

#include <cmath>

#include "adacubic/errors.hpp"
#include "adacubic/oracle.hpp"
#include "adacubic/subproblem.hpp"
#include "adacubic/verify.hpp"

using namespace adacubic;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const AdaCubicConfig kDefaults;

}  // namespace

TEST_CASE("solve_shifted") {
  CHECK(solve_shifted(vec({1}), vec({2}), 2.0, 1.0)[0] == doctest::Approx(-1.0));
  CHECK(solve_shifted(vec({1, 2}), vec({0, 0}), 0.3, 0.7).norm() == 0.0);
  const Vector s = solve_shifted(vec({2, 4}), vec({2, 4}), 0.0, 123.0);
  CHECK(s[0] == -1.0);
  CHECK(s[1] == -1.0);
  CHECK_THROWS_AS(solve_shifted(vec({-1, 2}), vec({1, 1}), 1.0, 1.0), ShiftNotPositiveDefinite);
  CHECK_THROWS_AS(solve_shifted(vec({0}), vec({1}), 0.0, 1.0), ShiftNotPositiveDefinite);
}

TEST_CASE("phi and its derivative, closed forms") {
  CHECK(phi(vec({1}), vec({2}), 0.0, 1.0, 1.0) == doctest::Approx(-0.5));
  CHECK(phi(vec({1}), vec({2}), 2.0, 1.0, 1.0) == doctest::Approx(0.0));
  CHECK(phi(vec({1}), vec({2}), 0.0, 1.0, 8.0) == doctest::Approx(0.0));
  CHECK(dphi_dnu(vec({1}), vec({2}), 0.0, 1.0) == doctest::Approx(0.25));
  CHECK(dphi_dnu(vec({1}), vec({2}), 2.0, 1.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(phi(vec({1}), vec({0}), 1.0, 1.0, 1.0), ZeroStepError);
}

TEST_CASE("dphi_dnu matches central differences") {
  Rng rng(31);
  for (int k = 0; k < 200; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 10));
    Vector b(d), g(d);
    for (auto& x : b) x = 4.0 * uniform01(rng) - 2.0;
    for (auto& x : g) x = 2.0 * uniform01(rng) - 1.0;
    const double xi = std::pow(10.0, -4.0 + 5.0 * uniform01(rng));
    const double r = std::cbrt(xi);
    const double nu = std::max(0.0, -2.0 * b.minCoeff() / r) + (0.05 + 2.0 * uniform01(rng)) * 2.0 / r;
    const double an = dphi_dnu(b, g, nu, r);
    const double h = 1e-6 * nu;
    const double fd = (phi(b, g, nu + h, r, xi) - phi(b, g, nu - h, r, xi)) / (2.0 * h);
    REQUIRE(an > 0.0);
    CHECK(std::abs(an - fd) <= std::max(1e-6, 1e-4 * std::abs(an)));
  }
}

TEST_CASE("phi is increasing and concave right of the pole") {
  Rng rng(32);
  for (int k = 0; k < 100; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 6));
    Vector b(d), g(d);
    for (auto& x : b) x = 4.0 * uniform01(rng) - 2.0;
    for (auto& x : g) x = 2.0 * uniform01(rng) - 1.0;
    const double r = 0.1 + uniform01(rng);
    const double lo = std::max(0.0, -2.0 * b.minCoeff() / r) + 1e-2;
    const double step = (1.0 + 5.0 * uniform01(rng)) / 49.0;
    std::vector<double> p;
    for (int i = 0; i < 50; ++i) p.push_back(phi(b, g, lo + i * step, r, r * r * r));
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] > p[i - 1]);
    for (std::size_t i = 1; i + 1 < p.size(); ++i) CHECK((p[i + 1] - 2 * p[i] + p[i - 1]) / (step * step) <= 1e-8);
  }
}

TEST_CASE("hard_case_step") {
  const auto hc = hard_case_step(vec({-1, 2}), vec({0, 1}), vec({0, -0.25}), 0.5);
  CHECK(hc.alpha == doctest::Approx(0.7535).epsilon(1e-3));
  CHECK(hc.alpha > 0.0);
  CHECK(std::abs(std::pow(hc.s.norm(), 3) - 0.5) <= 1e-9);
  CHECK(hc.s[1] == -0.25);

  const auto pure = hard_case_step(vec({-1}), vec({0}), vec({0}), 1.0);
  CHECK(pure.s[0] == doctest::Approx(1.0));
  CHECK(pure.alpha == doctest::Approx(1.0));

  // With g_j != 0 the root pointing downhill wins.
  const auto tilted = hard_case_step(vec({-1, 2}), vec({0.1, 1}), vec({0, -0.25}), 0.5);
  CHECK(tilted.alpha < 0.0);

  // Moving onto the sphere along negative curvature lowers the model.
  const Vector s_reg = vec({0, -1.0 / 3.0});
  const auto step = hard_case_step(vec({-1, 2}), vec({0, 1}), s_reg, 0.5);
  const double nu = 2.0 / std::cbrt(0.5);
  CHECK(cubic_model(vec({-1, 2}), vec({0, 1}), nu, step.s) < cubic_model(vec({-1, 2}), vec({0, 1}), nu, s_reg));

  CHECK_THROWS_AS(hard_case_step(vec({-1, 2}), vec({0, 1}), vec({0, -2}), 0.5), InvariantViolation);
}

TEST_CASE("root_finder: one-dimensional boundary solution") {
  const auto sol = root_finder(vec({1}), vec({2}), 1.0, kDefaults);
  CHECK(sol.status == SubproblemStatus::Boundary);
  CHECK(sol.s[0] == doctest::Approx(-1.0).epsilon(kDefaults.kappa_easy));
  CHECK(sol.nu == doctest::Approx(2.0).epsilon(0.05));
  const auto res = kkt_residual(vec({1}), vec({2}), sol, 1.0);
  CHECK(res.stationarity <= 1e-9);
  CHECK(res.min_shifted_curvature == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(res.slackness) <= 3.0 * kDefaults.kappa_easy * 1.0 * sol.nu);
}

TEST_CASE("root_finder: interior Newton step") {
  const auto sol = root_finder(vec({1, 2}), vec({-1, -2}), 1000.0, kDefaults);
  CHECK(sol.status == SubproblemStatus::Interior);
  CHECK(sol.nu == 0.0);
  CHECK(sol.s[0] == 1.0);
  CHECK(sol.s[1] == 1.0);
  CHECK(kkt_residual(vec({1, 2}), vec({-1, -2}), sol, 1000.0).slackness == 0.0);
  CHECK(sol.model_decrease == doctest::Approx(1.5));
}

TEST_CASE("root_finder: hard case") {
  const Vector b = vec({-1, 2}), g = vec({0, 1});
  const auto sol = root_finder(b, g, 0.5, kDefaults);
  const double r = std::cbrt(0.5);
  CHECK(sol.status == SubproblemStatus::HardCase);
  CHECK(std::pow(sol.s.norm(), 3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.nu == doctest::Approx(2.0 / r).epsilon(1e-7));
  CHECK(sol.s[1] < 0.0);
  CHECK(std::abs(sol.s[0]) > 0.0);
  CHECK(kkt_residual(b, g, sol, 0.5).min_shifted_curvature >= -kDefaults.kkt_tol);

  const Vector ref = brute_force_subproblem_min(b, g, 0.5, 200);
  const double tol = 2.0 * r / 200.0;
  CHECK(std::abs(sol.s[1] - ref[1]) <= tol);
  CHECK(std::abs(std::abs(sol.s[0]) - std::abs(ref[0])) <= tol);
}

TEST_CASE("root_finder: zero gradient") {
  const auto flat = root_finder(vec({1, 3}), vec({0, 0}), 1.0, kDefaults);
  CHECK(flat.status == SubproblemStatus::Interior);
  CHECK(flat.s.norm() == 0.0);

  // Indefinite: pure negative-curvature step, ties broken to the first index.
  const auto esc = root_finder(vec({-2, -2, 1}), vec({0, 0, 0}), 0.125, kDefaults);
  CHECK(esc.status == SubproblemStatus::HardCase);
  CHECK(esc.s[0] == doctest::Approx(0.5));
  CHECK(esc.s[1] == 0.0);
  CHECK(esc.s[2] == 0.0);
}

TEST_CASE("root_finder: input validation") {
  CHECK_THROWS_AS(root_finder(vec({1}), vec({1}), 1e-7, kDefaults), ConfigError);
  CHECK_THROWS_AS(root_finder(vec({1, 2}), vec({1}), 1.0, kDefaults), ConfigError);
  CHECK_THROWS(root_finder(vec({NAN}), vec({1}), 1.0, kDefaults));
}

TEST_CASE("solution invariants on random instances") {
  const double band = 4.0 * kDefaults.kappa_easy;
  for (const auto& inst : random_subproblem_instances(500, 10, 77)) {
    std::vector<NewtonIterate> trace;
    const auto sol = root_finder(inst.b, inst.g, inst.xi, kDefaults, &trace);
    const double r = std::cbrt(inst.xi);
    const double n = sol.s.norm();
    const auto res = kkt_residual(inst.b, inst.g, sol, inst.xi);

    REQUIRE(sol.nu >= 0.0);
    if (sol.status == SubproblemStatus::Interior) {
      CHECK(sol.nu == 0.0);
      CHECK(n * n * n <= inst.xi);
      CHECK(inst.b.minCoeff() >= 0.0);
    } else {
      CHECK(std::abs(n - r) <= kDefaults.kappa_easy * r);
    }
    CHECK(res.stationarity <= 1e-6 * (1.0 + inst.g.norm()));
    CHECK(res.min_shifted_curvature >= -1e-10);
    CHECK(std::abs(res.slackness) <= band * inst.xi * sol.nu);
    CHECK(sol.model_decrease >= sol.nu / 12.0 * n * n * n - kDefaults.kkt_tol);
    CHECK(cubic_model(inst.b, inst.g, sol.nu, sol.s) <= -sol.nu / 12.0 * n * n * n + 1e-10);

    if (sol.status == SubproblemStatus::Boundary) {
      CHECK(sol.newton_iters <= 25);
      for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i - 1].phi < 0.0) CHECK(trace[i].nu > trace[i - 1].nu);
        CHECK(trace[i].phi <= 1e-12 / r);
      }
    }
  }
}

TEST_CASE("the returned step minimizes the cubic model with weight nu") {
  Rng rng(41);
  for (const auto& inst : random_subproblem_instances(20, 3, 78)) {
    const auto sol = root_finder(inst.b, inst.g, inst.xi, kDefaults);
    const double m = cubic_model(inst.b, inst.g, sol.nu, sol.s);
    for (int p = 0; p < 2000; ++p) {
      Vector s = sol.s;
      for (auto& x : s) x += 0.5 * (2.0 * uniform01(rng) - 1.0) / std::sqrt(3.0);
      CHECK(m <= cubic_model(inst.b, inst.g, sol.nu, s) + 1e-12 * (1.0 + std::abs(m)));
    }
  }
}

TEST_CASE("status names") {
  CHECK(to_string(SubproblemStatus::Interior) == "interior");
  CHECK(to_string(SubproblemStatus::Boundary) == "boundary");
  CHECK(to_string(SubproblemStatus::HardCase) == "hard_case");
}
