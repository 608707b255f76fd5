#include "adacubic/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>

#include "adacubic/curvature.hpp"
#include "adacubic/driver.hpp"
#include "adacubic/harness.hpp"
#include "adacubic/oracle.hpp"
#include "adacubic/subproblem.hpp"

namespace adacubic {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

Vector uniform_vector(Rng& rng, Eigen::Index d, double lo, double hi) {
  Vector v(d);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

Matrix random_symmetric(Rng& rng, Eigen::Index d) {
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = uniform(rng, -1.0, 1.0);
  }
  return a;
}

// Uniform point in the d-ball of radius `radius`.
Vector uniform_in_ball(Rng& rng, Eigen::Index d, double radius) {
  Vector v(d);
  for (auto& x : v) x = standard_normal(rng);
  const double u = std::pow(uniform01(rng), 1.0 / static_cast<double>(d));
  return v * (radius * u / v.norm());
}

struct Verdict {
  bool ok = true;
  std::vector<std::string> lines;
  void expect(bool cond, const std::string& what) {
    lines.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
    ok = ok && cond;
  }
};

CheckResult finish(int id, std::string title, Verdict v, std::vector<TimedSection> timings = {}) {
  CheckResult r;
  r.id = id;
  r.title = std::move(title);
  r.passed = v.ok;
  r.details = std::move(v.lines);
  r.timings = std::move(timings);
  return r;
}

// Shared logistic benchmark: n = 200, d = 5, label noise 0.5, ridge 1e-2.
constexpr double kLogisticL2 = 1e-2;

LogisticData logistic_data() { return make_synthetic_logistic_data(200, 5, 0.5, 7); }

ObjectivePtr logistic_objective() {
  const auto data = logistic_data();
  return make_logistic(data.features, data.labels, kLogisticL2);
}

RunOptions logistic_run_options() {
  RunOptions opts;
  opts.max_iters = 300;
  opts.stop_grad_norm = 1e-6;
  return opts;
}

Trajectory logistic_run() {
  const auto obj = logistic_objective();
  return run(*obj, Vector::Zero(5), AdaCubicConfig{}, logistic_run_options());
}

// Minimum of the ridge logistic loss by dense Newton on the analytic Hessian,
// written out here rather than through the Objective interface.
double logistic_optimum() {
  const auto data = logistic_data();
  const Matrix& a = data.features;
  const Vector& y = data.labels;
  const double n = static_cast<double>(a.rows());
  const Eigen::Index d = a.cols();
  const auto loss = [&](const Vector& w) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double z = -y[i] * a.row(i).dot(w);
      f += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    return f / n + 0.5 * kLogisticL2 * w.squaredNorm();
  };
  Vector w = Vector::Zero(d);
  for (int it = 0; it < 100; ++it) {
    Vector g = kLogisticL2 * w;
    Matrix h = kLogisticL2 * Matrix::Identity(d, d);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double m = y[i] * a.row(i).dot(w);
      const double p = 1.0 / (1.0 + std::exp(m));  // sigma(-m)
      g -= (p * y[i] / n) * a.row(i).transpose();
      h += (p * (1.0 - p) / n) * a.row(i).transpose() * a.row(i);
    }
    if (g.norm() < 1e-14) break;
    w -= h.ldlt().solve(g);
  }
  return loss(w);
}

}  // namespace

std::vector<SubproblemInstance> random_subproblem_instances(std::size_t count, std::size_t max_dim,
                                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SubproblemInstance> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, max_dim));
    SubproblemInstance inst;
    inst.b = uniform_vector(rng, d, -2.0, 2.0);
    inst.g = uniform_vector(rng, d, -1.0, 1.0);
    inst.xi = std::pow(10.0, uniform(rng, -4.0, 1.0));
    if (k % 10 == 9) {
      Eigen::Index j = 0;
      inst.b.minCoeff(&j);
      if (inst.b[j] >= 0.0) inst.b[j] = -inst.b[j] - 0.1;
      inst.g[j] = 0.0;
      inst.g *= 1e-2;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

CheckResult check_kkt() {
  const auto t0 = Clock::now();
  const AdaCubicConfig cfg;
  const auto instances = random_subproblem_instances(500, 10, 101);
  const double band = 4.0 * cfg.kappa_easy;

  std::size_t stat_fail = 0, curv_fail = 0, slack_fail = 0, hard = 0, interior = 0, boundary = 0;
  double worst_stat = 0.0, worst_curv = 0.0, worst_slack = 0.0;
  for (const auto& inst : instances) {
    const auto sol = root_finder(inst.b, inst.g, inst.xi, cfg);
    const auto res = kkt_residual(inst.b, inst.g, sol, inst.xi);
    const double stat = res.stationarity / (1.0 + inst.g.norm());
    const double slack_bound = sol.nu * inst.xi * band * (1.0 + 1e-12);
    worst_stat = std::max(worst_stat, stat);
    worst_curv = std::min(worst_curv, res.min_shifted_curvature);
    if (sol.nu > 0.0) worst_slack = std::max(worst_slack, std::abs(res.slackness) / (sol.nu * inst.xi));
    if (stat > 1e-6) ++stat_fail;
    if (res.min_shifted_curvature < -1e-10) ++curv_fail;
    if (std::abs(res.slackness) > slack_bound) ++slack_fail;
    switch (sol.status) {
      case SubproblemStatus::Interior: ++interior; break;
      case SubproblemStatus::Boundary: ++boundary; break;
      case SubproblemStatus::HardCase: ++hard; break;
    }
  }

  Verdict v;
  v.lines.push_back("instances=500 interior=" + std::to_string(interior) + " boundary=" + std::to_string(boundary) +
                    " hard_case=" + std::to_string(hard));
  v.expect(stat_fail == 0, "stationarity <= 1e-6 (1 + ||g||): worst " + sci(worst_stat) + ", violations " +
                               std::to_string(stat_fail));
  v.expect(curv_fail == 0, "min shifted curvature >= -1e-10: worst " + sci(worst_curv) + ", violations " +
                               std::to_string(curv_fail));
  v.expect(slack_fail == 0, "|nu (||s||^3 - xi)| <= 4 kappa_easy xi nu: worst relative " + sci(worst_slack) +
                                " vs " + sci(band) + ", violations " + std::to_string(slack_fail));
  return finish(1, "KKT conditions on random subproblems", std::move(v), {{"kkt suite", seconds_since(t0), 5.0}});
}

CheckResult check_duality() {
  const auto t0 = Clock::now();
  const AdaCubicConfig cfg;
  constexpr int kResolution = 200;
  constexpr int kProbes = 10000;
  const auto instances = random_subproblem_instances(100, 3, 202);
  Rng rng(203);

  std::size_t match_fail = 0, probe_fail = 0;
  double worst_match = 0.0, worst_gap = 0.0;
  for (const auto& inst : instances) {
    const auto sol = root_finder(inst.b, inst.g, inst.xi, cfg);
    const Vector ref = brute_force_subproblem_min(inst.b, inst.g, inst.xi, kResolution);
    const double r = std::cbrt(inst.xi);
    const double tol = 2.0 * r / kResolution;
    // With diagonal B the problem is symmetric under s_i -> -s_i wherever g_i = 0,
    // so in the exact hard case the minimizer is only unique up to that reflection.
    Vector mirrored = ref;
    for (Eigen::Index i = 0; i < ref.size(); ++i) {
      if (inst.g[i] == 0.0) mirrored[i] = -mirrored[i];
    }
    const double dev = std::min((sol.s - ref).lpNorm<Eigen::Infinity>(), (sol.s - mirrored).lpNorm<Eigen::Infinity>());
    worst_match = std::max(worst_match, dev / tol);
    if (dev > tol) ++match_fail;

    const double m_star = cubic_model(inst.b, inst.g, sol.nu, sol.s);
    const double slack = 1e-12 * (1.0 + std::abs(m_star));
    const double radius = 2.0 * std::max(r, sol.s.norm());
    for (int p = 0; p < kProbes; ++p) {
      // Half the probes spread over a wide ball, half hug the solution.
      const Vector s = p % 2 == 0 ? uniform_in_ball(rng, inst.b.size(), radius)
                                  : Vector(sol.s + uniform_in_ball(rng, inst.b.size(), 0.05 * r));
      const double gap = m_star - cubic_model(inst.b, inst.g, sol.nu, s);
      worst_gap = std::max(worst_gap, gap);
      if (gap > slack) ++probe_fail;
    }
  }

  Verdict v;
  v.lines.push_back("instances=100 resolution=200 probes_per_instance=10000");
  v.expect(match_fail == 0, "root_finder step within 2 xi^(1/3)/resolution of brute force: worst " +
                                sci(worst_match) + " of the tolerance, violations " + std::to_string(match_fail));
  v.expect(probe_fail == 0, "m_nu(s*) <= m_nu(s) on random probes: worst excess " + sci(worst_gap) +
                                ", violations " + std::to_string(probe_fail));
  return finish(2, "duality with the cubic model", std::move(v), {{"duality suite", seconds_since(t0), 30.0}});
}

CheckResult check_secular_calculus() {
  const AdaCubicConfig cfg;
  Rng rng(303);
  Verdict v;

  // Derivative against central differences.
  std::size_t deriv_fail = 0, mono_fail = 0, concave_fail = 0;
  double worst_deriv = 0.0, worst_concave = -INFINITY;
  for (int k = 0; k < 200; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 10));
    const Vector b = uniform_vector(rng, d, -2.0, 2.0);
    const Vector g = uniform_vector(rng, d, -1.0, 1.0);
    const double xi = std::pow(10.0, uniform(rng, -4.0, 1.0));
    const double r = std::cbrt(xi);
    const double pole = std::max(0.0, -2.0 * b.minCoeff() / r);
    const double nu = pole + uniform(rng, 0.1, 2.0) * 2.0 / r;
    const double h = 1e-6 * nu;
    const double fd = (phi(b, g, nu + h, r, xi) - phi(b, g, nu - h, r, xi)) / (2.0 * h);
    const double an = dphi_dnu(b, g, nu, r);
    const double rel = std::abs(fd - an) / std::abs(an);
    worst_deriv = std::max(worst_deriv, rel);
    if (rel > 1e-4) ++deriv_fail;

    // 50-point grid from just right of the pole.
    const double lo = pole + 1e-3 * 2.0 / r;
    const double hi = lo + uniform(rng, 1.0, 10.0) * 2.0 / r;
    const double step = (hi - lo) / 49.0;
    std::vector<double> vals(50);
    for (int i = 0; i < 50; ++i) vals[static_cast<std::size_t>(i)] = phi(b, g, lo + step * i, r, xi);
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (!(vals[i] > vals[i - 1])) ++mono_fail;
    }
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
      const double dd = (vals[i + 1] - 2.0 * vals[i] + vals[i - 1]) / (step * step);
      worst_concave = std::max(worst_concave, dd);
      if (dd > 1e-8) ++concave_fail;
    }
  }
  v.expect(deriv_fail == 0, "d phi/d nu vs central difference within 1e-4 relative (200 instances): worst " +
                                sci(worst_deriv));
  v.expect(mono_fail == 0, "phi strictly increasing on 50-point grids: violations " + std::to_string(mono_fail));
  v.expect(concave_fail == 0, "second divided differences <= 1e-8: max " + sci(worst_concave));

  // Newton behaviour on the KKT-suite instances.
  std::size_t not_monotone = 0, sign_flip = 0, slow = 0, counted = 0;
  int max_iters = 0;
  for (const auto& inst : random_subproblem_instances(500, 10, 101)) {
    std::vector<NewtonIterate> trace;
    const auto sol = root_finder(inst.b, inst.g, inst.xi, cfg, &trace);
    if (sol.status != SubproblemStatus::Boundary) continue;
    ++counted;
    const double r = std::cbrt(inst.xi);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i].nu < trace[i - 1].nu) ++not_monotone;
    }
    for (const auto& it : trace) {
      if (it.phi > 1e-12 / r) ++sign_flip;
    }
    max_iters = std::max(max_iters, sol.newton_iters);
    if (sol.newton_iters > 25) ++slow;
  }
  v.lines.push_back("boundary instances from the KKT suite: " + std::to_string(counted));
  v.expect(not_monotone == 0, "Newton iterates nondecreasing in nu: violations " + std::to_string(not_monotone));
  v.expect(sign_flip == 0, "phi <= 0 along the Newton path: violations " + std::to_string(sign_flip));
  v.expect(slow == 0, "converged to kappa_easy in <= 25 iterations: max " + std::to_string(max_iters));
  return finish(3, "secular equation calculus", std::move(v));
}

CheckResult check_hutchinson() {
  Rng rng(404);
  Verdict v;

  double worst_diag = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 10));
    const Vector diag = uniform_vector(rng, d, -5.0, 5.0);
    const auto est = hutchinson_diag([&](const Vector& x) { return Vector(diag.cwiseProduct(x)); },
                                     static_cast<std::size_t>(d), 1, rng);
    worst_diag = std::max(worst_diag, (est.b - diag).lpNorm<Eigen::Infinity>());
  }
  v.expect(worst_diag <= 1e-12, "diagonal Hessians recovered with one probe: max error " + sci(worst_diag));

  double worst_exh = 0.0;
  for (Eigen::Index d = 1; d <= 4; ++d) {
    for (int k = 0; k < 10; ++k) {
      const Matrix h = random_symmetric(rng, d);
      const auto est = hutchinson_exhaustive([&](const Vector& x) { return Vector(h * x); },
                                             static_cast<std::size_t>(d));
      worst_exh = std::max(worst_exh, (est.b - h.diagonal()).lpNorm<Eigen::Infinity>());
    }
  }
  v.expect(worst_exh <= 1e-12, "exhaustive sign average equals diag(H) for d <= 4: max error " + sci(worst_exh));

  const Matrix h = random_symmetric(rng, 6);
  std::vector<double> medians;
  std::string listing;
  for (const int s : {1, 4, 16}) {
    Rng trial_rng(405);
    std::vector<double> dev;
    dev.reserve(1000);
    for (int t = 0; t < 1000; ++t) {
      const auto est = hutchinson_diag([&](const Vector& x) { return Vector(h * x); }, 6, s, trial_rng);
      dev.push_back((est.b - h.diagonal()).lpNorm<Eigen::Infinity>());
    }
    medians.push_back(quantile(dev, 0.5));
    listing += " S=" + std::to_string(s) + ":" + sci(medians.back());
  }
  v.expect(medians[0] > medians[1] && medians[1] > medians[2],
           "median ||b - diag(H)||_inf strictly decreasing (1000 trials):" + listing);
  return finish(4, "Hutchinson diagonal estimator", std::move(v));
}

CheckResult check_model_decrease() {
  const AdaCubicConfig cfg;
  std::size_t fails = 0;
  double worst = -INFINITY;
  for (const auto& inst : random_subproblem_instances(500, 10, 101)) {
    const auto sol = root_finder(inst.b, inst.g, inst.xi, cfg);
    const double n3 = std::pow(sol.s.norm(), 3);
    const double excess = cubic_model(inst.b, inst.g, sol.nu, sol.s) + sol.nu / 12.0 * n3;
    worst = std::max(worst, excess);
    if (excess > 1e-10) ++fails;
  }
  Verdict v;
  v.expect(fails == 0, "g's + s'Bs/2 + (nu/6)||s||^3 <= -(nu/12)||s||^3 + 1e-10 on 500 instances: max excess " +
                           sci(worst));
  return finish(5, "guaranteed model decrease", std::move(v));
}

CheckResult check_convergence() {
  Verdict v;
  std::vector<TimedSection> timings;
  const AdaCubicConfig cfg;

  {
    const auto t0 = Clock::now();
    Vector diag(10);
    for (int i = 0; i < 10; ++i) diag[i] = i + 1.0;
    const auto obj = make_quadratic(diag, Vector::Ones(10));
    RunOptions opts;
    opts.max_iters = 5;
    opts.stop_grad_norm = 1e-10;
    const auto traj = run(*obj, Vector::Zero(10), cfg, opts);
    const double gn = obj->grad(traj.final_x).norm();
    timings.push_back({"quadratic", seconds_since(t0), 10.0});
    v.expect(gn <= 1e-10, "(a) quadratic d=10: ||g|| = " + sci(gn) + " after " + std::to_string(traj.records.size()) +
                              " iterations (limit 5)");
  }
  {
    const auto t0 = Clock::now();
    const auto obj = make_rosenbrock(2);
    RunOptions opts;
    opts.max_iters = 500;
    opts.stop_grad_norm = 1e-6;
    Vector x0(2);
    x0 << -1.2, 1.0;
    const auto traj = run(*obj, x0, cfg, opts);
    const double gn = obj->grad(traj.final_x).norm();
    const double dist = (traj.final_x - Vector::Ones(2)).norm();
    timings.push_back({"rosenbrock", seconds_since(t0), 10.0});
    v.expect(gn <= 1e-6 && dist <= 1e-4, "(b) rosenbrock d=2: ||g|| = " + sci(gn) + ", ||x - 1|| = " + sci(dist) +
                                             ", f = " + sci(obj->eval(traj.final_x)) + " after " +
                                             std::to_string(traj.records.size()) + " iterations (limit 500)");
  }
  {
    const auto t0 = Clock::now();
    const auto obj = make_saddle();
    RunOptions opts;
    opts.max_iters = 100;
    const auto traj = run(*obj, Vector::Zero(2), cfg, opts);
    const double f = obj->eval(traj.final_x);
    const bool escaped_by_hard_case =
        !traj.records.empty() && traj.records.front().subproblem_status == SubproblemStatus::HardCase;
    timings.push_back({"saddle", seconds_since(t0), 10.0});
    v.expect(f <= -0.24, "(c) saddle from the origin: f = " + sci(f) + ", first step " +
                             std::string(escaped_by_hard_case ? "hard_case" : "not hard_case"));
  }
  {
    const auto t0 = Clock::now();
    const auto obj = logistic_objective();
    const auto traj = logistic_run();
    const double gn = obj->grad(traj.final_x).norm();
    bool decreasing = true;
    for (const auto& r : traj.records) {
      if (r.accepted && !(r.loss_after < r.loss_before)) decreasing = false;
    }
    timings.push_back({"logistic", seconds_since(t0), 10.0});
    v.expect(decreasing, "(d) logistic n=200 d=5: loss strictly decreasing over accepted iterations");
    v.expect(gn <= 1e-6, "(d) logistic: ||g|| = " + sci(gn) + " after " + std::to_string(traj.records.size()) +
                             " iterations (limit 300)");
  }
  return finish(6, "convergence with default hyperparameters", std::move(v), std::move(timings));
}

CheckResult check_rate_trend() {
  const auto traj = logistic_run();
  std::vector<double> lx, ly;
  double best = INFINITY;
  for (const auto& r : traj.records) {
    best = std::min(best, r.grad_norm);
    if (r.iteration >= 10 && r.iteration <= 200) {
      lx.push_back(std::log(static_cast<double>(r.iteration)));
      ly.push_back(std::log(best));
    }
  }
  Verdict v;
  if (lx.size() < 3) {
    v.expect(false, "fewer than 3 iterations inside [10, 200] (run length " + std::to_string(traj.records.size()) + ")");
    return finish(7, "gradient-norm rate trend", std::move(v));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  v.lines.push_back("points used: " + std::to_string(lx.size()) + " (run stops at ||g|| <= 1e-6 after " +
                    std::to_string(traj.records.size()) + " iterations)");
  v.expect(slope <= -0.3, "log-log slope of min-so-far ||g|| = " + sci(slope) + " (limit -0.3)");
  return finish(7, "gradient-norm rate trend", std::move(v));
}

CheckResult check_determinism() {
  Verdict v;
  const auto obj = logistic_objective();
  AdaCubicConfig cfg;
  cfg.rng_seed = 11;
  RunOptions opts;
  opts.max_iters = 60;
  opts.batch_size = 32;
  const auto csv = [&] {
    std::ostringstream out;
    write_trajectory_csv(out, run(*obj, Vector::Zero(5), cfg, opts));
    return out.str();
  };
  v.expect(csv() == csv(), "mini-batch AdaCubic trajectory CSV identical across two seeded runs");

  const auto grid = [] {
    ExperimentConfig ec = parse_experiment_config(
        "[run]\nseeds = 1, 2\nmax_iters = 40\nbatch_size = 50\nloss_threshold = 0.5\n"
        "[problem.logit]\ntype = logistic\n"
        "[problem.bowl]\ntype = quadratic\ndiag = 1, 2, 3\ng0 = 1, -1, 0.5\n"
        "[optimizer.ac]\ntype = adacubic\n"
        "[optimizer.sgd]\ntype = sgd\nlr = 0.1\n");
    const auto res = run_experiment(ec);
    std::ostringstream out;
    for (const auto& r : res.runs) write_trajectory_csv(out, r.trajectory);
    write_runs_csv(out, res.runs);
    write_summary_csv(out, res.summary);
    return out.str();
  };
  v.expect(grid() == grid(), "experiment grid CSVs identical across two invocations");
  return finish(8, "determinism", std::move(v));
}

CheckResult check_baseline() {
  Verdict v;
  const double f_star = logistic_optimum();
  const double threshold = f_star + 1e-4;
  const auto obj = logistic_objective();

  const auto ada = logistic_run();
  RunOptions sgd_opts;
  sgd_opts.max_iters = 20000;
  const auto sgd = run_sgd(*obj, Vector::Zero(5), SgdOptions{0.1, 0.0}, sgd_opts, 0);

  const auto ada_k = iterations_to_threshold(ada, threshold);
  const auto sgd_k = iterations_to_threshold(sgd, threshold);
  const auto show = [](const std::optional<std::size_t>& k) { return k ? std::to_string(*k) : std::string("never"); };
  v.lines.push_back("f* = " + format_double(f_star) + " (dense Newton), threshold f* + 1e-4");
  v.expect(ada_k && (!sgd_k || *ada_k <= *sgd_k),
           "iterations to threshold: adacubic " + show(ada_k) + ", sgd(lr=0.1) " + show(sgd_k));
  return finish(9, "baseline comparison against SGD", std::move(v));
}

std::vector<Check> all_checks() {
  return {check_kkt,         check_duality,   check_secular_calculus, check_hutchinson, check_model_decrease,
          check_convergence, check_rate_trend, check_determinism,     check_baseline};
}

void print_check(std::ostream& out, const CheckResult& r) {
  out << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << '\n';
  for (const auto& line : r.details) out << "    " << line << '\n';
}

bool run_verify_suite(std::ostream& out) {
  bool all = true;
  for (const auto& check : all_checks()) {
    const auto r = check();
    print_check(out, r);
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "some checks failed") << '\n';
  return all;
}

}  // namespace adacubic
