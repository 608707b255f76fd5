#include <doctest.h>

#include <cmath>
#include <limits>

#include "adacubic/driver.hpp"
#include "adacubic/errors.hpp"

using namespace adacubic;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ObjectivePtr logistic(std::size_t n = 200) {
  const auto data = make_synthetic_logistic_data(n, 5, 0.5, 7);
  return make_logistic(data.features, data.labels, 1e-2);
}

}  // namespace

TEST_CASE("reduction ratio") {
  CHECK(*reduction_ratio(1.0, 0.5, 0.25) == doctest::Approx(2.0));
  CHECK(*reduction_ratio(1.0, 1.0, 0.5) == 0.0);
  CHECK(*reduction_ratio(1.0, 1.5, 0.5) < 0.0);
  CHECK_FALSE(reduction_ratio(1.0, 0.9, 0.0).has_value());
  CHECK_FALSE(reduction_ratio(1.0, 0.9, -1e-3).has_value());
  CHECK_FALSE(reduction_ratio(1.0, 0.9, 1e-17).has_value());
  CHECK_FALSE(reduction_ratio(1.0, 0.9, std::numeric_limits<double>::quiet_NaN()).has_value());
  CHECK(is_degenerate_model_drop(std::numeric_limits<double>::denorm_min(), 0.0));
  CHECK_FALSE(is_degenerate_model_drop(1e-10, 1.0));
}

TEST_CASE("interior step lands on the quadratic minimizer") {
  const auto q = make_quadratic(vec({1, 2}), vec({1, 1}));
  TrustRegionState st;
  st.xi = 1000.0;
  Rng rng(0);
  const auto out = adacubic_step(*q, vec({1, 1}), st, AdaCubicConfig{}, rng, std::nullopt);
  CHECK(out.x[0] == doctest::Approx(-1.0));
  CHECK(out.x[1] == doctest::Approx(-0.5));
  CHECK(out.record.nu == 0.0);
  CHECK(out.record.subproblem_status == SubproblemStatus::Interior);
  CHECK(out.record.accepted);
  CHECK(out.record.rho == doctest::Approx(1.0));
  CHECK(out.state.iteration == 1);
}

TEST_CASE("boundary step on an exact quadratic model is very successful") {
  const auto q = make_quadratic(vec({1, 2}), vec({0, 0}));
  TrustRegionState st;
  st.xi = 1e-3;
  Rng rng(0);
  const auto out = adacubic_step(*q, vec({3, -4}), st, AdaCubicConfig{}, rng, std::nullopt);
  CHECK(out.record.subproblem_status == SubproblemStatus::Boundary);
  CHECK(out.record.nu > 0.0);
  CHECK(out.record.rho >= 1.0);
  CHECK(out.record.status == IterationClass::VerySuccessful);
  CHECK(out.state.xi == doctest::Approx(std::max(2.5 * std::pow(out.record.step_norm, 3), 1e-3)));
}

TEST_CASE("saddle: first step follows negative curvature") {
  const auto s = make_saddle();
  Rng rng(0);
  const AdaCubicConfig cfg;
  const auto out = adacubic_step(*s, vec({0, 0}), TrustRegionState::initial(cfg), cfg, rng, std::nullopt);
  CHECK(out.record.subproblem_status == SubproblemStatus::HardCase);
  CHECK(out.x[0] == 0.0);
  CHECK(std::abs(out.x[1]) == doctest::Approx(1.0));
  CHECK(out.record.step_norm == doctest::Approx(1.0));
  CHECK(out.record.loss_after < out.record.loss_before);
  CHECK(out.record.accepted);
}

TEST_CASE("rejected iteration keeps x and shrinks xi") {
  // The loss jumps by one anywhere except the start, so every step looks like ascent.
  const Vector x0 = vec({2.0});
  ObjectiveCallbacks cb;
  cb.dim = 1;
  cb.eval = [x0](const Vector& x, const Batch&) { return 0.5 * x.squaredNorm() + (x == x0 ? 0.0 : 100.0); };
  cb.grad = [](const Vector& x, const Batch&) { return x; };
  cb.hvp = [](const Vector&, const Vector& v, const Batch&) { return v; };
  const auto obj = make_objective(cb);

  TrustRegionState st;
  st.xi = 0.5;
  Rng rng(0);
  const AdaCubicConfig cfg;
  const auto out = adacubic_step(*obj, x0, st, cfg, rng, std::nullopt);
  CHECK_FALSE(out.record.accepted);
  CHECK(out.record.status == IterationClass::Unsuccessful);
  CHECK(out.x == x0);
  CHECK(out.record.loss_after > out.record.loss_before);
  CHECK(out.state.xi == doctest::Approx(std::max(cfg.alpha2 * std::pow(out.record.step_norm, 3), cfg.eps_m)));
  CHECK(out.record.current_loss() == out.record.loss_before);
}

TEST_CASE("run: quadratic converges in a few iterations") {
  Vector diag(10);
  for (int i = 0; i < 10; ++i) diag[i] = i + 1.0;
  const auto q = make_quadratic(diag, Vector::Ones(10));
  RunOptions opts;
  opts.max_iters = 50;
  opts.stop_grad_norm = 1e-10;
  const auto traj = run(*q, Vector::Zero(10), AdaCubicConfig{}, opts);
  CHECK(traj.records.size() <= 3);
  CHECK(q->grad(traj.final_x).norm() <= 1e-10);
  for (std::size_t i = 0; i < traj.records.size(); ++i) CHECK(traj.records[i].iteration == i);
}

TEST_CASE("run: argument checks") {
  const auto q = make_quadratic(vec({1}), vec({1}));
  RunOptions opts;
  opts.max_iters = 0;
  CHECK_THROWS_AS(run(*q, vec({0}), AdaCubicConfig{}, opts), ConfigError);
  opts.max_iters = 5;
  CHECK_THROWS_AS(run(*q, vec({0, 0}), AdaCubicConfig{}, opts), ConfigError);
  AdaCubicConfig bad;
  bad.eta1 = 2.0;
  CHECK_THROWS_AS(run(*q, vec({0}), bad, opts), ConfigError);
}

TEST_CASE("run: oracle failure carries the partial trajectory") {
  ObjectiveCallbacks cb;
  cb.dim = 1;
  cb.eval = [](const Vector& x, const Batch&) {
    if (x[0] < 0.5) throw EvaluationError("domain");
    return 0.5 * (x[0] - 1.0) * (x[0] - 1.0) - std::log(x[0]);
  };
  cb.grad = [](const Vector& x, const Batch&) { return vec({x[0] - 1.0 - 1.0 / x[0]}); };
  cb.hvp = [](const Vector& x, const Vector& v, const Batch&) { return Vector(v * (1.0 + 1.0 / (x[0] * x[0]))); };
  const auto obj = make_objective(cb);
  RunOptions opts;
  opts.max_iters = 50;
  AdaCubicConfig cfg;
  cfg.xi_init = 1000.0;
  try {
    run(*obj, vec({0.45}), cfg, opts);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(e.partial().final_x[0] == 0.45);
  }
}

TEST_CASE("accepted iterates strictly decrease the full-batch loss") {
  const auto obj = logistic();
  RunOptions opts;
  opts.max_iters = 100;
  opts.stop_grad_norm = 1e-8;
  const auto traj = run(*obj, Vector::Zero(5), AdaCubicConfig{}, opts);
  double prev = INFINITY;
  for (const auto& r : traj.records) {
    CHECK(r.xi >= 1e-6);
    CHECK(r.accepted == (r.rho >= 0.05));
    if (r.accepted) {
      CHECK(r.loss_after < r.loss_before);
      CHECK(r.loss_after < prev);
      prev = r.loss_after;
    }
  }
}

TEST_CASE("rosenbrock: monotone progress from the standard start") {
  const auto rb = make_rosenbrock(2);
  RunOptions opts;
  opts.max_iters = 200;
  const auto traj = run(*rb, vec({-1.2, 1.0}), AdaCubicConfig{}, opts);
  double best = INFINITY;
  for (const auto& r : traj.records) {
    CHECK(r.current_loss() <= std::min(best, r.loss_before));
    best = std::min(best, r.current_loss());
  }
  CHECK(rb->eval(traj.final_x) < 0.25 * rb->eval(vec({-1.2, 1.0})));
}

TEST_CASE("seeded runs are bit-identical") {
  const auto obj = logistic();
  AdaCubicConfig cfg;
  cfg.rng_seed = 5;
  cfg.hutchinson_samples = 2;
  RunOptions opts;
  opts.max_iters = 40;
  opts.batch_size = 16;
  const auto a = run(*obj, Vector::Zero(5), cfg, opts), b = run(*obj, Vector::Zero(5), cfg, opts);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].loss_before == b.records[i].loss_before);
    CHECK(a.records[i].rho == b.records[i].rho);
    CHECK(a.records[i].xi == b.records[i].xi);
  }
  CHECK(a.final_x == b.final_x);
  cfg.rng_seed = 6;
  CHECK(run(*obj, Vector::Zero(5), cfg, opts).final_x != a.final_x);
}

TEST_CASE("degenerate zero step terminates a full-batch run") {
  const auto q = make_quadratic(vec({1, 1}), vec({0, 0}));
  RunOptions opts;
  opts.max_iters = 10;
  const auto traj = run(*q, Vector::Zero(2), AdaCubicConfig{}, opts);
  REQUIRE(traj.records.size() == 1);
  CHECK(std::isnan(traj.records[0].rho));
  CHECK_FALSE(traj.records[0].accepted);
  CHECK(traj.records[0].status == IterationClass::Unsuccessful);
}

TEST_CASE("sgd and adam steps") {
  const auto q = make_quadratic(vec({1, 1}), vec({0, 0}));
  SgdState sgd;
  const Vector x = vec({1, -2});
  const Vector xs = sgd_step(*q, x, sgd, 0.1, 0.0, Batch::full());
  CHECK(xs[0] == doctest::Approx(0.9));
  CHECK(xs[1] == doctest::Approx(-1.8));

  SgdState mom;
  const Vector m1 = sgd_step(*q, x, mom, 0.1, 0.9, Batch::full());
  const Vector m2 = sgd_step(*q, m1, mom, 0.1, 0.9, Batch::full());
  CHECK(m2[0] == doctest::Approx(m1[0] - 0.1 * (0.9 * 1.0 + m1[0])));

  AdamMoments am;
  const Vector xa = adam_step(*q, x, am, 1e-3, 0.9, 0.999, 1e-8, Batch::full());
  CHECK(xa[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
  CHECK(xa[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-6));
  CHECK(am.t == 1);

  AdamMoments still;
  const Vector z = Vector::Zero(2);
  CHECK(adam_step(*q, z, still, 1e-3, 0.9, 0.999, 1e-8, Batch::full()) == z);
}

TEST_CASE("baseline runs log their steps") {
  const auto obj = logistic(100);
  RunOptions opts;
  opts.max_iters = 30;
  opts.batch_size = 10;
  const auto s = run_sgd(*obj, Vector::Zero(5), SgdOptions{}, opts, 3);
  const auto a = run_adam(*obj, Vector::Zero(5), AdamOptions{}, opts, 3);
  CHECK(s.records.size() == 30);
  CHECK(a.records.size() == 30);
  CHECK(s.records.back().accepted);
  CHECK_FALSE(s.records.back().status.has_value());
  CHECK(std::isnan(s.records.back().rho));
  CHECK(obj->eval(s.final_x) < obj->eval(Vector::Zero(5)));
  CHECK(run_sgd(*obj, Vector::Zero(5), SgdOptions{}, opts, 3).final_x == s.final_x);
}
