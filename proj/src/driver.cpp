#include "adacubic/driver.hpp"

#include <cmath>
#include <limits>

#include "adacubic/curvature.hpp"

namespace adacubic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw EvaluationError(std::string(what) + " is not finite");
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw EvaluationError(std::string(what) + " is not finite");
}

void check_run_inputs(const Objective& obj, const Vector& x0, const RunOptions& opts) {
  if (opts.max_iters == 0) throw ConfigError("run: max_iters must be >= 1");
  if (static_cast<std::size_t>(x0.size()) != obj.dim()) throw ConfigError("run: x0 has the wrong dimension");
  if (opts.stop_grad_norm && !(*opts.stop_grad_norm >= 0.0)) throw ConfigError("run: stop_grad_norm must be >= 0");
}

template <class Step>
Trajectory run_first_order(const Objective& obj, const Vector& x0, const RunOptions& opts,
                           std::uint64_t seed, Step&& step) {
  check_run_inputs(obj, x0, opts);
  Rng rng(seed);
  Trajectory traj{{}, x0, seed};
  Vector x = x0;
  for (std::size_t k = 0; k < opts.max_iters; ++k) {
    if (opts.stop_grad_norm && obj.grad(x).norm() <= *opts.stop_grad_norm) break;
    try {
      const Batch batch = draw_batch(rng, obj, opts.batch_size);
      StepRecord rec;
      rec.iteration = k;
      rec.loss_before = obj.eval(x, batch);
      rec.grad_norm = obj.grad(x, batch).norm();
      Vector next = step(x, batch);
      require_finite(next, "baseline iterate");
      rec.loss_after = obj.eval(next, batch);
      rec.step_norm = (next - x).norm();
      rec.rho = kNaN;
      rec.nu = kNaN;
      rec.xi = kNaN;
      rec.accepted = true;
      x = std::move(next);
      traj.records.push_back(rec);
    } catch (const Error& e) {
      traj.final_x = x;
      throw RunError(e.what(), std::move(traj));
    }
  }
  traj.final_x = x;
  return traj;
}

}  // namespace

bool is_degenerate_model_drop(double model_value_drop, double loss_before) {
  if (!(model_value_drop > 0.0) || !std::isfinite(model_value_drop)) return true;
  if (model_value_drop < std::numeric_limits<double>::min()) return true;
  return model_value_drop <= std::numeric_limits<double>::epsilon() * std::abs(loss_before);
}

std::optional<double> reduction_ratio(double loss_before, double loss_after, double model_value_drop) {
  if (is_degenerate_model_drop(model_value_drop, loss_before)) return std::nullopt;
  return (loss_before - loss_after) / model_value_drop;
}

StepOutcome adacubic_step(const Objective& obj, const Vector& x, const TrustRegionState& state,
                          const AdaCubicConfig& cfg, Rng& rng, std::optional<std::size_t> batch_size) {
  const Batch batch = draw_batch(rng, obj, batch_size);
  const double loss = obj.eval(x, batch);
  require_finite(loss, "loss");
  const Vector g = obj.grad(x, batch);
  require_finite(g, "gradient");
  const DiagonalCurvature curv = hutchinson_diag(
      [&](const Vector& v) { return obj.hvp(x, v, batch); }, obj.dim(), cfg.hutchinson_samples, rng);

  const SubproblemSolution sol = root_finder(curv.b, g, state.xi, cfg);
  const double step_norm = sol.s.norm();
  const double step_norm_cubed = step_norm * step_norm * step_norm;

  StepOutcome out{x, state, {}, false};
  StepRecord& rec = out.record;
  rec.iteration = state.iteration;
  rec.loss_before = loss;
  rec.grad_norm = g.norm();
  rec.nu = sol.nu;
  rec.xi = state.xi;
  rec.step_norm = step_norm;
  rec.subproblem_status = sol.status;
  out.state.iteration = state.iteration + 1;
  out.state.last_step_norm_cubed = step_norm_cubed;

  if (is_degenerate_model_drop(sol.model_decrease, loss)) {
    rec.loss_after = loss;
    rec.rho = kNaN;
    rec.status = IterationClass::Unsuccessful;
    rec.accepted = false;
    out.state.last_rho.reset();
    if (batch.is_full()) {
      out.terminal = true;
    } else {
      out.state.xi = std::max(cfg.alpha2 * step_norm_cubed, cfg.eps_m);
    }
    return out;
  }

  const Vector trial = x + sol.s;
  const double loss_after = obj.eval(trial, batch);
  const double ratio = (loss - loss_after) / sol.model_decrease;
  rec.loss_after = loss_after;
  rec.rho = ratio;
  rec.status = classify_iteration(ratio, cfg);  // throws on NaN
  rec.accepted = accept_step(ratio, cfg);
  if (rec.accepted) out.x = trial;
  out.state.xi = update_xi(state, ratio, step_norm_cubed, cfg);
  out.state.last_rho = ratio;
  return out;
}

Trajectory run(const Objective& obj, const Vector& x0, const AdaCubicConfig& cfg, const RunOptions& opts) {
  check_run_inputs(obj, x0, opts);
  cfg.validate();
  Rng rng(cfg.rng_seed);
  Trajectory traj{{}, x0, cfg.rng_seed};
  Vector x = x0;
  TrustRegionState state = TrustRegionState::initial(cfg);
  for (std::size_t k = 0; k < opts.max_iters; ++k) {
    try {
      if (opts.stop_grad_norm && obj.grad(x).norm() <= *opts.stop_grad_norm) break;
      StepOutcome out = adacubic_step(obj, x, state, cfg, rng, opts.batch_size);
      traj.records.push_back(out.record);
      x = std::move(out.x);
      state = out.state;
      if (out.terminal) break;
    } catch (const Error& e) {
      traj.final_x = x;
      throw RunError(e.what(), std::move(traj));
    }
  }
  traj.final_x = x;
  return traj;
}

Vector sgd_step(const Objective& obj, const Vector& x, SgdState& state, double lr, double momentum,
                const Batch& batch) {
  const Vector g = obj.grad(x, batch);
  require_finite(g, "gradient");
  if (state.velocity.size() != x.size()) state.velocity = Vector::Zero(x.size());
  state.velocity = momentum * state.velocity + g;
  return x - lr * state.velocity;
}

Vector adam_step(const Objective& obj, const Vector& x, AdamMoments& moments, double lr, double beta1,
                 double beta2, double eps, const Batch& batch) {
  const Vector g = obj.grad(x, batch);
  require_finite(g, "gradient");
  if (moments.m.size() != x.size()) moments.m = Vector::Zero(x.size());
  if (moments.v.size() != x.size()) moments.v = Vector::Zero(x.size());
  ++moments.t;
  moments.m = beta1 * moments.m + (1.0 - beta1) * g;
  moments.v = beta2 * moments.v + (1.0 - beta2) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, moments.t);
  const double c2 = 1.0 - std::pow(beta2, moments.t);
  const Vector m_hat = moments.m / c1;
  const Vector v_hat = moments.v / c2;
  return x - lr * m_hat.cwiseQuotient((v_hat.cwiseSqrt().array() + eps).matrix());
}

Trajectory run_sgd(const Objective& obj, const Vector& x0, const SgdOptions& sgd, const RunOptions& opts,
                   std::uint64_t seed) {
  if (!(sgd.lr > 0.0) || !(sgd.momentum >= 0.0 && sgd.momentum < 1.0))
    throw ConfigError("run_sgd: need lr > 0 and momentum in [0,1)");
  SgdState state;
  return run_first_order(obj, x0, opts, seed, [&](const Vector& x, const Batch& batch) {
    return sgd_step(obj, x, state, sgd.lr, sgd.momentum, batch);
  });
}

Trajectory run_adam(const Objective& obj, const Vector& x0, const AdamOptions& adam, const RunOptions& opts,
                    std::uint64_t seed) {
  if (!(adam.lr > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
      !(adam.eps > 0.0))
    throw ConfigError("run_adam: need lr > 0, beta1/beta2 in [0,1), eps > 0");
  AdamMoments moments;
  return run_first_order(obj, x0, opts, seed, [&](const Vector& x, const Batch& batch) {
    return adam_step(obj, x, moments, adam.lr, adam.beta1, adam.beta2, adam.eps, batch);
  });
}

}  // namespace adacubic
