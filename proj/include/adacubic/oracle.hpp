#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adacubic/random.hpp"
#include "adacubic/types.hpp"

namespace adacubic {

/// A subset of sample ids, or the whole dataset.
class Batch {
 public:
  static Batch full() { return Batch{}; }
  static Batch of(std::vector<std::size_t> indices);

  bool is_full() const { return full_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  /// Number of samples the batch covers given a dataset of `num_samples`.
  std::size_t size(std::size_t num_samples) const { return full_ ? num_samples : indices_.size(); }

  /// Throws ConfigError unless indices are distinct and inside [0, num_samples).
  void validate(std::size_t num_samples) const;

 private:
  Batch() = default;
  bool full_ = true;
  std::vector<std::size_t> indices_;
};

/// Loss, gradient and Hessian-vector product of f(x) = (1/n) sum_i f_i(x),
/// each optionally restricted to a batch. Implementations hold no mutable
/// state, so concurrent evaluation at distinct points is safe.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  /// 0 means deterministic: only Batch::full() is accepted.
  virtual std::size_t num_samples() const { return 0; }
  virtual std::string name() const = 0;

  virtual double eval(const Vector& x, const Batch& batch) const = 0;
  virtual Vector grad(const Vector& x, const Batch& batch) const = 0;
  virtual Vector hvp(const Vector& x, const Vector& v, const Batch& batch) const = 0;
  /// Full-batch diag of the Hessian when available in closed form (tests only).
  virtual std::optional<Vector> exact_diag_hessian(const Vector& /*x*/) const { return std::nullopt; }

  double eval(const Vector& x) const { return eval(x, Batch::full()); }
  Vector grad(const Vector& x) const { return grad(x, Batch::full()); }
  Vector hvp(const Vector& x, const Vector& v) const { return hvp(x, v, Batch::full()); }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// sqrt(machine epsilon) * (1 + ||x||).
double default_fd_step(const Vector& x);

/// Central difference of the gradient along v: (grad(x+hv) - grad(x-hv)) / 2h.
/// Throws EvaluationError when the result is not finite.
Vector finite_difference_hvp(const Objective& obj, const Vector& x, const Vector& v, double h,
                             const Batch& batch);
Vector finite_difference_hvp(const Objective& obj, const Vector& x, const Vector& v,
                             const Batch& batch);

/// Callback bundle; a missing `hvp` falls back to finite differences of `grad`.
struct ObjectiveCallbacks {
  std::string name = "callback";
  std::size_t dim = 0;
  std::size_t num_samples = 0;
  std::function<double(const Vector&, const Batch&)> eval;
  std::function<Vector(const Vector&, const Batch&)> grad;
  std::function<Vector(const Vector&, const Vector&, const Batch&)> hvp;
  std::function<Vector(const Vector&)> exact_diag_hessian;
};

ObjectivePtr make_objective(ObjectiveCallbacks callbacks);

/// f(x) = 1/2 x^T Diag(diag) x + g0^T x.
ObjectivePtr make_quadratic(const Vector& diag, const Vector& g0);
/// Chained Rosenbrock: sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2, d >= 2.
ObjectivePtr make_rosenbrock(std::size_t d);
/// f(x, y) = x^2/2 - y^2/2 + y^4/4. Strict saddle at 0, minima (0, +-1) with f = -1/4.
ObjectivePtr make_saddle();
/// Mean logistic loss over rows of `features` with +-1 `labels`, plus (l2/2)||w||^2
/// in every per-sample term.
ObjectivePtr make_logistic(const Matrix& features, const Vector& labels, double l2);

struct LogisticData {
  Matrix features;  // n x d
  Vector labels;    // n, entries +-1
};

/// One row per sample, comma separated, label (+-1) in the last column.
/// Lines starting with '#' and a non-numeric header line are skipped.
LogisticData load_logistic_csv(const std::string& path);

/// Gaussian features, labels sign(a^T w_true + noise * z) with a seeded stream.
LogisticData make_synthetic_logistic_data(std::size_t n, std::size_t d, double noise,
                                          std::uint64_t seed);

/// Batch of `batch_size` distinct samples drawn without replacement, or the full
/// batch when the objective is deterministic, `batch_size` is absent, or it
/// covers the whole dataset.
Batch draw_batch(Rng& rng, const Objective& obj, std::optional<std::size_t> batch_size);

/// Reference minimizer of g^T s + 1/2 s^T Diag(b) s over ||s|| <= xi^{1/3}:
/// exhaustive grid with `resolution` cells per axis, then a projected-gradient
/// polish from the best grid point. Independent of the dual solver.
/// d <= 3 (UnsupportedDimension otherwise), resolution >= 200.
Vector brute_force_subproblem_min(const Vector& b, const Vector& g, double xi, int resolution);

}  // namespace adacubic
