#include "adacubic/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "adacubic/errors.hpp"

namespace adacubic {

Batch Batch::of(std::vector<std::size_t> indices) {
  Batch b;
  b.full_ = false;
  b.indices_ = std::move(indices);
  return b;
}

void Batch::validate(std::size_t num_samples) const {
  if (full_) return;
  if (indices_.empty()) throw ConfigError("batch: empty index list");
  std::vector<std::size_t> sorted = indices_;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= num_samples) throw ConfigError("batch: sample index out of range");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("batch: duplicate sample index");
}

double default_fd_step(const Vector& x) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + x.norm());
}

Vector finite_difference_hvp(const Objective& obj, const Vector& x, const Vector& v, double h,
                             const Batch& batch) {
  if (!(h > 0.0)) throw ConfigError("finite_difference_hvp: h must be positive");
  if (!x.allFinite() || !v.allFinite()) throw EvaluationError("finite_difference_hvp: non-finite input");
  Vector hv = (obj.grad(x + h * v, batch) - obj.grad(x - h * v, batch)) / (2.0 * h);
  if (!hv.allFinite())
    throw EvaluationError("finite_difference_hvp: non-finite result (ill-conditioned h or overflow)");
  return hv;
}

Vector finite_difference_hvp(const Objective& obj, const Vector& x, const Vector& v,
                             const Batch& batch) {
  return finite_difference_hvp(obj, x, v, default_fd_step(x), batch);
}

namespace {

void require_dim(const Vector& x, std::size_t d, const char* who) {
  if (static_cast<std::size_t>(x.size()) != d)
    throw ConfigError(std::string(who) + ": dimension mismatch (expected " + std::to_string(d) +
                      ", got " + std::to_string(x.size()) + ")");
}

void require_full(const Batch& batch, const char* who) {
  if (!batch.is_full()) throw ConfigError(std::string(who) + ": deterministic objective takes only the full batch");
}

class CallbackObjective final : public Objective {
 public:
  explicit CallbackObjective(ObjectiveCallbacks cb) : cb_(std::move(cb)) {
    if (cb_.dim == 0) throw ConfigError("make_objective: dim must be positive");
    if (!cb_.eval || !cb_.grad) throw ConfigError("make_objective: eval and grad are required");
  }
  std::size_t dim() const override { return cb_.dim; }
  std::size_t num_samples() const override { return cb_.num_samples; }
  std::string name() const override { return cb_.name; }
  double eval(const Vector& x, const Batch& batch) const override {
    require_dim(x, cb_.dim, "objective eval");
    return cb_.eval(x, batch);
  }
  Vector grad(const Vector& x, const Batch& batch) const override {
    require_dim(x, cb_.dim, "objective grad");
    return cb_.grad(x, batch);
  }
  Vector hvp(const Vector& x, const Vector& v, const Batch& batch) const override {
    require_dim(x, cb_.dim, "objective hvp");
    require_dim(v, cb_.dim, "objective hvp");
    if (cb_.hvp) return cb_.hvp(x, v, batch);
    return finite_difference_hvp(*this, x, v, batch);
  }
  std::optional<Vector> exact_diag_hessian(const Vector& x) const override {
    if (!cb_.exact_diag_hessian) return std::nullopt;
    return cb_.exact_diag_hessian(x);
  }

 private:
  ObjectiveCallbacks cb_;
};

class Quadratic final : public Objective {
 public:
  Quadratic(Vector diag, Vector g0) : diag_(std::move(diag)), g0_(std::move(g0)) {
    if (diag_.size() == 0) throw ConfigError("make_quadratic: empty diagonal");
    require_dim(g0_, static_cast<std::size_t>(diag_.size()), "make_quadratic");
  }
  std::size_t dim() const override { return static_cast<std::size_t>(diag_.size()); }
  std::string name() const override { return "quadratic"; }
  double eval(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    return 0.5 * x.dot(diag_.cwiseProduct(x)) + g0_.dot(x);
  }
  Vector grad(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    return diag_.cwiseProduct(x) + g0_;
  }
  Vector hvp(const Vector& x, const Vector& v, const Batch& batch) const override {
    check(x, batch);
    require_dim(v, dim(), "quadratic hvp");
    return diag_.cwiseProduct(v);
  }
  std::optional<Vector> exact_diag_hessian(const Vector&) const override { return diag_; }

 private:
  void check(const Vector& x, const Batch& batch) const {
    require_dim(x, dim(), "quadratic");
    require_full(batch, "quadratic");
  }
  Vector diag_;
  Vector g0_;
};

class Rosenbrock final : public Objective {
 public:
  explicit Rosenbrock(std::size_t d) : d_(d) {
    if (d < 2) throw ConfigError("make_rosenbrock: d must be >= 2");
  }
  std::size_t dim() const override { return d_; }
  std::string name() const override { return "rosenbrock"; }
  double eval(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    double f = 0.0;
    for (std::size_t i = 0; i + 1 < d_; ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double c = 1.0 - x[i];
      f += 100.0 * a * a + c * c;
    }
    return f;
  }
  Vector grad(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    Vector g = Vector::Zero(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i + 1 < d_; ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * a;
    }
    return g;
  }
  Vector hvp(const Vector& x, const Vector& v, const Batch& batch) const override {
    check(x, batch);
    require_dim(v, d_, "rosenbrock hvp");
    Vector hv = Vector::Zero(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i + 1 < d_; ++i) {
      const double hii = 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
      const double hij = -400.0 * x[i];
      hv[i] += hii * v[i] + hij * v[i + 1];
      hv[i + 1] += hij * v[i] + 200.0 * v[i + 1];
    }
    return hv;
  }
  std::optional<Vector> exact_diag_hessian(const Vector& x) const override {
    require_dim(x, d_, "rosenbrock");
    Vector h = Vector::Zero(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i + 1 < d_; ++i) {
      h[i] += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
      h[i + 1] += 200.0;
    }
    return h;
  }

 private:
  void check(const Vector& x, const Batch& batch) const {
    require_dim(x, d_, "rosenbrock");
    require_full(batch, "rosenbrock");
  }
  std::size_t d_;
};

class Saddle final : public Objective {
 public:
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "saddle"; }
  double eval(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    const double y2 = x[1] * x[1];
    return 0.5 * x[0] * x[0] - 0.5 * y2 + 0.25 * y2 * y2;
  }
  Vector grad(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    Vector g(2);
    g << x[0], -x[1] + x[1] * x[1] * x[1];
    return g;
  }
  Vector hvp(const Vector& x, const Vector& v, const Batch& batch) const override {
    check(x, batch);
    require_dim(v, 2, "saddle hvp");
    Vector hv(2);
    hv << v[0], (-1.0 + 3.0 * x[1] * x[1]) * v[1];
    return hv;
  }
  std::optional<Vector> exact_diag_hessian(const Vector& x) const override {
    require_dim(x, 2, "saddle");
    Vector h(2);
    h << 1.0, -1.0 + 3.0 * x[1] * x[1];
    return h;
  }

 private:
  static void check(const Vector& x, const Batch& batch) {
    require_dim(x, 2, "saddle");
    require_full(batch, "saddle");
  }
};

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

class Logistic final : public Objective {
 public:
  Logistic(Matrix features, Vector labels, double l2)
      : a_(std::move(features)), y_(std::move(labels)), l2_(l2) {
    if (a_.rows() == 0 || a_.cols() == 0) throw ConfigError("make_logistic: empty feature matrix");
    if (y_.size() != a_.rows()) throw ConfigError("make_logistic: labels/features row mismatch");
    if (!(l2 >= 0.0)) throw ConfigError("make_logistic: l2 must be nonnegative");
    for (Eigen::Index i = 0; i < y_.size(); ++i)
      if (y_[i] != 1.0 && y_[i] != -1.0) throw ConfigError("make_logistic: labels must be +-1");
  }
  std::size_t dim() const override { return static_cast<std::size_t>(a_.cols()); }
  std::size_t num_samples() const override { return static_cast<std::size_t>(a_.rows()); }
  std::string name() const override { return "logistic"; }

  double eval(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    double sum = 0.0;
    const std::size_t m = for_each(batch, [&](Eigen::Index i) {
      sum += softplus(-y_[i] * a_.row(i).dot(x));
    });
    return sum / static_cast<double>(m) + 0.5 * l2_ * x.squaredNorm();
  }
  Vector grad(const Vector& x, const Batch& batch) const override {
    check(x, batch);
    Vector g = Vector::Zero(x.size());
    const std::size_t m = for_each(batch, [&](Eigen::Index i) {
      const double margin = y_[i] * a_.row(i).dot(x);
      g -= (y_[i] * sigmoid(-margin)) * a_.row(i).transpose();
    });
    return g / static_cast<double>(m) + l2_ * x;
  }
  Vector hvp(const Vector& x, const Vector& v, const Batch& batch) const override {
    check(x, batch);
    require_dim(v, dim(), "logistic hvp");
    Vector hv = Vector::Zero(x.size());
    const std::size_t m = for_each(batch, [&](Eigen::Index i) {
      const double p = sigmoid(a_.row(i).dot(x));
      hv += (p * (1.0 - p) * a_.row(i).dot(v)) * a_.row(i).transpose();
    });
    return hv / static_cast<double>(m) + l2_ * v;
  }
  std::optional<Vector> exact_diag_hessian(const Vector& x) const override {
    require_dim(x, dim(), "logistic");
    Vector h = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      const double p = sigmoid(a_.row(i).dot(x));
      h += (p * (1.0 - p)) * a_.row(i).transpose().cwiseAbs2();
    }
    return h / static_cast<double>(a_.rows()) + Vector::Constant(x.size(), l2_);
  }

 private:
  void check(const Vector& x, const Batch& batch) const {
    require_dim(x, dim(), "logistic");
    batch.validate(num_samples());
  }
  template <class F>
  std::size_t for_each(const Batch& batch, F&& f) const {
    if (batch.is_full()) {
      for (Eigen::Index i = 0; i < a_.rows(); ++i) f(i);
      return static_cast<std::size_t>(a_.rows());
    }
    for (std::size_t i : batch.indices()) f(static_cast<Eigen::Index>(i));
    return batch.indices().size();
  }

  Matrix a_;
  Vector y_;
  double l2_;
};

}  // namespace

ObjectivePtr make_objective(ObjectiveCallbacks callbacks) {
  return std::make_shared<CallbackObjective>(std::move(callbacks));
}

ObjectivePtr make_quadratic(const Vector& diag, const Vector& g0) {
  return std::make_shared<Quadratic>(diag, g0);
}

ObjectivePtr make_rosenbrock(std::size_t d) { return std::make_shared<Rosenbrock>(d); }

ObjectivePtr make_saddle() { return std::make_shared<Saddle>(); }

ObjectivePtr make_logistic(const Matrix& features, const Vector& labels, double l2) {
  return std::make_shared<Logistic>(features, labels, l2);
}

LogisticData load_logistic_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_logistic_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw ConfigError("load_logistic_csv: non-numeric cell at line " + std::to_string(line_no));
    }
    if (row.size() < 2) throw ConfigError("load_logistic_csv: need >= 1 feature plus a label at line " + std::to_string(line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("load_logistic_csv: ragged row at line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("load_logistic_csv: no samples in " + path);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size() - 1);
  LogisticData data{Matrix(n, d), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = rows[i][j];
    const double label = rows[i][d];
    if (label != 1.0 && label != -1.0)
      throw ConfigError("load_logistic_csv: label must be +-1 (row " + std::to_string(i + 1) + ")");
    data.labels[i] = label;
  }
  return data;
}

LogisticData make_synthetic_logistic_data(std::size_t n, std::size_t d, double noise,
                                          std::uint64_t seed) {
  if (n == 0 || d == 0) throw ConfigError("make_synthetic_logistic_data: n and d must be positive");
  Rng rng(seed);
  Vector w_true(static_cast<Eigen::Index>(d));
  for (auto& w : w_true) w = standard_normal(rng);
  LogisticData data{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)),
                    Vector(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) data.features(i, j) = standard_normal(rng);
    const double score = data.features.row(i).dot(w_true) + noise * standard_normal(rng);
    data.labels[i] = score >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

Batch draw_batch(Rng& rng, const Objective& obj, std::optional<std::size_t> batch_size) {
  const std::size_t n = obj.num_samples();
  if (n == 0 || !batch_size || *batch_size >= n) return Batch::full();
  if (*batch_size == 0) throw ConfigError("draw_batch: batch size must be positive");
  return Batch::of(sample_without_replacement(rng, n, *batch_size));
}

Vector brute_force_subproblem_min(const Vector& b, const Vector& g, double xi, int resolution) {
  const Eigen::Index d = b.size();
  if (d < 1 || d > 3) throw UnsupportedDimension("brute_force_subproblem_min: d must be 1..3");
  if (g.size() != d) throw ConfigError("brute_force_subproblem_min: b/g size mismatch");
  if (resolution < 200) throw ConfigError("brute_force_subproblem_min: resolution must be >= 200");
  if (!(xi > 0.0)) throw ConfigError("brute_force_subproblem_min: xi must be positive");

  const double r = std::cbrt(xi);
  const double r2 = r * r;
  const int nodes = resolution + 1;
  const double h = 2.0 * r / resolution;
  std::vector<double> coord(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) coord[static_cast<std::size_t>(k)] = -r + k * h;
  coord[static_cast<std::size_t>(nodes - 1)] = r;

  // The quadratic model is separable: tabulate each axis once.
  std::vector<std::vector<double>> q(static_cast<std::size_t>(d), std::vector<double>(coord.size()));
  for (Eigen::Index i = 0; i < d; ++i)
    for (std::size_t k = 0; k < coord.size(); ++k)
      q[i][k] = g[i] * coord[k] + 0.5 * b[i] * coord[k] * coord[k];

  auto model = [&](const Vector& s) { return g.dot(s) + 0.5 * s.dot(b.cwiseProduct(s)); };

  Vector best = Vector::Zero(d);
  double best_val = 0.0;  // s = 0 is always feasible
  std::array<std::size_t, 3> idx{};
  const std::size_t n = coord.size();
  const std::size_t n1 = d > 1 ? n : 1;
  const std::size_t n2 = d > 2 ? n : 1;
  for (idx[0] = 0; idx[0] < n; ++idx[0]) {
    const double c0 = coord[idx[0]] * coord[idx[0]];
    if (c0 > r2) continue;
    for (idx[1] = 0; idx[1] < n1; ++idx[1]) {
      const double c1 = d > 1 ? c0 + coord[idx[1]] * coord[idx[1]] : c0;
      if (c1 > r2) continue;
      const double v01 = q[0][idx[0]] + (d > 1 ? q[1][idx[1]] : 0.0);
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        if (d > 2 && c1 + coord[idx[2]] * coord[idx[2]] > r2) continue;
        const double v = v01 + (d > 2 ? q[2][idx[2]] : 0.0);
        if (v < best_val) {
          best_val = v;
          for (Eigen::Index i = 0; i < d; ++i) best[i] = coord[idx[static_cast<std::size_t>(i)]];
        }
      }
    }
  }

  // Projected gradient with step 1/L decreases the model monotonically.
  auto project = [&](Vector s) {
    const double nrm = s.norm();
    if (nrm > r) s *= r / nrm;
    return s;
  };
  const double lipschitz = b.cwiseAbs().maxCoeff();
  if (lipschitz > 0.0) {
    const double step = 1.0 / lipschitz;
    Vector s = best;
    for (int it = 0; it < 200000; ++it) {
      Vector next = project(s - step * (g + b.cwiseProduct(s)));
      const double change = (next - s).cwiseAbs().maxCoeff();
      s = std::move(next);
      if (change <= 1e-15 * (1.0 + r)) break;
    }
    if (model(s) <= best_val) best = s;
  } else if (g.norm() > 0.0) {
    best = -r * g / g.norm();  // linear model: steepest boundary point
  }
  return best;
}

}  // namespace adacubic
