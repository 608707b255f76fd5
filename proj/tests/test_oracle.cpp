#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adacubic/errors.hpp"
#include "adacubic/oracle.hpp"

using namespace adacubic;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_vector(Rng& rng, Eigen::Index d, double scale) {
  Vector v(d);
  for (auto& x : v) x = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

// Second derivatives of 100 (y - x^2)^2 + (1 - x)^2, by hand.
Matrix rosenbrock_hessian_2d(double x, double y) {
  Matrix h(2, 2);
  h << 1200.0 * x * x - 400.0 * y + 2.0, -400.0 * x, -400.0 * x, 200.0;
  return h;
}

ObjectivePtr small_logistic() {
  const auto data = make_synthetic_logistic_data(30, 4, 0.3, 5);
  return make_logistic(data.features, data.labels, 0.05);
}

}  // namespace

TEST_CASE("finite_difference_hvp examples") {
  const auto q = make_quadratic(vec({1, 2}), vec({0, 0}));
  for (double h : {1e-3, 1e-6, 0.5}) {
    const Vector hv = finite_difference_hvp(*q, vec({0.3, -2}), vec({1, 1}), h, Batch::full());
    CHECK(hv[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hv[1] == doctest::Approx(2.0).epsilon(1e-9));
  }

  const auto rb = make_rosenbrock(2);
  const Vector hv = finite_difference_hvp(*rb, vec({1, 1}), vec({1, 0}), 1e-5, Batch::full());
  const Matrix h = rosenbrock_hessian_2d(1.0, 1.0);
  CHECK(std::abs(hv[0] - h(0, 0)) <= 1e-3);
  CHECK(std::abs(hv[1] - h(1, 0)) <= 1e-3);
  CHECK(h(0, 0) == 802.0);
  CHECK(h(1, 0) == -400.0);

  const Vector z = finite_difference_hvp(*rb, vec({0.2, 0.7}), Vector::Zero(2), Batch::full());
  CHECK(z.norm() == 0.0);
  CHECK_THROWS_AS(finite_difference_hvp(*rb, vec({0.2, 0.7}), vec({1, 0}), 0.0, Batch::full()), ConfigError);
}

TEST_CASE("built-in objectives: values, gradients, diagonals") {
  const auto q = make_quadratic(vec({1, 2}), vec({0, 0}));
  const Vector gq = q->grad(vec({1, 1}));
  CHECK(gq[0] == 1.0);
  CHECK(gq[1] == 2.0);
  CHECK(q->eval(vec({1, 1})) == doctest::Approx(1.5));

  const auto s = make_saddle();
  CHECK(s->grad(vec({0, 0})).norm() == 0.0);
  const Vector ds = *s->exact_diag_hessian(vec({0, 0}));
  CHECK(ds[0] == 1.0);
  CHECK(ds[1] == -1.0);
  CHECK(s->eval(vec({0, 1})) == doctest::Approx(-0.25));
  CHECK(s->grad(vec({0, -1})).norm() == doctest::Approx(0.0));

  const auto rb = make_rosenbrock(2);
  CHECK(rb->eval(vec({1, 1})) == 0.0);
  CHECK(rb->eval(vec({-1.2, 1})) == doctest::Approx(24.2));
  const Vector dr = *rb->exact_diag_hessian(vec({0.5, -0.3}));
  const Matrix hr = rosenbrock_hessian_2d(0.5, -0.3);
  CHECK(dr[0] == doctest::Approx(hr(0, 0)));
  CHECK(dr[1] == doctest::Approx(hr(1, 1)));

  CHECK_THROWS_AS(make_rosenbrock(1), ConfigError);
  CHECK_THROWS_AS(make_quadratic(vec({1, 2}), vec({1})), ConfigError);
  CHECK_THROWS(q->eval(vec({1, 2, 3})));
}

TEST_CASE("deterministic objectives refuse mini-batches") {
  const auto q = make_quadratic(vec({1, 2}), vec({0, 0}));
  CHECK(q->num_samples() == 0);
  CHECK_THROWS_AS(q->eval(vec({1, 1}), Batch::of({0})), ConfigError);
}

TEST_CASE("analytic HVPs agree with finite differences") {
  Rng rng(11);
  std::vector<std::pair<ObjectivePtr, double>> problems{
      {make_quadratic(vec({1, -2, 3}), vec({0.5, 0, -1})), 2.0},
      {make_rosenbrock(4), 1.5},
      {make_saddle(), 2.0},
      {small_logistic(), 2.0},
  };
  for (const auto& [obj, scale] : problems) {
    const auto d = static_cast<Eigen::Index>(obj->dim());
    for (int k = 0; k < 20; ++k) {
      const Vector x = random_vector(rng, d, scale);
      const Vector v = random_vector(rng, d, 1.0);
      const Vector hv = obj->hvp(x, v);
      const Vector fd = finite_difference_hvp(*obj, x, v, Batch::full());
      INFO(obj->name());
      CHECK((hv - fd).norm() <= std::max(1e-6, 1e-4 * hv.norm()));
    }
  }
}

TEST_CASE("hvp is linear in the direction") {
  Rng rng(12);
  for (const auto& obj : {make_rosenbrock(3), small_logistic()}) {
    const auto d = static_cast<Eigen::Index>(obj->dim());
    const Vector x = random_vector(rng, d, 1.0);
    const Vector u = random_vector(rng, d, 1.0), w = random_vector(rng, d, 1.0);
    const double a = 0.7, b = -1.9;
    const Vector lhs = obj->hvp(x, a * u + b * w);
    const Vector rhs = a * obj->hvp(x, u) + b * obj->hvp(x, w);
    CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("logistic: singleton batches average to the full batch") {
  const auto obj = small_logistic();
  Rng rng(13);
  const Vector x = random_vector(rng, 4, 1.0);
  const Vector v = random_vector(rng, 4, 1.0);
  Vector g = Vector::Zero(4), hv = Vector::Zero(4);
  double f = 0.0;
  for (std::size_t i = 0; i < obj->num_samples(); ++i) {
    const auto b = Batch::of({i});
    f += obj->eval(x, b);
    g += obj->grad(x, b);
    hv += obj->hvp(x, v, b);
  }
  const double n = static_cast<double>(obj->num_samples());
  CHECK(std::abs(f / n - obj->eval(x)) <= 1e-12 * std::abs(obj->eval(x)));
  CHECK((g / n - obj->grad(x)).norm() <= 1e-12 * obj->grad(x).norm());
  CHECK((hv / n - obj->hvp(x, v)).norm() <= 1e-12 * obj->hvp(x, v).norm());
}

TEST_CASE("logistic diagonal matches Hessian columns") {
  const auto obj = small_logistic();
  const Vector x = vec({0.3, -0.2, 0.5, 1.0});
  const Vector diag = *obj->exact_diag_hessian(x);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(diag[i] == doctest::Approx(obj->hvp(x, Vector::Unit(4, i))[i]).epsilon(1e-12));
  }
}

TEST_CASE("batches") {
  CHECK(Batch::full().is_full());
  CHECK(Batch::full().size(10) == 10);
  const auto b = Batch::of({3, 1});
  CHECK_FALSE(b.is_full());
  CHECK(b.size(10) == 2);
  CHECK_NOTHROW(b.validate(4));
  CHECK_THROWS_AS(b.validate(3), ConfigError);
  CHECK_THROWS_AS(Batch::of({1, 1}).validate(4), ConfigError);
  CHECK_THROWS_AS(Batch::of({}).validate(4), ConfigError);

  const auto obj = small_logistic();
  Rng r1(5), r2(5);
  const auto d1 = draw_batch(r1, *obj, 8), d2 = draw_batch(r2, *obj, 8);
  CHECK(d1.indices() == d2.indices());
  CHECK(d1.indices().size() == 8);
  CHECK(draw_batch(r1, *obj, std::nullopt).is_full());
  CHECK(draw_batch(r1, *obj, 30).is_full());
  const auto q = make_quadratic(vec({1}), vec({0}));
  CHECK(draw_batch(r1, *q, 2).is_full());
}

TEST_CASE("callback objectives fall back to finite differences") {
  ObjectiveCallbacks cb;
  cb.name = "cubic";
  cb.dim = 2;
  cb.eval = [](const Vector& x, const Batch&) { return x[0] * x[0] * x[0] + x[0] * x[1]; };
  cb.grad = [](const Vector& x, const Batch&) { return vec({3 * x[0] * x[0] + x[1], x[0]}); };
  const auto obj = make_objective(cb);
  const Vector hv = obj->hvp(vec({1, 2}), vec({1, 0}));
  CHECK(hv[0] == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(hv[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(obj->exact_diag_hessian(vec({1, 2})).has_value());

  ObjectiveCallbacks missing;
  missing.dim = 1;
  CHECK_THROWS_AS(make_objective(missing), ConfigError);
}

TEST_CASE("logistic CSV loader") {
  const auto path = std::filesystem::temp_directory_path() / "adacubic_test_logistic.csv";
  {
    std::ofstream f(path);
    f << "# toy data\nx1,x2,label\n1.0,2.0,1\n-0.5,0.25,-1\n3,4,+1\n";
  }
  const auto data = load_logistic_csv(path.string());
  CHECK(data.features.rows() == 3);
  CHECK(data.features.cols() == 2);
  CHECK(data.features(1, 1) == 0.25);
  CHECK(data.labels[1] == -1.0);
  CHECK(data.labels[2] == 1.0);

  {
    std::ofstream f(path);
    f << "1.0,2.0,0\n";
  }
  CHECK_THROWS_AS(load_logistic_csv(path.string()), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_logistic_csv(path.string()), ConfigError);
}

TEST_CASE("brute-force subproblem minimizer") {
  const Vector s1 = brute_force_subproblem_min(vec({1}), vec({2}), 1.0, 200);
  CHECK(s1[0] == doctest::Approx(-1.0).epsilon(1e-6));

  const Vector s0 = brute_force_subproblem_min(vec({1, 1}), vec({0, 0}), 1.0, 200);
  CHECK(s0.norm() <= 1e-9);

  const Vector sh = brute_force_subproblem_min(vec({-1, 2}), vec({0, 1}), 0.5, 200);
  CHECK(std::pow(sh.norm(), 3) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(sh[1] < 0.0);
  CHECK(std::abs(sh[0]) > 0.0);

  Rng rng(21);
  for (int k = 0; k < 30; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 3));
    const Vector b = random_vector(rng, d, 2.0), g = random_vector(rng, d, 1.0);
    const double xi = std::pow(10.0, -3.0 + 3.0 * uniform01(rng));
    const Vector s = brute_force_subproblem_min(b, g, xi, 200);
    CHECK(std::pow(s.norm(), 3) <= xi * (1.0 + 1e-9));
  }

  CHECK_THROWS_AS(brute_force_subproblem_min(Vector::Ones(4), Vector::Ones(4), 1.0, 200), UnsupportedDimension);
  CHECK_THROWS_AS(brute_force_subproblem_min(vec({1}), vec({1}), 1.0, 50), ConfigError);
}
