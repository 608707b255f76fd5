#include "adacubic/curvature.hpp"

#include <string>

#include "adacubic/errors.hpp"

namespace adacubic {

namespace {

void accumulate(const HvpFunction& hvp, const Vector& v, Vector& sum) {
  const Vector hv = hvp(v);
  if (hv.size() != v.size()) throw CurvatureError("hutchinson: hvp returned wrong dimension");
  if (!hv.allFinite()) throw CurvatureError("hutchinson: hvp returned non-finite entries");
  sum += hv.cwiseProduct(v);
}

}  // namespace

RademacherVector rademacher_vector(Rng& rng, std::size_t d) {
  RademacherVector out{Vector(static_cast<Eigen::Index>(d))};
  for (auto& e : out.v) e = (rng() >> 63) != 0 ? 1.0 : -1.0;
  return out;
}

DiagonalCurvature hutchinson_diag(const HvpFunction& hvp, std::size_t d, int samples, Rng& rng) {
  if (samples < 1) throw ConfigError("hutchinson_diag: need at least one sample");
  if (d == 0) throw ConfigError("hutchinson_diag: d must be positive");
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(d));
  for (int s = 0; s < samples; ++s) accumulate(hvp, rademacher_vector(rng, d).v, sum);
  return {sum / static_cast<double>(samples), samples};
}

DiagonalCurvature hutchinson_exhaustive(const HvpFunction& hvp, std::size_t d) {
  if (d == 0 || d > 12) throw UnsupportedDimension("hutchinson_exhaustive: d must be 1..12");
  const std::size_t count = std::size_t{1} << d;
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(d));
  Vector v(static_cast<Eigen::Index>(d));
  for (std::size_t mask = 0; mask < count; ++mask) {
    for (std::size_t i = 0; i < d; ++i) v[static_cast<Eigen::Index>(i)] = (mask >> i) & 1U ? -1.0 : 1.0;
    accumulate(hvp, v, sum);
  }
  return {sum / static_cast<double>(count), static_cast<int>(count)};
}

}  // namespace adacubic
