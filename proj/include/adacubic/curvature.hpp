#pragma once

#include <cstddef>
#include <functional>

#include "adacubic/random.hpp"
#include "adacubic/types.hpp"

namespace adacubic {

/// Estimate b of diag(H); B = Diag(b).
struct DiagonalCurvature {
  Vector b;
  int samples_used = 0;
};

/// Entries exactly +-1.
struct RademacherVector {
  Vector v;
};

using HvpFunction = std::function<Vector(const Vector&)>;

/// i.i.d. signs, one generator draw per entry.
RademacherVector rademacher_vector(Rng& rng, std::size_t d);

/// Hutchinson estimate b = (1/S) sum_s H(v_s) (.) v_s over `samples` fresh
/// Rademacher probes. Accumulation runs in probe order so results depend only
/// on the generator state. Throws CurvatureError on non-finite products.
DiagonalCurvature hutchinson_diag(const HvpFunction& hvp, std::size_t d, int samples, Rng& rng);

/// Average of H(v) (.) v over all 2^d sign vectors; equals diag(H) exactly for
/// any symmetric H. Test utility, d <= 12.
DiagonalCurvature hutchinson_exhaustive(const HvpFunction& hvp, std::size_t d);

}  // namespace adacubic
