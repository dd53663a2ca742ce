#pragma once

#include <functional>

#include "vrcd/linalg.hpp"

namespace vrcd {

// Prox of the indicator of Range(P): orthogonal projection.
Vector project_subspace(const Matrix& projector, const Vector& x);

// Prox of the indicator of {anchor + Range(P)}.
Vector project_affine_subspace(const Matrix& projector, const Vector& anchor, const Vector& x);

// Exact Euclidean projection onto {‖·‖ <= radius} ∩ Range(P); valid because
// radial scaling preserves Range(P). Requires the subspace through the origin.
Vector project_ball_subspace(const Matrix& projector, double radius, const Vector& x);

// Indicator of the ball of radius `radius` intersected with
// Range(projector). prox output y satisfies Py = y and ‖y‖ <= radius.
struct SubspaceBallRegularizer {
  Matrix projector;
  double radius = 1.0;

  Vector prox(const Vector& x) const { return project_ball_subspace(projector, radius, x); }
};

}  // namespace vrcd
