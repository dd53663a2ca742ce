#include "vrcd/prox.hpp"

namespace vrcd {

Vector project_subspace(const Matrix& projector, const Vector& x) {
  return projector * x;
}

Vector project_affine_subspace(const Matrix& projector, const Vector& anchor, const Vector& x) {
  return anchor + projector * (x - anchor);
}

Vector project_ball_subspace(const Matrix& projector, double radius, const Vector& x) {
  Vector y = projector * x;
  const double norm = y.norm();
  if (norm <= radius || norm == 0.0) return y;
  return (radius / norm) * y;
}

}  // namespace vrcd
