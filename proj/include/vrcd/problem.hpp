#pragma once

#include <functional>
#include <vector>

#include "vrcd/linalg.hpp"

namespace vrcd {

// Composite objective f(x) + psi(x) where psi carries an indicator of the
// affine set {anchor + Range(projector)} plus an optional finite part.
// Oracles are callables so that lifted problems never materialize the big
// matrix unless a caller asks for `smoothness` explicitly. Instances are
// immutable after construction and safe for concurrent read-only use.
struct CompositeProblem {
  int dim = 0;
  std::function<double(const Vector&)> f_value;
  std::function<Vector(const Vector&)> f_gradient;
  std::function<double(const Vector&, int)> f_partial;
  Matrix smoothness;             // M, symmetric PSD
  double strong_convexity = 0;   // mu over {anchor + Range(projector)}
  std::function<Vector(double, const Vector&)> prox;  // (stepsize, point)
  std::function<double(const Vector&)> psi_value;     // finite part of psi on feasible points
  Matrix projector;              // P, symmetric idempotent
  Vector anchor;                 // x0

  double objective(const Vector& x) const { return f_value(x) + psi_value(x); }
};

// f(x) = 0.5 x^T M x - b^T x
struct QuadraticInstance {
  Matrix m;
  Vector b;

  double value(const Vector& x) const { return 0.5 * x.dot(m * x) - b.dot(x); }
  Vector gradient(const Vector& x) const { return m * x - b; }
  double partial(const Vector& x, int i) const { return m.row(i).dot(x) - b[i]; }
};

enum class RegularizerKind { None, Subspace, BallSubspace };

struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::None;
  Matrix projector;   // ignored for None (identity assumed)
  double radius = 1.0;
  // Optional structured apply for the projector; falls back to the dense
  // matrix when unset. Used by the harness for block-averaging projectors.
  std::function<Vector(const Vector&)> projector_apply;

  static RegularizerSpec none(int dim);
  static RegularizerSpec subspace(Matrix projector);
  static RegularizerSpec ball_subspace(Matrix projector, double radius);
};

CompositeProblem make_composite(const QuadraticInstance& quad, const RegularizerSpec& reg);

// (1/n) sum_j f_j over R^dim with per-component oracles.
struct FiniteSumProblem {
  int components = 0;  // n
  int dim = 0;
  std::function<double(int, const Vector&)> component_value;
  std::function<Vector(int, const Vector&)> component_gradient;
  std::vector<Matrix> component_smoothness;
  double strong_convexity = 0;
  std::function<Vector(double, const Vector&)> prox;
  std::function<double(const Vector&)> psi_value;

  double f_value(const Vector& x) const;
  Vector f_gradient(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;  // dim x components
  double objective(const Vector& x) const { return f_value(x) + psi_value(x); }
};

struct QuadraticComponent {
  Matrix a;
  Vector b;
};

FiniteSumProblem make_finite_sum(std::vector<QuadraticComponent> parts, const RegularizerSpec& reg);

// n stacked copies of x.
Vector lift(const Vector& x, int copies);

// Mean over the n size-`dim` blocks of x.
Vector block_mean(const Vector& x, int copies);

// (1/n) (ee^T ⊗ I): block-constant averaging projector on R^{dim*copies}.
Matrix block_constant_projector(int copies, int block_dim);

// Product-space embedding: f(x) = (1/n) sum_j f_j(x_{R_j}) with the
// consensus-plus-psi regularizer, so finite-sum methods become coordinate
// methods on the result.
CompositeProblem build_product_problem(const FiniteSumProblem& fs);

// ESO vector of the product problem from the finite-sum one: the
// coordinate-space inequality holds (tightly) with v = v_hat / n^2 repeated
// across each size-`block_dim` block.
Vector product_eso_vector(const Vector& v_hat, int block_dim);

double bregman_distance(const std::function<double(const Vector&)>& f,
                        const std::function<Vector(const Vector&)>& grad,
                        const Vector& x, const Vector& y);

// Smallest eigenvalue of M restricted to Range(P): strong convexity of a
// quadratic over the feasible subspace.
double subspace_strong_convexity(const Matrix& m, const Matrix& projector);

}  // namespace vrcd
