#pragma once

#include <functional>
#include <vector>

#include "vrcd/problem.hpp"
#include "vrcd/sampling.hpp"

namespace vrcd::gjs {

using MatrixMap = std::function<Matrix(const Matrix&)>;

// One joint realization of the random projector and the unbiased sketch;
// the two are coupled through the underlying subset draw.
struct SketchOutcome {
  double prob = 0;
  MatrixMap projector;  // idempotent per realization
  MatrixMap sketch;     // identity in expectation
  std::vector<int> index_set;
};

struct SketchPair {
  int rows = 0;  // d
  int cols = 0;  // n
  std::vector<SketchOutcome> outcomes;

  int draw_index(Rng& rng) const;
};

// Row sampling: projector keeps rows in S, sketch scales them by 1/p_i.
// With cols == 1 this specializes the framework to the coordinate method.
SketchPair row_sketch_pair(const BlockSampler& sampler, int cols);

// Column sampling over component subsets: projector keeps columns in S,
// sketch scales them by 1/p_j. Specializes to the finite-sum methods.
SketchPair column_sketch_pair(const BlockSampler& component_sampler, int rows);

struct GjsProblem {
  int dim = 0;         // d
  int components = 1;  // n
  std::function<Matrix(const Vector&)> jacobian;  // G(x), dim x components
  std::function<Vector(double, const Vector&)> prox;
};

GjsProblem adapt(const CompositeProblem& problem);
GjsProblem adapt(const FiniteSumProblem& fs);

struct GjsState {
  Vector x;
  Matrix jac;  // J, dim x components
  double alpha = 0;
};
GjsState make_gjs_state(const GjsProblem& problem, double alpha);

// g = (1/n) J e + (1/n) U(G(x) - J) e, built from the pre-update J.
Vector gjs_estimator(const GjsProblem& problem, const GjsState& state, const Matrix& jac_x,
                     const MatrixMap& sketch);

// J <- J - S(J - G(x)); x <- prox(alpha, x - alpha g).
void gjs_step(GjsState& state, const GjsProblem& problem, const SketchOutcome& outcome);

// Dense representation of a linear map on d x n matrices acting on
// column-major vec(X); used to check the stepsize conditions exactly.
Matrix operator_matrix(const MatrixMap& map, int rows, int cols);

// Per-column pseudo-inverse square root: (col j) -> M_j^{†/2} X_{:,j}.
MatrixMap column_pinv_sqrt_map(const std::vector<Matrix>& col_smoothness);

struct ConditionReport {
  bool ok = false;
  double slack_contraction = 0;  // condition paired with (I - E[S])^{1/2}
  double slack_residual = 0;     // condition paired with E[S]^{1/2}
};

// Exact check of the two stepsize conditions over every test matrix X, with
// the diagonal weight operator diag(weights) composed with the per-column
// pseudo-inverse root. Both sides are quadratic forms in vec(X); the check
// is PSD-ness of their difference.
ConditionReport check_gjs_conditions(const SketchPair& pair,
                                     const std::vector<Matrix>& col_smoothness,
                                     const Matrix& projector, const Vector& weights,
                                     double stepsize, double strong_convexity);

// Exact-enumeration check of the estimator variance bound
// E‖g - ∇f(x*)‖²_Q <= (2/n²) E‖U(G(x)-G(x*))e‖²_Q + (2/n²) E‖U(J-G(x*))e‖²_Q.
bool variance_bound_check(const SketchPair& pair, const Matrix& jac_x, const Matrix& jac_star,
                          const Matrix& jac_estimate, const Matrix& q_weight, double tol = 1e-10,
                          double* worst_slack = nullptr);

bool sketch_unbiased(const SketchPair& pair, double tol = 1e-12);
bool projector_idempotent(const SketchPair& pair, double tol = 1e-12);
bool commutes_with_projector(const SketchPair& pair, const MatrixMap& map, double tol = 1e-10);

}  // namespace vrcd::gjs
