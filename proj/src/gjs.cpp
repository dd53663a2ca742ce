#include "vrcd/gjs.hpp"

#include <limits>
#include <stdexcept>

namespace vrcd::gjs {

int SketchPair::draw_index(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    acc += outcomes[k].prob;
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(outcomes.size()) - 1;
}

SketchPair row_sketch_pair(const BlockSampler& sampler, int cols) {
  SketchPair pair;
  pair.rows = sampler.dimension();
  pair.cols = cols;
  const Vector p = sampler.marginals();
  for (const auto& outcome : sampler.enumerate_outcomes()) {
    SketchOutcome out;
    out.prob = outcome.prob;
    out.index_set = outcome.coords;
    auto coords = outcome.coords;
    out.projector = [coords](const Matrix& x) {
      Matrix y = Matrix::Zero(x.rows(), x.cols());
      for (int i : coords) y.row(i) = x.row(i);
      return y;
    };
    out.sketch = [coords, p](const Matrix& x) {
      Matrix y = Matrix::Zero(x.rows(), x.cols());
      for (int i : coords) y.row(i) = x.row(i) / p[i];
      return y;
    };
    pair.outcomes.push_back(std::move(out));
  }
  return pair;
}

SketchPair column_sketch_pair(const BlockSampler& component_sampler, int rows) {
  SketchPair pair;
  pair.rows = rows;
  pair.cols = component_sampler.dimension();
  const Vector p = component_sampler.marginals();
  for (const auto& outcome : component_sampler.enumerate_outcomes()) {
    SketchOutcome out;
    out.prob = outcome.prob;
    out.index_set = outcome.coords;
    auto coords = outcome.coords;
    out.projector = [coords](const Matrix& x) {
      Matrix y = Matrix::Zero(x.rows(), x.cols());
      for (int j : coords) y.col(j) = x.col(j);
      return y;
    };
    out.sketch = [coords, p](const Matrix& x) {
      Matrix y = Matrix::Zero(x.rows(), x.cols());
      for (int j : coords) y.col(j) = x.col(j) / p[j];
      return y;
    };
    pair.outcomes.push_back(std::move(out));
  }
  return pair;
}

GjsProblem adapt(const CompositeProblem& problem) {
  GjsProblem out;
  out.dim = problem.dim;
  out.components = 1;
  auto grad = problem.f_gradient;
  out.jacobian = [grad](const Vector& x) { return Matrix(grad(x)); };
  out.prox = problem.prox;
  return out;
}

GjsProblem adapt(const FiniteSumProblem& fs) {
  GjsProblem out;
  out.dim = fs.dim;
  out.components = fs.components;
  auto shared = fs;
  out.jacobian = [shared](const Vector& x) { return shared.jacobian(x); };
  out.prox = fs.prox;
  return out;
}

GjsState make_gjs_state(const GjsProblem& problem, double alpha) {
  GjsState state;
  state.x = Vector::Zero(problem.dim);
  state.jac = Matrix::Zero(problem.dim, problem.components);
  state.alpha = alpha;
  return state;
}

Vector gjs_estimator(const GjsProblem& problem, const GjsState& state, const Matrix& jac_x,
                     const MatrixMap& sketch) {
  const int n = problem.components;
  Vector g = state.jac.rowwise().sum() / n;
  g += sketch(jac_x - state.jac).rowwise().sum() / n;
  return g;
}

void gjs_step(GjsState& state, const GjsProblem& problem, const SketchOutcome& outcome) {
  const Matrix jac_x = problem.jacobian(state.x);
  const Vector g = gjs_estimator(problem, state, jac_x, outcome.sketch);
  state.jac -= outcome.projector(state.jac - jac_x);
  state.x = problem.prox(state.alpha, state.x - state.alpha * g);
}

Matrix operator_matrix(const MatrixMap& map, int rows, int cols) {
  const int dim = rows * cols;
  Matrix rep(dim, dim);
  Matrix basis = Matrix::Zero(rows, cols);
  for (int b = 0; b < cols; ++b) {
    for (int a = 0; a < rows; ++a) {
      basis(a, b) = 1.0;
      Matrix image = map(basis);
      rep.col(b * rows + a) = Eigen::Map<const Vector>(image.data(), dim);
      basis(a, b) = 0.0;
    }
  }
  return rep;
}

MatrixMap column_pinv_sqrt_map(const std::vector<Matrix>& col_smoothness) {
  std::vector<Matrix> roots;
  roots.reserve(col_smoothness.size());
  for (const auto& m : col_smoothness) roots.push_back(psd_pinv_sqrt(m));
  return [roots](const Matrix& x) {
    Matrix y(x.rows(), x.cols());
    for (int j = 0; j < x.cols(); ++j) y.col(j) = roots[j % roots.size()] * x.col(j);
    return y;
  };
}

ConditionReport check_gjs_conditions(const SketchPair& pair,
                                     const std::vector<Matrix>& col_smoothness,
                                     const Matrix& projector, const Vector& weights,
                                     double stepsize, double strong_convexity) {
  const int d = pair.rows;
  const int n = pair.cols;
  const int dim = d * n;
  if (static_cast<int>(col_smoothness.size()) != n || weights.size() != d) {
    throw std::invalid_argument("check_gjs_conditions: dimension mismatch");
  }

  // vec-reps of the constituent linear maps
  MatrixMap pinv_root = column_pinv_sqrt_map(col_smoothness);
  MatrixMap weighted = [&](const Matrix& x) {
    return Matrix(weights.asDiagonal() * pinv_root(x));
  };
  const Matrix rep_weighted = operator_matrix(weighted, d, n);
  const Matrix rep_root = operator_matrix(
      [&](const Matrix& x) { return pinv_root(x); }, d, n);

  Matrix expected_proj = Matrix::Zero(dim, dim);
  Matrix sketch_quad = Matrix::Zero(dim, dim);  // quadratic form of E‖U X e‖²_P
  Matrix basis = Matrix::Zero(d, n);
  Matrix images(d, dim);  // columns: U_w(E_ab) e for the current outcome
  for (const auto& outcome : pair.outcomes) {
    expected_proj += outcome.prob * operator_matrix(outcome.projector, d, n);
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < d; ++a) {
        basis(a, b) = 1.0;
        images.col(b * d + a) = outcome.sketch(basis).rowwise().sum();
        basis(a, b) = 0.0;
      }
    }
    sketch_quad += outcome.prob * images.transpose() * projector * images;
  }
  expected_proj = symmetrize(expected_proj);
  sketch_quad = symmetrize(sketch_quad);

  const double scale = 2.0 * stepsize / (static_cast<double>(n) * n);
  const Matrix identity = Matrix::Identity(dim, dim);

  const Matrix lhs1 =
      scale * sketch_quad + rep_weighted.transpose() * (identity - expected_proj) * rep_weighted;
  const Matrix rhs1 =
      (1.0 - stepsize * strong_convexity) * rep_weighted.transpose() * rep_weighted;

  const Matrix lhs2 =
      scale * sketch_quad + rep_weighted.transpose() * expected_proj * rep_weighted;
  const Matrix rhs2 = (1.0 / n) * rep_root.transpose() * rep_root;

  ConditionReport report;
  report.slack_contraction = smallest_eigenvalue(symmetrize(rhs1 - lhs1));
  report.slack_residual = smallest_eigenvalue(symmetrize(rhs2 - lhs2));
  report.ok = report.slack_contraction >= -1e-10 && report.slack_residual >= -1e-10;
  return report;
}

bool variance_bound_check(const SketchPair& pair, const Matrix& jac_x, const Matrix& jac_star,
                          const Matrix& jac_estimate, const Matrix& q_weight, double tol,
                          double* worst_slack) {
  const int n = pair.cols;
  const Vector grad_star = jac_star.rowwise().sum() / n;
  const Vector anchor = jac_estimate.rowwise().sum() / n;
  double lhs = 0;
  double rhs = 0;
  for (const auto& outcome : pair.outcomes) {
    const Vector g = anchor + outcome.sketch(jac_x - jac_estimate).rowwise().sum() / n;
    const Vector diff = g - grad_star;
    lhs += outcome.prob * diff.dot(q_weight * diff);

    const Vector a = outcome.sketch(jac_x - jac_star).rowwise().sum() / n;
    const Vector b = outcome.sketch(jac_estimate - jac_star).rowwise().sum() / n;
    rhs += outcome.prob * 2.0 * (a.dot(q_weight * a) + b.dot(q_weight * b));
  }
  const double slack = rhs + tol - lhs;
  if (worst_slack) *worst_slack = slack;
  return slack >= 0;
}

bool sketch_unbiased(const SketchPair& pair, double tol) {
  const int dim = pair.rows * pair.cols;
  Matrix expectation = Matrix::Zero(dim, dim);
  for (const auto& outcome : pair.outcomes) {
    expectation += outcome.prob * operator_matrix(outcome.sketch, pair.rows, pair.cols);
  }
  return (expectation - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() <= tol;
}

bool projector_idempotent(const SketchPair& pair, double tol) {
  Matrix basis = Matrix::Zero(pair.rows, pair.cols);
  for (const auto& outcome : pair.outcomes) {
    for (int b = 0; b < pair.cols; ++b) {
      for (int a = 0; a < pair.rows; ++a) {
        basis(a, b) = 1.0;
        const Matrix once = outcome.projector(basis);
        if ((outcome.projector(once) - once).cwiseAbs().maxCoeff() > tol) return false;
        basis(a, b) = 0.0;
      }
    }
  }
  return true;
}

bool commutes_with_projector(const SketchPair& pair, const MatrixMap& map, double tol) {
  Matrix basis = Matrix::Zero(pair.rows, pair.cols);
  for (const auto& outcome : pair.outcomes) {
    for (int b = 0; b < pair.cols; ++b) {
      for (int a = 0; a < pair.rows; ++a) {
        basis(a, b) = 1.0;
        const Matrix left = map(outcome.projector(basis));
        const Matrix right = outcome.projector(map(basis));
        if ((left - right).cwiseAbs().maxCoeff() > tol) return false;
        basis(a, b) = 0.0;
      }
    }
  }
  return true;
}

}  // namespace vrcd::gjs
